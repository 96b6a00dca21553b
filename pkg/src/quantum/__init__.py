"""
Dense statevector and density-matrix simulation of small quantum circuits.
"""
