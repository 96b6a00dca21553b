"""
Variational cost functions, eigen readout and fixed-structure ansatz baselines.
"""
