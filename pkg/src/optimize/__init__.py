"""
Budget-bounded continuous optimizers for circuit angles.
"""
