"""
Kraus noise channels, Pauli-transfer matrices and gate-noise fusion.
"""
