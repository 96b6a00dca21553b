"""
Pauli-string Hamiltonians, expectation values and the exact-diagonalization oracle.
"""
