"""
RL-driven quantum architecture search for variational state diagonalization,
ground-state search and channel certification.
"""

__version__ = "0.1.0"
