"""
The architecture-search environment: action codes, circuit encoding, legality,
rewards, random halting and the curriculum threshold.
"""
