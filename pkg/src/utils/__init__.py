"""
Logging helpers and per-seed episode logs.
"""
