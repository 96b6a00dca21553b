"""
Experiment configuration and environment settings.
"""
