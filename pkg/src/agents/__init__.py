"""
Double deep Q-network agent, random-search baseline, checkpoints and the training loop.
"""
