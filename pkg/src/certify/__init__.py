"""
Channel certification: Choi states, fidelity bounds and the VQSD-driven pipeline.
"""
