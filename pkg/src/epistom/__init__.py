"""Bayesian theory-of-mind evaluation of epistemic statements in a keys-and-doors gridworld."""

__version__ = "0.1.0"
