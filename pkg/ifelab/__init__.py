"""
ifelab
Interaction-free and generalized interaction-free evolution checks for
bipartite quantum systems.
"""

__version__ = "0.1.0"
