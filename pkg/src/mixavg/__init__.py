"""Gaussian mixture model averaging for clustering.

Fits the closed-form GPCM family by EM over a grid of component counts,
keeps the models in Occam's window, and combines them either by averaging
(merged, aligned) posterior memberships or by averaging model parameters.
"""

__version__ = "0.1.0"
