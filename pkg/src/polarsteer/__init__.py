"""Simulation-steering workbench built on a neural surrogate of a
cell-polarization model."""

__version__ = "0.1.0"

from . import analysis, clustering, nn, oracle

__all__ = ["analysis", "clustering", "nn", "oracle", "__version__"]
