"""Causal-robustness lab for graph learners: CRCG generator, GNN trainer, R-CAM."""

__version__ = "0.1.0"
