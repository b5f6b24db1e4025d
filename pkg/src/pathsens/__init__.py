"""Path-space sensitivity analysis for Langevin molecular dynamics."""

__version__ = "0.1.0"
