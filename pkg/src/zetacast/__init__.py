"""Zeta-corrected inflation forecasting toolkit."""

__version__ = "0.1.0"
