"""Exact computations for weighted Fermat Calabi-Yau threefolds."""

__version__ = "0.1.0"
