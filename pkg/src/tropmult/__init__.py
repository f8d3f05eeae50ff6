"""Exact multiplicities of rigid tropical curves by several independent methods."""

__version__ = "0.1.0"
