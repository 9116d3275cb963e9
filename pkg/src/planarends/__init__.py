"""Balanced neck configurations and their first-order minimal surfaces."""

__version__ = "0.1.0"
