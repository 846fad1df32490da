"""Collective-critique story refinement toolkit."""

__version__ = "0.1.0"
