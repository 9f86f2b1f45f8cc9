"""Unstable Adams operations on p-local compact groups, computed at desk scale."""

__version__ = "0.1.0"
