"""Exact search for integrals of rational vector fields and internality verdicts."""

__version__ = "0.1.0"
