"""Simulation and linting of composite-strategy estimands in two-arm trials."""

__version__ = "0.1.0"
