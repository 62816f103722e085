"""Exact strata sums for compactified universal Jacobians over stable curves."""

__version__ = "0.1.0"
ENGINE_VERSION = "jacstrata-1"
