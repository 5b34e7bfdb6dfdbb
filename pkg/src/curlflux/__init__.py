"""Numerical machinery for Stokes identities of fields with measure-valued curl."""

__version__ = "0.1.0"
