"""Zeta functions of smooth projective hypersurfaces by p-adic deformation."""

__version__ = "0.1.0"
