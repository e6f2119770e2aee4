"""Spectra of hyperbolic tubes, cusps, flat tori, thick-part graphs and glued radial models."""

from .geometry import CuspModel, ManifoldParams, MargulisTube, Shell, TorusLattice

__all__ = ["CuspModel", "ManifoldParams", "MargulisTube", "Shell", "TorusLattice"]
__version__ = "0.1.0"
