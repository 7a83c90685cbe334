"""Biorthogonal position bases, photon helicity sectors and Green functions
for free Klein-Gordon bosons and photons on a periodic momentum lattice."""

from .lattice import (ConfigField, LatticeMismatchError, MomentumLattice, SpectralField,
                      UnitSystem, ZeroModeError, analyze, build_lattice, synthesize)

__version__ = "0.1.0"

__all__ = ["ConfigField", "LatticeMismatchError", "MomentumLattice", "SpectralField",
           "UnitSystem", "ZeroModeError", "analyze", "build_lattice", "synthesize"]
