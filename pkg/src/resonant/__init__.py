"""Resonant system of cubic NLS on R x T^d: lattice interactions, dynamics,
rectangle reductions and the cascade construction."""

__version__ = "0.1.0"
