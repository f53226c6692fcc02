"""Planar reduction of two-electron Coulomb scattering.

Submodules: specfun (special functions), monopole (Wu-Yang harmonics and
Berry phases), kinematics (pair-frame reduction), scatter (exact planar
Coulomb scattering and its ODE oracle), classical (Kepler orbits and
Monte-Carlo Rutherford), cli (command-line tables).
"""

from . import classical, kinematics, monopole, scatter, specfun
from .errors import DomainError, NonConvergenceError, PlanarPairError

__version__ = "0.1.0"

__all__ = ["classical", "kinematics", "monopole", "scatter", "specfun",
           "DomainError", "NonConvergenceError", "PlanarPairError"]
