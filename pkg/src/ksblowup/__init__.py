"""Lower bounds for blow-up times in a fully parabolic chemotaxis system with
nonlinear diffusion, together with a finite-volume solver and numerical audits
of the underlying energy inequalities."""

from .bound import corollary_bound, lower_bound_integral
from .constants import BoundConstants, GnConstants, assemble_bound_constants
from .errors import KSError
from .exponents import DomainSpec, ExponentConfig, ModelParams, derive_exponents, exponents_for
from .field import Grid, State, make_grid, phi_measure
from .solver import SolverConfig, detect_blowup, simulate

__version__ = "0.1.0"

__all__ = [
    "BoundConstants", "DomainSpec", "ExponentConfig", "GnConstants", "Grid", "KSError",
    "ModelParams", "SolverConfig", "State", "assemble_bound_constants", "corollary_bound",
    "derive_exponents", "detect_blowup", "exponents_for", "lower_bound_integral", "make_grid",
    "phi_measure", "simulate",
]
