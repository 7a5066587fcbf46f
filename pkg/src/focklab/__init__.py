"""Numerics for the Bargmann-Fock space: Gaussian quadrature, reproducing kernels, heat
flow, truncated Toeplitz operators, discretised Weyl quantisation, and the oscillatory
block symbols whose Toeplitz norms decay while their heat peaks grow.
"""
__version__ = "0.1.0"

from .errors import BudgetExceeded, FocklabError, InvalidArgument, ProjectionTailError, SymbolicOnly
from .fock import FockContext, Symbol, norm2a, normalized_kernel, repro_kernel
from .heat import HeatQuery, heat, heat_transform, quarter_bound_margin, semigroup_residual
from .numint import AdaptiveSpec, Box2n, QuadratureRule1D, hermite_rule, integrate_box, integrate_gaussian

__all__ = [
    "BudgetExceeded", "FocklabError", "InvalidArgument", "ProjectionTailError", "SymbolicOnly",
    "FockContext", "Symbol", "norm2a", "normalized_kernel", "repro_kernel",
    "HeatQuery", "heat", "heat_transform", "quarter_bound_margin", "semigroup_residual",
    "AdaptiveSpec", "Box2n", "QuadratureRule1D", "hermite_rule", "integrate_box", "integrate_gaussian",
]
