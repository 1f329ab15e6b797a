"""Tempered weighted-shifted Grünwald difference operators and Crank-Nicolson
solvers for tempered fractional diffusion and Black-Scholes-type equations."""

from ._kernels import BACKEND
from .bs_solver import BSProblem, convection_stencil, solve_bs
from .diffusion_solver import DiffusionProblem, SolveResult, assemble, solve
from .errors import ConfigError, ConvergenceError, DomainError, PoleError, SingularSystemError, StabilityWarning
from .mms import ManufacturedCase, make_case
from .special import gamma_fn, gruenwald_weights
from .stability import bounds, scan_generating_function, symmetric_part_max_eigenvalue, weight_sign_report
from .tempered_ops import GridFn, OperatorWeights, apply_left, apply_right, build_weights
from .wsgd_coeffs import GammaFamily, gamma_order2, gamma_order3, order_condition_residuals

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BSProblem",
    "ConfigError",
    "ConvergenceError",
    "DiffusionProblem",
    "DomainError",
    "GammaFamily",
    "GridFn",
    "ManufacturedCase",
    "OperatorWeights",
    "PoleError",
    "SingularSystemError",
    "SolveResult",
    "StabilityWarning",
    "apply_left",
    "apply_right",
    "assemble",
    "bounds",
    "build_weights",
    "convection_stencil",
    "gamma_fn",
    "gamma_order2",
    "gamma_order3",
    "gruenwald_weights",
    "make_case",
    "order_condition_residuals",
    "scan_generating_function",
    "solve",
    "solve_bs",
    "symmetric_part_max_eigenvalue",
    "weight_sign_report",
]
