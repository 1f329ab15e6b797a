"""Crank-Nicolson solver for the two-sided tempered fractional diffusion equation

    u_t = c_l DL u + c_r DR u + f(x, t),   a < x < b,  0 < t <= T,

with Dirichlet data u(a, t) = phi_l(t), u(b, t) = phi_r(t).

On the interior nodes the left operator is ``B / h^alpha`` with ``B`` the
lower Hessenberg Toeplitz matrix of the weights; the right operator uses the
transpose of its own ``B``.  Each step solves

    (I - tau/2 A) U^{j+1} = (I + tau/2 A) U^j + tau (f^j + f^{j+1})/2 + boundary lift,

where ``A = (c_l B_l + c_r B_r^T) / h^alpha``.  The matrix is factorized once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from . import _kernels
from .errors import DomainError, SingularSystemError, StabilityWarning
from .stability import generating_function, scan_points, NEGATIVE_TOL
from .tempered_ops import GridFn, OperatorWeights, build_weights


def _zero(t):
    return 0.0


@dataclass
class DiffusionProblem:
    alpha: float
    c_l: float
    c_r: float
    lambda_l: float
    lambda_r: float | None = None
    initial: Callable = None
    source: Callable | None = None
    phi_l: Callable = _zero
    phi_r: Callable = _zero
    a: float = 0.0
    b: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if self.lambda_r is None:
            self.lambda_r = self.lambda_l
        if not 1.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (1, 2), got {self.alpha}")
        if self.c_l + self.c_r == 0:
            raise DomainError("c_l + c_r must be nonzero")
        if self.lambda_l < 0 or self.lambda_r < 0:
            raise DomainError("tempering rates must be non-negative")
        if not self.b > self.a:
            raise DomainError(f"empty interval [{self.a}, {self.b}]")
        if not self.T > 0:
            raise DomainError(f"final time must be positive, got {self.T}")
        if self.initial is None:
            raise DomainError("an initial value is required")
        # the operators see nothing beyond the domain, so the boundary a
        # one-sided operator reaches into has to carry zero data
        ts = np.linspace(0.0, self.T, 5)
        if self.c_l != 0 and any(self.phi_l(t) != 0 for t in ts):
            raise DomainError("c_l != 0 requires homogeneous data at the left boundary")
        if self.c_r != 0 and any(self.phi_r(t) != 0 for t in ts):
            raise DomainError("c_r != 0 requires homogeneous data at the right boundary")

    @classmethod
    def from_case(cls, case, **overrides):
        """Problem for a diffusion ``ManufacturedCase`` from :mod:`tempered_wsgd.mms`."""
        if case.kind != "diffusion":
            raise DomainError(f"{case.name} is not a diffusion case")
        p = case.params
        kw = dict(
            alpha=case.alpha,
            c_l=p["c_l"],
            c_r=p["c_r"],
            lambda_l=p["lambda_l"],
            lambda_r=p["lambda_r"],
            initial=lambda x: case.exact(x, 0.0),
            source=case.source,
            phi_l=lambda t: float(case.exact(0.0, t)),
            phi_r=lambda t: float(case.exact(1.0, t)),
            T=p.get("T", 1.0),
        )
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class SchemeMatrix:
    """Dense ``B`` with ``B[i, j] = g[i-j+1]`` (zero above the superdiagonal), ``g1 - phi`` on the diagonal."""

    matrix: np.ndarray = field(repr=False)
    weights: OperatorWeights = field(repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def scheme_matrix(w: OperatorWeights, size: int) -> SchemeMatrix:
    if size < 1:
        raise DomainError(f"matrix size must be positive, got {size}")
    if w.n < size:
        raise DomainError(f"weights built to n={w.n}, need n >= {size}")
    B = _kernels.hessenberg_toeplitz(w.g, w.phi, size)
    B.setflags(write=False)
    return SchemeMatrix(B, w)


@dataclass
class Assembly:
    """Everything the time stepper needs for one (problem, order, M, free parameter)."""

    order: int
    M: int
    h: float
    left: SchemeMatrix
    right: SchemeMatrix
    operator: np.ndarray = field(repr=False)
    lift_l: np.ndarray = field(repr=False)
    lift_r: np.ndarray = field(repr=False)
    warnings: list = field(default_factory=list)


def boundary_lift(wl: OperatorWeights, wr: OperatorWeights, c_l: float, c_r: float, M: int):
    """Columns multiplying the boundary values in the interior equations.

    The left stencil at node i reaches u_0 through ``g_{i+1}``, and u_M
    through ``g_0`` at i = M-1; the right stencil mirrors this.
    """
    i = np.arange(1, M)
    lift_l = c_l * wl.g[i + 1]
    lift_r = c_r * wr.g[M - i + 1]
    lift_l[0] += c_r * wr.g[0]
    lift_r[-1] += c_l * wl.g[0]
    scale = wl.h**wl.alpha
    return lift_l / scale, lift_r / scale


def stability_note(w: OperatorWeights, c: float, M: int, side: str):
    if c == 0:
        return None
    f_max = float(generating_function(w, scan_points(4096), n_terms=M).max())
    if f_max < -NEGATIVE_TOL:
        return None
    return (
        f"generating function of the {side} operator is not negative (max {f_max:.3e}) "
        f"for order {w.order}, alpha={w.alpha}, lambda={w.lam}, free parameter {w.family.free_param}"
    )


def assemble(order: int, prob: DiffusionProblem, M: int, free_param: float, check_stability: bool = True) -> Assembly:
    """Build the scheme matrices, the spatial operator and the boundary lift.

    When the generating-function scan does not certify negativity a
    :class:`StabilityWarning` is issued and recorded in ``warnings``; the
    solve still proceeds.
    """
    if M < 4:
        raise DomainError(f"need M >= 4, got {M}")
    h = (prob.b - prob.a) / M
    wl = build_weights(order, prob.alpha, prob.lambda_l, h, free_param, M)
    wr = wl if prob.lambda_r == prob.lambda_l else build_weights(order, prob.alpha, prob.lambda_r, h, free_param, M)
    Bl = scheme_matrix(wl, M - 1)
    Br = Bl if wr is wl else scheme_matrix(wr, M - 1)
    A = (prob.c_l * Bl.matrix + prob.c_r * Br.matrix.T) / h**prob.alpha
    lift_l, lift_r = boundary_lift(wl, wr, prob.c_l, prob.c_r, M)
    notes = []
    if check_stability:
        for w, c, side in ((wl, prob.c_l, "left"), (wr, prob.c_r, "right")):
            msg = stability_note(w, c, M, side)
            if msg:
                warnings.warn(msg, StabilityWarning, stacklevel=2)
                notes.append(msg)
    return Assembly(order, M, h, Bl, Br, A, lift_l, lift_r, notes)


class CrankNicolson:
    """Time stepper for ``U' = A U + s(t)`` with a one-time LU factorization."""

    def __init__(self, operator: np.ndarray, tau: float):
        if tau == 0:
            raise DomainError("time step must be nonzero")
        n = operator.shape[0]
        half = 0.5 * tau * operator
        eye = np.eye(n)
        self.tau = float(tau)
        self.lhs = eye - half
        self.explicit = eye + half
        self.lu = factorize(self.lhs)

    def rhs(self, U, forcing):
        """Right-hand side for state ``U``; ``forcing`` is tau times the averaged source and lift."""
        return self.explicit @ U + forcing

    def step(self, U, forcing):
        return sla.lu_solve(self.lu, self.rhs(U, forcing), check_finite=False)


def factorize(A: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    d = np.abs(np.diag(lu))
    if not np.all(np.isfinite(d)) or d.min() <= np.finfo(float).eps * d.max() * A.shape[0]:
        raise SingularSystemError("Crank-Nicolson matrix is singular to working precision")
    return lu, piv


@dataclass
class SolveResult:
    grid: GridFn
    steps: int
    h: float
    tau: float
    history: list | None = None
    warnings: list = field(default_factory=list)

    @property
    def interior(self) -> np.ndarray:
        return self.grid.values[1:-1]


def solve(
    prob: DiffusionProblem,
    order: int,
    M: int,
    N: int,
    free_param: float,
    keep_history: bool = False,
    check_stability: bool = True,
) -> SolveResult:
    """March ``N`` steps of size ``T/N`` from the initial value on ``M`` intervals."""
    if N < 1:
        raise DomainError(f"need at least one time step, got N={N}")
    asm = assemble(order, prob, M, free_param, check_stability)
    tau = prob.T / N
    cn = CrankNicolson(asm.operator, tau)
    x = prob.a + asm.h * np.arange(M + 1)
    xi = x[1:-1]
    U = np.asarray(prob.initial(xi), dtype=float).copy()

    def full(t, U):
        return np.concatenate(([prob.phi_l(t)], U, [prob.phi_r(t)]))

    history = [full(0.0, U)] if keep_history else None
    src = prob.source
    f0 = np.asarray(src(xi, 0.0), dtype=float) if src is not None else np.zeros_like(xi)
    bl0, br0 = prob.phi_l(0.0), prob.phi_r(0.0)
    for j in range(N):
        t1 = (j + 1) * tau
        f1 = np.asarray(src(xi, t1), dtype=float) if src is not None else f0
        bl1, br1 = prob.phi_l(t1), prob.phi_r(t1)
        forcing = 0.5 * tau * (f0 + f1 + asm.lift_l * (bl0 + bl1) + asm.lift_r * (br0 + br1))
        U = cn.step(U, forcing)
        f0, bl0, br0 = f1, bl1, br1
        if keep_history:
            history.append(full(t1, U))
    grid = GridFn(prob.a, prob.b, full(prob.T, U))
    return SolveResult(grid, N, asm.h, tau, history, asm.warnings)
