"""Tempered fractional Black-Scholes-type equation

    u_t + a u_x + b DL u + d DR u - p u = f(x, t),   B_d < x < B_u,  0 <= t < T,
    u(x, T) = S(x),   zero Dirichlet data,

solved backward from the terminal payoff with Crank-Nicolson in time, the
tempered-WSGD operators in space and a fourth-order stencil for ``u_x``.
With ``A = a C + (b B_l + d B_r^T) / h^alpha - p I`` and t_j = T - j tau,

    (I - tau/2 A) U^{j+1} = (I + tau/2 A) U^j - tau (f^j + f^{j+1}) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .diffusion_solver import CrankNicolson, SolveResult, stability_note, scheme_matrix
from .errors import DomainError
from .tempered_ops import GridFn, build_weights

BOUNDARY_MODES = ("one-sided", "zero")


@dataclass
class BSProblem:
    alpha: float
    a: float
    b: float
    d: float
    p: float
    lambda1: float
    lambda2: float | None = None
    terminal: Callable = None
    source: Callable | None = None
    B_d: float = 0.0
    B_u: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if self.lambda2 is None:
            self.lambda2 = self.lambda1
        if not 1.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (1, 2), got {self.alpha}")
        for name in ("b", "d", "p", "lambda1", "lambda2"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.b == 0 and self.d == 0:
            raise DomainError("at least one of b, d must be positive")
        if not self.B_u > self.B_d:
            raise DomainError(f"empty interval [{self.B_d}, {self.B_u}]")
        if not self.T > 0:
            raise DomainError(f"maturity must be positive, got {self.T}")
        if self.terminal is None:
            raise DomainError("a terminal payoff is required")

    @classmethod
    def from_case(cls, case, **overrides):
        """Problem for a Black-Scholes ``ManufacturedCase`` from :mod:`tempered_wsgd.mms`."""
        if case.kind != "black-scholes":
            raise DomainError(f"{case.name} is not a Black-Scholes case")
        q = case.params
        T = q["T"]
        kw = dict(
            alpha=case.alpha,
            a=q["a"],
            b=q["c_l"],
            d=q["c_r"],
            p=q["p"],
            lambda1=q["lambda_l"],
            lambda2=q["lambda_r"],
            terminal=lambda x: case.exact(x, T),
            source=case.source,
            T=T,
        )
        kw.update(overrides)
        return cls(**kw)


def convection_stencil(u: GridFn, i: int, boundary: str = "one-sided") -> float:
    """Fourth-order approximation of ``u_x`` at node ``i``.

    Interior nodes 2..M-2 use ``(8(u_{i+1} - u_{i-1}) - (u_{i+2} - u_{i-2})) / 12h``.
    At nodes 1 and M-1 the central formula needs a value outside the grid;
    ``boundary="zero"`` takes it as zero, ``"one-sided"`` switches to the
    fourth-order stencil ``(-3u_0 - 10u_1 + 18u_2 - 6u_3 + u_4) / 12h`` (and
    its mirror), which keeps fourth order for data that does not vanish
    smoothly outside the domain.
    """
    M = u.M
    if not 1 <= i <= M - 1:
        raise IndexError(f"node {i} outside 1..{M - 1}")
    if boundary not in BOUNDARY_MODES:
        raise DomainError(f"boundary must be one of {BOUNDARY_MODES}, got {boundary!r}")
    if M < 4:
        raise DomainError("the stencil needs at least 4 intervals")
    v, h = u.values, u.h
    if 2 <= i <= M - 2:
        return (8 * (v[i + 1] - v[i - 1]) - (v[i + 2] - v[i - 2])) / (12 * h)
    if boundary == "zero":
        ext = np.concatenate(([0.0], v, [0.0]))
        j = i + 1
        return (8 * (ext[j + 1] - ext[j - 1]) - (ext[j + 2] - ext[j - 2])) / (12 * h)
    if i == 1:
        return (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    return (3 * v[M] + 10 * v[M - 1] - 18 * v[M - 2] + 6 * v[M - 3] - v[M - 4]) / (12 * h)


def convection_matrix(M: int, h: float, boundary: str = "one-sided") -> np.ndarray:
    """``u_x`` on the interior unknowns, for zero boundary values."""
    if boundary not in BOUNDARY_MODES:
        raise DomainError(f"boundary must be one of {BOUNDARY_MODES}, got {boundary!r}")
    if M < 6:
        raise DomainError(f"need M >= 6, got {M}")
    n = M - 1
    C = np.zeros((n, n))
    r = np.arange(n)
    for off, c in ((1, 8.0), (-1, -8.0), (2, -1.0), (-2, 1.0)):
        ok = (r + off >= 0) & (r + off < n)
        C[r[ok], r[ok] + off] = c
    if boundary == "one-sided":
        C[0, :] = 0.0
        C[0, :4] = (-10.0, 18.0, -6.0, 1.0)
        C[-1, :] = 0.0
        C[-1, -4:] = (-1.0, 6.0, -18.0, 10.0)
    return C / (12 * h)


def solve_bs(
    prob: BSProblem,
    M: int,
    N: int,
    free_param: float,
    order: int = 3,
    boundary: str = "one-sided",
    keep_history: bool = False,
) -> SolveResult:
    """Solution at t = 0 after ``N`` backward steps on ``M`` intervals.

    The spatial operators use the integer-shift family (1, 0, -1, -2) for
    order 3.  ``warnings`` in the result lists generating-function scans that
    did not certify negativity; no stability theory backs this scheme, so
    they are advisory only.
    """
    if N < 1:
        raise DomainError(f"need at least one time step, got N={N}")
    h = (prob.B_u - prob.B_d) / M
    tau = prob.T / N
    wl = build_weights(order, prob.alpha, prob.lambda1, h, free_param, M)
    wr = wl if prob.lambda2 == prob.lambda1 else build_weights(order, prob.alpha, prob.lambda2, h, free_param, M)
    A = prob.a * convection_matrix(M, h, boundary)
    A += (prob.b * scheme_matrix(wl, M - 1).matrix + prob.d * scheme_matrix(wr, M - 1).matrix.T) / h**prob.alpha
    A -= prob.p * np.eye(M - 1)
    notes = [m for m in (stability_note(wl, prob.b, M, "left"), stability_note(wr, prob.d, M, "right")) if m]

    cn = CrankNicolson(A, tau)
    x = prob.B_d + h * np.arange(M + 1)
    xi = x[1:-1]
    U = np.asarray(prob.terminal(xi), dtype=float).copy()

    def full(U):
        return np.concatenate(([0.0], U, [0.0]))

    history = [full(U)] if keep_history else None
    src = prob.source
    f0 = np.asarray(src(xi, prob.T), dtype=float) if src is not None else np.zeros_like(xi)
    for j in range(N):
        t1 = prob.T - (j + 1) * tau
        f1 = np.asarray(src(xi, t1), dtype=float) if src is not None else f0
        U = cn.step(U, -0.5 * tau * (f0 + f1))
        f0 = f1
        if keep_history:
            history.append(full(U))
    grid = GridFn(prob.B_d, prob.B_u, full(U))
    return SolveResult(grid, N, h, tau, history, notes)
