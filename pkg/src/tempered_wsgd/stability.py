"""Stability analysis: admissible free-parameter intervals, generating-function
scans and eigenvalue checks of the scheme matrices.

The symmetric part of a Toeplitz matrix with diagonals ``t_k`` has its
spectrum inside the range of the generating function ``sum_k t_k e^{ikx}``.
For the scheme matrix this function is

    f(x) = sum_{k=0}^{N-1} g_k cos((k-1) x) - phi,

so a negative ``f`` certifies a negative definite symmetric part and hence an
unconditionally stable Crank-Nicolson scheme.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import bisect

from . import _kernels
from .errors import ConvergenceError, DomainError
from .tempered_ops import OperatorWeights, build_weights

NEGATIVE_TOL = 1e-12
DEFAULT_SAMPLES = 4096
DEFAULT_H = 0.01


@dataclass(frozen=True)
class StabilityBounds:
    alpha: float
    a1: float
    a2: float
    a3: float
    a4: float

    @property
    def second_order_nonempty(self) -> bool:
        return self.a1 < self.a2

    @property
    def third_order_nonempty(self) -> bool:
        return self.a3 < self.a4

    def admissible(self, order: int, free_param: float) -> bool:
        """Whether ``free_param`` lies strictly inside the interval for ``order``."""
        if order == 2:
            return self.a1 < free_param < self.a2
        if order == 3:
            return self.a3 < free_param < self.a4
        raise DomainError(f"order must be 2 or 3, got {order}")


def _a1(a):
    return max(
        (2 - a) * (a**2 + a - 8) / (2 * (a**2 + 3 * a + 2)),
        (1 - a) * (a**2 + 2 * a) / (2 * (a**2 + 3 * a + 4)),
    )


def _a2(a):
    return (2 - a) * (a**2 + 2 * a - 3) / (2 * (a**2 + 3 * a + 2))


def _a3(a):
    den = a**3 + 6 * a**2 + 11 * a + 6
    return max(
        (a**5 / 8 + 7 * a**4 / 12 - 5 * a**3 / 8 - 49 * a**2 / 12 + 3 * a) / den,
        (a**5 / 8 + a**4 / 3 - 67 * a**3 / 24 - 23 * a**2 / 6 + 175 * a / 6 - 30) / den,
    )


def _a4(a):
    den = a**3 + 6 * a**2 + 11 * a + 6
    return min(
        (a**4 / 8 + 7 * a**3 / 12 + a**2 / 8 - 13 * a / 6) / (a**2 + 5 * a + 8),
        (a**5 / 8 + 11 * a**4 / 24 - 41 * a**3 / 24 - 107 * a**2 / 24 + 163 * a / 12 - 8) / den,
    )


def bounds(alpha: float) -> StabilityBounds:
    """Interval endpoints (a1, a2) for gamma_3 and (a3, a4) for gamma_4."""
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"stability bounds need alpha in (1, 2), got {alpha}")
    a = float(alpha)
    return StabilityBounds(a, _a1(a), _a2(a), _a3(a), _a4(a))


def window_endpoints(xtol: float = 1e-6) -> tuple[float, float]:
    """The alpha range on which (a3, a4) is nonempty, by bisection on a4 - a3."""
    gap = lambda a: _a4(a) - _a3(a)  # noqa: E731
    lo = bisect(gap, 1.05, 1.5, xtol=xtol)
    hi = bisect(gap, 1.5, 1.95, xtol=xtol)
    return lo, hi


@dataclass(frozen=True)
class GeneratingFunctionScan:
    order: int
    alpha: float
    lam: float
    h: float
    free_param: float
    n_terms: int
    samples: int
    f_min: float
    f_max: float

    @property
    def negative(self) -> bool:
        return self.f_max < -NEGATIVE_TOL


def scan_points(samples: int) -> np.ndarray:
    """Uniform points on [-pi, pi] (both ends included) plus x = 0."""
    return np.union1d(np.linspace(-math.pi, math.pi, samples), [0.0])


def generating_function(w: OperatorWeights, x, n_terms: int | None = None) -> np.ndarray:
    """``f(x) = sum_{k<N} g_k cos((k-1)x) - phi`` for the weights ``w``."""
    n = w.n + 1 if n_terms is None else n_terms
    if n > w.n + 1:
        raise DomainError(f"weights hold {w.n + 1} terms, {n} requested")
    return _kernels.cosine_series(w.g[:n], w.phi, np.atleast_1d(np.asarray(x, dtype=float)))


def scan_generating_function(
    order: int,
    alpha: float,
    lam: float,
    h: float,
    free_param: float,
    n_terms: int = 250,
    samples: int = DEFAULT_SAMPLES,
) -> GeneratingFunctionScan:
    """Extrema of the generating function over [-pi, pi].

    The maximum usually sits at x = 0, where ``f(0) = -sum_{k>=N} g_k`` is
    minus the truncated tail; tempering shrinks that tail like
    ``exp(-N h lam)``, so for large ``N h lam`` the verdict can fall below
    the certification threshold.
    """
    if n_terms < 3:
        raise DomainError(f"n_terms must be at least 3, got {n_terms}")
    if samples < 64:
        raise DomainError(f"samples must be at least 64, got {samples}")
    w = build_weights(order, alpha, lam, h, free_param, n_terms - 1)
    f = generating_function(w, scan_points(samples))
    return GeneratingFunctionScan(
        order, float(alpha), float(lam), float(h), float(free_param), n_terms, samples, float(f.min()), float(f.max())
    )


@dataclass(frozen=True)
class WeightSigns:
    g1_nonpos: bool
    g0_plus_g2_nonneg: bool
    tail_nonneg: bool

    def all(self) -> bool:
        return self.g1_nonpos and self.g0_plus_g2_nonneg and self.tail_nonneg


def weight_sign_report(w: OperatorWeights) -> WeightSigns:
    """Sign pattern g1 <= 0, g0 + g2 >= 0, g_k >= 0 (k >= 3) over the built range."""
    if w.n < 5:
        raise DomainError(f"sign report needs weights up to n >= 5, got {w.n}")
    g = w.g
    return WeightSigns(bool(g[1] <= 0), bool(g[0] + g[2] >= 0), bool(np.all(g[3:] >= 0)))


def _dense(B) -> np.ndarray:
    return np.asarray(getattr(B, "matrix", B), dtype=float)


def symmetric_part_eigenvalues(B) -> np.ndarray:
    """Ascending eigenvalues of ``(B + B^T) / 2``."""
    A = _dense(B)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    try:
        return np.linalg.eigvalsh(0.5 * (A + A.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc


def symmetric_part_max_eigenvalue(B) -> float:
    return float(symmetric_part_eigenvalues(B)[-1])


def scan_grid(order, alphas, lams, free_params, h=DEFAULT_H, n_terms=250, samples=DEFAULT_SAMPLES):
    """Scans over the Cartesian product of the parameter lists."""
    return [
        scan_generating_function(order, a, lam, h, fp, n_terms, samples)
        for a in alphas
        for lam in lams
        for fp in free_params
    ]


SCAN_COLUMNS = ("alpha", "lambda", "gamma", "f_min", "f_max", "negative")


def scan_rows(scans):
    for s in scans:
        yield {
            "alpha": s.alpha,
            "lambda": s.lam,
            "gamma": s.free_param,
            "f_min": s.f_min,
            "f_max": s.f_max,
            "negative": s.negative,
        }


def write_scan_csv(scans, stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=SCAN_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in scan_rows(scans):
        row = dict(row)
        for k in ("alpha", "lambda", "gamma"):
            row[k] = repr(row[k])
        for k in ("f_min", "f_max"):
            row[k] = f"{row[k]:.6e}"
        row["negative"] = str(row["negative"]).lower()
        writer.writerow(row)


def bounds_record(alpha: float) -> dict:
    b = bounds(alpha)
    rec = asdict(b)
    rec["second_order_nonempty"] = b.second_order_nonempty
    rec["third_order_nonempty"] = b.third_order_nonempty
    return rec
