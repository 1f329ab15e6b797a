"""Shift/weight families (p_j, gamma_j) of the tempered-WSGD operators.

A family combines shifted Grünwald operators with shifts ``p_j`` and weights
``gamma_j``.  It is accurate to order ``l`` when the moment conditions up to
level ``l`` vanish; :func:`order_condition_residuals` evaluates them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GammaFamily:
    order: int
    shifts: tuple[float, ...]
    gammas: tuple[float, ...]
    free_param: float
    alpha: float

    def __post_init__(self):
        if len(self.shifts) != len(self.gammas):
            raise ValueError("shifts and gammas must have the same length")

    def integer_offsets(self) -> np.ndarray:
        """Offsets ``1 - p_j`` into the Grünwald sequence.

        Only defined for integer shifts no larger than 1, which is what the
        grid-aligned weight combination needs.
        """
        p = np.asarray(self.shifts, dtype=float)
        if np.any(p != np.round(p)) or np.any(p > 1):
            raise DomainError(f"grid-aligned weights need integer shifts <= 1, got {self.shifts}")
        return (1 - p).astype(np.int64)


def _check_alpha(alpha):
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")


def gamma_order2(alpha: float, gamma3: float) -> GammaFamily:
    """Second-order family with shifts (1, 0, -1)."""
    _check_alpha(alpha)
    g1 = alpha / 2 + gamma3
    g2 = (2 - alpha) / 2 - 2 * gamma3
    return GammaFamily(2, (1.0, 0.0, -1.0), (g1, g2, float(gamma3)), float(gamma3), float(alpha))


def gamma_order3(alpha: float, gamma4: float) -> GammaFamily:
    """Third-order family with shifts (1, 0, -1, -2)."""
    _check_alpha(alpha)
    a = alpha
    g1 = a**2 / 8 + 5 * a / 24 - gamma4
    g2 = -(a**2) / 4 + a / 12 + 1 + 3 * gamma4
    g3 = a**2 / 8 - 7 * a / 24 - 3 * gamma4
    return GammaFamily(3, (1.0, 0.0, -1.0, -2.0), (g1, g2, g3, float(gamma4)), float(gamma4), float(alpha))


def family(order: int, alpha: float, free_param: float) -> GammaFamily:
    if order == 2:
        return gamma_order2(alpha, free_param)
    if order == 3:
        return gamma_order3(alpha, free_param)
    raise DomainError(f"order must be 2 or 3, got {order}")


def _moments(p, a):
    c3 = a / 6 + a * (a - 1) / 8
    c4 = a / 24 + a * (a - 1) / 12 + a * (a - 1) * (a - 2) / 48
    rows = [
        np.ones_like(p),
        p - a / 2,
        p**2 / 2 - a * p / 2 + c3,
        p**3 / 6 - a * p**2 / 4 + c3 * p - c4,
        # level 5: z^4 coefficient of ((1 - e^-z)/z)^alpha e^(p z)
        (
            240 * p**4
            - 480 * a * p**3
            + (360 * a**2 + 120 * a) * p**2
            - (120 * a**3 + 120 * a**2) * p
            + 15 * a**4
            + 30 * a**3
            + 5 * a**2
            - 2 * a
        )
        / 5760,
    ]
    return rows


def order_condition_residuals(fam: GammaFamily, level: int) -> np.ndarray:
    """Left-hand sides of the order conditions up to ``level`` (2..5).

    Level ``l`` has ``l`` conditions: ``sum(gamma_j c_n(p_j)) = 0`` for
    n = 1..l-1 plus the normalization, reported as ``sum(gamma) - 1``.  Here
    ``c_n(p)`` is the z^n Taylor coefficient of ``((1 - e^-z)/z)^alpha e^(p z)``.
    """
    if not 2 <= level <= 5:
        raise ValueError(f"level must be in 2..5, got {level}")
    p = np.asarray(fam.shifts, dtype=float)
    g = np.asarray(fam.gammas, dtype=float)
    if p.shape != g.shape:
        raise ValueError("shifts and gammas must have the same length")
    rows = _moments(p, fam.alpha)[:level]
    res = np.array([float(np.dot(g, r)) for r in rows])
    res[0] -= 1.0
    return res
