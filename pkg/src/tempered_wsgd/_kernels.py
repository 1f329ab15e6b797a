"""Hot inner loops, in two interchangeable implementations.

Every kernel exists as a pure-numpy function and as a numba ``@njit``
function with the same signature.  The module-level names (``gruenwald``,
``wsgd_weights``, ...) are bound to one of the two sets at import time:

* ``TEMPERED_WSGD_BACKEND=numpy`` forces the numpy path;
* ``TEMPERED_WSGD_BACKEND=numba`` requests numba (falls back to numpy with a
  warning if numba cannot be imported);
* unset: numba when importable, numpy otherwise.

Both sets stay reachable as :data:`NUMPY` and :data:`NUMBA` (the latter is
``None`` without numba) so the benchmark and the tests can compare them.
"""

from __future__ import annotations

import os
import warnings
from types import SimpleNamespace

import numpy as np

ENV_FLAG = "TEMPERED_WSGD_BACKEND"

# numpy implementations


def _np_gruenwald(alpha, n):
    w = np.empty(n + 1)
    w[0] = 1.0
    if n > 0:
        w[1:] = np.cumprod(1.0 - (alpha + 1.0) / np.arange(1, n + 1))
    return w


def _np_wsgd_weights(omega, offsets, gammas, lam, h, n):
    # g_k = exp(-(k-1) h lam) * sum_j gamma_j * omega_{k - offset_j}
    g = np.zeros(n + 1)
    for d, gam in zip(offsets, gammas):
        if d <= n:
            g[d:] += gam * omega[: n + 1 - d]
    g *= np.exp(-(np.arange(n + 1) - 1.0) * h * lam)
    return g


def _np_hessenberg_toeplitz(g, phi, n):
    i = np.arange(n)
    idx = i[:, None] - i[None, :] + 1
    B = np.where(idx >= 0, g[np.clip(idx, 0, None)], 0.0)
    B[i, i] -= phi
    return B


def _np_stencil_apply(g, phi, u):
    # out[i-1] = sum_{k=0}^{i+1} g_k u_{i-k+1} - phi u_i,  i = 1..M-1
    M = u.shape[0] - 1
    conv = np.convolve(g[: M + 1], u)
    return conv[2 : M + 1] - phi * u[1:M]


def _chebyshev_coefs(g):
    # sum_k g_k cos((k-1)x) = sum_m c_m cos(mx): the k=0 term folds onto m=1
    c = np.array(g[1:], dtype=np.float64)
    if c.shape[0] < 2:
        c = np.concatenate((c, np.zeros(2 - c.shape[0])))
    c[1] += g[0]
    return c


def _np_cosine_series(g, phi, x):
    # Clenshaw recurrence, vectorized over the sample points
    c = _chebyshev_coefs(g)
    t = np.cos(x)
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for m in range(c.shape[0] - 1, 0, -1):
        b1, b2 = c[m] + 2.0 * t * b1 - b2, b1
    return c[0] + t * b1 - b2 - phi


NUMPY = SimpleNamespace(
    name="numpy",
    gruenwald=_np_gruenwald,
    wsgd_weights=_np_wsgd_weights,
    hessenberg_toeplitz=_np_hessenberg_toeplitz,
    stencil_apply=_np_stencil_apply,
    cosine_series=_np_cosine_series,
)

# numba implementations

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None

NUMBA = None

if numba is not None:

    @numba.njit(cache=True)
    def _nb_gruenwald(alpha, n):
        w = np.empty(n + 1)
        w[0] = 1.0
        for k in range(1, n + 1):
            w[k] = w[k - 1] * (1.0 - (alpha + 1.0) / k)
        return w

    @numba.njit(cache=True)
    def _nb_wsgd_weights(omega, offsets, gammas, lam, h, n):
        g = np.zeros(n + 1)
        for k in range(n + 1):
            s = 0.0
            for j in range(offsets.shape[0]):
                idx = k - offsets[j]
                if idx >= 0:
                    s += gammas[j] * omega[idx]
            g[k] = s * np.exp(-(k - 1.0) * h * lam)
        return g

    @numba.njit(cache=True)
    def _nb_hessenberg_toeplitz(g, phi, n):
        B = np.zeros((n, n))
        for i in range(n):
            for j in range(min(i + 2, n)):
                B[i, j] = g[i - j + 1]
            B[i, i] -= phi
        return B

    @numba.njit(cache=True)
    def _nb_stencil_apply(g, phi, u):
        # u reversed once so every row is a contiguous dot product
        M = u.shape[0] - 1
        ur = u[::-1].copy()
        out = np.empty(M - 1)
        for i in range(1, M):
            out[i - 1] = np.dot(g[: i + 2], ur[M - i - 1 : M + 1]) - phi * u[i]
        return out

    @numba.njit(cache=True)
    def _nb_cosine_series(g, phi, x):
        n = g.shape[0] - 1
        c = np.zeros(max(n, 2))
        c[:n] = g[1:]
        c[1] += g[0]
        # coefficient loop outside so the point loop vectorizes
        t = np.cos(x)
        b1 = np.zeros(x.shape[0])
        b2 = np.zeros(x.shape[0])
        for m in range(c.shape[0] - 1, 0, -1):
            cm = c[m]
            for s in range(x.shape[0]):
                b = cm + 2.0 * t[s] * b1[s] - b2[s]
                b2[s] = b1[s]
                b1[s] = b
        return c[0] + t * b1 - b2 - phi

    NUMBA = SimpleNamespace(
        name="numba",
        gruenwald=_nb_gruenwald,
        wsgd_weights=_nb_wsgd_weights,
        hessenberg_toeplitz=_nb_hessenberg_toeplitz,
        stencil_apply=_nb_stencil_apply,
        cosine_series=_nb_cosine_series,
    )


def _select():
    requested = os.environ.get(ENV_FLAG, "").strip().lower()
    if requested not in ("", "numpy", "numba"):
        raise ValueError(f"{ENV_FLAG} must be 'numpy' or 'numba', got {requested!r}")
    if requested == "numpy":
        return NUMPY
    if NUMBA is None:
        if requested == "numba":
            warnings.warn("numba requested but not importable; using numpy kernels")
        return NUMPY
    return NUMBA


_active = _select()
BACKEND = _active.name


def gruenwald(alpha, n):
    return _active.gruenwald(float(alpha), int(n))


def wsgd_weights(omega, offsets, gammas, lam, h, n):
    return _active.wsgd_weights(
        np.ascontiguousarray(omega, dtype=np.float64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(gammas, dtype=np.float64),
        float(lam),
        float(h),
        int(n),
    )


def hessenberg_toeplitz(g, phi, n):
    return _active.hessenberg_toeplitz(np.ascontiguousarray(g, dtype=np.float64), float(phi), int(n))


def stencil_apply(g, phi, u):
    return _active.stencil_apply(
        np.ascontiguousarray(g, dtype=np.float64), float(phi), np.ascontiguousarray(u, dtype=np.float64)
    )


def cosine_series(g, phi, x):
    return _active.cosine_series(
        np.ascontiguousarray(g, dtype=np.float64), float(phi), np.ascontiguousarray(x, dtype=np.float64)
    )
