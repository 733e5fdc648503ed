"""Numerical kernels with a numba fast path and a pure-numpy fallback.

The annealer evaluates the spectral objective once per iteration, so the
top-two power iteration on the sparse midpoint-offset matrix is the hot
loop of the whole package. The active backend is chosen once at import
from the SPECGAP_BACKEND environment variable:

    SPECGAP_BACKEND=numba   force the numba @njit kernels
    SPECGAP_BACKEND=numpy   force the pure-numpy kernels
    SPECGAP_BACKEND=auto    numba if importable, numpy otherwise (default)

Both backends run the same algorithm on the same COO arrays and agree to
floating-point roundoff; see benchmarks/bench_kernels.py for a comparison.

The top-two computation is a two-column orthogonal power iteration on the
Gram operator: the second column is deflated against the first every step,
and the sigma estimates are Rayleigh-Ritz values of the 2x2 projected
operator. Running both columns in lockstep matters: near-SR=1 masks have a
clustered leading pair (sigma1 ~ sigma2), where one-vector-at-a-time
iteration creeps at rate (sigma2/sigma1)^2 and stalls, while the invariant
2-D subspace still converges at the well-separated rate (sigma3/sigma1)^2.
Estimates below ~1e-13 * sigma1 sit under the Gram resolution floor and
snap to zero.
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_VAR = "SPECGAP_BACKEND"


def _power_top2_plain(rows, cols, vals, n_rows, n_cols, x1, x2, max_iter, rtol):
    """Top-two singular values of a sparse COO matrix.

    Convergence: both sigma estimates change by < rtol (relative) between
    consecutive iterations, checked from iteration 3 on. Returns
    (sigma1, sigma2, iterations, converged). Written with explicit loops
    so numba can compile it; the numpy backend wraps the same algorithm
    with bincount-based scatter adds.
    """
    tiny = 1e-300
    nnz = rows.size

    def gram(x):
        y = np.zeros(n_rows)
        for i in range(nnz):
            y[rows[i]] += vals[i] * x[cols[i]]
        z = np.zeros(n_cols)
        for i in range(nnz):
            z[cols[i]] += vals[i] * y[rows[i]]
        return z

    q1 = x1 / np.linalg.norm(x1)
    q2 = x2 - float(np.dot(q1, x2)) * q1
    n2 = float(np.linalg.norm(q2))
    if n2 <= tiny:
        e = np.zeros(n_cols)
        e[1] = 1.0
        q2 = e - float(np.dot(q1, e)) * q1
        n2 = float(np.linalg.norm(q2))
        if n2 <= tiny:
            return 0.0, 0.0, 0, False
    q2 = q2 / n2

    sigma1 = 0.0
    sigma2 = 0.0
    prev1 = -1.0
    prev2 = -1.0
    for it in range(1, max_iter + 1):
        z1 = gram(q1)
        z2 = gram(q2)
        a = float(np.dot(q1, z1))
        c = float(np.dot(q2, z2))
        b = 0.5 * (float(np.dot(q1, z2)) + float(np.dot(q2, z1)))
        half = 0.5 * (a + c)
        disc = math.sqrt((0.5 * (a - c)) ** 2 + b * b)
        sigma1 = math.sqrt(max(half + disc, 0.0))
        sigma2 = math.sqrt(max(half - disc, 0.0))
        floor = 1e-13 * sigma1
        done1 = abs(sigma1 - prev1) <= rtol * max(sigma1, tiny)
        done2 = abs(sigma2 - prev2) <= rtol * max(sigma2, tiny) or sigma2 <= floor
        if it >= 3 and done1 and done2:
            if sigma2 <= floor:
                sigma2 = 0.0
            return sigma1, sigma2, it, True
        prev1 = sigma1
        prev2 = sigma2
        n1 = float(np.linalg.norm(z1))
        if n1 <= tiny:
            # Gram operator annihilates the subspace; estimates are final
            if sigma2 <= floor:
                sigma2 = 0.0
            return sigma1, sigma2, it, True
        q1 = z1 / n1
        z2 = z2 - float(np.dot(q1, z2)) * q1
        n2 = float(np.linalg.norm(z2))
        if n2 <= 1e-15 * n1:
            # second direction collapsed (rank-1 operator or transient
            # cancellation); restart it from a deterministic basis vector
            e = np.zeros(n_cols)
            e[it % n_cols] = 1.0
            z2 = e - float(np.dot(q1, e)) * q1
            n2 = float(np.linalg.norm(z2))
            if n2 <= tiny:
                return sigma1, 0.0, it, True
        q2 = z2 / n2
    return sigma1, sigma2, max_iter, False


def _power_top2_numpy(rows, cols, vals, n_rows, n_cols, x1, x2, max_iter, rtol):
    # Lockstep twin of _power_top2_plain using vectorized scatter adds.
    tiny = 1e-300

    def gram(x):
        y = np.bincount(rows, weights=vals * x[cols], minlength=n_rows)
        return np.bincount(cols, weights=vals * y[rows], minlength=n_cols)

    q1 = x1 / np.linalg.norm(x1)
    q2 = x2 - float(q1 @ x2) * q1
    n2 = float(np.linalg.norm(q2))
    if n2 <= tiny:
        e = np.zeros(n_cols)
        e[1] = 1.0
        q2 = e - float(q1 @ e) * q1
        n2 = float(np.linalg.norm(q2))
        if n2 <= tiny:
            return 0.0, 0.0, 0, False
    q2 = q2 / n2

    sigma1 = sigma2 = 0.0
    prev1 = prev2 = -1.0
    for it in range(1, max_iter + 1):
        z1 = gram(q1)
        z2 = gram(q2)
        a = float(q1 @ z1)
        c = float(q2 @ z2)
        b = 0.5 * (float(q1 @ z2) + float(q2 @ z1))
        half = 0.5 * (a + c)
        disc = math.sqrt((0.5 * (a - c)) ** 2 + b * b)
        sigma1 = math.sqrt(max(half + disc, 0.0))
        sigma2 = math.sqrt(max(half - disc, 0.0))
        floor = 1e-13 * sigma1
        done1 = abs(sigma1 - prev1) <= rtol * max(sigma1, tiny)
        done2 = abs(sigma2 - prev2) <= rtol * max(sigma2, tiny) or sigma2 <= floor
        if it >= 3 and done1 and done2:
            if sigma2 <= floor:
                sigma2 = 0.0
            return sigma1, sigma2, it, True
        prev1 = sigma1
        prev2 = sigma2
        n1 = float(np.linalg.norm(z1))
        if n1 <= tiny:
            if sigma2 <= floor:
                sigma2 = 0.0
            return sigma1, sigma2, it, True
        q1 = z1 / n1
        z2 = z2 - float(q1 @ z2) * q1
        n2 = float(np.linalg.norm(z2))
        if n2 <= 1e-15 * n1:
            e = np.zeros(n_cols)
            e[it % n_cols] = 1.0
            z2 = e - float(q1 @ e) * q1
            n2 = float(np.linalg.norm(z2))
            if n2 <= tiny:
                return sigma1, 0.0, it, True
        q2 = z2 / n2
    return sigma1, sigma2, max_iter, False


def _make_numba_kernel():
    from numba import njit

    return njit(cache=True)(_power_top2_plain)


def _resolve_backend() -> tuple[str, object]:
    requested = os.environ.get(_ENV_VAR, "auto").lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numpy":
        return "numpy", _power_top2_numpy
    try:
        kernel = _make_numba_kernel()
        return "numba", kernel
    except ImportError:
        if requested == "numba":
            raise
        return "numpy", _power_top2_numpy


_BACKEND_NAME, _POWER_TOP2 = _resolve_backend()


def active_backend() -> str:
    """Name of the kernel backend selected at import ('numba' or 'numpy')."""
    return _BACKEND_NAME


def power_top2(rows, cols, vals, n_rows, n_cols, x1, x2, max_iter, rtol):
    """Dispatch to the active backend. See _power_top2_plain for semantics."""
    return _POWER_TOP2(
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        np.ascontiguousarray(vals, dtype=np.float64),
        n_rows,
        n_cols,
        np.ascontiguousarray(x1, dtype=np.float64),
        np.ascontiguousarray(x2, dtype=np.float64),
        max_iter,
        rtol,
    )
