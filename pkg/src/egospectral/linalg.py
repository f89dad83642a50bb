"""Small dense symmetric linear algebra and sparse dominant-eigenvalue search.

Every bound solver decides positive semidefiniteness through :func:`psd_check`
with one shared relative tolerance, so verdicts on Hankel matrices whose
entries span many orders of magnitude stay comparable.
"""
from __future__ import annotations

import math
import os

import numpy as np

from . import _backend
from .graph import Graph

DEFAULT_PSD_TOL = 1e-9
DEFAULT_DENSE_CAP = 5000


class ConvergenceError(RuntimeError):
    pass


def default_psd_tol() -> float:
    """Shared PSD tolerance, overridable through ``EGOSPECTRAL_PSD_TOL``."""
    raw = os.environ.get("EGOSPECTRAL_PSD_TOL")
    if raw is None:
        return DEFAULT_PSD_TOL
    tol = float(raw)
    if not tol >= 0:
        raise ValueError(f"EGOSPECTRAL_PSD_TOL must be a nonnegative number, got {raw!r}")
    return tol


def as_symmetric(m, *, check: bool = True) -> np.ndarray:
    """Validate and return ``m`` as a C-contiguous float64 symmetric matrix."""
    a = np.array(m, dtype=np.float64, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
    if check and not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise ValueError("matrix is not symmetric")
    return a


def matrix_scale(m: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(m))))


def psd_check(m, tol: float | None = None) -> bool:
    """True iff every eigenvalue of ``m`` is at least ``-tol * max(1, max|m_ij|)``.

    Runs a diagonally pivoted Cholesky factorization of ``m + slack*I``. Pivots
    too close to zero to call either way are settled by the eigenvalues;
    exact boundary cases resolve to feasible.
    """
    tol = default_psd_tol() if tol is None else tol
    a = as_symmetric(m)
    k = a.shape[0]
    scale = matrix_scale(a)
    slack = tol * scale
    ambiguous = 64 * np.finfo(float).eps * scale * k
    s = a + slack * np.eye(k)
    for j in range(k):
        rest = np.diag(s)[j:]
        piv = j + int(np.argmax(rest))
        d = s[piv, piv]
        if d < -ambiguous:
            return False
        if d <= ambiguous:
            return _psd_by_eigenvalues(a, tol, scale)
        if piv != j:
            s[[j, piv]] = s[[piv, j]]
            s[:, [j, piv]] = s[:, [piv, j]]
        col = s[j + 1:, j] / d
        s[j + 1:, j + 1:] -= np.outer(col, s[j, j + 1:])
    return True


def _psd_by_eigenvalues(a: np.ndarray, tol: float, scale: float) -> bool:
    return float(np.min(sym_eigenvalues(a, check=False))) >= -tol * scale


def min_scaled_eigenvalues(stack: np.ndarray) -> np.ndarray:
    """``lambda_min(M) / max(1, max|M_ij|)`` for each matrix of a ``(N, k, k)`` stack.

    Batched LAPACK call used for grid scans; compare against ``-tol`` to get
    the same verdict as :func:`psd_check`.
    """
    stack = np.asarray(stack, dtype=np.float64)
    scale = np.maximum(1.0, np.max(np.abs(stack), axis=(1, 2)))
    return np.linalg.eigvalsh(stack)[:, 0] / scale


def sym_eigenvalues(
    m,
    *,
    cap: int = DEFAULT_DENSE_CAP,
    tol: float = 1e-15,
    max_sweeps: int = 100,
    backend: str | None = None,
    check: bool = True,
) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, descending, by cyclic Jacobi."""
    a = as_symmetric(m, check=check)
    if a.shape[0] > cap:
        raise ValueError(f"matrix dimension {a.shape[0]} exceeds dense cap {cap}")
    a = np.array((a + a.T) / 2.0, order="C")
    sweeps = _backend.get(backend).jacobi_sweeps(a, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(a))[::-1].copy()


def lambda1_exact(
    g: Graph,
    tol: float = 1e-10,
    max_iters: int = 100_000,
    *,
    cap: int = DEFAULT_DENSE_CAP,
) -> float:
    """Largest adjacency eigenvalue of ``g``.

    Nonnegative weights: power iteration on ``A + sigma*I`` with sigma the
    largest weighted degree, so a bipartite ``-lambda_1`` cannot tie with
    ``lambda_1``. The Rayleigh quotient is stopped once an Aitken estimate of
    its remaining error falls below ``tol * max(1, |lambda|)``. Graphs with
    negative weights go through the dense Jacobi solver instead.
    """
    if g.num_edges == 0:
        return 0.0
    if g.has_negative_weights:
        if g.n > cap:
            raise ValueError(f"graph with negative weights and n={g.n} exceeds dense cap {cap}")
        return float(sym_eigenvalues(g.to_dense(), cap=cap)[0])

    a = g.csr
    sigma = float(np.max(g.weighted_degrees()))
    x = np.ones(g.n) / math.sqrt(g.n)
    prev = None
    prev_diff = None
    rho = 0.0
    for _ in range(max_iters):
        ax = a @ x
        rho = float(x @ ax)
        y = ax + sigma * x
        x = y / np.linalg.norm(y)
        if prev is not None:
            diff = abs(rho - prev)
            bound = tol * max(1.0, abs(rho))
            if diff == 0.0:
                return rho
            if prev_diff is not None and prev_diff > 0:
                q = diff / prev_diff
                if q < 1 and diff * q / (1 - q) <= bound and diff <= bound:
                    return rho
            prev_diff = diff
        prev = rho
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} iterations; "
        f"last Rayleigh quotients [{min(prev, rho)!r}, {max(prev, rho)!r}]"
    )
