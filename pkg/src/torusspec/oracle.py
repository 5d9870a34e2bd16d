"""Independent verification paths for the shooting solver.

Two deliberately different routes to the same spectra:

* ``constant_spectrum`` -- the closed-form periodic spectrum of a
  constant potential (Fourier modes): {-c} followed by doubles
  (2 pi n / a)^2 - c.
* ``fd_spectrum`` -- a symmetric second-order central-difference
  discretization of -f'' - V f with periodic (wrap-around) or
  Dirichlet closure.  Eigenvalues are extracted by bisection on the
  eigenvalue-counting function N(sigma) = #{eigenvalues < sigma},
  computed as the number of negative pivots in the LDL^T factorization
  of A - sigma I (Sylvester inertia).  The periodic corner entries are
  handled by bordered elimination: the last row/column is eliminated
  after the tridiagonal block, accumulating the fill-in of the corners
  into a final Schur-complement pivot.  No dense eigensolver anywhere.

Accuracy is O(h^2) with h = a / n_points, which is the useful
property: halving h must shrink the disagreement with the shooting
solver fourfold if both are consistent.
"""

from __future__ import annotations

import math

import numpy as np

from .spectrum import (
    BOTH,
    DIRICHLET,
    EVEN,
    PERIODIC,
    EigenvalueRecord,
    SpectralProblem,
    Spectrum,
)

__all__ = ["constant_spectrum", "fd_spectrum"]

_PIVOT_JITTER = 1e-12


def constant_spectrum(c: float, a: float, n_max: int) -> Spectrum:
    """Analytic periodic spectrum of V = c on a circle of length a.

    lambda_1 = -c is simple (constant eigenfunction); for n >= 1,
    (2 pi n / a)^2 - c is double with eigenfunctions cos/sin(2 pi n x / a)
    and 2n nodes.
    """
    if a <= 0.0:
        raise ValueError("period must be positive")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    records = [
        EigenvalueRecord(lam=-c, parity=EVEN, multiplicity=1, node_count=0, index_j=1)
    ]
    for n in range(1, n_max + 1):
        lam = (2.0 * math.pi * n / a) ** 2 - c
        for j in (2 * n, 2 * n + 1):
            records.append(
                EigenvalueRecord(
                    lam=lam, parity=BOTH, multiplicity=2, node_count=2 * n, index_j=j
                )
            )
    ceiling = (2.0 * math.pi * (n_max + 1) / a) ** 2 - c
    return Spectrum(
        records=records,
        lambda_ceiling=ceiling,
        complete=True,
        n_below=0,
        mode=PERIODIC,
    )


def _negcount_dirichlet(diag, b2, sigmas):
    """#{eigenvalues < sigma} for the tridiagonal matrix with the given
    diagonal and constant squared off-diagonal b2; vectorized over
    sigmas."""
    d = diag[0] - sigmas
    d = _jitter_zero(d, sigmas)
    count = (d < 0.0).astype(np.int64)
    for i in range(1, len(diag)):
        d = diag[i] - sigmas - b2 / d
        d = _jitter_zero(d, sigmas)
        count += d < 0.0
    return count


def _negcount_periodic(diag, off, sigmas):
    """As above for tridiagonal plus corner entries ``off`` coupling
    index 0 and N-1 (bordered elimination of the last row/column)."""
    n = len(diag)
    b2 = off * off
    d = diag[0] - sigmas
    d = _jitter_zero(d, sigmas)
    count = (d < 0.0).astype(np.int64)
    u = np.full_like(sigmas, off)  # fill-in of the last row
    corr = u * u / d
    for i in range(1, n - 1):
        u_new = (off if i == n - 2 else 0.0) - u * off / d
        d = diag[i] - sigmas - b2 / d
        d = _jitter_zero(d, sigmas)
        count += d < 0.0
        u = u_new
        corr = corr + u * u / d
    p_last = diag[n - 1] - sigmas - corr
    count += p_last < 0.0
    return count


def _jitter_zero(d, sigmas):
    # factorization breakdown at a pivot: nudge the shift and move on
    z = d == 0.0
    if np.any(z):
        d = np.where(z, -_PIVOT_JITTER * np.maximum(1.0, np.abs(sigmas)), d)
    return d


def _fd_matrix(problem: SpectralProblem, n_points: int):
    h = problem.a / n_points
    inv_h2 = 1.0 / (h * h)
    if problem.mode == PERIODIC:
        xs = np.arange(n_points) * h
    else:
        xs = np.arange(1, n_points) * h
    try:
        v = np.asarray(problem.V(xs), dtype=float)
        if v.shape != xs.shape:
            raise TypeError
    except Exception:
        v = np.array([float(problem.V(x)) for x in xs])
    diag = 2.0 * inv_h2 - v
    return diag, -inv_h2, v


def fd_spectrum(problem: SpectralProblem, n_points: int, count: int) -> np.ndarray:
    """First ``count`` eigenvalues of the central-difference
    discretization, each bisected independently on N(sigma)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if n_points < 64:
        raise ValueError("n_points must be >= 64")
    if problem.potential_period is not None:
        min_points = int(math.ceil(32.0 * problem.a / problem.potential_period))
        if n_points < min_points:
            raise ValueError(
                f"n_points={n_points} under-resolves the potential; need >= "
                f"{min_points} (32 per potential period)"
            )
    diag, off, v = _fd_matrix(problem, n_points)
    if count > len(diag):
        raise ValueError(f"matrix has only {len(diag)} eigenvalues")
    negcount = _negcount_periodic if problem.mode == PERIODIC else _negcount_dirichlet
    arg = off if problem.mode == PERIODIC else off * off

    lo = np.full(count, float(np.min(-v)) - 1.0)  # Gershgorin lower bound
    hi_val = float(np.max(diag)) - 2.0 * off + 1.0
    hi = np.full(count, hi_val)
    ks = np.arange(1, count + 1)
    # invariant: negcount(lo) < k <= negcount(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if np.max(hi - lo) <= 1e-10 * np.maximum(1.0, np.abs(mid)).min():
            break
        cnt = negcount(diag, arg, mid)
        take_hi = cnt >= ks
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)
