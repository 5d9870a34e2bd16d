"""Adaptive Runge-Kutta 5(4) integration of f'' + (V + lambda) f = 0.

The second-order problem is propagated as the first-order system
y = (f, f') with y' = (f', -(V + lambda) f).  A Dormand-Prince 5(4)
embedded pair supplies the error estimate; the controller keeps the
local error per unit length below ``tol`` relative to the per-column
solution amplitude max(|f|, |f'|) (the amplitude never vanishes for a
nontrivial solution, unlike |f| alone, which passes through zero at
every node).

Two entry points:

* ``integrate`` -- one (lambda, initial condition) shot returning a
  ``SolutionTrace`` with endpoint values, every node on [0, x_end)
  located by bisection on the cubic Hermite dense output, and optional
  solution samples.
* ``integrate_batch`` -- many lambdas propagated in lockstep as the
  columns of a (2, N) state array (one shared V evaluation per stage),
  returning endpoint states and optionally per-column node counts.
  This is what makes discriminant scans over thousands of lambda
  values cheap; the step size is governed by the worst column.

``monodromy`` assembles the period map from the two canonical shots
(1, 0) and (0, 1); its determinant is the Wronskian of the pair and
must equal 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SolutionTrace",
    "IntegrationError",
    "integrate",
    "integrate_batch",
    "monodromy",
]

# Dormand-Prince 5(4) tableau (FSAL: stage 7 is the next step's stage 1).
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

DEFAULT_TOL = 1e-10
# Error estimates at or below this relative size are indistinguishable
# from roundoff in double precision; such steps are always accepted
# (otherwise the per-unit-length target tol*h rejects forever as h -> 0).
_NOISE_FLOOR = 5e-15
_MIN_FACTOR, _MAX_FACTOR, _SAFETY = 0.2, 5.0, 0.9
# Dense output is sampled this many times per accepted step for node
# detection; far denser than any oscillation the error control allows.
_DENSE_PER_STEP = 8
# A zero this close to x_end (relative) is attributed to the endpoint
# and excluded from [0, x_end) by the half-open convention.
_ENDPOINT_GUARD = 1e-7
_NODE_XTOL = 1e-10


class IntegrationError(RuntimeError):
    """Step size underflow: the local error cannot be driven to tol."""


@dataclass
class SolutionTrace:
    """One shot of the ODE at a fixed spectral parameter.

    ``nodes`` lists every zero of f in [0, x_end), strictly
    increasing; x = 0 is included iff f0 = 0.  ``node_dfs`` carries
    f' at each node (zeros of a nontrivial solution are simple, so
    these are nonzero).  ``samples`` is (x, f) pairs at the requested
    sample points, or None.
    """

    lam: float
    f0: float
    df0: float
    f_end: float
    df_end: float
    nodes: np.ndarray
    node_dfs: np.ndarray
    max_abs_f: float
    samples: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def node_count(self) -> int:
        return len(self.nodes)


def _stages(V, lams, x, h, y, k1):
    """The six fresh DP stages; returns (ynew, k7, err)."""
    ys = y + (h * _A21) * k1
    Vs = V(x + _C2 * h)
    k2 = np.stack([ys[1], -(Vs + lams) * ys[0]])
    ys = y + h * (_A31 * k1 + _A32 * k2)
    Vs = V(x + _C3 * h)
    k3 = np.stack([ys[1], -(Vs + lams) * ys[0]])
    ys = y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3)
    Vs = V(x + _C4 * h)
    k4 = np.stack([ys[1], -(Vs + lams) * ys[0]])
    ys = y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)
    Vs = V(x + _C5 * h)
    k5 = np.stack([ys[1], -(Vs + lams) * ys[0]])
    ys = y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
    Vs = V(x + h)
    k6 = np.stack([ys[1], -(Vs + lams) * ys[0]])
    ynew = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
    k7 = np.stack([ynew[1], -(Vs + lams) * ynew[0]])
    err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
    return ynew, k7, err


def _hermite(y, k1, ynew, k7, h, theta):
    """Cubic Hermite value of f at fractions theta of the step."""
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return (
        np.multiply.outer(h00, y[0])
        + np.multiply.outer(h10, h * k1[0])
        + np.multiply.outer(h01, ynew[0])
        + np.multiply.outer(h11, h * k7[0])
    )


def _run(V, lams, y0, x_end, tol, max_step, on_step=None):
    """Shared stepping loop.  ``on_step(x, h, y, k1, ynew, k7)`` is
    invoked after every accepted step (before the state update)."""
    lams = np.asarray(lams, dtype=float)
    y = np.array(y0, dtype=float)
    if y.shape[0] != 2:
        raise ValueError("initial state must have shape (2, ...)")
    x = 0.0
    h = min(max_step, x_end, 1e-3)
    k1 = np.stack([y[1], -(V(x) + lams) * y[0]])
    while x < x_end:
        last = x + 1.05 * h >= x_end
        if last:
            h = x_end - x
        ynew, k7, err = _stages(V, lams, x, h, y, k1)
        sc = np.maximum(
            np.max(np.abs(y), axis=0), np.max(np.abs(ynew), axis=0)
        ) + 1e-300
        en = float(np.max(np.abs(err) / sc))
        target = tol * h
        if en <= target or en <= _NOISE_FLOOR:
            if on_step is not None:
                on_step(x, h, y, k1, ynew, k7)
            x = x_end if last else x + h
            y, k1 = ynew, k7
            fac = (
                _MAX_FACTOR
                if en <= _NOISE_FLOOR
                else min(_MAX_FACTOR, _SAFETY * (target / en) ** 0.25)
            )
        else:
            fac = max(_MIN_FACTOR, _SAFETY * (target / en) ** 0.25)
            if h < 1e-13 * max(1.0, x):
                raise IntegrationError(
                    f"step size underflow at x={x:.6g} (lambda range "
                    f"[{lams.min():.6g}, {lams.max():.6g}])"
                )
        h = min(h * fac, max_step)
    return y


def integrate_batch(V, lams, y0, x_end, tol=DEFAULT_TOL, max_step=math.inf):
    """Propagate columns of y0 (shape (2, N)) to x_end; returns (2, N)."""
    if x_end <= 0.0:
        raise ValueError("x_end must be positive")
    return _run(V, lams, y0, x_end, tol, max_step)


def count_nodes_batch(V, lams, y0, x_end, tol=DEFAULT_TOL, max_step=math.inf):
    """Endpoint states plus per-column sign-change counts on [0, x_end).

    Counts use the dense output at ``_DENSE_PER_STEP`` points per
    accepted step; zero locations are not refined (use ``integrate``
    for that).  A column starting at f0 = 0 has its x = 0 node counted.
    """
    lams = np.asarray(lams, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    ncol = y0.shape[1]
    counts = (y0[0] == 0.0).astype(int)
    prev_sign = np.sign(y0[0]).astype(np.int8)
    # sign at 0+ for columns starting on a node
    zero0 = y0[0] == 0.0
    prev_sign[zero0] = np.sign(y0[1][zero0]).astype(np.int8)
    theta = (np.arange(1, _DENSE_PER_STEP + 1)) / _DENSE_PER_STEP
    guard = x_end * (1.0 - _ENDPOINT_GUARD)
    state = {"counts": counts, "prev": prev_sign}

    def on_step(x, h, y, k1, ynew, k7):
        fd = _hermite(y, k1, ynew, k7, h, theta)  # (_DENSE_PER_STEP, ncol)
        xs = x + theta * h
        keep = xs <= guard
        if not np.all(keep):
            fd = fd[keep]
            if fd.shape[0] == 0:
                return
        s = np.sign(fd).astype(np.int8)
        rows = np.vstack([state["prev"], s])
        # zeros inherit the previous sign so an exact-zero sample is
        # not double counted
        for i in range(1, rows.shape[0]):
            z = rows[i] == 0
            rows[i][z] = rows[i - 1][z]
        state["counts"] += np.sum(rows[1:] * rows[:-1] < 0, axis=0)
        state["prev"] = rows[-1]

    y_end = _run(V, lams, y0, x_end, tol, max_step, on_step=on_step)
    return y_end, state["counts"]


def integrate(
    V,
    lam: float,
    f0: float,
    df0: float,
    x_end: float,
    tol: float = DEFAULT_TOL,
    max_step: float = math.inf,
    sample_at: np.ndarray | None = None,
) -> SolutionTrace:
    """Shoot once from (f0, df0) and record nodes (and samples).

    Nodes are the sign changes of f on [0, x_end), half-open: a zero
    within ``_ENDPOINT_GUARD`` (relative) of x_end belongs to the next
    period and is excluded.  Each node is refined to ~1e-10 in x by
    bisection on the dense output of its step.
    """
    if (f0, df0) == (0.0, 0.0):
        raise ValueError("initial condition (0, 0) is the trivial solution")
    if x_end <= 0.0:
        raise ValueError("x_end must be positive")
    y0 = np.array([[float(f0)], [float(df0)]])
    nodes: list[float] = []
    node_dfs: list[float] = []
    if f0 == 0.0:
        nodes.append(0.0)
        node_dfs.append(float(df0))
    theta_grid = np.arange(0, _DENSE_PER_STEP + 1) / _DENSE_PER_STEP
    guard = x_end * (1.0 - _ENDPOINT_GUARD)
    state = {"max_f": abs(float(f0))}
    if sample_at is not None:
        sample_at = np.asarray(sample_at, dtype=float)
        if np.any(sample_at < 0.0) or np.any(sample_at > x_end):
            raise ValueError("sample points must lie in [0, x_end]")
        samples_f = np.empty_like(sample_at)
        samples_f[sample_at == 0.0] = f0
        state["tail"] = None  # set below per step

    def refine(y, k1, ynew, k7, h, lo, hi, flo):
        # bisection on the Hermite cubic; lo/hi are theta fractions
        for _ in range(200):
            if (hi - lo) * h <= _NODE_XTOL:
                break
            mid = 0.5 * (lo + hi)
            fm = float(_hermite(y, k1, ynew, k7, h, np.array([mid]))[0, 0])
            if flo * fm <= 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        return 0.5 * (lo + hi)

    def on_step(x, h, y, k1, ynew, k7):
        fd = _hermite(y, k1, ynew, k7, h, theta_grid)[:, 0]
        state["max_f"] = max(state["max_f"], float(np.max(np.abs(fd))))
        s = np.sign(fd)
        for i in range(1, len(s)):
            if s[i] == 0.0:
                s[i] = s[i - 1]
        flips = np.nonzero(s[1:] * s[:-1] < 0)[0]
        for i in flips:
            th = refine(
                y, k1, ynew, k7, h, theta_grid[i], theta_grid[i + 1], fd[i]
            )
            xz = x + th * h
            if xz >= guard or (nodes and xz <= nodes[-1]):
                continue
            # f' at the node from the Hermite derivative
            t2, t3 = th * th, th * th * th
            dfz = (
                (6 * t2 - 6 * th) * y[0, 0]
                + (3 * t2 - 4 * th + 1) * h * k1[0, 0]
                + (-6 * t2 + 6 * th) * ynew[0, 0]
                + (3 * t2 - 2 * th) * h * k7[0, 0]
            ) / h
            nodes.append(float(xz))
            node_dfs.append(float(dfz))
        if sample_at is not None:
            x1 = x_end if x + 1.5 * h >= x_end else x + h
            mask = (sample_at > x) & (sample_at <= x1)
            if np.any(mask):
                th = (sample_at[mask] - x) / h
                samples_f[mask] = _hermite(y, k1, ynew, k7, h, th)[:, 0]

    y_end = _run(V, float(lam), y0, x_end, tol, max_step, on_step=on_step)
    return SolutionTrace(
        lam=float(lam),
        f0=float(f0),
        df0=float(df0),
        f_end=float(y_end[0, 0]),
        df_end=float(y_end[1, 0]),
        nodes=np.array(nodes),
        node_dfs=np.array(node_dfs),
        max_abs_f=state["max_f"],
        samples=(sample_at, samples_f) if sample_at is not None else None,
    )


def monodromy(
    V, lam: float, a: float, tol: float = DEFAULT_TOL, max_step: float = math.inf
) -> np.ndarray:
    """Period map M: (f, f')(0) -> (f, f')(a), columns from the shots
    (1, 0) and (0, 1).  det M = 1 (constant Wronskian); trace M = 2 at
    every periodic eigenvalue.
    """
    if a <= 0.0:
        raise ValueError("period must be positive")
    y0 = np.array([[1.0, 0.0], [0.0, 1.0]])
    y_end = integrate_batch(V, float(lam), y0, a, tol=tol, max_step=max_step)
    return np.array(y_end)
