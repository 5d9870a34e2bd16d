"""Periodic and Dirichlet spectra by shooting and node counting.

For an even, a-periodic potential the periodic eigenfunctions split
into even and odd families, and the two half-period shooting functions

    D_even(lam) = f'(a/2)   for the shot  f(0)=1, f'(0)=0,
    D_odd(lam)  = f(a/2)    for the shot  f(0)=0, f'(0)=1,

vanish exactly at the eigenvalues with even / odd eigenfunctions
(evenness about 0 plus a vanishing value or slope at a/2 forces full
a-periodicity).  Both functions have only simple zeros, so bracketing
on a lambda grid followed by bisection finds every eigenvalue; a
coincident even and odd zero is a multiplicity-2 eigenvalue.

The spectral index j of each eigenvalue is then read off from the node
count n of its eigenfunction over one period: n = j when j is even and
n = j - 1 when j is odd, so the sorted node counts of a complete
spectrum are exactly 0, 2, 2, 4, 4, ...  A gap in that pattern proves
the scan missed an eigenvalue, which is how completeness below the
scan ceiling is certified.

For the Dirichlet problem on [0, a] the single shooting function is
f(a) for the shot (0, 1); eigenvalues are simple and the eigenfunction
of the j-th one has exactly j + 1 nodes counting both endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import integrator

__all__ = [
    "SpectralProblem",
    "EigenvalueRecord",
    "Spectrum",
    "SpectrumComputationError",
    "TangencyError",
    "NotAnEigenvalueError",
    "discriminant",
    "find_spectrum",
    "find_dirichlet_spectrum",
    "eigenfunction_samples",
    "EigenfunctionSamples",
    "count_sign_changes",
]

PERIODIC = "periodic_symmetric"
DIRICHLET = "dirichlet"

EVEN, ODD, BOTH = "even", "odd", "both"

DEFAULT_GRID = 1e-3
# Default scan window: lambda_1 > -max(V) by the Rayleigh quotient, so
# -max(V) - 0.1 catches everything; +0.5 certifies that the smallest
# positive eigenvalue really is positive.
SCAN_MARGIN = 0.1
DEFAULT_LAMBDA_MAX = 0.5
# Even/odd roots this close (relative) with equal node counts are one
# multiplicity-2 eigenvalue; exact doubles reappear split only at the
# solver-accuracy level, orders of magnitude below this.
MERGE_TOL = 1e-6
# Bisection width target for root polishing, relative to max(1, |lam|).
POLISH_TOL = 1e-11
_RESIDUAL_TOL = 1e-5


class SpectrumComputationError(RuntimeError):
    """A node-count theorem failed on computed output: the tolerances
    are insufficient for this problem, not a property of the physics."""


class TangencyError(SpectrumComputationError):
    """Two same-parity roots coincide; for symmetric potentials the
    parity split resolves all multiplicity, so this is a tolerance
    failure."""


class NotAnEigenvalueError(ValueError):
    """Requested an eigenfunction at a lambda whose discriminant
    residual is above tolerance."""


@dataclass(frozen=True)
class SpectralProblem:
    """A potential on [0, a] with its boundary mode.

    ``potential_period`` (if known) bounds the integrator step so no
    oscillation of V is skipped; the maximum step is
    (potential_period or a) / 16.  ``V`` must accept scalars; array
    support is used opportunistically (sampling, finite differences).
    """

    V: object
    a: float
    mode: str
    potential_period: float | None = None
    tol: float = integrator.DEFAULT_TOL
    name: str = ""

    def __post_init__(self):
        if self.mode not in (PERIODIC, DIRICHLET):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (self.a > 0.0):
            raise ValueError("domain length must be positive")

    @property
    def max_step(self) -> float:
        return (self.potential_period or self.a) / 16.0

    def sample_V(self, n: int = 2048) -> np.ndarray:
        xs = np.linspace(0.0, self.a, n, endpoint=False)
        try:
            vals = np.asarray(self.V(xs), dtype=float)
            if vals.shape != xs.shape:
                raise TypeError
        except Exception:
            vals = np.array([float(self.V(x)) for x in xs])
        return vals

    def verify_symmetry(self, n: int = 1000, tol: float = 1e-10, seed: int = 0) -> None:
        """Spot-check V(x) = V(-x) and V(x + a) = V(x) for the
        periodic-symmetric mode; raises ValueError on violation."""
        if self.mode != PERIODIC:
            return
        rng = np.random.default_rng(seed)
        xs = rng.uniform(-self.a, self.a, n)
        scale = max(1.0, float(np.max(np.abs(self.sample_V(256)))))
        for x in xs:
            if abs(self.V(x) - self.V(-x)) > tol * scale:
                raise ValueError(f"V is not even: V({x}) != V({-x})")
            if abs(self.V(x + self.a) - self.V(x)) > tol * scale:
                raise ValueError(f"V is not {self.a}-periodic at x={x}")


@dataclass(frozen=True)
class EigenvalueRecord:
    """One eigenvalue slot (doubles occupy two consecutive slots)."""

    lam: float
    parity: str
    multiplicity: int
    node_count: int
    index_j: int


@dataclass
class Spectrum:
    """Ordered eigenvalue records with a completeness certificate.

    ``records`` is expanded by multiplicity: a double eigenvalue
    contributes two records sharing lam, parity 'both' and
    multiplicity 2.  ``complete`` means the index sequence certifies
    no eigenvalue below ``lambda_ceiling`` was missed (beyond the
    ``n_below`` known to lie under the scan window).
    """

    records: list[EigenvalueRecord]
    lambda_ceiling: float
    complete: bool
    n_below: int = 0
    gap_report: str | None = None
    mode: str = PERIODIC

    def eigenvalues(self) -> np.ndarray:
        return np.array([r.lam for r in self.records])

    def nonpositive(self) -> list[EigenvalueRecord]:
        return [r for r in self.records if r.lam <= 0.0]

    def multiplicity_pattern(self) -> list[int]:
        out, i = [], 0
        while i < len(self.records):
            m = self.records[i].multiplicity
            out.append(m)
            i += m
        return out


def _ic(parity: str) -> tuple[float, float]:
    return (1.0, 0.0) if parity == EVEN else (0.0, 1.0)


def _disc_many(problem: SpectralProblem, lams, parities) -> np.ndarray:
    """Discriminant values for mixed-parity columns in one batch."""
    lams = np.asarray(lams, dtype=float)
    n = len(lams)
    y0 = np.zeros((2, n))
    even_mask = np.array([p == EVEN for p in parities])
    y0[0, even_mask] = 1.0
    y0[1, ~even_mask] = 1.0
    y_end = integrator.integrate_batch(
        problem.V, lams, y0, problem.a / 2.0, tol=problem.tol, max_step=problem.max_step
    )
    return np.where(even_mask, y_end[1], y_end[0])


def discriminant(problem: SpectralProblem, lam: float) -> tuple[float, float]:
    """(D_even, D_odd) at one lambda; zeros are the even/odd-parity
    periodic eigenvalues."""
    if problem.mode != PERIODIC:
        raise ValueError("discriminant is defined for the periodic mode")
    d = _disc_many(problem, [lam, lam], [EVEN, ODD])
    return float(d[0]), float(d[1])


def _scan_roots(lams: np.ndarray, D: np.ndarray):
    """Sign-change brackets plus any grid points that are exact roots.

    The strict product excludes intervals with a zero endpoint, so an
    exact grid-point root is reported once (as ``exact``) and never
    re-bracketed by its neighbors."""
    s = np.sign(D)
    exact = list(np.nonzero(s == 0.0)[0])
    brackets = list(np.nonzero(s[:-1] * s[1:] < 0)[0])
    return brackets, exact


def _bisect_roots(values_at, los, his, polish_tol=POLISH_TOL):
    """Vectorized bisection of bracketed simple roots.

    A bracket whose own endpoint evaluations fail to straddle zero
    means a grid point landed within integration noise of the root
    (the scan and the polish batches take different step sequences, so
    a noise-level value can change sign between them); the root is
    then the endpoint nearer zero.
    """
    lo = np.asarray(los, dtype=float)
    hi = np.asarray(his, dtype=float)
    if len(lo) == 0:
        return np.empty(0)
    flo = values_at(lo)
    fhi = values_at(hi)
    degenerate = np.sign(flo) * np.sign(fhi) >= 0
    deg_root = np.where(np.abs(flo) <= np.abs(fhi), lo, hi)
    slo = np.sign(flo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if np.max((hi - lo) / np.maximum(1.0, np.abs(mid))) <= polish_tol:
            break
        smid = np.sign(values_at(mid))
        hit = smid == 0.0
        left = smid * slo < 0
        hi = np.where(left | hit, mid, hi)
        lo = np.where(~left | hit, mid, lo)
        slo = np.where(left, slo, smid)
    return np.where(degenerate, deg_root, 0.5 * (lo + hi))


def _polish_batch(problem, los, his, parities, polish_tol=POLISH_TOL):
    return _bisect_roots(
        lambda lams: _disc_many(problem, lams, parities), los, his, polish_tol
    )


def _count_nodes(problem, lams, parities) -> np.ndarray:
    """Full-period (or full-interval) node counts on [0, a)."""
    lams = np.asarray(lams, dtype=float)
    y0 = np.zeros((2, len(lams)))
    even_mask = np.array([p == EVEN for p in parities])
    y0[0, even_mask] = 1.0
    y0[1, ~even_mask] = 1.0
    _, counts = integrator.count_nodes_batch(
        problem.V, lams, y0, problem.a, tol=problem.tol, max_step=problem.max_step
    )
    return counts


def _canonical_count(j: int) -> int:
    return j - (j % 2)


def _assign_indices(entries, lam_min, v_max, mode, n_osc=None):
    """Match sorted node counts against the theorem pattern.

    ``entries`` is the expanded list of (lam, parity, multiplicity,
    count).  When the window bottom sits above -max(V), the number of
    eigenvalues below it is inferred from the pattern, cross-checked
    against ``n_osc`` (the oscillation count of a shot at lam_min,
    which by Sturm theory pins that number to within ~1); this stops a
    missed block at the bottom of the window from silently shifting
    every index.  Returns (records, complete, n_below, gap_report).
    """
    if mode == PERIODIC:
        canonical = _canonical_count
    else:
        canonical = lambda j: j + 1  # noqa: E731  (Dirichlet: j+1 nodes)

    counts = [e[3] for e in entries]
    n = len(counts)
    fixed_offset = lam_min <= -v_max + 1e-9
    candidates = [0] if fixed_offset else range(0, 2 * (counts[-1] + 2) if n else 1)
    best = None
    for m0 in candidates:
        if n_osc is not None and abs(m0 - n_osc) > 2:
            continue
        if all(counts[i] == canonical(m0 + 1 + i) for i in range(n)):
            best = m0
            break
    if best is None:
        # locate the first offending jump for the report
        m0 = 0
        bad = next(
            (i for i in range(n) if counts[i] != canonical(m0 + 1 + i)), None
        )
        report = (
            f"node counts {counts} do not form the index pattern starting at "
            f"j={m0 + 1}"
            + (
                f"; first mismatch at position {bad}: count {counts[bad]} != "
                f"{canonical(m0 + 1 + bad)} (an eigenvalue was missed; refine "
                "the scan grid)"
                if bad is not None
                else ""
            )
        )
        records = [
            EigenvalueRecord(lam, par, mult, cnt, index_j=0)
            for (lam, par, mult, cnt) in entries
        ]
        return records, False, 0, report

    records = [
        EigenvalueRecord(lam, par, mult, cnt, index_j=best + 1 + i)
        for i, (lam, par, mult, cnt) in enumerate(entries)
    ]
    return records, True, best, None


def _check_periodic_theorems(records):
    """Runtime assertions of the node-count theorems on the output."""
    prev_count = -1
    for r in records:
        if r.node_count % 2 != 0:
            raise SpectrumComputationError(
                f"odd node count {r.node_count} at lambda={r.lam}"
            )
        if r.node_count < prev_count:
            raise SpectrumComputationError("node counts decreased along spectrum")
        prev_count = r.node_count
        if r.index_j and r.node_count > r.index_j:
            raise SpectrumComputationError(
                f"Courant bound violated: {r.node_count} nodes at j={r.index_j}"
            )
    if records and records[0].index_j == 1 and records[0].multiplicity != 1:
        raise SpectrumComputationError("first eigenvalue must be simple")


def find_spectrum(
    problem: SpectralProblem,
    lam_min: float | None = None,
    lam_max: float | None = None,
    grid: float = DEFAULT_GRID,
    merge_tol: float = MERGE_TOL,
) -> Spectrum:
    """Locate every periodic eigenvalue in [lam_min, lam_max].

    Discriminant zeros are bracketed on the grid, polished by
    bisection, node-counted by a fresh full-period shot, merged into
    multiplicity-2 records when an even and an odd root coincide, and
    indexed via the node-count law.  ``complete`` is False (with a
    ``gap_report``) when the indices show a hole; the caller should
    refine ``grid``.
    """
    if problem.mode != PERIODIC:
        raise ValueError("find_spectrum requires the periodic_symmetric mode")
    if grid <= 0.0:
        raise ValueError("grid must be positive")
    v_max = float(np.max(problem.sample_V()))
    if lam_min is None:
        lam_min = -v_max - SCAN_MARGIN
    if lam_max is None:
        lam_max = DEFAULT_LAMBDA_MAX
    if lam_min >= lam_max:
        raise ValueError("lam_min must be below lam_max")

    lams = np.arange(lam_min, lam_max + 0.5 * grid, grid)
    n = len(lams)
    D = _disc_many(
        problem,
        np.concatenate([lams, lams]),
        [EVEN] * n + [ODD] * n,
    )
    roots_by_parity: dict[str, np.ndarray] = {}
    for parity, Dp in ((EVEN, D[:n]), (ODD, D[n:])):
        brackets, exact = _scan_roots(lams, Dp)
        polished = _polish_batch(
            problem,
            [lams[i] for i in brackets],
            [lams[i + 1] for i in brackets],
            [parity] * len(brackets),
        )
        roots = np.sort(np.concatenate([polished, lams[exact]]))
        gaps = np.diff(roots)
        if np.any(gaps < merge_tol * np.maximum(1.0, np.abs(roots[1:]))):
            raise TangencyError(
                f"coincident same-parity ({parity}) roots found; "
                "discriminant tangency unresolved at this tolerance"
            )
        roots_by_parity[parity] = roots

    re_, ro_ = roots_by_parity[EVEN], roots_by_parity[ODD]
    counts = _count_nodes(
        problem,
        np.concatenate([re_, ro_]),
        [EVEN] * len(re_) + [ODD] * len(ro_),
    )
    ce, co = counts[: len(re_)], counts[len(re_):]

    # merge even/odd coincidences into doubles
    entries = []  # (lam, parity, multiplicity, node_count)
    i = j = 0
    while i < len(re_) or j < len(ro_):
        if i < len(re_) and j < len(ro_):
            le, lo_ = re_[i], ro_[j]
            if abs(le - lo_) < merge_tol * max(1.0, abs(le)):
                if ce[i] != co[j]:
                    raise SpectrumComputationError(
                        f"merged pair at lambda~{le:.6g} has unequal node "
                        f"counts {ce[i]} != {co[j]}"
                    )
                lam = 0.5 * (le + lo_)
                entries.append((lam, BOTH, 2, int(ce[i])))
                entries.append((lam, BOTH, 2, int(ce[i])))
                i += 1
                j += 1
                continue
            if le < lo_:
                entries.append((float(le), EVEN, 1, int(ce[i])))
                i += 1
            else:
                entries.append((float(lo_), ODD, 1, int(co[j])))
                j += 1
        elif i < len(re_):
            entries.append((float(re_[i]), EVEN, 1, int(ce[i])))
            i += 1
        else:
            entries.append((float(ro_[j]), ODD, 1, int(co[j])))
            j += 1

    n_osc = None
    if lam_min > -v_max + 1e-9:
        n_osc = int(_count_nodes(problem, [lam_min], [ODD])[0])
    records, complete, n_below, gap = _assign_indices(
        entries, lam_min, v_max, PERIODIC, n_osc=n_osc
    )
    if complete:
        _check_periodic_theorems(records)
    return Spectrum(
        records=records,
        lambda_ceiling=lam_max,
        complete=complete,
        n_below=n_below,
        gap_report=gap,
        mode=PERIODIC,
    )


def find_dirichlet_spectrum(
    problem: SpectralProblem, count: int, grid: float = DEFAULT_GRID
) -> Spectrum:
    """First ``count`` Dirichlet eigenvalues on [0, a].

    Zeros of lam -> f(a; lam) for the shot (0, 1); all simple.  Node
    counts include both clamped endpoints, so the j-th eigenfunction
    has j + 1 of them.  The scan window grows (Weyl-guided) until
    ``count`` roots with consecutive indices are in hand; a persistent
    index gap raises after local grid refinement fails.
    """
    if problem.mode != DIRICHLET:
        raise ValueError("find_dirichlet_spectrum requires the dirichlet mode")
    if count < 1:
        raise ValueError("count must be >= 1")
    v = problem.sample_V()
    v_max = float(np.max(v))
    lam_min = -v_max - SCAN_MARGIN
    # Weyl estimate for the count-th eigenvalue, padded
    lam_max = -float(np.min(v)) + (math.pi * (count + 1) / problem.a) ** 2 + 1.0

    def scan(lo, hi, step):
        xs = np.arange(lo, hi + 0.5 * step, step)
        f_end = _dirichlet_values(problem, xs)
        brackets, exact = _scan_roots(xs, f_end)
        polished = _polish_dirichlet(
            problem, [xs[i] for i in brackets], [xs[i + 1] for i in brackets]
        )
        return np.sort(np.concatenate([polished, xs[exact]]))

    roots = scan(lam_min, lam_max, grid)
    for _ in range(20):
        if len(roots) >= count:
            break
        lam_max += 0.5 * (lam_max - lam_min) + 1.0
        roots = scan(lam_min, lam_max, grid)
    if len(roots) < count:
        raise SpectrumComputationError(
            f"found only {len(roots)} Dirichlet eigenvalues below {lam_max}"
        )
    roots = roots[:count]
    counts = _count_nodes(problem, roots, [ODD] * len(roots)) + 1  # + endpoint a

    for refine_round in range(4):
        entries = [
            (float(lam), ODD, 1, int(c)) for lam, c in zip(roots, counts)
        ]
        records, complete, n_below, gap = _assign_indices(
            entries, lam_min, v_max, DIRICHLET
        )
        if complete:
            break
        # a hole in the indices: rescan the bracketing lambda range finer
        grid /= 16.0
        roots = scan(lam_min, lam_max, grid)[:count]
        counts = _count_nodes(problem, roots, [ODD] * len(roots)) + 1
    return Spectrum(
        records=records,
        lambda_ceiling=float(roots[-1]) if len(roots) else lam_max,
        complete=complete,
        n_below=n_below,
        gap_report=gap,
        mode=DIRICHLET,
    )


def _dirichlet_values(problem, lams) -> np.ndarray:
    lams = np.asarray(lams, dtype=float)
    y0 = np.zeros((2, len(lams)))
    y0[1, :] = 1.0
    y_end = integrator.integrate_batch(
        problem.V, lams, y0, problem.a, tol=problem.tol, max_step=problem.max_step
    )
    return y_end[0]


def _polish_dirichlet(problem, los, his, polish_tol=POLISH_TOL):
    return _bisect_roots(
        lambda lams: _dirichlet_values(problem, lams), los, his, polish_tol
    )


@dataclass
class EigenfunctionSamples:
    """Uniform samples of the eigenfunction(s) at one eigenvalue,
    normalized to max |f| = 1.  Doubles carry both parity columns."""

    lam: float
    node_count: int
    x: np.ndarray
    f: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def parities(self) -> list[str]:
        return list(self.f)


def eigenfunction_samples(
    problem: SpectralProblem, record: EigenvalueRecord, n_samples: int
) -> EigenfunctionSamples:
    """Sample the eigenfunction(s) of ``record`` at n uniform points
    on [0, a]; raises NotAnEigenvalueError when the discriminant
    residual at record.lam is above tolerance (e.g. a snapped value
    fed back into a detuned operator)."""
    if n_samples < 2:
        raise ValueError("need at least 2 sample points")
    xs = np.linspace(0.0, problem.a, n_samples)
    parities = [EVEN, ODD] if record.parity == BOTH else [record.parity]
    out = EigenfunctionSamples(lam=record.lam, node_count=record.node_count, x=xs)
    for parity in parities:
        f0, df0 = _ic(parity)
        trace = integrator.integrate(
            problem.V,
            record.lam,
            f0,
            df0,
            problem.a,
            tol=problem.tol,
            max_step=problem.max_step,
            sample_at=xs,
        )
        if problem.mode == PERIODIC:
            resid = abs(
                _disc_many(problem, [record.lam], [parity])[0]
            )
        else:
            resid = abs(trace.f_end)
        if resid > _RESIDUAL_TOL * max(1.0, trace.max_abs_f):
            raise NotAnEigenvalueError(
                f"lambda={record.lam} is not an eigenvalue of this problem "
                f"(scaled {parity} residual {resid / max(1.0, trace.max_abs_f):.2e})"
            )
        f = trace.samples[1]
        out.f[parity] = f / np.max(np.abs(f))
    return out


def count_sign_changes(values: np.ndarray) -> int:
    """Node count of a sampled function: strict sign changes, interior
    exact zeros inheriting the previous sign (so a zero sample is not
    counted twice), plus the leading sample when it is exactly zero (a
    clamped or odd eigenfunction starts on a node)."""
    s = np.sign(np.asarray(values, dtype=float))
    lead = int(len(s) > 0 and s[0] == 0.0)
    for i in range(1, len(s)):
        if s[i] == 0.0:
            s[i] = s[i - 1]
    return lead + int(np.sum(s[1:] * s[:-1] < 0))
