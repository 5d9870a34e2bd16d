"""Morse index of a torus from the 1-D spectrum of its profile operator.

Every eigenvalue lam of the profile operator feeds the surface
operator once directly and twice through each circular harmonic
cos(n y), sin(n y) at the shifted value lam + n^2.  A negative lam
therefore contributes

    ell(lam) = 1 + 2 * #{ n >= 1 : lam < -n^2 }
             = 2 i - 1   for lam in [-i^2, -(i-1)^2),

negative directions, and the Morse index is the multiplicity-weighted
sum of ell over the negative part of the 1-D spectrum.

Two eigenvalues are known exactly from the surface geometry: 0 (always
present) and -1 (multiplicity 2, present exactly when the profile
closes up).  Since ell jumps at both values, the computed spectrum is
snapped onto them before summing; the snap distances are reported, and
a missing cluster is a validation failure, not something to paper
over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .spectrum import EigenvalueRecord, Spectrum

__all__ = [
    "ell",
    "snap_known",
    "SnapError",
    "SnapInfo",
    "morse_index",
    "IndexCounts",
    "lower_bound",
    "MorseReport",
]

SNAP_TOL = 5e-4


class SnapError(ValueError):
    """No eigenvalue cluster where one is known to exist: the solver
    output is not accurate enough to snap."""


class IncompleteSpectrumError(ValueError):
    """Morse index requires a complete spectrum through 0 with the
    next eigenvalue certified positive."""


def ell(lam: float) -> int:
    """Harmonic weight: 0 for lam >= 0, else 2i - 1 on [-i^2, -(i-1)^2).

    Boundary values follow the strict inequality lam < -n^2, so
    ell(-1) = 1 and ell(-4) = 3.
    """
    if not math.isfinite(lam):
        raise ValueError("lam must be finite")
    if lam >= 0.0:
        return 0
    i = 1
    while lam < -float(i * i):
        i += 1
    return 2 * i - 1


@dataclass(frozen=True)
class SnapInfo:
    """Distances moved when snapping the known eigenvalues."""

    dist_minus_one: float
    dist_zero: float


def snap_known(spectrum: Spectrum, tol: float = SNAP_TOL) -> tuple[Spectrum, SnapInfo]:
    """Snap the multiplicity-2 cluster near -1 and the eigenvalue near
    0 onto their exact values.

    Raises SnapError unless the records within ``tol`` of -1 have
    total multiplicity exactly 2 and exactly one record lies within
    ``tol`` of 0.  Exact input passes through unchanged (idempotent).
    """
    near_m1 = [i for i, r in enumerate(spectrum.records) if abs(r.lam + 1.0) <= tol]
    if len(near_m1) != 2:
        raise SnapError(
            f"expected a multiplicity-2 cluster within {tol} of -1, found "
            f"{len(near_m1)} record(s)"
        )
    near_0 = [i for i, r in enumerate(spectrum.records) if abs(r.lam) <= tol]
    if len(near_0) != 1:
        raise SnapError(
            f"expected exactly one eigenvalue within {tol} of 0, found "
            f"{len(near_0)}"
        )
    d1 = max(abs(spectrum.records[i].lam + 1.0) for i in near_m1)
    d0 = abs(spectrum.records[near_0[0]].lam)
    records = list(spectrum.records)
    for i in near_m1:
        records[i] = replace(records[i], lam=-1.0)
    records[near_0[0]] = replace(records[near_0[0]], lam=0.0)
    snapped = replace_spectrum_records(spectrum, records)
    return snapped, SnapInfo(dist_minus_one=d1, dist_zero=d0)


def replace_spectrum_records(spectrum: Spectrum, records) -> Spectrum:
    return Spectrum(
        records=list(records),
        lambda_ceiling=spectrum.lambda_ceiling,
        complete=spectrum.complete,
        n_below=spectrum.n_below,
        gap_report=spectrum.gap_report,
        mode=spectrum.mode,
    )


@dataclass(frozen=True)
class IndexCounts:
    """Morse index plus the bucket decomposition of Table-1 style
    reporting: B1 = #{lam < -4}, B2 = #{lam in [-4, -1)},
    B3 = #{lam in (-1, 0)}, all with multiplicity; the exact -1 pair
    and the 0 eigenvalue belong to no bucket."""

    ind: int
    b1: int
    b2: int
    b3: int


def morse_index(spectrum: Spectrum) -> IndexCounts:
    """Sum ell over the negative eigenvalues of a snapped, complete
    spectrum; refuses incomplete input."""
    if not spectrum.complete or spectrum.n_below != 0:
        raise IncompleteSpectrumError(
            "spectrum is not certified complete from the bottom; refusing to "
            "count negative eigenvalues"
        )
    if spectrum.lambda_ceiling <= 0.0:
        raise IncompleteSpectrumError("spectrum must certify lambda_next > 0")
    if not any(r.lam == 0.0 for r in spectrum.records):
        raise IncompleteSpectrumError("snapped spectrum must contain 0")
    neg = [r.lam for r in spectrum.records if r.lam < 0.0]
    ind = sum(ell(lam) for lam in neg)
    b1 = sum(1 for lam in neg if lam < -4.0)
    b2 = sum(1 for lam in neg if -4.0 <= lam < -1.0)
    b3 = sum(1 for lam in neg if -1.0 < lam < 0.0)
    n_minus_one = sum(1 for lam in neg if lam == -1.0)
    if b1 == 0 and all(lam >= -9.0 for lam in neg) and n_minus_one == 2:
        assert ind == 3 * b2 + b3 + 2, "bucket identity violated"
    return IndexCounts(ind=ind, b1=b1, b2=b2, b3=b3)


def lower_bound(family: str, k: int, w: int) -> int:
    """Best applicable proven lower bound for the Morse index of a
    non-flat torus with k bulges and wrapping number w:

      * always           max(5, 2k + 1)
      * nodoidal, k >= 2  also max(11, 2k + 5)
      * unduloidal, w >= 2 also max(6w - 1, 2k + 4w - 3)
    """
    if k < 1 or w < 1:
        raise ValueError("k and w must be positive")
    bound = max(5, 2 * k + 1)
    if family == "nodoidal" and k >= 2:
        bound = max(bound, 11, 2 * k + 5)
    if family == "unduloidal" and w >= 2:
        bound = max(bound, 6 * w - 1, 2 * k + 4 * w - 3)
    return bound


@dataclass
class MorseReport:
    """Per-surface result bundle: the snapped nonpositive spectrum,
    index, buckets, the proven lower bound, and the gap between them."""

    surface: str
    family: str
    k: int
    w: int
    spectrum: Spectrum
    ind: int
    b1: int
    b2: int
    b3: int
    lower_bound: int
    bound_gap: int
    snap: SnapInfo

    @classmethod
    def from_spectrum(
        cls,
        surface: str,
        family: str,
        k: int,
        w: int,
        spectrum: Spectrum,
        snap_tol: float = SNAP_TOL,
    ) -> "MorseReport":
        snapped, info = snap_known(spectrum, tol=snap_tol)
        counts = morse_index(snapped)
        nonpos = replace_spectrum_records(snapped, snapped.nonpositive())
        lb = lower_bound(family, k, w)
        return cls(
            surface=surface,
            family=family,
            k=k,
            w=w,
            spectrum=nonpos,
            ind=counts.ind,
            b1=counts.b1,
            b2=counts.b2,
            b3=counts.b3,
            lower_bound=lb,
            bound_gap=counts.ind - lb,
            snap=info,
        )
