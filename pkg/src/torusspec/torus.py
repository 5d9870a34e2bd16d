"""Rotationally symmetric CMC-torus potentials on the circle.

A surface in the family is specified by two shape parameters (s, t)
with s > 0 and 0 < |t| < s, a bulge count k and a wrapping number w.
The associated Hill-type potential is

    V(x) = 2 v(x)^2 + 32 s^2 t^2 / v(x)^2,
    v(x) = 2 t / dn_tau(2 s x),      tau = sqrt(1 - t^2 / s^2),

which simplifies to V = 8 t^2 / dn^2 + 8 s^2 dn^2.  v has period
x0 = K(tau) / s, and V itself is even with period x0 (its fundamental
period is actually x0/2, since dn(u + K) = tau_prime / dn(u) swaps the
two terms).  The spectral domain is one full profile period,
a = k * x0.

The auxiliary angle gamma in (0, pi/4] is fixed by
(s + t)^2 - 4 s t sin^2(gamma) = 1/4; cot(2 gamma) is the mean
curvature.  Admissible parameters must satisfy
st in (-(16 sin^2 gamma)^-1, 0) u (0, (16 cos^2 gamma)^-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import EllipticModulus, dn

__all__ = [
    "TorusParams",
    "TorusConstraintError",
    "derive_params",
    "potential",
    "potential_range",
]

UNDULOIDAL = "unduloidal"
NODOIDAL = "nodoidal"

# Catalog a-values are printed to 4 decimals from rounded (s, t); the
# recomputed k*x0 must agree to this relative tolerance.
CATALOG_PERIOD_RTOL = 5e-3
# sin^2(gamma) <= 1/2 exactly on the family, but 4-decimal rounding of
# (s, t) can push it marginally over for near-minimal surfaces (U16:
# 0.50045); allow that much slack.
SIN2_GAMMA_SLACK = 1e-3


class TorusConstraintError(ValueError):
    """Parameters violate the admissibility constraints of the family."""


@dataclass(frozen=True)
class TorusParams:
    """Immutable parameter bundle for one torus potential.

    ``a`` is the spectral domain length, always the self-consistent
    k * x0.  When the parameters came from a catalog row that also
    prints a (rounded) domain length, that value is kept in
    ``a_catalog`` and the relative mismatch in ``period_mismatch`` --
    reported, never silently absorbed.
    """

    s: float
    t: float
    tau: EllipticModulus
    x0: float
    a: float
    k: int
    w: int
    sin2_gamma: float
    mean_curvature: float
    family: str
    a_catalog: float | None = None
    period_mismatch: float = 0.0

    def potential(self, x):
        return potential(self, x)

    def potential_range(self) -> tuple[float, float]:
        return potential_range(self)


def derive_params(
    s: float,
    t: float,
    k: int,
    w: int,
    a_hint: float | None = None,
    family: str | None = None,
) -> TorusParams:
    """Build and validate a TorusParams bundle from raw parameters.

    ``a_hint`` is a catalog-printed domain length used only as a
    consistency check against the computed k * x0 (tolerance
    ``CATALOG_PERIOD_RTOL``); the spectral domain is k * x0.

    ``family`` is required to be 'unduloidal' when s*t > 0; for
    s*t < 0 the family is not determined by (s, t) alone and the
    catalog label is trusted (defaults to 'nodoidal', which covers
    every cataloged surface).
    """
    if not (s > 0.0):
        raise TorusConstraintError(f"require s > 0, got s={s}")
    if t == 0.0 or abs(t) >= s:
        raise TorusConstraintError(
            f"require 0 < |t| < s, got s={s}, t={t} (|t|/s degenerates the modulus)"
        )
    if k < 1 or w < 1:
        raise TorusConstraintError(f"require k >= 1 and w >= 1, got k={k}, w={w}")

    sin2_gamma = ((s + t) ** 2 - 0.25) / (4.0 * s * t)
    if not (0.0 < sin2_gamma <= 0.5 + SIN2_GAMMA_SLACK):
        raise TorusConstraintError(
            f"sin^2(gamma) = {sin2_gamma:.6g} outside (0, 1/2]: "
            "no admissible gamma in (0, pi/4]"
        )
    st = s * t
    if st > 0.0:
        st_limit = 1.0 / (16.0 * (1.0 - sin2_gamma))
        if not (st < st_limit):
            raise TorusConstraintError(
                f"st = {st:.6g} >= (16 cos^2 gamma)^-1 = {st_limit:.6g}"
            )
    else:
        st_limit = -1.0 / (16.0 * sin2_gamma)
        if not (st > st_limit):
            raise TorusConstraintError(
                f"st = {st:.6g} <= -(16 sin^2 gamma)^-1 = {st_limit:.6g}"
            )

    if family is None:
        family = UNDULOIDAL if st > 0.0 else NODOIDAL
    if family not in (UNDULOIDAL, NODOIDAL):
        raise TorusConstraintError(f"unknown family {family!r}")
    if st > 0.0 and family != UNDULOIDAL:
        raise TorusConstraintError("s*t > 0 forces the unduloidal family")

    gamma = math.asin(math.sqrt(sin2_gamma))
    mean_curvature = math.cos(2.0 * gamma) / math.sin(2.0 * gamma)

    tau = EllipticModulus.from_complement(abs(t) / s)
    x0 = tau.K / s
    a = k * x0

    mismatch = 0.0
    if a_hint is not None:
        mismatch = abs(a_hint - a) / a_hint
        if mismatch > CATALOG_PERIOD_RTOL:
            raise TorusConstraintError(
                f"catalog period a={a_hint} inconsistent with k*x0={a:.6f} "
                f"(relative mismatch {mismatch:.2e} > {CATALOG_PERIOD_RTOL})"
            )

    return TorusParams(
        s=float(s),
        t=float(t),
        tau=tau,
        x0=x0,
        a=a,
        k=int(k),
        w=int(w),
        sin2_gamma=sin2_gamma,
        mean_curvature=mean_curvature,
        family=family,
        a_catalog=a_hint,
        period_mismatch=mismatch,
    )


def potential(p: TorusParams, x):
    """V(x) = 8 t^2 / dn(2sx)^2 + 8 s^2 dn(2sx)^2; scalar or ndarray."""
    d2 = dn(2.0 * p.s * x, p.tau)
    d2 = d2 * d2
    return 8.0 * p.t * p.t / d2 + 8.0 * p.s * p.s * d2


def potential_range(p: TorusParams) -> tuple[float, float]:
    """Exact (min, max) of V over a period.

    With q = dn^2 in [tau_prime^2, 1], V(q) = 8t^2/q + 8s^2 q has its
    stationary minimum at q = |t|/s (always inside the range), value
    16|st|, and takes the common value 8(s^2 + t^2) at both endpoints.
    """
    return 16.0 * abs(p.s * p.t), 8.0 * (p.s * p.s + p.t * p.t)
