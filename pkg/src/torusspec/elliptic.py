"""Jacobi dn and the complete elliptic integral K, via AGM iteration.

Only the two special functions the torus potential actually needs are
implemented: K(tau) and dn(u, tau), both for real modulus 0 <= tau < 1.
K comes straight from the arithmetic-geometric mean; dn from the
descending Landen (Gauss) transformation driven by the same AGM
sequence, so there is no external special-function dependency and both
are accurate to machine precision.

Conventions: tau is the *modulus* (not the parameter m = tau^2), and
tau_prime = sqrt(1 - tau^2) is the complementary modulus.  dn has
period 2K and range [tau_prime, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["EllipticModulus", "complete_K", "dn"]

# AGM terminates when |a_n - b_n| < AGM_RTOL * a_n (quadratic
# convergence: 6-9 iterations for any tau in [0, 1)).
AGM_RTOL = 1e-15


class EllipticDomainError(ValueError):
    """Modulus outside [0, 1): K diverges as tau -> 1."""


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus tau with its complement, kept consistent to roundoff.

    Construct via ``from_tau`` or ``from_complement``; the latter is
    preferred when the complement is the directly known quantity
    (e.g. tau_prime = |t|/s for the torus family), since it avoids the
    cancellation in sqrt(1 - tau^2) for tau near 1.
    """

    tau: float
    tau_prime: float

    @classmethod
    def from_tau(cls, tau: float) -> "EllipticModulus":
        if not (0.0 <= tau < 1.0):
            raise EllipticDomainError(f"modulus tau={tau!r} outside [0, 1)")
        return cls(tau=float(tau), tau_prime=math.sqrt((1.0 - tau) * (1.0 + tau)))

    @classmethod
    def from_complement(cls, tau_prime: float) -> "EllipticModulus":
        if not (0.0 < tau_prime <= 1.0):
            raise EllipticDomainError(
                f"complementary modulus tau_prime={tau_prime!r} outside (0, 1]"
            )
        tau = math.sqrt((1.0 - tau_prime) * (1.0 + tau_prime))
        return cls(tau=tau, tau_prime=float(tau_prime))

    def __post_init__(self) -> None:
        if not (0.0 <= self.tau < 1.0):
            raise EllipticDomainError(f"modulus tau={self.tau!r} outside [0, 1)")
        if abs(self.tau * self.tau + self.tau_prime * self.tau_prime - 1.0) > 1e-14:
            raise EllipticDomainError("tau^2 + tau_prime^2 != 1")

    @cached_property
    def _agm(self) -> tuple[np.ndarray, np.ndarray]:
        """AGM sequences (a_n, c_n) from a_0 = 1, b_0 = tau_prime, c_0 = tau."""
        a, b, c = 1.0, self.tau_prime, self.tau
        a_seq, c_seq = [a], [c]
        # at least one Landen level even for tiny tau: the dn recursion
        # needs phi_1 as well as phi_0
        first = True
        while first or abs(a - b) > AGM_RTOL * a:
            first = False
            a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
            a_seq.append(a)
            c_seq.append(c)
        return np.array(a_seq), np.array(c_seq)

    @cached_property
    def K(self) -> float:
        """Complete elliptic integral of the first kind, K(tau)."""
        a_seq, _ = self._agm
        return math.pi / (2.0 * a_seq[-1])


def complete_K(m: EllipticModulus) -> float:
    """K(tau) = integral_0^1 drho / sqrt((1-rho^2)(1-tau^2 rho^2)).

    Computed as pi / (2 * AGM(1, tau_prime)); relative error is a few
    ulp for any tau in [0, 1).
    """
    return m.K


def _dn_core_scalar(u: float, a_seq: np.ndarray, c_seq: np.ndarray) -> float:
    # Descending Landen: phi_N = 2^N a_N u, then
    # phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n)) / 2,
    # dn = cos(phi_0) / cos(phi_1 - phi_0).   Requires u in [0, K/2]
    # so that neither cosine approaches zero.
    n_last = len(a_seq) - 1
    phi = float(2.0**n_last * a_seq[-1] * u)
    prev = phi
    for n in range(n_last, 0, -1):
        prev = phi
        x = c_seq[n] / a_seq[n] * math.sin(phi)
        if x > 1.0:
            x = 1.0
        elif x < -1.0:
            x = -1.0
        phi = 0.5 * (phi + math.asin(x))
    return math.cos(phi) / math.cos(prev - phi)


def _dn_core_array(u: np.ndarray, a_seq: np.ndarray, c_seq: np.ndarray) -> np.ndarray:
    n_last = len(a_seq) - 1
    phi = 2.0**n_last * a_seq[-1] * u
    prev = phi
    for n in range(n_last, 0, -1):
        prev = phi
        x = np.clip(c_seq[n] / a_seq[n] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(x))
    return np.cos(phi) / np.cos(prev - phi)


def dn(u, m: EllipticModulus):
    """Jacobi dn(u, tau) for real u; scalar or ndarray in, same out.

    The argument is folded to [0, K] using evenness and the 2K period
    (so accuracy does not degrade for the large arguments the ODE
    integrator produces), and arguments in (K/2, K] are evaluated
    through dn(K - w) = tau_prime / dn(w), which keeps the Landen
    recursion away from its 0/0 point at u = K.
    """
    if m.tau == 0.0:
        if np.ndim(u) == 0:
            return 1.0
        return np.ones_like(np.asarray(u, dtype=float))

    a_seq, c_seq = m._agm
    K = m.K
    if np.ndim(u) == 0:
        if not math.isfinite(u):
            raise ValueError(f"dn argument must be finite, got {u!r}")
        w = abs(float(u))
        w -= 2.0 * K * math.floor(w / (2.0 * K))
        if w > K:
            w = 2.0 * K - w
        if w > 0.5 * K:
            return m.tau_prime / _dn_core_scalar(K - w, a_seq, c_seq)
        return _dn_core_scalar(w, a_seq, c_seq)

    w = np.abs(np.asarray(u, dtype=float))
    if not np.all(np.isfinite(w)):
        raise ValueError("dn argument must be finite")
    w = w - 2.0 * K * np.floor(w / (2.0 * K))
    w = np.where(w > K, 2.0 * K - w, w)
    hi = w > 0.5 * K
    out = np.empty_like(w)
    out[~hi] = _dn_core_array(w[~hi], a_seq, c_seq)
    out[hi] = m.tau_prime / _dn_core_array(K - w[hi], a_seq, c_seq)
    return out
