"""K and dn against quadrature and scipy oracles, plus the identities
that pin down the implementation (period, evenness, range, derivative)."""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from torusspec.elliptic import EllipticModulus, complete_K, dn
from torusspec.elliptic import EllipticDomainError

# Table-derived modulus of the U1 surface
TAU_U1 = math.sqrt(1.0 - (0.1583 / 0.4078) ** 2)


def quad_K(tau: float) -> float:
    """Defining integral, substituted rho = sin(theta) to remove the
    endpoint singularity, by adaptive quadrature."""
    val, err = scipy.integrate.quad(
        lambda th: 1.0 / math.sqrt(1.0 - (tau * math.sin(th)) ** 2),
        0.0,
        math.pi / 2,
        epsabs=1e-13,
        epsrel=1e-13,
    )
    assert err < 1e-11
    return val


def test_K_modulus_zero():
    assert complete_K(EllipticModulus.from_tau(0.0)) == pytest.approx(
        math.pi / 2, abs=1e-15
    )


def test_K_against_quadrature():
    m = EllipticModulus.from_tau(0.5)
    assert complete_K(m) == pytest.approx(quad_K(0.5), abs=1e-10)


@pytest.mark.parametrize("tau", [0.1, 0.3, 0.7, 0.9, 0.99, 0.9999])
def test_K_against_scipy(tau):
    m = EllipticModulus.from_tau(tau)
    assert complete_K(m) == pytest.approx(
        scipy.special.ellipk(tau * tau), rel=1e-12
    )


def test_K_strictly_increasing():
    taus = np.linspace(0.0, 0.999, 50)
    ks = [complete_K(EllipticModulus.from_tau(t)) for t in taus]
    assert np.all(np.diff(ks) > 0)


def test_K_table_row_consistency():
    # s * a / k for the U1 row approximates K(tau) at catalog rounding
    m = EllipticModulus.from_tau(TAU_U1)
    assert complete_K(m) == pytest.approx(0.4078 * 11.7053 / 2, rel=5e-3)


def test_K_domain_errors():
    with pytest.raises(EllipticDomainError):
        EllipticModulus.from_tau(1.0)
    with pytest.raises(EllipticDomainError):
        EllipticModulus.from_tau(-0.1)
    with pytest.raises(EllipticDomainError):
        EllipticModulus.from_complement(0.0)


def test_modulus_complement_consistency():
    m = EllipticModulus.from_complement(0.1583 / 0.4078)
    assert m.tau**2 + m.tau_prime**2 == pytest.approx(1.0, abs=1e-15)
    assert m.tau == pytest.approx(TAU_U1, abs=1e-15)


def test_dn_at_zero():
    for tau in (0.0, 0.3, 0.92157, 0.999):
        assert dn(0.0, EllipticModulus.from_tau(tau)) == 1.0


def test_dn_modulus_zero_is_one():
    m = EllipticModulus.from_tau(0.0)
    for u in (-7.3, 0.0, 2.0, 123.456):
        assert dn(u, m) == 1.0


def test_dn_at_quarter_period():
    # dn(K) = tau_prime, via the independent scipy implementation
    m = EllipticModulus.from_tau(0.92157)
    K = complete_K(m)
    assert dn(K, m) == pytest.approx(m.tau_prime, abs=1e-10)
    assert dn(K, m) == pytest.approx(
        scipy.special.ellipj(K, m.tau**2)[2], abs=1e-10
    )


@pytest.mark.parametrize("tau", [0.2, 0.5, 0.92157, 0.99855])
def test_dn_against_scipy_oracle(tau):
    m = EllipticModulus.from_tau(tau)
    us = np.linspace(-60.0, 60.0, 1201)
    mine = dn(us, m)
    _, _, theirs, _ = scipy.special.ellipj(us, tau * tau)
    assert np.max(np.abs(mine - theirs)) < 1e-12


@given(u=st.floats(-200.0, 200.0), tau=st.floats(0.0, 0.999))
@settings(max_examples=200, deadline=None)
def test_dn_evenness_and_range(u, tau):
    m = EllipticModulus.from_tau(tau)
    d = dn(u, m)
    assert dn(-u, m) == d  # structural evenness, exact
    assert m.tau_prime - 1e-12 <= d <= 1.0 + 1e-12


def test_dn_periodicity():
    m = EllipticModulus.from_tau(TAU_U1)
    K = complete_K(m)
    rng = np.random.default_rng(7)
    us = rng.uniform(-40.0, 40.0, 500)
    assert np.max(np.abs(dn(us + 2 * K, m) - dn(us, m))) < 1e-10


def test_dn_derivative_identity():
    # d/du dn = -tau^2 sn cn, sn/cn from the independent oracle
    m = EllipticModulus.from_tau(0.8)
    us = np.linspace(0.05, 4.0, 100)
    h = 1e-5
    fd = (dn(us + h, m) - dn(us - h, m)) / (2 * h)
    sn, cn, _, _ = scipy.special.ellipj(us, m.tau**2)
    assert np.max(np.abs(fd + m.tau**2 * sn * cn)) < 1e-6


def test_dn_scalar_and_array_agree():
    m = EllipticModulus.from_tau(0.7)
    us = np.array([0.0, 0.3, 1.9, 55.5])
    arr = dn(us, m)
    for u, v in zip(us, arr):
        assert dn(float(u), m) == pytest.approx(v, abs=1e-15)


def test_dn_rejects_nonfinite():
    m = EllipticModulus.from_tau(0.5)
    with pytest.raises(ValueError):
        dn(math.nan, m)
    with pytest.raises(ValueError):
        dn(np.array([1.0, math.inf]), m)
