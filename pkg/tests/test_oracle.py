"""The oracles themselves must be right before they can check anything:
closed-form cases for the constant spectrum, dense-eigensolver and
discrete-Fourier cross-checks for the finite-difference path."""

import math

import numpy as np
import pytest

from torusspec.oracle import _negcount_dirichlet, _negcount_periodic
from torusspec.oracle import constant_spectrum, fd_spectrum
from torusspec.spectrum import DIRICHLET, PERIODIC, SpectralProblem

from conftest import constant_problem


def test_constant_spectrum_fourier():
    spec = constant_spectrum(0.0, 2 * math.pi, 2)
    assert spec.eigenvalues() == pytest.approx([0.0, 1.0, 1.0, 4.0, 4.0])
    assert [r.node_count for r in spec.records] == [0, 2, 2, 4, 4]
    assert spec.complete


def test_constant_spectrum_shift():
    spec = constant_spectrum(1.0, 2 * math.pi, 1)
    assert spec.records[0].lam == -1.0


def test_constant_spectrum_node_law():
    spec = constant_spectrum(0.3, 5.0, 6)
    for r in spec.records:
        assert r.node_count == r.index_j - (r.index_j % 2)


def test_negcount_matches_dense_eigenvalues():
    # small periodic matrix against numpy's dense eigensolver
    rng = np.random.default_rng(5)
    n = 24
    diag = rng.uniform(1.0, 3.0, n)
    off = -0.7
    A = np.diag(diag) + off * (np.eye(n, k=1) + np.eye(n, k=-1))
    A[0, -1] = A[-1, 0] = off
    evals = np.linalg.eigvalsh(A)
    sigmas = np.linspace(evals[0] - 0.5, evals[-1] + 0.5, 41)
    counts = _negcount_periodic(diag, off, sigmas)
    expected = np.array([np.sum(evals < s) for s in sigmas])
    assert np.array_equal(counts, expected)
    # and the pure tridiagonal variant
    A[0, -1] = A[-1, 0] = 0.0
    evals = np.linalg.eigvalsh(A)
    counts = _negcount_dirichlet(diag, off * off, sigmas)
    expected = np.array([np.sum(evals < s) for s in sigmas])
    assert np.array_equal(counts, expected)


def test_fd_free_particle_periodic():
    problem = constant_problem(0.0, 2 * math.pi)
    vals = fd_spectrum(problem, 512, 3)
    # discrete eigenvalues (2/h^2)(1 - cos(2 pi n h / a))
    assert vals[0] == pytest.approx(0.0, abs=1e-9)
    assert vals[1] == pytest.approx(1.0, abs=2e-4)
    assert vals[2] == pytest.approx(1.0, abs=2e-4)


def test_fd_free_particle_dirichlet():
    problem = SpectralProblem(
        V=lambda x: 0.0 if np.ndim(x) == 0 else np.zeros_like(np.asarray(x, float)),
        a=math.pi,
        mode=DIRICHLET,
    )
    vals = fd_spectrum(problem, 1024, 3)
    assert vals == pytest.approx([1.0, 4.0, 9.0], abs=5e-4)


def test_fd_u1_bottom_eigenvalue(u1):
    vals = fd_spectrum(u1.problem, 4096, 1)
    assert vals[0] == pytest.approx(-1.28, abs=5e-3)


def test_fd_second_order_convergence(u1):
    lam1 = u1.raw_spectrum.records[0].lam
    errs = [
        abs(fd_spectrum(u1.problem, n, 1)[0] - lam1) for n in (1024, 2048, 4096)
    ]
    # O(h^2): each halving of h shrinks the error ~4x
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.35)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.35)


def test_fd_resolution_guard(u1):
    with pytest.raises(ValueError):
        fd_spectrum(u1.problem, 32, 1)


def test_shooting_vs_constant_oracle_dense():
    # a longer domain exercises index assignment across many doubles
    from torusspec.spectrum import find_spectrum

    a = 11.7053
    problem = constant_problem(0.0, a)
    exact = constant_spectrum(0.0, a, 4)
    got = find_spectrum(problem, lam_max=exact.lambda_ceiling - 0.05, grid=0.05)
    assert got.complete
    assert len(got.records) == len(exact.records)
    assert np.max(np.abs(got.eigenvalues() - exact.eigenvalues())) < 1e-8
