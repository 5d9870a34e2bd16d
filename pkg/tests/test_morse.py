"""Harmonic weight, snapping, index folding, and the proven bounds."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from torusspec.morse import (
    IncompleteSpectrumError,
    MorseReport,
    SnapError,
    ell,
    lower_bound,
    morse_index,
    snap_known,
)
from torusspec.spectrum import EigenvalueRecord, Spectrum


def make_spectrum(lams, complete=True, ceiling=0.5):
    """Synthetic multiplicity-expanded spectrum with law-consistent
    node counts; adjacent values within 1e-3 form a double."""
    records = []
    i, j = 0, 0
    while i < len(lams):
        double = i + 1 < len(lams) and abs(lams[i + 1] - lams[i]) < 1e-3
        n = 2 if double else 1
        for r in range(n):
            j += 1
            records.append(
                EigenvalueRecord(
                    lam=lams[i + r],
                    parity="both" if double else "even",
                    multiplicity=n,
                    node_count=j - (j % 2),
                    index_j=j,
                )
            )
        i += n
    return Spectrum(
        records=records, lambda_ceiling=ceiling, complete=complete, n_below=0
    )


def test_ell_values():
    assert ell(0.0) == 0
    assert ell(2.5) == 0
    assert ell(-0.25) == 1
    assert ell(-1.0) == 1
    assert ell(-1.28) == 3
    assert ell(-4.0) == 3
    assert ell(-4.0001) == 5
    assert ell(-9.0) == 5


@given(st.floats(-80.0, 50.0))
def test_ell_counting_form(lam):
    # ell(lam) = 1 + 2 #{n >= 1 : lam < -n^2} for negative lam
    if lam >= 0:
        assert ell(lam) == 0
    else:
        n_deep = sum(1 for n in range(1, 12) if lam < -n * n)
        assert ell(lam) == 1 + 2 * n_deep


def test_snap_example():
    spec = make_spectrum([-1.28, -1.00002, -0.99997, -0.25, 0.00001])
    snapped, info = snap_known(spec)
    assert [r.lam for r in snapped.records] == [-1.28, -1.0, -1.0, -0.25, 0.0]
    assert info.dist_minus_one == pytest.approx(3e-5, abs=2e-5)
    assert info.dist_zero == pytest.approx(1e-5, abs=1e-6)


def test_snap_idempotent():
    spec = make_spectrum([-1.28, -1.0, -1.0, -0.25, 0.0])
    snapped, info = snap_known(spec)
    assert [r.lam for r in snapped.records] == [r.lam for r in spec.records]
    assert info.dist_minus_one == 0.0
    assert info.dist_zero == 0.0


def test_snap_missing_zero_errors():
    spec = make_spectrum([-1.28, -1.0, -1.0, -0.25, -0.1])
    with pytest.raises(SnapError):
        snap_known(spec)


def test_snap_missing_pair_errors():
    spec = make_spectrum([-1.28, -0.9, -0.25, 0.0])
    with pytest.raises(SnapError):
        snap_known(spec)


def test_morse_index_u1_shape():
    spec = make_spectrum([-1.28, -1.0, -1.0, -0.25, 0.0])
    counts = morse_index(spec)
    assert counts.ind == 6
    assert (counts.b1, counts.b2, counts.b3) == (0, 1, 1)


def test_morse_index_n1_shape():
    spec = make_spectrum([-1.26, -1.19, -1.19, -1.0, -1.0, -0.85, 0.0])
    counts = morse_index(spec)
    assert counts.ind == 12
    assert (counts.b1, counts.b2, counts.b3) == (0, 3, 1)


def test_morse_index_trivial():
    spec = make_spectrum([0.0])
    counts = morse_index(spec)
    assert counts.ind == 0
    assert (counts.b1, counts.b2, counts.b3) == (0, 0, 0)


def test_morse_index_refuses_incomplete():
    spec = make_spectrum([-1.0, -1.0, 0.0], complete=False)
    with pytest.raises(IncompleteSpectrumError):
        morse_index(spec)


def test_lower_bound_table():
    assert lower_bound("unduloidal", 2, 1) == 5
    assert lower_bound("unduloidal", 3, 2) == 11
    assert lower_bound("nodoidal", 3, 1) == 11
    assert lower_bound("nodoidal", 1, 1) == 5
    assert lower_bound("unduloidal", 11, 6) == 43
    assert lower_bound("nodoidal", 11, 3) == 27


def test_lower_bound_published_lists(surfaces):
    published = {
        "U1": 5, "U2": 7, "U3": 9, "U4": 11, "U5": 13, "U6": 11, "U7": 15,
        "U8": 19, "U9": 23, "U10": 19, "U11": 23, "U12": 31, "U13": 27,
        "U14": 31, "U15": 35, "U16": 35, "U17": 43,
        "N1": 11, "N2": 11, "N3": 13, "N4": 13, "N5": 15, "N6": 17,
        "N7": 15, "N8": 19, "N9": 21, "N10": 27, "N11": 27,
    }
    for name, bound in published.items():
        s = surfaces[name]
        assert lower_bound(s.family, s.k, s.w) == bound, name


def test_report_from_spectrum():
    spec = make_spectrum([-1.28, -1.0001, -0.9999, -0.25, 0.0002])
    report = MorseReport.from_spectrum("U1", "unduloidal", 2, 1, spec, snap_tol=5e-4)
    assert report.ind == 6
    assert report.lower_bound == 5
    assert report.bound_gap == 1
    assert all(r.lam <= 0 for r in report.spectrum.records)
