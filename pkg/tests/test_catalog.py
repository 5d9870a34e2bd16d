"""Catalog parsing, row validation, report round-trips, diffs."""

import json

import numpy as np
import pytest

import torusspec as ts
from torusspec.catalog import (
    CatalogError,
    SpectrumValue,
    load_catalog,
    load_report,
    save_report,
    spectrum_deltas,
)


def test_default_catalog_shape(surfaces):
    assert len(surfaces) == 28
    assert set(surfaces) == {f"U{i}" for i in range(1, 18)} | {
        f"N{i}" for i in range(1, 12)
    }


def test_u1_row(surfaces):
    u1 = surfaces["U1"]
    assert (u1.s, u1.t, u1.a, u1.k, u1.w) == (0.4078, 0.1583, 11.7053, 2, 1)
    assert u1.family == "unduloidal"
    assert u1.expected_ind == 6
    assert u1.expected_b == (0, 1, 1)
    assert [v.value for v in u1.expected_spectrum] == [-1.28, -1, -1, -0.25, 0]


def test_n1_row(surfaces):
    n1 = surfaces["N1"]
    assert n1.family == "nodoidal"
    assert n1.t == -0.0502


def test_all_rows_pass_derivation(surfaces):
    for s in surfaces.values():
        p = s.derive_params()
        assert abs(s.a - s.k * p.x0) / s.a <= 5e-3, s.name


def test_published_consistency_identities(surfaces):
    # multiplicity-expanded length and index identities of the
    # published data itself guard the transcription
    for s in surfaces.values():
        b1, b2, b3 = s.expected_b
        assert len(s.expected_spectrum) == b1 + b2 + b3 + 3, s.name
        assert len(s.expected_spectrum) == 2 * s.k + 1, s.name
        assert s.expected_ind == 3 * b2 + b3 + 2, s.name
        assert s.expected_spectrum[-1].value == 0.0, s.name


def test_spectrum_value_rounding_flags():
    v = SpectrumValue.parse("-1.28")
    assert (v.value, v.decimals, v.tolerance) == (-1.28, 2, 0.005)
    v = SpectrumValue.parse("-0.696")
    assert (v.value, v.decimals, v.tolerance) == (-0.696, 3, 0.0005)
    v = SpectrumValue.parse("-1")
    assert (v.value, v.decimals, v.tolerance) == (-1.0, None, 0.0)


def test_constraint_violating_row_rejected(tmp_path):
    bad = tmp_path / "bad.cat"
    bad.write_text(
        "schema_version 1\n"
        "surface U1\nfamily unduloidal\n"
        "s 0.3\nt 0.4\na 10.0\nk 2\nw 1\n"
        "buckets 0 1 1\nind 6\nspectrum -1 -1 0\nend\n"
    )
    with pytest.raises(CatalogError, match="U1"):
        load_catalog(bad)


def test_parse_diagnostics(tmp_path):
    f = tmp_path / "broken.cat"
    f.write_text("schema_version 1\nsurface X1\ns oops\nend\n")
    with pytest.raises(CatalogError, match="broken.cat:3"):
        load_catalog(f)


def test_family_prefix_mismatch_rejected(tmp_path):
    f = tmp_path / "m.cat"
    f.write_text(
        "schema_version 1\n"
        "surface N9x\nfamily unduloidal\n"
        "s 0.5\nt -0.1\na 10.0\nk 2\nw 1\n"
        "buckets 0 1 1\nind 6\nspectrum -1 -1 0\nend\n"
    )
    with pytest.raises(CatalogError, match="family"):
        load_catalog(f)


def test_missing_file():
    with pytest.raises(CatalogError, match="not found"):
        load_catalog("/nonexistent/surfaces.cat")


def test_report_round_trip(tmp_path, u1):
    path = tmp_path / "u1.json"
    save_report(u1.report, path)
    loaded = load_report(path)
    assert loaded == u1.report


def test_report_is_readable_json(tmp_path, u1):
    path = tmp_path / "u1.json"
    save_report(u1.report, path)
    doc = json.loads(path.read_text())
    assert doc["schema_version"] == 1
    assert doc["surface"] == "U1"
    assert doc["ind"] == 6
    assert len(doc["spectrum"]["records"]) == 5


def test_load_report_missing_file(tmp_path):
    with pytest.raises(CatalogError, match="not found"):
        load_report(tmp_path / "nope.json")


def test_load_report_schema_guard(tmp_path):
    p = tmp_path / "r.json"
    p.write_text('{"schema_version": 99}')
    with pytest.raises(CatalogError, match="schema_version"):
        load_report(p)


def test_spectrum_deltas(u1, surfaces):
    deltas = spectrum_deltas(u1.report, surfaces["U1"])
    assert len(deltas) == 5
    assert np.max(np.abs(deltas)) <= 0.015
    # snapped values are exactly the published ones at -1 and 0
    assert deltas[1] == 0.0 and deltas[2] == 0.0 and deltas[4] == 0.0


def test_evaluate_surface_u1(u1):
    assert u1.report.ind == 6
    assert (u1.report.b1, u1.report.b2, u1.report.b3) == (0, 1, 1)
    assert u1.report.lower_bound == 5
    assert u1.report.bound_gap == 1
    assert u1.report.snap.dist_zero < 5e-4
