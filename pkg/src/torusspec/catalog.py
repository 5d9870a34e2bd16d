"""Surface catalog ingestion, the per-surface pipeline, persistence.

The shipped catalog (``data/surfaces.cat``) lists the 28 reference
tori with their shape parameters, published bucket counts / index
values, and published nonpositive spectra.  The file format is
line-oriented text, one ``surface ... end`` record per surface, with
every published spectrum value stored exactly as printed (so the
number of printed decimals — the value's rounding — survives).

``evaluate_surface`` is the whole pipeline for one surface: build the
potential, shoot for the spectrum, snap the known eigenvalues, fold
into a Morse report.  Reports serialize to/from JSON losslessly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import morse, spectrum as spec_mod, torus
from .morse import MorseReport, SnapInfo
from .spectrum import EigenvalueRecord, SpectralProblem, Spectrum

__all__ = [
    "SurfaceSpec",
    "SurfaceResult",
    "CatalogError",
    "load_catalog",
    "default_catalog_path",
    "build_problem",
    "evaluate_surface",
    "spectrum_deltas",
    "save_report",
    "load_report",
]

SCHEMA_VERSION = 1

# Snapping tolerance for catalog runs.  The catalog prints (s, t) to
# 4-5 decimals and its closing solve was itself numerical, which
# detunes the exact -1 eigenvalue pair by up to ~8e-3 across the 28
# surfaces (the 0 eigenvalue is structural and stays exact).  The
# nearest distinct published eigenvalue to -1 is 0.02 away (U9), so
# this tolerance is unambiguous.
CATALOG_SNAP_TOL = 1e-2


class CatalogError(ValueError):
    """Catalog file is missing, malformed, or violates constraints."""


@dataclass(frozen=True)
class SpectrumValue:
    """A published eigenvalue exactly as printed.

    ``decimals`` is the printed precision (rounding half-width
    10^-decimals / 2); None marks the integer-printed entries -1 and
    0, which are the exactly known eigenvalues.
    """

    value: float
    decimals: int | None

    @classmethod
    def parse(cls, text: str) -> "SpectrumValue":
        v = float(text)
        if "." in text:
            return cls(value=v, decimals=len(text.split(".", 1)[1]))
        return cls(value=v, decimals=None)

    @property
    def tolerance(self) -> float:
        if self.decimals is None:
            return 0.0
        return 0.5 * 10.0 ** (-self.decimals)


@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    family: str
    s: float
    t: float
    a: float
    k: int
    w: int
    expected_b: tuple[int, int, int]
    expected_ind: int
    expected_spectrum: tuple[SpectrumValue, ...]

    def derive_params(self) -> torus.TorusParams:
        return torus.derive_params(
            self.s, self.t, self.k, self.w, a_hint=self.a, family=self.family
        )


def default_catalog_path() -> Path:
    return Path(resources.files("torusspec").joinpath("data/surfaces.cat"))


def load_catalog(path: str | Path | None = None) -> list[SurfaceSpec]:
    """Parse a catalog file into validated SurfaceSpec rows.

    Every row must pass the torus admissibility constraints (including
    the a ~ k*x0 consistency check) and carry a family label matching
    its U/N name prefix; violations name the row, line and constraint.
    """
    path = Path(path) if path is not None else default_catalog_path()
    if not path.exists():
        raise CatalogError(f"catalog file not found: {path}")
    surfaces: list[SurfaceSpec] = []
    seen: set[str] = set()
    fields: dict[str, object] = {}
    name = None
    start_line = 0
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if key == "schema_version":
                if int(rest) != SCHEMA_VERSION:
                    raise CatalogError(
                        f"unsupported schema_version {rest} (expected "
                        f"{SCHEMA_VERSION})"
                    )
            elif key == "surface":
                if name is not None:
                    raise CatalogError("record not closed with 'end'")
                name, fields, start_line = rest, {}, lineno
            elif key == "end":
                surfaces.append(_finish_record(name, fields, start_line, seen))
                name = None
            elif name is None:
                raise CatalogError(f"field {key!r} outside a surface record")
            elif key in ("family",):
                fields[key] = rest
            elif key in ("s", "t", "a"):
                fields[key] = float(rest)
            elif key in ("k", "w", "ind"):
                fields[key] = int(rest)
            elif key == "buckets":
                fields[key] = tuple(int(v) for v in rest.split())
            elif key == "spectrum":
                fields[key] = tuple(SpectrumValue.parse(v) for v in rest.split())
            else:
                raise CatalogError(f"unknown field {key!r}")
        except CatalogError:
            raise
        except ValueError as exc:
            raise CatalogError(f"{path}:{lineno}: bad value in {key!r}: {exc}")
    if name is not None:
        raise CatalogError(f"{path}: record {name!r} missing 'end'")
    if not surfaces:
        raise CatalogError(f"{path}: no surface records")
    return surfaces


def _finish_record(name, fields, lineno, seen) -> SurfaceSpec:
    if name is None or not name:
        raise CatalogError(f"line {lineno}: surface record without a name")
    if name in seen:
        raise CatalogError(f"line {lineno}: duplicate surface {name!r}")
    missing = {"family", "s", "t", "a", "k", "w", "buckets", "ind", "spectrum"} - set(
        fields
    )
    if missing:
        raise CatalogError(f"{name}: missing fields {sorted(missing)}")
    b = fields["buckets"]
    if len(b) != 3:
        raise CatalogError(f"{name}: buckets must have three entries, got {b}")
    prefix_family = {"U": torus.UNDULOIDAL, "N": torus.NODOIDAL}.get(name[0])
    if prefix_family is None or fields["family"] != prefix_family:
        raise CatalogError(
            f"{name}: family {fields['family']!r} does not match name prefix"
        )
    spec = SurfaceSpec(
        name=name,
        family=fields["family"],
        s=fields["s"],
        t=fields["t"],
        a=fields["a"],
        k=fields["k"],
        w=fields["w"],
        expected_b=tuple(b),
        expected_ind=fields["ind"],
        expected_spectrum=fields["spectrum"],
    )
    try:
        spec.derive_params()
    except torus.TorusConstraintError as exc:
        raise CatalogError(f"{name}: {exc}")
    seen.add(name)
    return spec


def build_problem(
    params: torus.TorusParams, tol: float = 1e-10, name: str = ""
) -> SpectralProblem:
    """Periodic-symmetric spectral problem for one torus potential.

    The domain is the self-consistent k * x0, which keeps V exactly
    periodic on it; ``potential_period`` = x0 bounds the step so no
    potential oscillation is skipped.
    """
    return SpectralProblem(
        V=lambda x, _p=params: torus.potential(_p, x),
        a=params.a,
        mode=spec_mod.PERIODIC,
        potential_period=params.x0,
        tol=tol,
        name=name,
    )


@dataclass
class SurfaceResult:
    """Everything one surface run produces."""

    spec: SurfaceSpec
    params: torus.TorusParams
    problem: SpectralProblem
    raw_spectrum: Spectrum
    report: MorseReport


def evaluate_surface(
    spec: SurfaceSpec,
    grid: float = spec_mod.DEFAULT_GRID,
    tol: float = 1e-10,
    snap_tol: float = CATALOG_SNAP_TOL,
    lam_min: float | None = None,
    lam_max: float | None = None,
) -> SurfaceResult:
    """Shoot, snap and fold one catalog surface into a Morse report."""
    params = spec.derive_params()
    problem = build_problem(params, tol=tol, name=spec.name)
    raw = spec_mod.find_spectrum(problem, lam_min=lam_min, lam_max=lam_max, grid=grid)
    if not raw.complete:
        raise spec_mod.SpectrumComputationError(
            f"{spec.name}: incomplete spectrum: {raw.gap_report}"
        )
    report = MorseReport.from_spectrum(
        spec.name, spec.family, spec.k, spec.w, raw, snap_tol=snap_tol
    )
    return SurfaceResult(
        spec=spec, params=params, problem=problem, raw_spectrum=raw, report=report
    )


def spectrum_deltas(report: MorseReport, spec: SurfaceSpec) -> np.ndarray:
    """Computed-minus-published deltas for the nonpositive spectrum.

    Requires matching lengths (and therefore multiplicity patterns, as
    the published lists are multiplicity-expanded).
    """
    computed = [r.lam for r in report.spectrum.records if r.lam <= 0.0]
    expected = [v.value for v in spec.expected_spectrum]
    if len(computed) != len(expected):
        raise CatalogError(
            f"{spec.name}: computed {len(computed)} nonpositive eigenvalues, "
            f"published {len(expected)}"
        )
    return np.array(computed) - np.array(expected)


def _record_to_dict(r: EigenvalueRecord) -> dict:
    return {
        "lambda": r.lam,
        "parity": r.parity,
        "multiplicity": r.multiplicity,
        "node_count": r.node_count,
        "index_j": r.index_j,
    }


def _record_from_dict(d: dict) -> EigenvalueRecord:
    return EigenvalueRecord(
        lam=d["lambda"],
        parity=d["parity"],
        multiplicity=d["multiplicity"],
        node_count=d["node_count"],
        index_j=d["index_j"],
    )


def _spectrum_to_dict(s: Spectrum) -> dict:
    return {
        "lambda_ceiling": s.lambda_ceiling,
        "complete": s.complete,
        "n_below": s.n_below,
        "gap_report": s.gap_report,
        "mode": s.mode,
        "records": [_record_to_dict(r) for r in s.records],
    }


def _spectrum_from_dict(d: dict) -> Spectrum:
    return Spectrum(
        records=[_record_from_dict(r) for r in d["records"]],
        lambda_ceiling=d["lambda_ceiling"],
        complete=d["complete"],
        n_below=d["n_below"],
        gap_report=d["gap_report"],
        mode=d["mode"],
    )


def save_report(report: MorseReport, path: str | Path) -> None:
    """Write a report as indented JSON (stable field order, floats at
    full round-trip precision)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "morse_report",
        "surface": report.surface,
        "family": report.family,
        "k": report.k,
        "w": report.w,
        "ind": report.ind,
        "b1": report.b1,
        "b2": report.b2,
        "b3": report.b3,
        "lower_bound": report.lower_bound,
        "bound_gap": report.bound_gap,
        "snap": {
            "dist_minus_one": report.snap.dist_minus_one,
            "dist_zero": report.snap.dist_zero,
        },
        "spectrum": _spectrum_to_dict(report.spectrum),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_report(path: str | Path) -> MorseReport:
    path = Path(path)
    if not path.exists():
        raise CatalogError(f"report file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: not valid JSON: {exc}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise CatalogError(
            f"{path}: schema_version {doc.get('schema_version')} not supported"
        )
    if doc.get("kind") != "morse_report":
        raise CatalogError(f"{path}: not a morse_report document")
    return MorseReport(
        surface=doc["surface"],
        family=doc["family"],
        k=doc["k"],
        w=doc["w"],
        spectrum=_spectrum_from_dict(doc["spectrum"]),
        ind=doc["ind"],
        b1=doc["b1"],
        b2=doc["b2"],
        b3=doc["b3"],
        lower_bound=doc["lower_bound"],
        bound_gap=doc["bound_gap"],
        snap=SnapInfo(
            dist_minus_one=doc["snap"]["dist_minus_one"],
            dist_zero=doc["snap"]["dist_zero"],
        ),
    )
