"""Command-line front end.

Subcommands:

* ``spectrum``      -- eigenvalues of one potential (catalog surface,
                       raw (s, t, k, w) parameters, or a constant).
* ``index``         -- Morse index report for one surface or the whole
                       catalog, diffed against the published values.
* ``eigenfunction`` -- plot-ready (x, f) samples of one eigenfunction.
* ``validate``      -- cross-checks of the solver against its
                       independent oracles.

Exit codes: 0 success, 1 mismatch or incomplete result, 2 usage or
constraint error.  The default catalog can be overridden with the
``TORUSSPEC_CATALOG`` environment variable or ``--catalog``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog, integrator, morse, oracle, spectrum as spec_mod, torus

CATALOG_ENV = "TORUSSPEC_CATALOG"


def _load_catalog(args) -> list[catalog.SurfaceSpec]:
    path = args.catalog or os.environ.get(CATALOG_ENV)
    return catalog.load_catalog(path)


def _find_surface(args) -> catalog.SurfaceSpec:
    surfaces = _load_catalog(args)
    for s in surfaces:
        if s.name == args.surface:
            return s
    names = " ".join(s.name for s in surfaces)
    raise SystemExit2(
        f"unknown surface {args.surface!r}; catalog contains: {names}"
    )


class SystemExit2(Exception):
    """Usage-level error (exit code 2)."""


def _fmt_lam(lam: float) -> str:
    return f"{lam:+.6f}"


def cmd_spectrum(args) -> int:
    if args.surface:
        spec = _find_surface(args)
        result = catalog.evaluate_surface(
            spec,
            grid=args.grid,
            tol=args.tol,
            lam_min=args.lambda_min,
            lam_max=args.lambda_max,
        )
        spectrum = result.raw_spectrum
        nonpos = [r for r in spectrum.records if r.lam <= catalog.CATALOG_SNAP_TOL]
        print(f"{spec.name}: nonpositive eigenvalues (multiplicity-expanded):")
        print("  " + ", ".join(_fmt_lam(r.lam) for r in nonpos))
        print(
            "  node counts: "
            + ", ".join(str(r.node_count) for r in nonpos)
        )
        nxt = [r.lam for r in spectrum.records if r.lam > catalog.CATALOG_SNAP_TOL]
        if nxt:
            print(f"  lambda_next = {_fmt_lam(min(nxt))} > 0: certified")
        else:
            print(
                f"  no eigenvalue in (0, {spectrum.lambda_ceiling}]: "
                "lambda_next > 0 certified"
            )
        if args.out:
            catalog.save_report(result.report, args.out)
            print(f"  report written to {args.out}")
        return 0 if spectrum.complete else 1

    if args.constant is not None:
        if args.period is None:
            raise SystemExit2("--constant requires --period")
        c, a = args.constant, args.period
        problem = spec_mod.SpectralProblem(
            V=lambda x: c if np.ndim(x) == 0 else np.full_like(np.asarray(x, float), c),
            a=a,
            mode=spec_mod.PERIODIC,
            tol=args.tol,
        )
        lam_max = args.lambda_max
        if lam_max is None:
            lam_max = (2.0 * math.pi * 3 / a) ** 2 - c + 0.5
        grid = args.grid if args.grid_set else max(1e-3, (2.0 * math.pi / a) ** 2 / 8)
        spectrum = spec_mod.find_spectrum(
            problem, lam_min=args.lambda_min, lam_max=lam_max, grid=grid
        )
        print(f"constant potential c={c}, period a={a}:")
        print("  " + ", ".join(_fmt_lam(r.lam) for r in spectrum.records))
        return 0 if spectrum.complete else 1

    if args.s is None or args.t is None or args.k is None or args.w is None:
        raise SystemExit2("provide --surface NAME, --constant C, or all of --s --t --k --w")
    params = torus.derive_params(args.s, args.t, args.k, args.w)
    problem = catalog.build_problem(params, tol=args.tol)
    spectrum = spec_mod.find_spectrum(
        problem, lam_min=args.lambda_min, lam_max=args.lambda_max, grid=args.grid
    )
    nonpos = [r for r in spectrum.records if r.lam <= catalog.CATALOG_SNAP_TOL]
    print(f"(s={args.s}, t={args.t}, k={args.k}, w={args.w}), a=k*x0={params.a:.6f}:")
    print("  " + ", ".join(_fmt_lam(r.lam) for r in nonpos))
    return 0 if spectrum.complete else 1


def cmd_index(args) -> int:
    surfaces = _load_catalog(args)
    if not args.all:
        if not args.surface:
            raise SystemExit2("provide --surface NAME or --all")
        surfaces = [s for s in surfaces if s.name == args.surface]
        if not surfaces:
            raise SystemExit2(f"unknown surface {args.surface!r}")

    header = (
        f"{'surface':8} {'Ind':>4} {'B1':>3} {'B2':>3} {'B3':>3} "
        f"{'bound':>5} {'gap':>4}  status"
    )
    print(header)
    mismatches = 0
    for spec in surfaces:
        result = catalog.evaluate_surface(spec, grid=args.grid, tol=args.tol)
        r = result.report
        ok = (
            r.ind == spec.expected_ind
            and (r.b1, r.b2, r.b3) == spec.expected_b
        )
        status = "ok" if ok else (
            f"MISMATCH (published Ind={spec.expected_ind}, "
            f"B={spec.expected_b})"
        )
        if not ok:
            mismatches += 1
        print(
            f"{r.surface:8} {r.ind:>4} {r.b1:>3} {r.b2:>3} {r.b3:>3} "
            f"{r.lower_bound:>5} {r.bound_gap:>4}  {status}"
        )
        if args.report_dir:
            out = Path(args.report_dir) / f"{r.surface}.json"
            catalog.save_report(r, out)
    total = len(surfaces)
    print(f"{total - mismatches}/{total} surfaces match the published values")
    return 0 if mismatches == 0 else 1


def cmd_eigenfunction(args) -> int:
    if args.constant is not None:
        if args.period is None:
            raise SystemExit2("--constant requires --period")
        c, a = args.constant, args.period
        problem = spec_mod.SpectralProblem(
            V=lambda x: c if np.ndim(x) == 0 else np.full_like(np.asarray(x, float), c),
            a=a,
            mode=spec_mod.PERIODIC,
        )
        n_pairs = (args.j + 2) // 2
        spectrum = spec_mod.find_spectrum(
            problem,
            lam_max=(2.0 * math.pi * (n_pairs + 1) / a) ** 2 - c + 0.5,
            grid=max(1e-3, (2.0 * math.pi / a) ** 2 / 8),
        )
        name = f"constant c={c}"
    else:
        spec = _find_surface(args)
        result = catalog.evaluate_surface(spec, grid=args.grid, tol=args.tol)
        problem, spectrum = result.problem, result.raw_spectrum
        name = spec.name
    matching = [r for r in spectrum.records if r.index_j == args.j]
    if not matching:
        raise SystemExit2(
            f"j={args.j} outside the computed range 1..{len(spectrum.records)} "
            f"for {name}"
        )
    record = matching[0]
    samples = spec_mod.eigenfunction_samples(problem, record, args.samples)
    parities = samples.parities
    with open(args.out, "w") as fh:
        fh.write(f"# {name}  j={args.j}  lambda={record.lam!r}\n")
        fh.write(
            f"# node_count={record.node_count}  multiplicity={record.multiplicity}\n"
        )
        fh.write("# x " + " ".join(f"f_{p}" for p in parities) + "\n")
        for i, x in enumerate(samples.x):
            cols = " ".join(f"{samples.f[p][i]:+.12e}" for p in parities)
            fh.write(f"{x:.12e} {cols}\n")
    print(
        f"{name} j={args.j}: lambda={_fmt_lam(record.lam)}, "
        f"{record.node_count} nodes, {len(samples.x)} samples -> {args.out}"
    )
    return 0


def cmd_validate(args) -> int:
    checks: list[tuple[str, bool, str]] = []

    # constant-potential oracle: shooting vs analytic
    for c in (0.0, 1.0, -2.0):
        a = 2.0 * math.pi
        problem = spec_mod.SpectralProblem(
            V=lambda x, _c=c: _c if np.ndim(x) == 0 else np.full_like(np.asarray(x, float), _c),
            a=a,
            mode=spec_mod.PERIODIC,
        )
        n_max = 3
        exact = oracle.constant_spectrum(c, a, n_max)
        got = spec_mod.find_spectrum(
            problem,
            lam_max=exact.lambda_ceiling - 0.5,
            grid=0.25,
        )
        n = min(len(got.records), len(exact.records))
        dev = float(
            np.max(np.abs(got.eigenvalues()[:n] - exact.eigenvalues()[:n]))
        ) if n else math.inf
        ok = got.complete and n == len(exact.records) and dev <= 1e-8
        checks.append(
            (f"constant potential c={c:+g} vs analytic", ok, f"max|dev|={dev:.2e}")
        )

    # finite-difference oracle vs shooting on U1
    surfaces = _load_catalog(args)
    u1 = next(s for s in surfaces if s.name == "U1")
    result = catalog.evaluate_surface(u1)
    shoot = np.array([r.lam for r in result.raw_spectrum.records if r.lam <= 0.1])
    fd = oracle.fd_spectrum(result.problem, 2048, len(shoot))
    dev = float(np.max(np.abs(np.sort(fd) - np.sort(shoot))))
    checks.append(("U1 shooting vs finite differences", dev <= 5e-3, f"max|dev|={dev:.2e}"))

    # structural: Wronskian / monodromy at the accepted eigenvalues
    worst_det = worst_tr = 0.0
    for r in result.raw_spectrum.records[:: max(1, len(result.raw_spectrum.records) // 6)]:
        M = integrator.monodromy(
            result.problem.V,
            r.lam,
            result.problem.a,
            tol=result.problem.tol,
            max_step=result.problem.max_step,
        )
        worst_det = max(worst_det, abs(float(np.linalg.det(M)) - 1.0))
        worst_tr = max(worst_tr, abs(float(np.trace(M)) - 2.0))
    checks.append(("U1 |det(monodromy) - 1| <= 1e-8", worst_det <= 1e-8, f"{worst_det:.2e}"))
    checks.append(("U1 |trace(monodromy) - 2| <= 1e-5", worst_tr <= 1e-5, f"{worst_tr:.2e}"))

    # node-count law on the U1 output
    law_ok = all(
        r.node_count == r.index_j - (r.index_j % 2)
        for r in result.raw_spectrum.records
    )
    checks.append(("U1 node-count law n = j - (j mod 2)", law_ok, ""))

    width = max(len(name) for name, _, _ in checks)
    failures = 0
    for name, ok, detail in checks:
        mark = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{name:<{width}}  {mark}  {detail}")
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusspec",
        description="Spectra and Morse indices of rotationally symmetric "
        "CMC-torus stability operators by shooting and node counting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--catalog", help="catalog file (default: shipped catalog)")
        p.add_argument("--grid", type=float, default=spec_mod.DEFAULT_GRID,
                       help="lambda scan resolution")
        p.add_argument("--tol", type=float, default=integrator.DEFAULT_TOL,
                       help="ODE integrator tolerance")

    p = sub.add_parser("spectrum", help="compute one spectrum")
    p.add_argument("--surface", help="catalog surface name (U1..U17, N1..N11)")
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--constant", type=float, help="constant potential value")
    p.add_argument("--period", type=float, help="period for --constant")
    p.add_argument("--lambda-min", type=float, default=None)
    p.add_argument("--lambda-max", type=float, default=None)
    p.add_argument("--out", help="write a JSON report here")
    add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("index", help="Morse index report vs published values")
    p.add_argument("--surface")
    p.add_argument("--all", action="store_true", help="run the whole catalog")
    p.add_argument("--report-dir", help="write per-surface JSON reports here")
    add_common(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("eigenfunction", help="export eigenfunction samples")
    p.add_argument("--surface")
    p.add_argument("--constant", type=float)
    p.add_argument("--period", type=float)
    p.add_argument("--j", type=int, required=True, help="spectral index (1-based)")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=cmd_eigenfunction)

    p = sub.add_parser("validate", help="run the oracle cross-check suite")
    add_common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "grid"):
        args.grid_set = "--grid" in (argv if argv is not None else sys.argv[1:])
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (torus.TorusConstraintError, catalog.CatalogError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except spec_mod.SpectrumComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
