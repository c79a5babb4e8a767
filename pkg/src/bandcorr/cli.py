"""Command-line front end: ``limit``, ``spectrum``, ``mc`` and ``compare``.

Each command writes one CSV and a sibling ``.manifest.json`` describing how
to regenerate it.  Output goes to ``--out`` when given, otherwise to
``$BANDCORR_OUTPUT_DIR`` (default: the working directory).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__, harmonics, limits, mc_oracle

OUTPUT_DIR_ENV = "BANDCORR_OUTPUT_DIR"
EXIT_OK, EXIT_PARAM, EXIT_NUMERIC = 0, 2, 3


class ParameterError(ValueError):
    pass


class NumericalQualityError(RuntimeError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_grid(text: str) -> list[float]:
    """``min:max:count`` (inclusive), a comma list, or a single value."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            count = int(count)
            if count < 1:
                raise ParameterError(f"grid count must be positive in {text!r}")
            if count == 1:
                return [float(lo)]
            return [float(v) for v in np.linspace(float(lo), float(hi), count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"cannot parse grid {text!r}: {exc}") from None


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def manifest_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + ".manifest.json")


def _output_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def _emit(args, default_name, header, rows, params, diagnostics, started) -> Path:
    path = _output_path(args, default_name)
    _atomic_write(path, _csv_text(header, rows))
    manifest = {
        "command": args.command,
        "argv": list(args._argv),
        "parameters": params,
        "seed": params.get("seed"),
        "version": __version__,
        "quadrature_order": params.get("quadrature_order"),
        "duration_seconds": time.perf_counter() - started,
        "diagnostics": diagnostics,
        "outputs": {"csv": str(path), "manifest": str(manifest_path(path))},
    }
    _atomic_write(manifest_path(path), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _effective_order(args, l: int) -> int:
    return args.quadrature_order if args.quadrature_order else harmonics.default_quadrature_order(l)


def cmd_limit(args) -> int:
    started = time.perf_counter()
    xi = parse_grid(args.xi)
    regime = args.regime
    params = {"regime": regime, "E": args.E, "xi": args.xi, "l": args.l}
    if regime == "critical":
        if (args.Cstar is None) == (args.Csub is None):
            raise ParameterError("critical regime needs exactly one of --Cstar or --Csub")
        C = args.Cstar if args.Cstar is not None else limits.c_star_from_ratio(args.Csub, args.E)
        if C < 0:
            raise ParameterError(f"C* must be non-negative, got {C}")
        params.update(C_star=C, C_sub=args.Csub)
        kwargs = {"C_star": C}
    elif regime == "finite":
        if args.n is None or args.W is None:
            raise ParameterError("finite regime needs --n and --W")
        if args.n < 2 or args.W < 1:
            raise ParameterError("finite regime needs n >= 2 and W >= 1")
        params.update(n=args.n, W=args.W)
        kwargs = {"n": args.n, "W": args.W, "E": args.E}
    else:
        kwargs = {}
    operator = regime in ("critical", "finite")
    if operator:
        if args.l < 1:
            raise ParameterError(f"--l must be positive, got {args.l}")
        if args.quadrature_order and args.quadrature_order < args.l + 1:
            raise ParameterError(f"--quadrature-order must exceed l={args.l}")
        kwargs.update(l=args.l, m=args.quadrature_order)
    params["quadrature_order"] = _effective_order(args, args.l) if operator else None

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", limits.TruncationWarning)
        curve = limits.regime_curve(regime, xi, **kwargs)
    rows = [[x, v, e] for x, v, e in zip(curve.xi, curve.values, curve.truncation_error)]
    worst = float(np.max(curve.truncation_error)) if len(xi) else 0.0
    diagnostics = {"max_truncation_error": worst, "truncation_warnings": [str(w.message) for w in caught]}
    _emit(args, f"limit_{regime}.csv", ["xi", "value", "truncation_error"], rows, params, diagnostics, started)
    if caught:
        raise NumericalQualityError(f"truncation error {worst:.3e} exceeds {limits.TRUNCATION_TOL:g}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    started = time.perf_counter()
    if args.l < 1:
        raise ParameterError(f"--l must be positive, got {args.l}")
    p_values = parse_grid(args.p)
    if not p_values or any(p <= 0 for p in p_values):
        raise ParameterError(f"p values must be positive, got {args.p}")
    m = args.quadrature_order
    if m and m < args.l + 1:
        raise ParameterError(f"--quadrature-order must exceed l={args.l}")
    lap = harmonics.laplace_spectrum(args.l)
    raw_nu = harmonics.radial_matrix(lambda x: 1.0 - 2.0 * x * x, args.l, m)
    offdiag = np.append(np.diag(raw_nu, 1), np.nan)
    rows = []
    for p in p_values:
        for j in range(args.l):
            lam = harmonics.transfer_eigenvalue(j, p, max(m, j + 2) if m else None)
            rows.append([j, p, lam, 1.0 - (j + 1) * (j + 2) / p, lap[j], raw_nu[j, j], offdiag[j]])
    header = ["j", "p", "lambda_j", "asymptotic_1_minus_(j+1)(j+2)/p", "laplace", "nu_diag", "nu_offdiag"]
    params = {"l": args.l, "p": args.p, "quadrature_order": _effective_order(args, args.l)}
    closed = harmonics.nu_offdiagonal_closed_form(args.l)
    diagnostics = {
        "nu_max_abs_diagonal": float(np.max(np.abs(np.diag(raw_nu)))),
        "nu_offdiag_max_deviation_from_closed_form": float(np.max(np.abs(offdiag[:-1] - closed), initial=0.0)),
    }
    _emit(args, "spectrum.csv", header, rows, params, diagnostics, started)
    return EXIT_OK


def cmd_mc(args) -> int:
    started = time.perf_counter()
    if args.seed is None:
        raise ParameterError("mc needs an explicit --seed")
    if not 0 <= args.seed < 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {args.seed}")
    if args.samples < 2:
        raise ParameterError(f"--samples must be at least 2, got {args.samples}")
    try:
        params = mc_oracle.EnsembleParams(args.n, args.W, args.beta, args.E)
    except ValueError as exc:
        raise ParameterError(str(exc)) from None
    xi = parse_grid(args.xi)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", mc_oracle.DegenerateBatchWarning)
        estimates = mc_oracle.estimate_ratio(params, xi, args.samples, args.seed, workers=args.workers)
    rows = [[e.xi, e.ratio, e.std_error, e.samples] for e in estimates]
    run_params = {
        "n": args.n, "W": args.W, "beta": args.beta, "E": args.E, "xi": args.xi,
        "samples": args.samples, "seed": args.seed, "workers": args.workers,
        "batches": mc_oracle.DEFAULT_BATCHES, "quadrature_order": args.quadrature_order,
    }
    diagnostics = {"degenerate_batches": [str(w.message) for w in caught]}
    _emit(args, "mc.csv", ["xi", "ratio", "std_error", "samples"], rows, run_params, diagnostics, started)
    if caught:
        raise NumericalQualityError("degenerate batch denominators in the Monte Carlo run")
    return EXIT_OK


def _read_columns(path: str) -> dict[str, list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols: dict[str, list[str]] = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for k, v in row.items():
                cols[k].append(v)
    return cols


def cmd_compare(args) -> int:
    started = time.perf_counter()
    try:
        mc = _read_columns(args.mc_csv)
        theory = _read_columns(args.limit_csv)
    except OSError as exc:
        raise ParameterError(str(exc)) from None
    if not {"xi", "ratio", "std_error"} <= mc.keys():
        raise ParameterError(f"{args.mc_csv} lacks xi/ratio/std_error columns")
    value_col = "value" if "value" in theory else "ratio" if "ratio" in theory else None
    if "xi" not in theory or value_col is None:
        raise ParameterError(f"{args.limit_csv} lacks xi/value columns")
    mc_xi = [float(v) for v in mc["xi"]]
    th_xi = [float(v) for v in theory["xi"]]
    offending = sorted(set(mc_xi).symmetric_difference(th_xi))
    if offending or len(mc_xi) != len(th_xi):
        raise ParameterError("xi grids do not align; offending values: " + ", ".join(fmt(x) for x in offending))
    th_value = dict(zip(th_xi, (float(v) for v in theory[value_col])))
    rows = []
    for x, r, se in zip(mc_xi, mc["ratio"], mc["std_error"]):
        r, se, t = float(r), float(se), th_value[x]
        diff = abs(r - t)
        z = (r - t) / se if se > 0 else math.inf
        rows.append([x, r, se, t, diff, z])
    header = ["xi", "mc_ratio", "std_error", "theory", "abs_diff", "z_score"]
    params = {"mc_csv": args.mc_csv, "limit_csv": args.limit_csv, "quadrature_order": args.quadrature_order}
    finite_z = [abs(row[5]) for row in rows if math.isfinite(row[5])]
    diagnostics = {"max_abs_z": max(finite_z) if finite_z else None}
    _emit(args, "compare.csv", header, rows, params, diagnostics, started)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bandcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="CSV path (manifest is written next to it)")
        p.add_argument("--quadrature-order", type=int, default=None, help="override the Gauss rule size")

    p = sub.add_parser("limit", help="theoretical limit curve for one regime")
    p.add_argument("regime", choices=limits.REGIMES)
    p.add_argument("--E", type=float, default=0.0)
    p.add_argument("--xi", default="0:3:7", help="min:max:count, inclusive")
    p.add_argument("--Cstar", type=float, default=None, help="C* used directly")
    p.add_argument("--Csub", type=float, default=None, help="C_* = n/W, converted with t_*(E)")
    p.add_argument("--l", type=int, default=limits.DEFAULT_ORDER)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--W", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("spectrum", help="transfer eigenvalues, Laplace spectrum and nu entries")
    p.add_argument("--l", type=int, default=6)
    p.add_argument("--p", default="10,100,1000", help="comma list or min:max:count")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("mc", help="Monte Carlo ratio estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--W", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--E", type=float, default=0.0)
    p.add_argument("--xi", default="0")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("compare", help="compare a Monte Carlo CSV with a limit CSV")
    p.add_argument("mc_csv")
    p.add_argument("limit_csv")
    common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def _glue_grid_values(argv: list[str]) -> list[str]:
    # "--xi -3:3:13" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] in ("--xi", "--p") and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _glue_grid_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARAM
    args._argv = argv
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"bandcorr {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NumericalQualityError as exc:
        print(f"bandcorr {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"bandcorr {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except ArithmeticError as exc:
        print(f"bandcorr {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
