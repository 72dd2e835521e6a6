"""Command-line front end.

Subcommands: phase, scan, widom, dos, correlators, validate.
Exit codes: 0 success, 1 check/run failure, 2 invalid input.

Desk-scale budgets: d = 2 sweeps run comfortably up to L = 40 (1600 x 1600
eigenproblems) and d = 3 up to L = 12; the default grids are
N = 4096 / 512 / 128 for d = 1 / 2 / 3.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cache import CorrelatorCache
from .correlators import KGrid, axis_correlator, build_correlator_table
from .model import (
    DEFAULT_GRID_N,
    ModelParams,
    classify_phase,
    dos_estimate,
    dos_trend,
    gap_estimate,
)
from .scaling import classify_decay
from .sweep import DEFAULT_L_VALUES, SweepConfig, run_scan
from .sweep import DEFAULT_GRID_N as SCAN_GRID_N
from .validation import run_checks
from .widom import (
    extract_fermi_surface,
    widom_closed_form_2d,
    widom_prefactor,
    write_surface_csv,
)

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_INVALID_INPUT = 2


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _add_model_flags(parser: argparse.ArgumentParser, listy: bool = False) -> None:
    if listy:
        parser.add_argument(
            "--lambda",
            dest="lam",
            type=str,
            default=None,
            help="comma-separated chemical potential values",
        )
        parser.add_argument(
            "--gamma",
            type=str,
            default=None,
            help="comma-separated pairing strength values",
        )
    else:
        parser.add_argument(
            "--lambda", dest="lam", type=float, required=True,
            help="chemical potential",
        )
        parser.add_argument(
            "--gamma", type=float, required=True, help="pairing strength"
        )
    parser.add_argument(
        "--dim", type=int, default=None if listy else 2, help="lattice dimension"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermilat",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_phase = sub.add_parser("phase", help="classify one parameter point")
    _add_model_flags(p_phase)
    p_phase.add_argument("--grid-n", type=int, default=None)
    p_phase.add_argument("--format", choices=("csv", "json"), default="csv")

    p_scan = sub.add_parser(
        "scan", help="entropy series, scaling fits and prefactors over a grid"
    )
    _add_model_flags(p_scan, listy=True)
    p_scan.add_argument("--config", type=str, default=None, help="JSON config file")
    p_scan.add_argument("--l-max", type=int, default=None)
    p_scan.add_argument("--grid-n", type=int, default=None)
    p_scan.add_argument(
        "--shifted",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="half-step shifted momentum grid (default on)",
    )
    p_scan.add_argument("--fit-l-min", type=int, default=None)
    p_scan.add_argument("--workers", type=int, default=None)
    p_scan.add_argument("--out-dir", type=str, default=None)
    p_scan.add_argument("--cache-dir", type=str, default=None)
    p_scan.add_argument("--format", choices=("csv", "json"), default=None)

    p_widom = sub.add_parser(
        "widom", help="surface-integral prefactor of the log correction"
    )
    _add_model_flags(p_widom)
    p_widom.add_argument("--grid-n", type=int, default=None)
    p_widom.add_argument("--out-dir", type=str, default=None)
    p_widom.add_argument("--format", choices=("csv", "json"), default="csv")

    p_dos = sub.add_parser("dos", help="density-of-states histogram and g(0) trend")
    _add_model_flags(p_dos)
    p_dos.add_argument("--grid-n", type=int, default=None)
    p_dos.add_argument("--bins", type=int, default=64)
    p_dos.add_argument("--out-dir", type=str, default=None)
    p_dos.add_argument("--format", choices=("csv", "json"), default="csv")

    p_corr = sub.add_parser(
        "correlators", help="axis correlators and decay classification"
    )
    _add_model_flags(p_corr)
    p_corr.add_argument("--grid-n", type=int, default=None)
    p_corr.add_argument(
        "--shifted", action=argparse.BooleanOptionalAction, default=True
    )
    p_corr.add_argument("--r-max", type=int, default=32)
    p_corr.add_argument("--out-dir", type=str, default=None)
    p_corr.add_argument("--cache-dir", type=str, default=None)

    p_val = sub.add_parser("validate", help="run the built-in correctness checks")
    p_val.add_argument(
        "--full", action="store_true", help="include the desk-scale scaling fits"
    )
    p_val.add_argument("--json", type=str, default=None, help="write results to file")

    return parser


def _params_from(args) -> ModelParams:
    return ModelParams(args.lam, args.gamma, args.dim)


def cmd_phase(args) -> int:
    params = _params_from(args)
    label = classify_phase(params)
    grid_n = args.grid_n or DEFAULT_GRID_N[params.dim]
    gap = gap_estimate(params, grid_n)
    trend = dos_trend(params, grid_n)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "phase": label.phase.value,
                    "codimension": label.codimension,
                    "dos_positive": label.dos_positive,
                    "gap_estimate": gap,
                    "g0_trend": [{"bin_width": w, "density": d} for w, d in trend],
                },
                indent=2,
                sort_keys=True,
            )
        )
        return EXIT_OK
    dos_str = "g(0)>0" if label.dos_positive else "g(0)=0"
    print(
        f"Phase {label.phase.value}, codim {label.codimension}, {dos_str}, "
        f"gap {gap:.3f}"
    )
    print("g(0) trend (bin width -> lowest-bin density):")
    for width, density in trend:
        print(f"  {width:.6f} -> {density:.6f}")
    return EXIT_OK


def cmd_widom(args) -> int:
    params = _params_from(args)
    grid_n = args.grid_n or (1024 if params.dim == 2 else 256)
    fs = extract_fermi_surface(params, grid_n)
    result = widom_prefactor(fs)
    closed = (
        widom_closed_form_2d(params.lam)
        if params.dim == 2 and params.gamma == 0.0
        else None
    )
    payload = {
        "c_value": result.c_value,
        "grid_n": result.grid_n,
        "refinement_delta": result.refinement_delta,
        "closed_form": closed,
        "difference": None if closed is None else abs(result.c_value - closed),
        "surface_elements": fs.n_elements,
        "total_measure": fs.total_measure,
    }
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_surface_csv(fs, out / "fermi_surface.csv")
        with open(out / "widom.json", "w", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"quadrature C = {_fmt(result.c_value)} (grid_n = {result.grid_n})")
    print(f"refinement delta = {_fmt(result.refinement_delta)}")
    if closed is not None:
        print(f"closed form C = {_fmt(closed)}")
        print(f"difference = {_fmt(abs(result.c_value - closed))}")
    return EXIT_OK


def cmd_dos(args) -> int:
    params = _params_from(args)
    grid_n = args.grid_n or DEFAULT_GRID_N[params.dim]
    hist = dos_estimate(params, grid_n, args.bins)
    trend = dos_trend(params, grid_n, args.bins)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "dos.csv", "w", newline="\n") as fh:
            fh.write("bin_left,bin_right,density\n")
            for i, density in enumerate(hist.densities):
                fh.write(
                    f"{_fmt(hist.bin_edges[i])},{_fmt(hist.bin_edges[i + 1])},"
                    f"{_fmt(density)}\n"
                )
    if args.format == "json":
        print(
            json.dumps(
                {
                    "g0_estimate": hist.g0_estimate,
                    "g0_trend": [{"bin_width": w, "density": d} for w, d in trend],
                },
                indent=2,
                sort_keys=True,
            )
        )
        return EXIT_OK
    print(f"g(0) estimate (lowest bin): {_fmt(hist.g0_estimate)}")
    print("g(0) trend (bin width -> lowest-bin density):")
    for width, density in trend:
        print(f"  {width:.6f} -> {density:.6f}")
    return EXIT_OK


def cmd_correlators(args) -> int:
    params = _params_from(args)
    grid_n = args.grid_n or DEFAULT_GRID_N[params.dim]
    grid = KGrid(n_per_dim=grid_n, shifted=args.shifted)
    if args.cache_dir:
        table = CorrelatorCache(args.cache_dir).get_or_build(params, grid)
    else:
        table = build_correlator_table(params, grid)
    r_max = min(args.r_max, grid_n // 2 - 1)
    rows = []
    for axis in range(params.dim):
        rs, g_vals, a_vals = axis_correlator(table, axis, r_max)
        fit = classify_decay(list(zip(rs, np.abs(g_vals))))
        print(
            f"axis {axis}: decay {fit.kind.value}, "
            f"exponent/xi = {_fmt(fit.exponent_or_xi)}, "
            f"R^2 = {fit.fit_quality:.4f}"
        )
        for r, g, a in zip(rs, g_vals, a_vals):
            rows.append([str(axis), str(int(r)), _fmt(g.real), _fmt(a.real)])
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "correlators.csv", "w", newline="\n") as fh:
            fh.write("axis,r,g,a\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
    return EXIT_OK


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ValueError(f"cannot parse float list {text!r}") from exc
    if not values:
        raise ValueError("empty value list")
    return values


def _resolve_scan_config(args) -> SweepConfig:
    file_cfg: dict = {}
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)

    dim = args.dim if args.dim is not None else int(file_cfg.get("dim", 2))
    lambdas = (
        _parse_float_list(args.lam)
        if args.lam is not None
        else tuple(float(x) for x in file_cfg.get("lambdas", ()))
    )
    gammas = (
        _parse_float_list(args.gamma)
        if args.gamma is not None
        else tuple(float(x) for x in file_cfg.get("gammas", (0.0,)))
    )

    if args.l_max is not None:
        l_values = tuple(l for l in DEFAULT_L_VALUES[dim] if l <= args.l_max)
    elif "l_values" in file_cfg:
        l_values = tuple(int(l) for l in file_cfg["l_values"])
    else:
        l_values = tuple(DEFAULT_L_VALUES[dim])

    grid_block = file_cfg.get("grid", {})
    grid_n = (
        args.grid_n
        if args.grid_n is not None
        else int(grid_block.get("n", SCAN_GRID_N[dim]))
    )
    shifted = (
        args.shifted
        if args.shifted is not None
        else bool(grid_block.get("shifted", True))
    )

    fit_block = file_cfg.get("fit", {})
    output_block = file_cfg.get("output", {})
    return SweepConfig(
        lambdas=lambdas,
        gammas=gammas,
        dim=dim,
        l_values=l_values,
        grid_n=grid_n,
        shifted=shifted,
        fit_l_min=(
            args.fit_l_min
            if args.fit_l_min is not None
            else int(fit_block.get("l_min", 4))
        ),
        residual_factor=float(fit_block.get("residual_factor", 10.0)),
        c_threshold=float(fit_block.get("c_threshold", 0.05)),
        out_dir=(
            args.out_dir
            if args.out_dir is not None
            else str(output_block.get("dir", "out"))
        ),
        out_format=(
            args.format
            if args.format is not None
            else str(output_block.get("format", "csv"))
        ),
        workers=(
            args.workers
            if args.workers is not None
            else int(file_cfg.get("workers", 1))
        ),
        cache_dir=(
            args.cache_dir
            if args.cache_dir is not None
            else file_cfg.get("cache_dir")
        ),
        widom_grid_n=(
            int(file_cfg["widom_grid_n"]) if "widom_grid_n" in file_cfg else None
        ),
    )


def cmd_scan(args) -> int:
    config = _resolve_scan_config(args)
    config.validate()
    summary = run_scan(config)
    print(
        f"scan complete: {summary['points'] - summary['failed']}/"
        f"{summary['points']} points succeeded, outputs in {summary['out_dir']} "
        f"(config hash {summary['config_hash']})"
    )
    if summary["failed"] == summary["points"]:
        print("all points failed; see errors.csv", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_checks(full=args.full)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}: {result.detail} ({result.seconds:.1f}s)")
    if args.json:
        with open(args.json, "w", newline="\n") as fh:
            json.dump([r.to_dict() for r in results], fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILURE


_DISPATCH = {
    "phase": cmd_phase,
    "scan": cmd_scan,
    "widom": cmd_widom,
    "dos": cmd_dos,
    "correlators": cmd_correlators,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
