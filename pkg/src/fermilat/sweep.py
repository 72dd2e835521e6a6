"""Parameter sweeps: one task per (lambda, gamma) point, shared-table reuse.

Each point computes its entropy series from a single correlator table, fits
both scaling models, and evaluates the surface-integral prefactor where a
finite Fermi surface exists. Results are written as CSV with a fixed row
order and 12-significant-digit floats so that reruns are byte-identical
regardless of worker count or cache state.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cache import CorrelatorCache
from .correlators import KGrid
from .entanglement import entropy_series
from .model import ModelParams, Phase, classify_phase
from .scaling import (
    C_THRESHOLD_DEFAULT,
    RESIDUAL_FACTOR_DEFAULT,
    FitModel,
    ScalingFit,
    select_model,
)
from .widom import extract_fermi_surface, widom_closed_form_2d, widom_prefactor

__all__ = ["SweepConfig", "run_scan", "DEFAULT_L_VALUES", "DEFAULT_GRID_N"]

DEFAULT_L_VALUES = {
    1: [8, 12, 16, 24, 32, 48, 64, 96, 128],
    2: list(range(4, 41, 2)),
    3: list(range(4, 13)),
}
DEFAULT_GRID_N = {1: 4096, 2: 512, 3: 128}
DEFAULT_WIDOM_GRID_N = {2: 1024, 3: 256}


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


@dataclass(frozen=True)
class SweepConfig:
    """Resolved scan configuration (config file merged with flag overrides)."""

    lambdas: tuple[float, ...]
    gammas: tuple[float, ...]
    dim: int
    l_values: tuple[int, ...]
    grid_n: int
    shifted: bool = True
    fit_l_min: int = 4
    residual_factor: float = RESIDUAL_FACTOR_DEFAULT
    c_threshold: float = C_THRESHOLD_DEFAULT
    out_dir: str = "out"
    out_format: str = "csv"
    workers: int = 1
    cache_dir: str | None = None
    widom_grid_n: int | None = None
    margin: int = 8

    def validate(self) -> None:
        if not self.lambdas or not self.gammas:
            raise ValueError("lambda and gamma ranges must be non-empty")
        if not self.l_values:
            raise ValueError("l_values must be non-empty")
        if sorted(set(self.l_values)) != list(self.l_values):
            raise ValueError("l_values must be strictly ascending")
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.grid_n < self.margin * max(self.l_values):
            raise ValueError(
                f"grid_n = {self.grid_n} violates the margin "
                f"{self.margin} * L_max = {self.margin * max(self.l_values)}"
            )
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.out_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.out_format!r}")
        if len(set(self.lambdas)) != len(self.lambdas):
            raise ValueError("lambda values must be distinct")
        if len(set(self.gammas)) != len(self.gammas):
            raise ValueError("gamma values must be distinct")

    def physics_hash(self) -> str:
        """Hash of the physics inputs; identical configs share it."""
        payload = json.dumps(
            {
                "lambdas": self.lambdas,
                "gammas": self.gammas,
                "dim": self.dim,
                "l_values": self.l_values,
                "grid_n": self.grid_n,
                "shifted": self.shifted,
                "fit_l_min": self.fit_l_min,
                "residual_factor": self.residual_factor,
                "c_threshold": self.c_threshold,
                "margin": self.margin,
                "widom_grid_n": self.widom_grid_n,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _surface_applicable(params: ModelParams) -> bool:
    if params.dim < 2:
        return False
    try:
        label = classify_phase(params)
    except ValueError:
        return False
    if label.phase is not Phase.I or label.codimension != 1:
        return False
    return params.gamma == 0.0 or (params.dim == 2 and params.lam == 0.0)


def _fit_dict(fit: ScalingFit) -> dict:
    return {
        "model": fit.model.value,
        "c_coef": fit.c_coef,
        "b_coef": fit.b_coef,
        "a_coef": fit.a_coef,
        "rms_residual": fit.rms_residual,
        "l_range": list(fit.l_range),
    }


def _evaluate_point(task) -> dict:
    """One (lambda, gamma) point; returns a run record or an error record."""
    lam, gamma, config = task
    start = time.monotonic()
    record = {"lambda": lam, "gamma": gamma, "dim": config.dim}
    try:
        params = ModelParams(lam, gamma, config.dim)
        label = classify_phase(params)
        record["phase"] = {
            "phase": label.phase.value,
            "codimension": label.codimension,
            "dos_positive": label.dos_positive,
        }
        grid = KGrid(n_per_dim=config.grid_n, shifted=config.shifted)
        table = None
        if config.cache_dir:
            table = CorrelatorCache(config.cache_dir).get_or_build(params, grid)
        series = entropy_series(
            params,
            list(config.l_values),
            grid,
            margin=config.margin,
            table=table,
        )
        record["entropies"] = [
            {"L": e.block_l, "S_bits": e.entropy_bits} for e in series
        ]
        fit_data = [
            (e.block_l, e.entropy_bits)
            for e in series
            if e.block_l >= config.fit_l_min
        ]
        log_fit, area_fit, verdict = select_model(
            fit_data,
            config.dim,
            residual_factor=config.residual_factor,
            c_threshold=config.c_threshold,
        )
        record["fits"] = {
            "log_area": _fit_dict(log_fit),
            "area_only": _fit_dict(area_fit),
        }
        record["verdict"] = verdict.value
        if _surface_applicable(params):
            grid_n = config.widom_grid_n or DEFAULT_WIDOM_GRID_N[params.dim]
            result = widom_prefactor(extract_fermi_surface(params, grid_n))
            closed = (
                widom_closed_form_2d(lam)
                if params.dim == 2 and gamma == 0.0
                else None
            )
            record["widom"] = {
                "c_value": result.c_value,
                "grid_n": result.grid_n,
                "refinement_delta": result.refinement_delta,
                "closed_form": closed,
            }
        else:
            record["widom"] = None
        record["error"] = None
    except Exception as exc:  # per-point failure; the sweep continues
        record["error"] = f"{type(exc).__name__}: {exc}"
    record["timing_seconds"] = time.monotonic() - start
    return record


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def run_scan(config: SweepConfig) -> dict:
    """Execute the sweep and write entropy.csv, fits.csv, errors.csv, records.json.

    Returns a summary dict with counts of succeeded and failed points.
    """
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    points = sorted(
        (float(lam), float(gamma))
        for lam in config.lambdas
        for gamma in config.gammas
    )
    tasks = [(lam, gamma, config) for lam, gamma in points]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_evaluate_point, tasks))
    else:
        records = [_evaluate_point(task) for task in tasks]
    records.sort(key=lambda r: (r["lambda"], r["gamma"]))

    config_hash = config.physics_hash()
    for record in records:
        record["version"] = __version__
        record["config_hash"] = config_hash

    entropy_rows = []
    fit_rows = []
    error_rows = []
    for record in records:
        lam_s, gam_s, dim_s = _fmt(record["lambda"]), _fmt(record["gamma"]), str(
            record["dim"]
        )
        if record["error"] is not None:
            error_rows.append([lam_s, gam_s, record["error"].replace(",", ";")])
            continue
        for entry in record["entropies"]:
            entropy_rows.append(
                [lam_s, gam_s, dim_s, str(entry["L"]), _fmt(entry["S_bits"])]
            )
        for key in ("log_area", "area_only"):
            fit = record["fits"][key]
            fit_rows.append(
                [
                    lam_s,
                    gam_s,
                    dim_s,
                    fit["model"],
                    _fmt(fit["c_coef"]),
                    _fmt(fit["b_coef"]),
                    _fmt(fit["a_coef"]),
                    _fmt(fit["rms_residual"]),
                    record["verdict"],
                ]
            )

    _write_csv(
        out_dir / "entropy.csv",
        ["lambda", "gamma", "dim", "L", "S_bits"],
        entropy_rows,
    )
    _write_csv(
        out_dir / "fits.csv",
        ["lambda", "gamma", "dim", "model", "C", "B", "A", "residual", "verdict"],
        fit_rows,
    )
    _write_csv(out_dir / "errors.csv", ["lambda", "gamma", "error"], error_rows)
    with open(out_dir / "records.json", "w", newline="\n") as fh:
        json.dump(records, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if config.out_format == "json":
        for name, header, rows in (
            ("entropy.json", ["lambda", "gamma", "dim", "L", "S_bits"], entropy_rows),
            (
                "fits.json",
                ["lambda", "gamma", "dim", "model", "C", "B", "A", "residual", "verdict"],
                fit_rows,
            ),
        ):
            payload = [dict(zip(header, row)) for row in rows]
            with open(out_dir / name, "w", newline="\n") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")

    failed = sum(1 for r in records if r["error"] is not None)
    return {
        "points": len(records),
        "failed": failed,
        "out_dir": str(out_dir),
        "config_hash": config_hash,
    }
