"""On-disk cache for correlator tables, keyed by (lambda, gamma, dim, N, shifted).

Files are .npz archives with a format-version header; arrays round-trip
bit-exactly. A corrupted or mismatched file is ignored with a warning and
the table is recomputed, so the cache can never change results.
"""

from __future__ import annotations

import hashlib
import os
import warnings
from pathlib import Path

import numpy as np

from .correlators import CorrelatorTable, KGrid, build_correlator_table
from .model import ModelParams

__all__ = ["CorrelatorCache", "FORMAT_VERSION"]

FORMAT_VERSION = 1


def _key(params: ModelParams, grid: KGrid) -> str:
    raw = (
        f"v{FORMAT_VERSION}|{params.lam!r}|{params.gamma!r}|{params.dim}"
        f"|{grid.n_per_dim}|{int(grid.shifted)}"
    )
    return hashlib.sha256(raw.encode()).hexdigest()[:24]


class CorrelatorCache:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, params: ModelParams, grid: KGrid) -> Path:
        return self.directory / f"corr_{_key(params, grid)}.npz"

    def store(self, table: CorrelatorTable) -> Path:
        path = self.path_for(table.params, table.grid)
        meta = np.array(
            [
                FORMAT_VERSION,
                table.params.dim,
                table.grid.n_per_dim,
                int(table.grid.shifted),
                table.degenerate_points,
            ],
            dtype=np.int64,
        )
        tmp = path.with_name(f"{path.stem}.{os.getpid()}.tmp.npz")
        np.savez(
            tmp,
            meta=meta,
            lam=np.float64(table.params.lam),
            gamma=np.float64(table.params.gamma),
            g_arr=table.g_arr,
            a_arr=table.a_arr,
        )
        os.replace(tmp, path)  # atomic against concurrent writers
        return path

    def load(self, params: ModelParams, grid: KGrid) -> CorrelatorTable | None:
        """Return the cached table, or None if absent, corrupt, or mismatched."""
        path = self.path_for(params, grid)
        if not path.exists():
            return None
        try:
            with np.load(path) as data:
                meta = data["meta"]
                if int(meta[0]) != FORMAT_VERSION:
                    raise ValueError(f"format version {meta[0]}")
                if (
                    int(meta[1]) != params.dim
                    or int(meta[2]) != grid.n_per_dim
                    or bool(meta[3]) != grid.shifted
                    or float(data["lam"]) != params.lam
                    or float(data["gamma"]) != params.gamma
                ):
                    raise ValueError("key mismatch")
                table = CorrelatorTable(
                    params=params,
                    grid=grid,
                    g_arr=data["g_arr"],
                    a_arr=data["a_arr"],
                    degenerate_points=int(meta[4]),
                )
            table.validate()
            return table
        except Exception as exc:
            warnings.warn(
                f"ignoring unusable correlator cache file {path.name}: {exc}; "
                f"recomputing"
            )
            return None

    def get_or_build(
        self, params: ModelParams, grid: KGrid, on_degenerate: str = "warn"
    ) -> CorrelatorTable:
        table = self.load(params, grid)
        if table is None:
            table = build_correlator_table(params, grid, on_degenerate=on_degenerate)
            self.store(table)
        return table
