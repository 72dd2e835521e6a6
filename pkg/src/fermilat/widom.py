"""Logarithmic-correction prefactor from Fermi-surface quadrature.

For a unit-cube block the double surface integral

    C = 1 / (4 (2 pi)^(d-1)) * int_{block boundary} int_{Fermi surface}
        |n_x . n_p| dS_x dS_p

collapses exactly: the block boundary consists of 2d axis-aligned unit faces,
each pair of opposite faces contributing the Fermi-surface integral of
|n_p . e_a|, so

    C = 2 / (4 (2 pi)^(d-1)) * sum_a  sum_elements |n_a| * measure.

For flat surface elements |n_a| * measure equals the projected measure onto
the plane orthogonal to e_a, which the element geometry gives exactly. The
Fermi surface itself is extracted by marching squares (d = 2) or marching
cubes (d = 3) on the sign-changing band function t(k), except for the
diagonal nodal line at {lambda = 0, gamma > 0, d = 2} which is parametrized
analytically. Surfaces are extracted over the full zone torus, wrapped so
every element is counted once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from skimage import measure as _skmeasure

from .model import ModelParams, Phase, classify_phase

__all__ = [
    "FermiSurface",
    "WidomResult",
    "extract_fermi_surface",
    "widom_prefactor",
    "widom_closed_form_2d",
    "write_surface_csv",
]

_MIN_GRID_N = 64
_NORMAL_TOL = 1e-12


@dataclass
class FermiSurface:
    """Discretized gapless manifold: element centroids, measures, and normals.

    ``measures`` are segment lengths in d = 2 and triangle areas in d = 3;
    ``normals`` are unit vectors (orientation is irrelevant downstream, only
    the component magnitudes enter the quadrature).
    """

    dim: int
    centroids: np.ndarray
    measures: np.ndarray
    normals: np.ndarray
    params: ModelParams
    grid_n: int

    def __post_init__(self):
        if len(self.measures) == 0:
            raise ValueError("empty Fermi surface")
        norms = np.linalg.norm(self.normals, axis=1)
        if np.abs(norms - 1.0).max() > _NORMAL_TOL:
            raise ValueError("surface normals must be unit vectors")
        if self.measures.min() <= 0.0:
            raise ValueError("surface element measures must be positive")

    @property
    def n_elements(self) -> int:
        return len(self.measures)

    @property
    def total_measure(self) -> float:
        return float(self.measures.sum())


@dataclass(frozen=True)
class WidomResult:
    """Quadrature value of the prefactor with its refinement diagnostic."""

    c_value: float
    grid_n: int
    refinement_delta: float

    def __post_init__(self):
        if self.c_value < 0.0:
            raise ValueError("prefactor must be >= 0")


def _wrap_to_bz(k: np.ndarray) -> np.ndarray:
    """Map momenta to the first Brillouin zone (-pi, pi]."""
    return -((-k + np.pi) % (2.0 * np.pi)) + np.pi


def _reject_without_surface(params: ModelParams) -> None:
    label = classify_phase(params)
    if label.phase is not Phase.I:
        raise ValueError(
            f"no finite Fermi surface in Phase {label.phase.value} "
            f"(lambda={params.lam}, gamma={params.gamma}, d={params.dim})"
        )
    if params.gamma == 0.0 and params.lam == params.dim:
        raise ValueError(
            f"no finite Fermi surface at lambda = d = {params.dim}, gamma = 0: "
            f"the surface degenerates to a point"
        )


def _band_values_padded(params: ModelParams, grid_n: int) -> np.ndarray:
    """sum_a cos(k_a) on (grid_n + 1)^d half-step shifted vertices, wrapped once."""
    k = -np.pi + (2.0 * np.pi / grid_n) * (np.arange(grid_n + 1) + 0.5)
    axes = np.meshgrid(*([k] * params.dim), indexing="ij")
    f = sum(np.cos(ax) for ax in axes)
    for axis in range(params.dim):
        src = [slice(None)] * params.dim
        dst = [slice(None)] * params.dim
        src[axis] = 0
        dst[axis] = -1
        f[tuple(dst)] = f[tuple(src)]  # periodic pad: vertex N aliases vertex 0
    return f


def _marching_surface_2d(params: ModelParams, grid_n: int):
    f = _band_values_padded(params, grid_n)
    level = params.lam
    if np.any(f == level):
        # break exact vertex hits; displaces the contour by O(1e-9)
        f = np.where(f == level, level + 1e-9 * max(1.0, float(np.abs(f).max())), f)
    h = 2.0 * np.pi / grid_n
    origin = -np.pi + 0.5 * h
    centroids, measures, normals = [], [], []
    for contour in _skmeasure.find_contours(f, level):
        pts = origin + contour * h
        seg = np.diff(pts, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        keep = lengths > 0.0
        seg, lengths = seg[keep], lengths[keep]
        mids = 0.5 * (pts[:-1] + pts[1:])[keep]
        # segment perpendicular; satisfies |n_x| * length = |dk_y| exactly
        nrm = np.column_stack([seg[:, 1], -seg[:, 0]]) / lengths[:, None]
        centroids.append(_wrap_to_bz(mids))
        measures.append(lengths)
        normals.append(nrm)
    return (
        np.concatenate(centroids),
        np.concatenate(measures),
        np.concatenate(normals),
    )


def _marching_surface_3d(params: ModelParams, grid_n: int):
    f = _band_values_padded(params, grid_n)
    level = params.lam
    if np.any(f == level):
        f = np.where(f == level, level + 1e-9 * max(1.0, float(np.abs(f).max())), f)
    h = 2.0 * np.pi / grid_n
    origin = -np.pi + 0.5 * h
    verts, faces, _, _ = _skmeasure.marching_cubes(f, level=level, spacing=(h, h, h))
    verts = verts + origin
    tri = verts[faces]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    area2 = np.linalg.norm(cross, axis=1)
    keep = area2 > 0.0
    cross, area2 = cross[keep], area2[keep]
    centroids = _wrap_to_bz(tri[keep].mean(axis=1))
    measures = 0.5 * area2
    normals = cross / area2[:, None]
    return centroids, measures, normals


def _analytic_nodal_line_2d(params: ModelParams, grid_n: int):
    """The nodal line k_x = k_y - pi (one closed loop on the zone torus).

    Its total length is 2 sqrt(2) pi with constant normal (1, -1)/sqrt(2);
    the discretization only serves reporting and refinement bookkeeping.
    """
    t = -np.pi + 2.0 * np.pi * (np.arange(grid_n) + 0.5) / grid_n
    centroids = _wrap_to_bz(np.column_stack([t - np.pi, t]))
    measures = np.full(grid_n, np.sqrt(2.0) * 2.0 * np.pi / grid_n)
    normals = np.tile(np.array([1.0, -1.0]) / np.sqrt(2.0), (grid_n, 1))
    return centroids, measures, normals


def extract_fermi_surface(params: ModelParams, grid_n: int = 1024) -> FermiSurface:
    """Extract the codimension-1 gapless manifold of a Phase-I point.

    For gamma = 0 the level set t(k) = 0 is traced by marching squares or
    marching cubes; for {lambda = 0, gamma > 0, d = 2} the analytic diagonal
    line is used directly. Phase II and III points are rejected, as is the
    degenerate point surface at {lambda = d, gamma = 0}.
    """
    _reject_without_surface(params)
    if grid_n < _MIN_GRID_N:
        raise ValueError(f"grid_n must be >= {_MIN_GRID_N}, got {grid_n}")
    if params.gamma > 0.0:
        # Phase I with pairing exists only at lambda = 0, d = 2
        centroids, measures, normals = _analytic_nodal_line_2d(params, grid_n)
    elif params.dim == 2:
        centroids, measures, normals = _marching_surface_2d(params, grid_n)
    elif params.dim == 3:
        centroids, measures, normals = _marching_surface_3d(params, grid_n)
    else:
        # d = 1 Fermi "surface" consists of two points; not a quadrature target
        raise ValueError("surface extraction requires d >= 2")
    return FermiSurface(
        dim=params.dim,
        centroids=centroids,
        measures=measures,
        normals=normals,
        params=params,
        grid_n=grid_n,
    )


def _prefactor_from_elements(fs: FermiSurface) -> float:
    projected = np.abs(fs.normals) * fs.measures[:, None]
    return float(2.0 * projected.sum() / (4.0 * (2.0 * np.pi) ** (fs.dim - 1)))


def widom_prefactor(fs: FermiSurface) -> WidomResult:
    """Prefactor of the logarithmic correction for a unit-cube block.

    Evaluates the collapsed surface integral on the given discretization and
    once more at half the grid resolution; the difference is reported as
    ``refinement_delta`` rather than hidden.
    """
    c_fine = _prefactor_from_elements(fs)
    coarse_n = max(_MIN_GRID_N, fs.grid_n // 2)
    if coarse_n == fs.grid_n:
        delta = 0.0
    else:
        fs_coarse = extract_fermi_surface(fs.params, coarse_n)
        delta = abs(c_fine - _prefactor_from_elements(fs_coarse))
    return WidomResult(c_value=c_fine, grid_n=fs.grid_n, refinement_delta=delta)


def widom_closed_form_2d(lam: float) -> float:
    """Exact d = 2, gamma = 0 prefactor, C(lambda) = (2/pi) arccos(lambda - 1)."""
    if not 0.0 <= lam <= 2.0:
        raise ValueError(f"closed form requires 0 <= lambda <= 2, got {lam}")
    return float(2.0 / np.pi * np.arccos(lam - 1.0))


def write_surface_csv(fs: FermiSurface, path) -> None:
    """Dump surface elements as CSV for external visualization."""
    axes = "xyz"[: fs.dim]
    header = (
        [f"centroid_k{a}" for a in axes]
        + ["measure"]
        + [f"normal_{a}" for a in axes]
    )
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(fs.n_elements):
            row = (
                [f"{v:.12g}" for v in fs.centroids[i]]
                + [f"{fs.measures[i]:.12g}"]
                + [f"{v:.12g}" for v in fs.normals[i]]
            )
            fh.write(",".join(row) + "\n")
