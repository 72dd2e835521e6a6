"""Quadratic spinless-fermion lattice model: dispersion, phases, density of states.

The model lives on a d-dimensional hypercubic lattice (d = 1, 2, 3) with unit
nearest-neighbor hopping, p-wave pairing of strength gamma and a chemical
potential controlled by lambda:

    H = sum_<ij> [c+_i c_j + c+_j c_i]
        - gamma sum_<ij> [c+_i c+_j + c_j c_i]
        - 2 lambda sum_i c+_i c_i

where the pairing bonds are oriented along the positive axis directions
(the orientation fixes the overall sign of the anomalous correlator but no
observable). In momentum space,

    t(k) = lambda - sum_a cos(k_a)          (band term)
    D(k) = gamma * sum_a sin(k_a)           (p-wave pairing term)
    E(k) = 2 sqrt(t(k)^2 + D(k)^2)          (quasiparticle energy)

The phase diagram splits into a metallic phase with a finite Fermi surface
(Phase I), a p-wave paired phase whose gapless manifold has co-dimension 2
(Phase II), and a gapped phase (Phase III) for lambda > d.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "Phase",
    "PhaseLabel",
    "DosHistogram",
    "band_term",
    "pairing_term",
    "excitation_energy",
    "classify_phase",
    "grid_momenta",
    "dispersion_on_grid",
    "dos_estimate",
    "dos_trend",
    "gap_estimate",
    "in_first_bz",
]


@dataclass(frozen=True)
class ModelParams:
    """Hamiltonian instance: chemical potential, pairing strength, dimension.

    Attributes
    ----------
    lam : float
        Dimensionless chemical potential (lambda). Negative values define a
        valid Hamiltonian but are outside the classified phase diagram.
    gamma : float
        Pairing strength, must be >= 0.
    dim : int
        Lattice dimension, one of {1, 2, 3}.
    """

    lam: float
    gamma: float
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not np.isfinite(self.lam):
            raise ValueError(f"lambda must be finite, got {self.lam}")
        if not np.isfinite(self.gamma) or self.gamma < 0.0:
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")


class Phase(enum.Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class PhaseLabel:
    """Phase classification of a parameter point.

    ``codimension`` is the dimension of momentum space minus the dimension of
    the gapless manifold; ``dos_positive`` records whether the density of
    states at zero energy is finite.
    """

    phase: Phase
    codimension: int
    dos_positive: bool

    def __post_init__(self):
        if self.phase is Phase.I and not self.dos_positive:
            raise ValueError("Phase I requires a positive density of states")
        if self.phase is not Phase.I and self.dos_positive:
            raise ValueError("Phases II and III have vanishing g(0)")


def in_first_bz(k) -> bool:
    """True when every momentum component lies in (-pi, pi]."""
    k = np.asarray(k, dtype=float)
    return bool(np.all((k > -np.pi) & (k <= np.pi)))


def band_term(params: ModelParams, k) -> np.ndarray | float:
    """Band term t(k) = lambda - sum_a cos(k_a).

    ``k`` is an array whose last axis holds the dim momentum components;
    broadcasting over leading axes is supported.
    """
    k = np.asarray(k, dtype=float)
    out = params.lam - np.cos(k).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def pairing_term(params: ModelParams, k) -> np.ndarray | float:
    """Pairing term D(k) = gamma * sum_a sin(k_a) (odd under k -> -k)."""
    k = np.asarray(k, dtype=float)
    out = params.gamma * np.sin(k).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def excitation_energy(params: ModelParams, k) -> np.ndarray | float:
    """Quasiparticle energy E(k) = 2 sqrt(t(k)^2 + D(k)^2), always >= 0."""
    t = band_term(params, k)
    d = pairing_term(params, k)
    return 2.0 * np.sqrt(np.square(t) + np.square(d))


def classify_phase(params: ModelParams) -> PhaseLabel:
    """Classify a parameter point into Phase I, II or III.

    Phase I (finite Fermi surface, g(0) > 0):
        {0 <= lambda <= d, gamma = 0} and, for d = 2 only, {lambda = 0, gamma > 0}.
        Co-dimension 1 except at {lambda = d, gamma = 0} where the surface
        degenerates to a point (co-dimension min(2, d)).
    Phase II (point/line nodes, g(0) = 0):
        {0 < lambda <= d, gamma > 0} and, for d = 3 only, {lambda = 0, gamma > 0}.
        For d = 1 this region is gapped away from lambda = d; it is still
        labelled II with the co-dimension clamped to the momentum dimension.
    Phase III (gapped): lambda > d.

    Raises
    ------
    ValueError
        For lambda < 0, which is outside the classified diagram.
    """
    lam, gamma, d = params.lam, params.gamma, params.dim
    if lam < 0.0:
        raise ValueError(
            f"lambda must be >= 0 for phase classification, got {lam}"
        )
    if lam > d:
        return PhaseLabel(Phase.III, codimension=d, dos_positive=False)
    if gamma == 0.0:
        codim = min(2, d) if lam == d else 1
        return PhaseLabel(Phase.I, codimension=codim, dos_positive=True)
    # gamma > 0, 0 <= lambda <= d
    if lam == 0.0 and d == 2:
        return PhaseLabel(Phase.I, codimension=1, dos_positive=True)
    return PhaseLabel(Phase.II, codimension=min(2, d), dos_positive=False)


def grid_momenta(n: int, shifted: bool) -> np.ndarray:
    """Momentum samples along one axis, k_m = 2 pi (m + s) / n with s in {0, 1/2}.

    The half-step shift corresponds to antiperiodic boundary conditions on an
    n-site ring and avoids the inversion-symmetric momenta k = 0, pi.
    Values are returned in FFT index order; all model functions are
    2 pi periodic so no wrapping into (-pi, pi] is required.
    """
    if n < 2:
        raise ValueError(f"need at least 2 momentum samples per axis, got {n}")
    return 2.0 * np.pi * (np.arange(n) + (0.5 if shifted else 0.0)) / n


def dispersion_on_grid(params: ModelParams, n: int, shifted: bool):
    """Evaluate (t, D, E) on the full n^dim momentum grid.

    Returns three arrays of shape (n,) * dim.
    """
    k = grid_momenta(n, shifted)
    cos_total = 0.0
    sin_total = 0.0
    for axis in range(params.dim):
        shape = [1] * params.dim
        shape[axis] = n
        cos_total = cos_total + np.cos(k).reshape(shape)
        sin_total = sin_total + np.sin(k).reshape(shape)
    t = params.lam - cos_total
    delta = params.gamma * sin_total
    energy = 2.0 * np.sqrt(t * t + delta * delta)
    return t, delta, energy


@dataclass(frozen=True)
class DosHistogram:
    """Normalized histogram estimate of the density of states g(E).

    ``densities`` integrates to one over ``bin_edges``; the lowest-bin density
    is the finite-resolution estimate of g(0).
    """

    bin_edges: np.ndarray
    densities: np.ndarray
    grid_n: int

    def __post_init__(self):
        if np.any(self.densities < 0):
            raise ValueError("densities must be non-negative")
        widths = np.diff(self.bin_edges)
        total = float(np.sum(self.densities * widths))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"histogram does not integrate to 1: {total}")

    @property
    def g0_estimate(self) -> float:
        return float(self.densities[0])


_MIN_SAMPLES_PER_BIN = 32


def dos_estimate(params: ModelParams, grid_n: int, bins: int) -> DosHistogram:
    """Histogram of the quasiparticle energies on a half-step shifted grid.

    Parameters
    ----------
    grid_n : int
        Momentum samples per dimension, >= 64.
    bins : int
        Number of energy bins, >= 32. ``grid_n**dim`` must exceed
        32 * bins or the estimate is rejected as under-resolved.
    """
    if grid_n < 64:
        raise ValueError(f"grid_n must be >= 64, got {grid_n}")
    if bins < 32:
        raise ValueError(f"bins must be >= 32, got {bins}")
    if grid_n**params.dim < _MIN_SAMPLES_PER_BIN * bins:
        raise ValueError(
            f"under-resolved histogram: {grid_n}^{params.dim} samples cannot "
            f"populate {bins} bins; raise grid_n or lower bins"
        )
    _, _, energy = dispersion_on_grid(params, grid_n, shifted=True)
    counts, edges = np.histogram(
        energy.ravel(), bins=bins, range=(0.0, float(energy.max())), density=True
    )
    return DosHistogram(bin_edges=edges, densities=counts, grid_n=grid_n)


def dos_trend(
    params: ModelParams, grid_n: int, bins: int = 64, levels: int = 3
) -> list[tuple[float, float]]:
    """Lowest-bin density at successively halved bin widths.

    Distinguishing g(0) > 0 from g(0) = 0 is a limit statement, so the
    diagnostic is the trend of the lowest-bin density as the bin width
    shrinks: roughly constant for a finite Fermi surface, shrinking with the
    width for point or line nodes, exactly zero below a gap.

    Returns a list of (bin_width, lowest_bin_density) pairs.
    """
    out = []
    for level in range(levels):
        hist = dos_estimate(params, grid_n, bins * 2**level)
        width = float(hist.bin_edges[1] - hist.bin_edges[0])
        out.append((width, hist.g0_estimate))
    return out


DEFAULT_GRID_N = {1: 4096, 2: 512, 3: 128}


def gap_estimate(params: ModelParams, grid_n: int | None = None) -> float:
    """Minimum quasiparticle energy over an unshifted momentum grid.

    The unshifted grid contains the inversion-symmetric momenta where the
    band extrema of this model sit, so for the gapped phase with gamma = 0
    the estimate equals the exact gap 2 (lambda - d).
    """
    if grid_n is None:
        grid_n = DEFAULT_GRID_N[params.dim]
    _, _, energy = dispersion_on_grid(params, grid_n, shifted=False)
    return float(energy.min())
