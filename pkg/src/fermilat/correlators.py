"""Ground-state two-point functions from Brillouin-zone integration.

For each grid momentum the ground state of the pair Hamiltonian gives the
mode occupation and anomalous amplitude

    n(k) = (1 + 2 t(k) / E(k)) / 2,
    f(k) = <c+_k c+_{-k}> = -i D(k) / E(k),

and an inverse FFT yields the displacement-indexed tables

    g(r) = <c+_0 c_r>,    a(r) = <c+_0 c+_r>.

Both tables are real for this model; they are stored as complex arrays and
realness is asserted rather than assumed. On a half-step shifted grid
(antiperiodic boundary conditions) the tables obey g(r + N e_a) = -g(r), so
lookups at literal displacements carry a sign per wrapped axis.

Grid momenta where E(k) falls below ``DEGENERACY_TOL`` are degenerate: the
ground state there is ambiguous and the particle-hole symmetric resolution
n = 1/2, f = 0 is used (reported via a warning, or an error in strict mode).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, dispersion_on_grid

__all__ = [
    "KGrid",
    "CorrelatorTable",
    "BlockCorrelations",
    "build_correlator_table",
    "block_matrices",
    "axis_correlator",
    "DEGENERACY_TOL",
    "DEFAULT_BLOCK_MARGIN",
]

DEGENERACY_TOL = 1e-12
DEFAULT_BLOCK_MARGIN = 8

_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class KGrid:
    """Uniform momentum grid: N samples per dimension, optionally half-step shifted.

    ``max_points`` is the caller-declared memory budget for the total grid
    size N^dim.
    """

    n_per_dim: int
    shifted: bool = True
    max_points: int = 1 << 24

    def __post_init__(self):
        if self.n_per_dim < 2:
            raise ValueError(f"n_per_dim must be >= 2, got {self.n_per_dim}")

    def validate_for_dim(self, dim: int) -> None:
        if self.n_per_dim**dim > self.max_points:
            raise ValueError(
                f"grid size {self.n_per_dim}^{dim} exceeds the declared "
                f"budget of {self.max_points} points"
            )


@dataclass
class CorrelatorTable:
    """Displacement-indexed two-point functions for one parameter point.

    ``g_arr[r]`` and ``a_arr[r]`` hold g and a at the representative
    displacements r in {0..N-1}^dim; the accessors below extend them to
    literal integer displacements with the wrap signs of the grid's boundary
    condition.
    """

    params: ModelParams
    grid: KGrid
    g_arr: np.ndarray
    a_arr: np.ndarray
    degenerate_points: int = 0

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def n(self) -> int:
        return self.grid.n_per_dim

    def _lookup(self, arr: np.ndarray, r) -> complex:
        r = np.atleast_1d(np.asarray(r, dtype=int))
        if r.shape != (self.dim,):
            raise ValueError(f"displacement must have {self.dim} components")
        if np.any(np.abs(r) >= self.n):
            raise ValueError(
                f"displacement components must satisfy |r_a| < {self.n}"
            )
        idx = r % self.n
        sign = 1.0
        if self.grid.shifted:
            # each wrap onto the representative range flips the sign
            sign = (-1.0) ** int(np.count_nonzero(idx != r))
        return sign * complex(arr[tuple(idx)])

    def g(self, r) -> complex:
        """g(r) = <c+_0 c_r> at a literal integer displacement."""
        return self._lookup(self.g_arr, r)

    def a(self, r) -> complex:
        """a(r) = <c+_0 c+_r> at a literal integer displacement."""
        return self._lookup(self.a_arr, r)

    def validate(self) -> None:
        """Check realness, Hermiticity of g, and antisymmetry of a."""
        for name, arr in (("g", self.g_arr), ("a", self.a_arr)):
            if np.abs(arr.imag).max() > _HERMITICITY_TOL:
                raise ValueError(
                    f"{name} table has imaginary parts up to "
                    f"{np.abs(arr.imag).max():.3e}"
                )
        g0 = self.g_arr[(0,) * self.dim]
        if not (-_HERMITICITY_TOL <= g0.real <= 1.0 + _HERMITICITY_TOL):
            raise ValueError(f"on-site occupation g(0) = {g0} outside [0, 1]")
        g_rev = self._reversed(self.g_arr)
        if np.abs(np.conj(g_rev) - self.g_arr).max() > _HERMITICITY_TOL:
            raise ValueError("g table violates Hermiticity g(-r) = conj(g(r))")
        a_rev = self._reversed(self.a_arr)
        if np.abs(a_rev + self.a_arr).max() > _HERMITICITY_TOL:
            raise ValueError("a table violates antisymmetry a(-r) = -a(r)")

    def _reversed(self, arr: np.ndarray) -> np.ndarray:
        """Array of values at negated displacements, boundary signs included."""
        out = arr
        n = self.n
        for axis in range(self.dim):
            idx = (-np.arange(n)) % n
            out = np.take(out, idx, axis=axis)
            if self.grid.shifted:
                # indices 1..N-1 wrap once under negation
                shape = [1] * self.dim
                shape[axis] = n
                sign = np.where(np.arange(n) == 0, 1.0, -1.0).reshape(shape)
                out = out * sign
        return out


def build_correlator_table(
    params: ModelParams,
    grid: KGrid,
    on_degenerate: str = "warn",
    _flip_pairing_sign: bool = False,
) -> CorrelatorTable:
    """Compute g(r) and a(r) on the N^dim torus by inverse FFT.

    Parameters
    ----------
    on_degenerate : {"warn", "raise"}
        What to do when grid momenta with E(k) < 1e-12 are present. The
        default symmetrizes the degenerate modes (n = 1/2) and warns; strict
        callers can raise and either enable the shifted grid or change N.
    _flip_pairing_sign : bool
        Test hook: negates the anomalous amplitude so that downstream
        oracle-equivalence checks must fail. Never set in production code.
    """
    grid.validate_for_dim(params.dim)
    if on_degenerate not in ("warn", "raise"):
        raise ValueError(f"unknown on_degenerate mode {on_degenerate!r}")

    t, delta, energy = dispersion_on_grid(params, grid.n_per_dim, grid.shifted)
    degenerate = energy < DEGENERACY_TOL
    n_deg = int(np.count_nonzero(degenerate))
    if n_deg:
        msg = (
            f"{n_deg} momentum grid point(s) have quasiparticle energy below "
            f"{DEGENERACY_TOL:g} for {params}; the degenerate modes are "
            f"half-filled; enable the shifted grid or change N to avoid them"
        )
        if on_degenerate == "raise":
            raise ValueError(msg)
        warnings.warn(msg)

    safe = np.where(degenerate, 1.0, energy)
    occupation = np.where(degenerate, 0.5, 0.5 * (1.0 + 2.0 * t / safe))
    anomalous = np.where(degenerate, 0.0 + 0.0j, -1j * delta / safe)
    if _flip_pairing_sign:
        anomalous = -anomalous

    g_arr = np.fft.ifftn(occupation.astype(complex))
    a_arr = np.fft.ifftn(anomalous)
    if grid.shifted:
        # momenta k = 2 pi (m + 1/2) / N add a phase exp(i pi r / N) per axis
        n = grid.n_per_dim
        phase = np.exp(1j * np.pi * np.arange(n) / n)
        for axis in range(params.dim):
            shape = [1] * params.dim
            shape[axis] = n
            g_arr = g_arr * phase.reshape(shape)
            a_arr = a_arr * phase.reshape(shape)

    table = CorrelatorTable(
        params=params,
        grid=grid,
        g_arr=g_arr,
        a_arr=a_arr,
        degenerate_points=n_deg,
    )
    table.validate()
    return table


@dataclass
class BlockCorrelations:
    """Correlation matrices of an L^dim hypercubic block, row-major site order.

    ``c_matrix[i, j] = g(r_i - r_j)`` is Hermitian with eigenvalues in [0, 1];
    ``f_matrix[i, j] = a(r_i - r_j)`` is antisymmetric.
    """

    block_l: int
    dim: int
    c_matrix: np.ndarray
    f_matrix: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.block_l**self.dim

    def validate(self) -> None:
        c, f = self.c_matrix, self.f_matrix
        if np.abs(c - c.conj().T).max() > _HERMITICITY_TOL:
            raise ValueError("block C matrix is not Hermitian")
        if np.abs(f + f.T).max() > _HERMITICITY_TOL:
            raise ValueError("block F matrix is not antisymmetric")
        occ = np.linalg.eigvalsh(c)
        if occ.min() < -1e-9 or occ.max() > 1.0 + 1e-9:
            raise ValueError(
                f"block occupations outside [0, 1]: [{occ.min()}, {occ.max()}]"
            )


def _block_coords(block_l: int, dim: int) -> np.ndarray:
    """Row-major enumeration of the L^dim hypercube, shape (L^dim, dim)."""
    grids = np.meshgrid(*([np.arange(block_l)] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def block_matrices(
    table: CorrelatorTable, block_l: int, margin: int = DEFAULT_BLOCK_MARGIN
) -> BlockCorrelations:
    """Assemble the block matrices C and F from a correlator table.

    The momentum grid must satisfy N >= margin * L so that the periodic torus
    does not contaminate the block with aliased correlations.
    """
    if block_l < 1:
        raise ValueError(f"block_l must be >= 1, got {block_l}")
    n = table.n
    if n < margin * block_l:
        raise ValueError(
            f"grid N = {n} violates the margin N >= {margin} * L for "
            f"L = {block_l}; enlarge the grid or reduce the block"
        )
    coords = _block_coords(block_l, table.dim)
    disp = coords[:, None, :] - coords[None, :, :]  # r_i - r_j, in (-L, L)
    idx = disp % n
    if table.grid.shifted:
        wraps = np.count_nonzero(idx != disp, axis=2)
        sign = np.where(wraps % 2 == 1, -1.0, 1.0)
    else:
        sign = 1.0
    sel = tuple(idx[..., axis] for axis in range(table.dim))
    bc = BlockCorrelations(
        block_l=block_l,
        dim=table.dim,
        c_matrix=sign * table.g_arr[sel],
        f_matrix=sign * table.a_arr[sel],
    )
    bc.validate()
    return bc


def axis_correlator(table: CorrelatorTable, axis: int, r_max: int):
    """g and a along one lattice axis, r = 1 .. r_max.

    Returns (r, g_values, a_values) with the values taken at literal
    displacements, suitable for decay analysis.
    """
    if not 0 <= axis < table.dim:
        raise ValueError(f"axis must be in [0, {table.dim}), got {axis}")
    if not 1 <= r_max < table.n:
        raise ValueError(f"r_max must be in [1, N), got {r_max}")
    rs = np.arange(1, r_max + 1)
    g_vals = np.empty(r_max, dtype=complex)
    a_vals = np.empty(r_max, dtype=complex)
    for i, r in enumerate(rs):
        disp = np.zeros(table.dim, dtype=int)
        disp[axis] = r
        g_vals[i] = table.g(disp)
        a_vals[i] = table.a(disp)
    return rs, g_vals, a_vals
