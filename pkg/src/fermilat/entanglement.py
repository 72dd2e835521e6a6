"""Single-particle entanglement spectrum and block entropy.

The eigenvalues nu_l of the product matrix

    M = (C - F - I/2) (C + F - I/2)

lie in [0, 1/4] and determine the entanglement-Hamiltonian mode energies
eps_l through nu_l = tanh^2(eps_l / 2) / 4 and the mode occupations
p_l = 1 / (exp(eps_l) + 1) = (1 - 2 sqrt(nu_l)) / 2. The block entropy is the
sum of binary mode entropies, reported in bits (log base 2) with the
natural-log value carried alongside.

Entropies are always computed from p directly; eps overflows to infinity for
pure modes (nu -> 1/4) exactly where the entropy contribution vanishes, so it
is kept only as a reported quantity with an infinite sentinel.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .correlators import (
    BlockCorrelations,
    CorrelatorTable,
    KGrid,
    block_matrices,
    build_correlator_table,
    DEFAULT_BLOCK_MARGIN,
)
from .model import ModelParams

__all__ = [
    "ModeSpectrum",
    "BlockEntropy",
    "mode_spectrum",
    "block_entropy",
    "entropy_series",
    "EntropySeriesError",
]

_NU_RANGE_TOL = 1e-9
_NU_PURE_TOL = 1e-14
LN2 = float(np.log(2.0))


@dataclass
class ModeSpectrum:
    """Per-mode eigenvalues of a block's entanglement Hamiltonian.

    ``nu`` is clamped to [0, 1/4] and sorted ascending (most entangled modes
    first); ``epsilon`` uses +inf for pure modes; ``p`` lies in [0, 1/2].
    """

    nu: np.ndarray
    epsilon: np.ndarray
    p: np.ndarray
    block_l: int
    dim: int

    def __post_init__(self):
        n_modes = self.block_l**self.dim
        if not (len(self.nu) == len(self.epsilon) == len(self.p) == n_modes):
            raise ValueError(
                f"spectrum must hold L^d = {n_modes} modes, got {len(self.nu)}"
            )


def mode_spectrum(bc: BlockCorrelations) -> ModeSpectrum:
    """Eigenvalues of (C - F - I/2)(C + F - I/2) with validity checks.

    The product matrix is generally non-symmetric when F != 0, so a general
    eigensolver is used and the spectrum is validated to be real and inside
    [0, 1/4] (up to 1e-9) rather than assumed so. Violations indicate a sign
    or convention bug upstream and raise immediately.
    """
    half = 0.5 * np.eye(bc.n_sites)
    product = (bc.c_matrix - bc.f_matrix - half) @ (bc.c_matrix + bc.f_matrix - half)
    if np.abs(product.imag).max() < 1e-12:
        nu = np.linalg.eigvals(product.real)
    else:
        nu = np.linalg.eigvals(product)

    max_imag = float(np.abs(nu.imag).max()) if len(nu) else 0.0
    if max_imag > _NU_RANGE_TOL:
        raise ValueError(
            f"entanglement eigenvalues have imaginary parts up to {max_imag:.3e}; "
            f"this signals a convention bug upstream"
        )
    nu = nu.real
    if nu.min() < -_NU_RANGE_TOL or nu.max() > 0.25 + _NU_RANGE_TOL:
        raise ValueError(
            f"entanglement eigenvalues outside [0, 1/4]: "
            f"[{nu.min():.3e}, {nu.max():.3e}]; this signals a convention bug "
            f"upstream"
        )
    nu = np.sort(np.clip(nu, 0.0, 0.25))

    pure = nu >= 0.25 - _NU_PURE_TOL
    root = 2.0 * np.sqrt(nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        epsilon = np.where(pure, np.inf, 2.0 * np.arctanh(np.where(pure, 0.0, root)))
    p = np.clip((1.0 - root) / 2.0, 0.0, 0.5)
    return ModeSpectrum(
        nu=nu, epsilon=epsilon, p=p, block_l=bc.block_l, dim=bc.dim
    )


@dataclass(frozen=True)
class BlockEntropy:
    """Von Neumann entropy of one block, in bits and nats."""

    block_l: int
    entropy_bits: float
    entropy_nats: float

    def __post_init__(self):
        if self.entropy_bits < 0.0:
            raise ValueError(f"entropy must be >= 0, got {self.entropy_bits}")


def block_entropy(spec: ModeSpectrum) -> BlockEntropy:
    """Sum of binary mode entropies, S = sum_l h(p_l) in bits.

    h(p) = -p log2 p - (1 - p) log2 (1 - p) with h(0) = 0, so pure modes
    (eps = inf) contribute nothing and no logarithm of zero is ever taken.
    """
    p = spec.p
    bits = float(-(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)).sum() / LN2)
    bits = max(bits, 0.0)
    n_modes = spec.block_l**spec.dim
    if bits > n_modes + 1e-9:
        raise ValueError(f"entropy {bits} exceeds the {n_modes}-mode bound")
    return BlockEntropy(
        block_l=spec.block_l, entropy_bits=bits, entropy_nats=bits * LN2
    )


class EntropySeriesError(RuntimeError):
    """Raised when part of an entropy series fails; carries partial results."""

    def __init__(self, message: str, partial: list[BlockEntropy]):
        super().__init__(message)
        self.partial = partial


def entropy_series(
    params: ModelParams,
    l_values,
    grid: KGrid,
    margin: int = DEFAULT_BLOCK_MARGIN,
    table: CorrelatorTable | None = None,
    on_degenerate: str = "warn",
) -> list[BlockEntropy]:
    """Block entropies S_L for ascending L, sharing one correlator table.

    A precomputed ``table`` may be passed to skip the transform (it must match
    ``params`` and ``grid``). The series is checked to be nondecreasing in L;
    violations are reported as warnings, not errors. Failures at individual L
    raise :class:`EntropySeriesError` with the completed prefix attached.
    """
    l_values = [int(l) for l in l_values]
    if not l_values:
        raise ValueError("l_values must be non-empty")
    if any(b <= a for a, b in zip(l_values, l_values[1:])):
        raise ValueError("l_values must be strictly ascending")
    if grid.n_per_dim < margin * max(l_values):
        raise ValueError(
            f"grid N = {grid.n_per_dim} violates the margin N >= {margin} * L "
            f"for L = {max(l_values)}"
        )
    if table is None:
        table = build_correlator_table(params, grid, on_degenerate=on_degenerate)
    elif table.params != params or table.grid != grid:
        raise ValueError("provided table does not match params/grid")

    out: list[BlockEntropy] = []
    for l in l_values:
        try:
            bc = block_matrices(table, l, margin=margin)
            out.append(block_entropy(mode_spectrum(bc)))
        except Exception as exc:
            raise EntropySeriesError(
                f"entropy series failed at L = {l}: {exc}", partial=out
            ) from exc
    bits = [e.entropy_bits for e in out]
    if any(b2 < b1 - 1e-12 for b1, b2 in zip(bits, bits[1:])):
        warnings.warn(
            f"block entropy series is not monotone in L for {params}; "
            f"check the grid margin"
        )
    return out
