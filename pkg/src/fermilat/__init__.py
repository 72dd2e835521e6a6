"""Exact block-entanglement scaling for quadratic spinless-fermion lattices.

The package solves a nearest-neighbor hopping plus p-wave pairing model in
d = 1, 2, 3, builds ground-state correlation matrices by Brillouin-zone
integration (cross-checked against a dense real-space reference), computes
block entanglement entropies from the single-particle entanglement spectrum,
fits their finite-size scaling, and evaluates the surface-integral prefactor
of the logarithmic area-law correction.
"""

__version__ = "0.1.0"

from .model import (
    DosHistogram,
    ModelParams,
    Phase,
    PhaseLabel,
    band_term,
    classify_phase,
    dos_estimate,
    dos_trend,
    excitation_energy,
    gap_estimate,
    pairing_term,
)
from .correlators import (
    BlockCorrelations,
    CorrelatorTable,
    KGrid,
    axis_correlator,
    block_matrices,
    build_correlator_table,
)
from .oracle import bdg_matrices, bdg_spectrum, lattice_bdg_correlators
from .cache import CorrelatorCache
from .entanglement import (
    BlockEntropy,
    ModeSpectrum,
    block_entropy,
    entropy_series,
    mode_spectrum,
)
from .scaling import (
    DecayFit,
    DecayKind,
    FitModel,
    ScalingFit,
    classify_decay,
    fit_scaling,
    select_model,
)
from .widom import (
    FermiSurface,
    WidomResult,
    extract_fermi_surface,
    widom_closed_form_2d,
    widom_prefactor,
)
from .sweep import SweepConfig, run_scan

__all__ = [
    "__version__",
    "ModelParams",
    "Phase",
    "PhaseLabel",
    "DosHistogram",
    "band_term",
    "pairing_term",
    "excitation_energy",
    "classify_phase",
    "dos_estimate",
    "dos_trend",
    "gap_estimate",
    "KGrid",
    "CorrelatorTable",
    "BlockCorrelations",
    "build_correlator_table",
    "block_matrices",
    "axis_correlator",
    "bdg_matrices",
    "bdg_spectrum",
    "lattice_bdg_correlators",
    "CorrelatorCache",
    "ModeSpectrum",
    "BlockEntropy",
    "mode_spectrum",
    "block_entropy",
    "entropy_series",
    "FitModel",
    "DecayKind",
    "ScalingFit",
    "DecayFit",
    "fit_scaling",
    "select_model",
    "classify_decay",
    "FermiSurface",
    "WidomResult",
    "extract_fermi_surface",
    "widom_prefactor",
    "widom_closed_form_2d",
    "SweepConfig",
    "run_scan",
]
