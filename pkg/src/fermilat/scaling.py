"""Finite-size scaling fits, model selection, and correlation-decay classification.

Entropy series are fitted by ordinary least squares to the log-corrected
area law

    S_L = (C/3) L^(d-1) log2(L) + B L^(d-1) + A L^(d-2)

or to the pure area law (C forced to zero). For d = 1 the basis degenerates
to {log2 L, 1}. Entropies are deterministic, so the fits are unweighted.
Higher-order corrections are deliberately not modelled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FitModel",
    "DecayKind",
    "ScalingFit",
    "DecayFit",
    "fit_scaling",
    "select_model",
    "classify_decay",
    "RESIDUAL_FACTOR_DEFAULT",
    "C_THRESHOLD_DEFAULT",
]

RESIDUAL_FACTOR_DEFAULT = 10.0
C_THRESHOLD_DEFAULT = 0.05
_ZERO_DECAY_TOL = 1e-12


class FitModel(enum.Enum):
    LOG_AREA = "LOG_AREA"
    AREA_ONLY = "AREA_ONLY"


class DecayKind(enum.Enum):
    POWER_LAW = "POWER_LAW"
    EXPONENTIAL = "EXPONENTIAL"
    ZERO = "ZERO"


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares coefficients for one entropy series.

    ``c_coef`` is the prefactor of the (1/3) L^(d-1) log2 L term, i.e. three
    times the fitted basis coefficient; it is zero by construction for the
    AREA_ONLY model.
    """

    c_coef: float
    b_coef: float
    a_coef: float
    rms_residual: float
    model: FitModel
    l_range: tuple[int, int]


@dataclass(frozen=True)
class DecayFit:
    """Correlation-decay classification from log-space regression.

    ``exponent_or_xi`` is the power-law exponent for POWER_LAW and the
    correlation length xi for EXPONENTIAL; ``fit_quality`` is R^2 of the
    winning regression, clamped to [0, 1].
    """

    kind: DecayKind
    exponent_or_xi: float
    fit_quality: float


def _as_series(series) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray([(float(l), float(s)) for l, s in series], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("series must be a sequence of (L, S) pairs")
    return arr[:, 0], arr[:, 1]


def _design_matrix(l_vals: np.ndarray, dim: int, model: FitModel) -> np.ndarray:
    log2l = np.log2(l_vals)
    if dim == 1:
        if model is FitModel.LOG_AREA:
            cols = [log2l, np.ones_like(l_vals)]
        else:
            cols = [np.ones_like(l_vals)]
    else:
        area = l_vals ** (dim - 1)
        sub = l_vals ** (dim - 2)
        if model is FitModel.LOG_AREA:
            cols = [area * log2l, area, sub]
        else:
            cols = [area, sub]
    return np.column_stack(cols)


def fit_scaling(series, dim: int, model: FitModel = FitModel.LOG_AREA) -> ScalingFit:
    """Fit an (L, S_L) series to the chosen scaling form.

    Requires at least 4 points with distinct L >= 2. A rank-deficient design
    matrix (e.g. repeated L values) is rejected.
    """
    l_vals, s_vals = _as_series(series)
    if len(l_vals) < 4:
        raise ValueError(f"need at least 4 data points, got {len(l_vals)}")
    if len(np.unique(l_vals)) != len(l_vals):
        raise ValueError("L values must be distinct")
    if l_vals.min() < 2:
        raise ValueError("L values must be >= 2")

    design = _design_matrix(l_vals, dim, model)
    coef, _, rank, _ = np.linalg.lstsq(design, s_vals, rcond=None)
    if rank < design.shape[1]:
        raise ValueError(
            f"rank-deficient design matrix (rank {rank} < {design.shape[1]})"
        )
    residual = s_vals - design @ coef
    rms = float(np.sqrt(np.mean(residual**2)))
    l_range = (int(l_vals.min()), int(l_vals.max()))

    if model is FitModel.LOG_AREA:
        c = 3.0 * float(coef[0])
        b = float(coef[1])
        a = float(coef[2]) if dim > 1 else 0.0
    else:
        c = 0.0
        b = float(coef[0])
        a = float(coef[1]) if dim > 1 else 0.0
    return ScalingFit(
        c_coef=c, b_coef=b, a_coef=a, rms_residual=rms, model=model, l_range=l_range
    )


def select_model(
    series,
    dim: int,
    residual_factor: float = RESIDUAL_FACTOR_DEFAULT,
    c_threshold: float = C_THRESHOLD_DEFAULT,
) -> tuple[ScalingFit, ScalingFit, FitModel]:
    """Fit both scaling forms and pick one.

    The verdict is LOG_AREA only when the log term both earns its keep
    (the rms residual drops by at least ``residual_factor``) and is sizable
    (|C| > ``c_threshold``); otherwise AREA_ONLY.

    Returns (log_fit, area_fit, verdict).
    """
    log_fit = fit_scaling(series, dim, FitModel.LOG_AREA)
    area_fit = fit_scaling(series, dim, FitModel.AREA_ONLY)
    improves = area_fit.rms_residual >= residual_factor * log_fit.rms_residual
    if log_fit.rms_residual == 0.0:
        # exact fits on both sides (e.g. an all-zero series) favor the
        # simpler model; an exact log fit with inexact area fit keeps LOG
        improves = area_fit.rms_residual > 0.0
    verdict = (
        FitModel.LOG_AREA
        if improves and abs(log_fit.c_coef) > c_threshold
        else FitModel.AREA_ONLY
    )
    return log_fit, area_fit, verdict


def _r_squared(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Linear regression y = m x + b; returns (m, b, R^2 clamped to [0, 1])."""
    design = np.column_stack([x, np.ones_like(x)])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    total = float(np.sum((y - y.mean()) ** 2))
    if total == 0.0:
        r2 = 1.0
    else:
        r2 = 1.0 - float(np.sum(resid**2)) / total
    return float(coef[0]), float(coef[1]), min(max(r2, 0.0), 1.0)


def classify_decay(values) -> DecayFit:
    """Classify |g(r)| samples as power-law, exponential, or zero.

    Regresses log|g| against log r (power law) and against r (exponential)
    and keeps the better R^2. Requires >= 6 samples at ascending r >= 1;
    signs are dropped and exact zeros are excluded from the logarithms. A
    series entirely below 1e-12 is classified ZERO.
    """
    arr = np.asarray([(float(r), float(np.abs(g))) for r, g in values], dtype=float)
    if len(arr) < 6:
        raise ValueError(f"need at least 6 points, got {len(arr)}")
    r_vals, g_vals = arr[:, 0], arr[:, 1]
    if r_vals.min() < 1:
        raise ValueError("displacements must be >= 1")
    if np.any(np.diff(r_vals) <= 0):
        raise ValueError("displacements must be strictly ascending")

    if np.all(g_vals < _ZERO_DECAY_TOL):
        return DecayFit(kind=DecayKind.ZERO, exponent_or_xi=0.0, fit_quality=1.0)
    keep = g_vals > 0.0
    r_vals, g_vals = r_vals[keep], g_vals[keep]
    if len(r_vals) < 3:
        return DecayFit(kind=DecayKind.ZERO, exponent_or_xi=0.0, fit_quality=1.0)

    log_g = np.log(g_vals)
    slope_pow, _, r2_pow = _r_squared(np.log(r_vals), log_g)
    slope_exp, _, r2_exp = _r_squared(r_vals, log_g)
    if r2_pow >= r2_exp:
        return DecayFit(
            kind=DecayKind.POWER_LAW, exponent_or_xi=slope_pow, fit_quality=r2_pow
        )
    xi = -1.0 / slope_exp if slope_exp < 0.0 else np.inf
    return DecayFit(kind=DecayKind.EXPONENTIAL, exponent_or_xi=xi, fit_quality=r2_exp)
