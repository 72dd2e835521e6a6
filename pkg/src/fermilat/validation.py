"""End-to-end correctness checks runnable from the CLI.

Each check pins a documented tolerance and returns a machine-readable
result. The default set runs in well under two minutes; the full set adds
the desk-scale scaling fits (several minutes) that reproduce the entropy
prefactor comparisons.
"""

from __future__ import annotations

import tempfile
import time
import warnings
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .cache import CorrelatorCache
from .correlators import KGrid, block_matrices, build_correlator_table
from .entanglement import block_entropy, entropy_series, mode_spectrum
from .model import ModelParams
from .oracle import lattice_bdg_correlators
from .scaling import FitModel, fit_scaling, select_model
from .widom import extract_fermi_surface, widom_closed_form_2d, widom_prefactor

__all__ = [
    "CheckResult",
    "gaussian_block_entropy_bits",
    "run_checks",
    "DEFAULT_CHECKS",
    "FULL_ONLY_CHECKS",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# brute-force reduced-density-matrix construction (2^m dimensional)
# ---------------------------------------------------------------------------


def _jordan_wigner_ops(m: int) -> list[np.ndarray]:
    """Dense annihilation operators on the 2^m Fock space."""
    sigma_z = np.diag([1.0, -1.0])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    ops = []
    for i in range(m):
        mats = [sigma_z] * i + [lower] + [np.eye(2)] * (m - 1 - i)
        op = mats[0]
        for mat in mats[1:]:
            op = np.kron(op, mat)
        ops.append(op.astype(complex))
    return ops


def gaussian_block_entropy_bits(bc) -> float:
    """Entropy of the explicit 2^m density matrix of the block's Gaussian state.

    Builds the covariance matrix of (c, c+), composes the density matrix from
    the canonical quasimode occupations in the full Fock space, and
    diagonalizes it. Independent of the product-matrix route used by
    :func:`fermilat.entanglement.mode_spectrum`.
    """
    c_mat = bc.c_matrix.astype(complex)
    f_mat = bc.f_matrix.astype(complex)
    m = c_mat.shape[0]
    if m > 12:
        raise ValueError(f"2^{m} density matrix is too large for the brute force")
    eye = np.eye(m)
    cov = np.block([[eye - c_mat.T, -np.conj(f_mat)], [f_mat, c_mat]])
    mu, vecs = np.linalg.eigh(cov)
    order = np.argsort(mu)[::-1][:m]  # one mode per particle-hole pair

    cs = _jordan_wigner_ops(m)
    psi_ops = cs + [op.conj().T for op in cs]
    dim = 2**m
    rho = np.eye(dim, dtype=complex)
    for idx in order:
        w = vecs[:, idx]
        eta = sum(np.conj(w[a]) * psi_ops[a] for a in range(2 * m))
        number = eta.conj().T @ eta
        p = 1.0 - float(mu[idx])  # mode occupation, <= 1/2
        rho = rho @ ((1.0 - p) * (np.eye(dim) - number) + p * number)
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-14]
    return float(-(evals * np.log2(evals)).sum())


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _entropy_fit(params: ModelParams, l_values, grid_n: int):
    grid = KGrid(n_per_dim=grid_n)
    series = entropy_series(params, l_values, grid)
    data = [(e.block_l, e.entropy_bits) for e in series]
    return select_model(data, params.dim)


def _timed(fn):
    start = time.monotonic()
    passed, detail = fn()
    return passed, detail, time.monotonic() - start


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

WIDOM_SWEEP_TOL = 1e-3
FIT_VS_WIDOM_TOL_2D = 0.05
FIT_VS_WIDOM_TOL_2D_HALF_FILLING = 0.03
FIT_VS_WIDOM_TOL_3D = 0.10
NODAL_LINE_TOL = 0.05
AREA_LAW_C_BOUND = 0.05
PRODUCT_STATE_TOL = 1e-10
ORACLE_TABLE_TOL = 1e-9
ORACLE_ENTROPY_TOL = 1e-8
SPECTRUM_IMAG_TOL = 1e-9
CHAIN_LOG_TOL = 0.05


def check_widom_closed_form() -> CheckResult:
    """Quadrature vs closed form over lambda = 0.1 .. 1.9, d = 2, gamma = 0."""

    def body():
        worst = 0.0
        for lam in np.round(np.arange(0.1, 2.0, 0.2), 10):
            fs = extract_fermi_surface(ModelParams(float(lam), 0.0, 2), grid_n=1024)
            got = widom_prefactor(fs).c_value
            worst = max(worst, abs(got - widom_closed_form_2d(float(lam))))
        return worst < WIDOM_SWEEP_TOL, f"max |quadrature - closed form| = {worst:.3e}"

    passed, detail, secs = _timed(body)
    return CheckResult("widom_closed_form", passed, detail, secs)


def check_metal_prefactor_2d() -> CheckResult:
    """Fitted log prefactor vs closed form, d = 2 metal, L in [6, 40]."""

    def body():
        rows = []
        ok = True
        for lam in (0.2, 0.6, 1.0, 1.4, 1.8):
            log_fit, _, _ = _entropy_fit(
                ModelParams(lam, 0.0, 2), list(range(6, 41)), 512
            )
            ref = widom_closed_form_2d(lam)
            rel = abs(log_fit.c_coef - ref) / ref
            tol = (
                FIT_VS_WIDOM_TOL_2D_HALF_FILLING
                if lam == 1.0
                else FIT_VS_WIDOM_TOL_2D
            )
            ok &= rel < tol
            rows.append(f"lambda={lam}: C={log_fit.c_coef:.4f} ref={ref:.4f} rel={rel:.2%}")
        return ok, "; ".join(rows)

    passed, detail, secs = _timed(body)
    return CheckResult("metal_prefactor_2d", passed, detail, secs)


def check_nodal_line_prefactor() -> CheckResult:
    """Fitted prefactor at lambda = 0, gamma = 1, d = 2 equals 1 within 5%."""

    def body():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # nodal line hits grid points
            log_fit, _, _ = _entropy_fit(
                ModelParams(0.0, 1.0, 2), list(range(6, 41)), 512
            )
        rel = abs(log_fit.c_coef - 1.0)
        return rel < NODAL_LINE_TOL, f"C = {log_fit.c_coef:.4f}, |C - 1| = {rel:.3f}"

    passed, detail, secs = _timed(body)
    return CheckResult("nodal_line_prefactor", passed, detail, secs)


def check_metal_prefactor_3d() -> CheckResult:
    """Fitted prefactor vs surface quadrature, d = 3 metal, L in [4, 12]."""

    def body():
        rows = []
        ok = True
        for lam in (0.5, 1.5, 2.5):
            params = ModelParams(lam, 0.0, 3)
            log_fit, _, _ = _entropy_fit(params, list(range(4, 13)), 128)
            ref = widom_prefactor(extract_fermi_surface(params, grid_n=256)).c_value
            rel = abs(log_fit.c_coef - ref) / ref
            ok &= rel < FIT_VS_WIDOM_TOL_3D
            rows.append(f"lambda={lam}: C={log_fit.c_coef:.4f} quad={ref:.4f} rel={rel:.2%}")
        return ok, "; ".join(rows)

    passed, detail, secs = _timed(body)
    return CheckResult("metal_prefactor_3d", passed, detail, secs)


def check_area_law_phase2() -> CheckResult:
    """Model selection returns AREA_ONLY with |C| < 0.05 in the paired phase."""

    def body():
        rows = []
        ok = True
        for lam, gamma in ((1.0, 1.0), (0.5, 1.0)):
            log_fit, _, verdict = _entropy_fit(
                ModelParams(lam, gamma, 2), list(range(6, 41)), 512
            )
            ok &= verdict is FitModel.AREA_ONLY
            ok &= abs(log_fit.c_coef) < AREA_LAW_C_BOUND
            rows.append(
                f"({lam},{gamma}): verdict={verdict.value} |C|={abs(log_fit.c_coef):.4f}"
            )
        return ok, "; ".join(rows)

    passed, detail, secs = _timed(body)
    return CheckResult("area_law_phase2", passed, detail, secs)


def check_product_state() -> CheckResult:
    """S_L vanishes identically for lambda = 3, gamma = 0, d = 2, L <= 20."""

    def body():
        params = ModelParams(3.0, 0.0, 2)
        series = entropy_series(params, list(range(1, 21)), KGrid(n_per_dim=160))
        worst = max(e.entropy_bits for e in series)
        return worst < PRODUCT_STATE_TOL, f"max S_L = {worst:.3e} bits over L <= 20"

    passed, detail, secs = _timed(body)
    return CheckResult("product_state", passed, detail, secs)


def _phase_spanning_points(rng: np.random.Generator, count: int):
    """Parameter points drawn from all three phases, metallic line included."""
    points = []
    kinds = ["I", "II", "III"]
    for i in range(count):
        kind = kinds[i % 3]
        if kind == "I":
            points.append(ModelParams(float(rng.uniform(0.1, 1.9)), 0.0, 2))
        elif kind == "II":
            points.append(
                ModelParams(
                    float(rng.uniform(0.2, 1.9)), float(rng.uniform(0.2, 1.5)), 2
                )
            )
        else:
            points.append(
                ModelParams(
                    float(rng.uniform(2.1, 3.5)), float(rng.uniform(0.0, 1.5)), 2
                )
            )
    return points


def check_oracle_equivalence() -> CheckResult:
    """Momentum-space tables vs the dense lattice diagonalization, plus the
    2 x 2 block entropy vs the brute-force 16-dimensional density matrix."""

    def body():
        rng = np.random.default_rng(20260810)
        worst_table = 0.0
        worst_entropy = 0.0
        for params in _phase_spanning_points(rng, 10):
            table_k = build_correlator_table(params, KGrid(n_per_dim=10, shifted=True))
            table_o = lattice_bdg_correlators(params, 10, antiperiodic=True)
            worst_table = max(
                worst_table,
                float(np.abs(table_k.g_arr - table_o.g_arr).max()),
                float(np.abs(table_k.a_arr - table_o.a_arr).max()),
            )
            bc = block_matrices(table_k, 2, margin=5)
            s_corr = block_entropy(mode_spectrum(bc)).entropy_bits
            s_rdm = gaussian_block_entropy_bits(bc)
            worst_entropy = max(worst_entropy, abs(s_corr - s_rdm))
        ok = worst_table < ORACLE_TABLE_TOL and worst_entropy < ORACLE_ENTROPY_TOL
        return ok, (
            f"max table mismatch = {worst_table:.3e}, "
            f"max entropy mismatch = {worst_entropy:.3e}"
        )

    passed, detail, secs = _timed(body)
    return CheckResult("oracle_equivalence", passed, detail, secs)


def check_spectrum_validity() -> CheckResult:
    """Entanglement eigenvalues stay real and inside [0, 1/4] over 50 points."""

    def body():
        rng = np.random.default_rng(77)
        worst_imag = 0.0
        lo, hi = 0.0, 0.25
        for params in _phase_spanning_points(rng, 50):
            table = build_correlator_table(params, KGrid(n_per_dim=32, shifted=True))
            bc = block_matrices(table, 3, margin=8)
            half = 0.5 * np.eye(bc.n_sites)
            product = (bc.c_matrix - bc.f_matrix - half) @ (
                bc.c_matrix + bc.f_matrix - half
            )
            nu = np.linalg.eigvals(product)
            worst_imag = max(worst_imag, float(np.abs(nu.imag).max()))
            lo = min(lo, float(nu.real.min()))
            hi = max(hi, float(nu.real.max()))
        ok = (
            worst_imag < SPECTRUM_IMAG_TOL
            and lo > -SPECTRUM_IMAG_TOL
            and hi < 0.25 + SPECTRUM_IMAG_TOL
        )
        return ok, (
            f"max |Im nu| = {worst_imag:.3e}, range = [{lo:.3e}, {hi:.6f}]"
        )

    passed, detail, secs = _timed(body)
    return CheckResult("spectrum_validity", passed, detail, secs)


def check_chain_log_coefficient() -> CheckResult:
    """d = 1 block entropy grows as (1/3) log2 L, the free-fermion chain value."""

    def body():
        params = ModelParams(0.5, 0.0, 1)
        l_values = [8, 12, 16, 24, 32, 48, 64, 96, 128]
        series = entropy_series(params, l_values, KGrid(n_per_dim=4096))
        fit = fit_scaling(
            [(e.block_l, e.entropy_bits) for e in series], dim=1, model=FitModel.LOG_AREA
        )
        rel = abs(fit.c_coef - 1.0)
        return rel < CHAIN_LOG_TOL, (
            f"log2 coefficient = {fit.c_coef / 3.0:.5f} (target 1/3), "
            f"|C - 1| = {rel:.4f}"
        )

    passed, detail, secs = _timed(body)
    return CheckResult("chain_log_coefficient", passed, detail, secs)


def check_cache_soundness() -> CheckResult:
    """Cache round-trips bit-exactly and corrupted files are recomputed."""

    def body():
        params = ModelParams(0.8, 0.4, 2)
        grid = KGrid(n_per_dim=24)
        fresh = build_correlator_table(params, grid)
        with tempfile.TemporaryDirectory() as tmp:
            cache = CorrelatorCache(tmp)
            cache.store(fresh)
            loaded = cache.load(params, grid)
            if loaded is None:
                return False, "stored table failed to load"
            bit_exact = np.array_equal(fresh.g_arr, loaded.g_arr) and np.array_equal(
                fresh.a_arr, loaded.a_arr
            )
            # corrupt the file; the cache must warn and fall back to recompute
            path = cache.path_for(params, grid)
            path.write_bytes(b"not a valid npz archive")
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                recovered = cache.get_or_build(params, grid)
            warned = any("recomputing" in str(w.message) for w in caught)
            recomputed_ok = np.array_equal(fresh.g_arr, recovered.g_arr)
        ok = bit_exact and warned and recomputed_ok
        return ok, (
            f"round-trip bit-exact: {bit_exact}, corruption warned: {warned}, "
            f"recompute matches: {recomputed_ok}"
        )

    passed, detail, secs = _timed(body)
    return CheckResult("cache_soundness", passed, detail, secs)


def check_pairing_sign_control() -> CheckResult:
    """Negative control: a flipped anomalous sign must break oracle agreement."""

    def body():
        params = ModelParams(0.9, 0.8, 2)
        grid = KGrid(n_per_dim=8, shifted=True)
        flipped = build_correlator_table(params, grid, _flip_pairing_sign=True)
        reference = lattice_bdg_correlators(params, 8, antiperiodic=True)
        mismatch = float(np.abs(flipped.a_arr - reference.a_arr).max())
        return mismatch > 1e-6, f"forced sign flip produced mismatch {mismatch:.3e}"

    passed, detail, secs = _timed(body)
    return CheckResult("pairing_sign_control", passed, detail, secs)


DEFAULT_CHECKS = [
    check_widom_closed_form,
    check_product_state,
    check_oracle_equivalence,
    check_spectrum_validity,
    check_chain_log_coefficient,
    check_cache_soundness,
    check_pairing_sign_control,
]

FULL_ONLY_CHECKS = [
    check_metal_prefactor_2d,
    check_nodal_line_prefactor,
    check_metal_prefactor_3d,
    check_area_law_phase2,
]


def run_checks(full: bool = False) -> list[CheckResult]:
    checks = list(DEFAULT_CHECKS) + (list(FULL_ONLY_CHECKS) if full else [])
    return [check() for check in checks]
