import numpy as np
import pytest

from fermilat import (
    CorrelatorCache,
    KGrid,
    ModelParams,
    axis_correlator,
    block_matrices,
    build_correlator_table,
)
from fermilat.correlators import CorrelatorTable
from fermilat.scaling import DecayKind, classify_decay


class TestTableConstruction:
    def test_half_filling_on_site(self):
        # the nodal diamond crosses the even shifted grid exactly, so the
        # degenerate-mode warning fires while g(0) stays exactly 1/2
        with pytest.warns(UserWarning, match="quasiparticle energy below"):
            table = build_correlator_table(
                ModelParams(0.0, 0.0, 2), KGrid(n_per_dim=256)
            )
        assert table.g((0, 0)).real == pytest.approx(0.5, abs=1e-10)
        assert table.degenerate_points > 0

    def test_filled_band_is_uncorrelated(self):
        # lambda > d fills every mode: g(0) = 1 and no off-site correlations
        table = build_correlator_table(ModelParams(3.0, 0.0, 2), KGrid(n_per_dim=64))
        assert table.g((0, 0)).real == pytest.approx(1.0, abs=1e-12)
        off_site = table.g_arr.copy()
        off_site[0, 0] = 0.0
        assert np.abs(off_site).max() < 1e-12
        assert np.abs(table.a_arr).max() < 1e-12

    def test_no_pairing_means_no_anomalous_correlator(self):
        table = build_correlator_table(ModelParams(0.7, 0.0, 2), KGrid(n_per_dim=32))
        assert np.abs(table.a_arr).max() < 1e-14

    def test_hermiticity_and_antisymmetry_accessors(self):
        rng = np.random.default_rng(8)
        for shifted in (True, False):
            params = ModelParams(
                float(rng.uniform(0.1, 2.5)), float(rng.uniform(0.1, 1.5)), 2
            )
            table = build_correlator_table(
                params, KGrid(n_per_dim=12, shifted=shifted)
            )
            for _ in range(20):
                r = rng.integers(-11, 12, size=2)
                assert table.g(-r) == pytest.approx(np.conj(table.g(r)), abs=1e-12)
                assert table.a(-r) == pytest.approx(-table.a(r), abs=1e-12)

    def test_tables_are_real(self):
        table = build_correlator_table(ModelParams(0.6, 1.1, 2), KGrid(n_per_dim=24))
        assert np.abs(table.g_arr.imag).max() < 1e-12
        assert np.abs(table.a_arr.imag).max() < 1e-12

    def test_degenerate_strict_mode_raises(self):
        with pytest.raises(ValueError, match="degenerate"):
            build_correlator_table(
                ModelParams(0.0, 0.0, 2),
                KGrid(n_per_dim=8),
                on_degenerate="raise",
            )

    def test_grid_budget_enforced(self):
        grid = KGrid(n_per_dim=512, max_points=1000)
        with pytest.raises(ValueError, match="budget"):
            build_correlator_table(ModelParams(1.0, 0.0, 2), grid)

    def test_displacement_bounds_checked(self):
        table = build_correlator_table(ModelParams(1.0, 0.5, 2), KGrid(n_per_dim=8))
        with pytest.raises(ValueError):
            table.g((8, 0))
        with pytest.raises(ValueError):
            table.g((1, 2, 3))


class TestConvergence:
    @pytest.mark.parametrize("lam,gamma", [(3.0, 0.5), (2.5, 1.0)])
    def test_gapped_phase_converges_exponentially(self, lam, gamma):
        params = ModelParams(lam, gamma, 2)
        coarse = build_correlator_table(params, KGrid(n_per_dim=256))
        fine = build_correlator_table(params, KGrid(n_per_dim=512))
        for r in range(9):
            assert abs(coarse.g((r, 0)) - fine.g((r, 0))) < 1e-6

    def test_critical_phase_stabilizes_polynomially(self):
        # aliasing oscillates at criticality, so measure errors against a
        # much finer reference: they must shrink steadily with N
        params = ModelParams(0.5, 0.0, 2)
        reference = build_correlator_table(
            params, KGrid(n_per_dim=2048, max_points=1 << 23)
        )
        errors = []
        for n in (128, 256, 512):
            table = build_correlator_table(params, KGrid(n_per_dim=n))
            errors.append(
                max(abs(table.g((r, 0)) - reference.g((r, 0))) for r in range(1, 9))
            )
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 2e-4


class TestBlocks:
    def test_single_site_block(self):
        table = build_correlator_table(ModelParams(0.8, 0.9, 2), KGrid(n_per_dim=16))
        bc = block_matrices(table, 1)
        assert bc.c_matrix.shape == (1, 1)
        assert bc.c_matrix[0, 0] == table.g((0, 0))
        assert bc.f_matrix[0, 0] == 0.0

    def test_block_shape_contract(self):
        table = build_correlator_table(ModelParams(0.8, 0.9, 2), KGrid(n_per_dim=32))
        for block_l in (2, 3, 4):
            bc = block_matrices(table, block_l)
            assert bc.c_matrix.shape == (block_l**2, block_l**2)

    def test_half_filling_diagonal(self):
        with pytest.warns(UserWarning):
            table = build_correlator_table(
                ModelParams(0.0, 0.0, 2), KGrid(n_per_dim=64)
            )
        bc = block_matrices(table, 2)
        np.testing.assert_allclose(np.diag(bc.c_matrix).real, 0.5, atol=1e-10)

    def test_margin_enforced(self):
        table = build_correlator_table(ModelParams(1.0, 0.5, 2), KGrid(n_per_dim=16))
        with pytest.raises(ValueError, match="margin"):
            block_matrices(table, 3)  # needs N >= 24
        block_matrices(table, 3, margin=5)  # explicit override is allowed

    def test_block_validation(self):
        table = build_correlator_table(ModelParams(1.2, 0.7, 2), KGrid(n_per_dim=40))
        bc = block_matrices(table, 4)
        bc.validate()  # Hermitian, antisymmetric, occupations in [0, 1]


class TestDecayOfCorrelations:
    def test_gapped_phase_decays_exponentially(self):
        # r <= 16 keeps |g| >~ 1e-10, above the transform's round-off floor
        params = ModelParams(3.0, 0.5, 2)
        table = build_correlator_table(params, KGrid(n_per_dim=256))
        rs, g_vals, _ = axis_correlator(table, 0, 16)
        fit = classify_decay(list(zip(rs, np.abs(g_vals))))
        assert fit.kind is DecayKind.EXPONENTIAL
        assert fit.fit_quality > 0.99

        fine = build_correlator_table(params, KGrid(n_per_dim=512))
        rs2, g2, _ = axis_correlator(fine, 0, 16)
        fit2 = classify_decay(list(zip(rs2, np.abs(g2))))
        assert fit2.exponent_or_xi == pytest.approx(fit.exponent_or_xi, abs=1e-6)

    def test_metal_decays_as_power_law(self, metal_table_d2):
        rs, g_vals, _ = axis_correlator(metal_table_d2, 0, 32)
        fit = classify_decay(list(zip(rs, np.abs(g_vals))))
        assert fit.kind is DecayKind.POWER_LAW


class TestCache:
    def test_round_trip_is_bit_exact(self, tmp_path):
        params = ModelParams(0.9, 0.6, 2)
        grid = KGrid(n_per_dim=20)
        table = build_correlator_table(params, grid)
        cache = CorrelatorCache(tmp_path)
        cache.store(table)
        loaded = cache.load(params, grid)
        assert np.array_equal(table.g_arr, loaded.g_arr)
        assert np.array_equal(table.a_arr, loaded.a_arr)
        assert loaded.degenerate_points == table.degenerate_points

    def test_missing_entry_returns_none(self, tmp_path):
        cache = CorrelatorCache(tmp_path)
        assert cache.load(ModelParams(1.0, 0.0, 2), KGrid(n_per_dim=8)) is None

    def test_corrupted_file_recomputed_with_warning(self, tmp_path):
        params = ModelParams(0.9, 0.6, 2)
        grid = KGrid(n_per_dim=12)
        cache = CorrelatorCache(tmp_path)
        fresh = cache.get_or_build(params, grid)
        cache.path_for(params, grid).write_bytes(b"garbage")
        with pytest.warns(UserWarning, match="recomputing"):
            recovered = cache.get_or_build(params, grid)
        assert np.array_equal(fresh.g_arr, recovered.g_arr)

    def test_key_mismatch_is_not_served(self, tmp_path):
        cache = CorrelatorCache(tmp_path)
        table = build_correlator_table(ModelParams(0.5, 0.2, 2), KGrid(n_per_dim=12))
        stored = cache.path_for(table.params, table.grid)
        cache.store(table)
        # simulate a hash collision by renaming to another key's file name
        other = ModelParams(0.6, 0.2, 2)
        stored.rename(cache.path_for(other, table.grid))
        with pytest.warns(UserWarning, match="mismatch"):
            assert cache.load(other, KGrid(n_per_dim=12)) is None


def test_table_validate_rejects_broken_hermiticity():
    table = build_correlator_table(ModelParams(1.0, 0.8, 2), KGrid(n_per_dim=8))
    table.g_arr = table.g_arr.copy()
    table.g_arr[1, 2] += 1e-6
    with pytest.raises(ValueError, match="Hermiticity"):
        table.validate()


def test_axis_correlator_bounds():
    table = build_correlator_table(ModelParams(1.0, 0.8, 2), KGrid(n_per_dim=16))
    with pytest.raises(ValueError):
        axis_correlator(table, 2, 4)
    with pytest.raises(ValueError):
        axis_correlator(table, 0, 16)
