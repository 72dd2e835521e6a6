import numpy as np
import pytest

from fermilat import (
    DecayKind,
    FitModel,
    classify_decay,
    fit_scaling,
    select_model,
)


def _synthetic_series(l_values, c=1.0, b=0.2, a=0.0, dim=2):
    l_arr = np.asarray(l_values, dtype=float)
    s = (c / 3.0) * l_arr ** (dim - 1) * np.log2(l_arr) + b * l_arr ** (dim - 1)
    s = s + a * l_arr ** (dim - 2)
    return list(zip(l_values, s))


class TestFitScaling:
    def test_round_trip_d2(self):
        series = _synthetic_series(range(4, 41), c=1.0, b=0.2)
        fit = fit_scaling(series, dim=2, model=FitModel.LOG_AREA)
        assert fit.c_coef == pytest.approx(1.0, abs=1e-9)
        assert fit.b_coef == pytest.approx(0.2, abs=1e-9)
        assert fit.rms_residual < 1e-10

    def test_round_trip_recovers_six_digits(self):
        series = _synthetic_series(range(6, 40, 2), c=1.234567, b=-0.456789, a=2.5)
        fit = fit_scaling(series, dim=2)
        assert fit.c_coef == pytest.approx(1.234567, rel=1e-6)
        assert fit.b_coef == pytest.approx(-0.456789, rel=1e-6)
        assert fit.a_coef == pytest.approx(2.5, rel=1e-6)
        assert fit.rms_residual < 1e-9

    def test_d1_basis(self):
        l_values = [8, 16, 32, 64, 128]
        series = [(l, np.log2(l) / 3.0 + 0.7) for l in l_values]
        fit = fit_scaling(series, dim=1)
        assert fit.c_coef == pytest.approx(1.0, abs=1e-10)
        assert fit.b_coef == pytest.approx(0.7, abs=1e-10)
        assert fit.a_coef == 0.0

    def test_d3_round_trip(self):
        series = _synthetic_series(range(4, 13), c=1.8, b=0.4, a=-0.3, dim=3)
        fit = fit_scaling(series, dim=3)
        assert fit.c_coef == pytest.approx(1.8, rel=1e-8)

    def test_area_only_forces_zero_log(self):
        series = _synthetic_series(range(4, 20), c=0.0, b=0.5, a=1.0)
        fit = fit_scaling(series, dim=2, model=FitModel.AREA_ONLY)
        assert fit.c_coef == 0.0
        assert fit.b_coef == pytest.approx(0.5, abs=1e-10)
        assert fit.model is FitModel.AREA_ONLY

    def test_scale_equivariance(self):
        rng = np.random.default_rng(9)
        base = _synthetic_series(range(6, 30, 2), c=0.8, b=0.3, a=0.1)
        fit = fit_scaling(base, dim=2)
        for _ in range(5):
            kappa = float(rng.uniform(0.1, 10.0))
            scaled = [(l, kappa * s) for l, s in base]
            fit_k = fit_scaling(scaled, dim=2)
            assert fit_k.c_coef == pytest.approx(kappa * fit.c_coef, rel=1e-9)
            assert fit_k.b_coef == pytest.approx(kappa * fit.b_coef, rel=1e-9)
            assert fit_k.a_coef == pytest.approx(kappa * fit.a_coef, rel=1e-9)

    def test_requires_four_points(self):
        with pytest.raises(ValueError, match="4 data points"):
            fit_scaling([(4, 1.0), (6, 2.0), (8, 3.0)], dim=2)

    def test_rejects_duplicate_l(self):
        with pytest.raises(ValueError, match="distinct"):
            fit_scaling([(4, 1.0), (4, 1.1), (6, 2.0), (8, 3.0)], dim=2)

    def test_rejects_small_l(self):
        with pytest.raises(ValueError, match=">= 2"):
            fit_scaling([(1, 1.0), (4, 1.1), (6, 2.0), (8, 3.0)], dim=2)

    def test_stability_under_dropping_smallest_l(self, metal_series_d2):
        full = fit_scaling(metal_series_d2, dim=2)
        dropped = fit_scaling(metal_series_d2[1:], dim=2)
        assert abs(dropped.c_coef - full.c_coef) / full.c_coef < 0.02


class TestSelectModel:
    def test_log_data_selects_log_model(self):
        series = _synthetic_series(range(6, 40, 2), c=1.0, b=0.2)
        log_fit, area_fit, verdict = select_model(series, dim=2)
        assert verdict is FitModel.LOG_AREA
        assert area_fit.rms_residual > 10 * max(log_fit.rms_residual, 1e-300)

    def test_area_data_selects_area_model(self):
        series = _synthetic_series(range(6, 40, 2), c=0.0, b=0.5, a=0.3)
        _, _, verdict = select_model(series, dim=2)
        assert verdict is FitModel.AREA_ONLY

    def test_small_log_coefficient_is_rejected(self):
        # a log term below the threshold never wins, however exact the fit
        series = _synthetic_series(range(6, 40, 2), c=0.04, b=0.5)
        log_fit, _, verdict = select_model(series, dim=2)
        assert abs(log_fit.c_coef - 0.04) < 1e-6
        assert verdict is FitModel.AREA_ONLY

    def test_all_zero_series(self):
        series = [(l, 0.0) for l in range(4, 20, 2)]
        log_fit, area_fit, verdict = select_model(series, dim=2)
        assert verdict is FitModel.AREA_ONLY
        assert log_fit.c_coef == pytest.approx(0.0, abs=1e-14)
        assert area_fit.b_coef == pytest.approx(0.0, abs=1e-14)

    def test_thresholds_are_configurable(self):
        series = _synthetic_series(range(6, 40, 2), c=0.04, b=0.5)
        _, _, verdict = select_model(series, dim=2, c_threshold=0.01)
        assert verdict is FitModel.LOG_AREA


class TestClassifyDecay:
    def test_power_law_round_trip(self):
        rs = np.arange(1, 20)
        fit = classify_decay(list(zip(rs, rs.astype(float) ** -2)))
        assert fit.kind is DecayKind.POWER_LAW
        assert fit.exponent_or_xi == pytest.approx(-2.0, abs=1e-9)
        assert fit.fit_quality > 0.999

    def test_exponential_round_trip(self):
        rs = np.arange(1, 20)
        fit = classify_decay(list(zip(rs, np.exp(-rs / 2.0))))
        assert fit.kind is DecayKind.EXPONENTIAL
        assert fit.exponent_or_xi == pytest.approx(2.0, abs=1e-9)
        assert fit.fit_quality > 0.999

    def test_zero_series(self):
        rs = np.arange(1, 10)
        fit = classify_decay(list(zip(rs, np.full(9, 1e-15))))
        assert fit.kind is DecayKind.ZERO

    def test_mixed_signs_use_magnitude(self):
        rs = np.arange(1, 20)
        values = ((-1.0) ** rs) * rs.astype(float) ** -1.5
        fit = classify_decay(list(zip(rs, values)))
        assert fit.kind is DecayKind.POWER_LAW
        assert fit.exponent_or_xi == pytest.approx(-1.5, abs=1e-9)

    def test_preconditions(self):
        with pytest.raises(ValueError, match="6 points"):
            classify_decay([(1, 1.0), (2, 0.5)])
        with pytest.raises(ValueError, match=">= 1"):
            classify_decay([(0, 1.0)] + [(r, 1.0 / r) for r in range(1, 7)])
        with pytest.raises(ValueError, match="ascending"):
            classify_decay([(r, 1.0) for r in (1, 2, 2, 3, 4, 5)])

    def test_fit_quality_clamped(self):
        rng = np.random.default_rng(2)
        values = rng.uniform(0.1, 1.0, size=12)
        fit = classify_decay(list(zip(np.arange(1, 13), values)))
        assert 0.0 <= fit.fit_quality <= 1.0
