import numpy as np
import pytest

from processors.errors import ConfigError, EmptySpectrum
from processors.scatter_core import QUANTITIES
from processors.spectra_analysis import (
    Dip,
    Regime,
    classify_regime,
    contrast_metrics,
    dip_correspondence,
    expected_positions,
    find_dips,
    find_dips_in,
    label_for,
    regime_window,
    unidirectional_dips,
)
from processors.sweep_engine import AxisSpec, SpectrumTable, sweep1d
from tests.conftest import zeeman_params

BAND = (-6.0, 6.0)
CELL = 12.0 / 600


def spectrum_of(params, count=601, **axis):
    spec = dict(name="delta", start=-6, stop=6, count=count)
    spec.update(axis)
    return sweep1d(params, AxisSpec(**spec), threads=1)


def dips_near(dips, position, tolerance=0.15):
    return [d for d in dips if abs(d.location - position) <= tolerance]


def lorentzian_pair(x):
    return (
        1.0
        - 0.8 / (1 + ((x + 1.3) / 0.25) ** 2)
        - 0.6 / (1 + ((x - 2.1) / 0.35) ** 2)
    )


class TestFindDips:
    def test_monotone_has_no_dips(self):
        x = np.linspace(-6, 6, 601)
        assert find_dips_in(x, np.exp(x / 6), 0.1) == []

    def test_empty(self):
        with pytest.raises(EmptySpectrum):
            find_dips_in([], [], 0.1)

    def test_synthetic_lorentzians(self):
        x = np.linspace(-6, 6, 1201)
        dips = find_dips_in(x, lorentzian_pair(x), 0.1)
        assert len(dips) == 2

        dense = np.linspace(-6, 6, 2_400_001)
        y = lorentzian_pair(dense)
        left = dense[np.argmin(np.where(dense < 0.4, y, np.inf))]
        right = dense[np.argmin(np.where(dense > 0.4, y, np.inf))]
        assert dips[0].location == pytest.approx(left, abs=1e-3)
        assert dips[1].location == pytest.approx(right, abs=1e-3)

    def test_dip_fields(self):
        x = np.linspace(-6, 6, 1201)
        for dip in find_dips_in(x, lorentzian_pair(x), 0.1):
            assert dip.depth >= 0
            assert dip.prominence > 0.1
            assert 0 < dip.width_at_half_prominence < 2.0

    def test_prominence_filter(self):
        x = np.linspace(-6, 6, 1201)
        dips = find_dips_in(x, lorentzian_pair(x), 0.65)
        assert [round(d.location, 1) for d in dips] == [-1.3]

    def test_reversed_axis_mirrors_locations(self, fig2a):
        table = spectrum_of(fig2a)
        x, y = table.values, table.columns["R_b"]
        forward = find_dips_in(x, y, 0.1)
        mirrored = find_dips_in(-x[::-1], y[::-1], 0.1)
        np.testing.assert_allclose(
            [d.location for d in mirrored], [-d.location for d in reversed(forward)], atol=1e-12
        )

    def test_sorted_by_location(self, fig2b):
        dips = find_dips(spectrum_of(fig2b), "T_f")
        assert [d.location for d in dips] == sorted(d.location for d in dips)


class TestContrastMetrics:
    def test_equal_zeeman_splitting_has_no_reflection_contrast(self):
        params = zeeman_params(3.8, omega2=2.0)
        assert contrast_metrics(spectrum_of(params)).max_contrast_R <= 1e-12

    def test_flat_band_average(self, fig2a):
        axis = AxisSpec(name="delta", start=-6, stop=6, count=11)
        ones = np.ones(11)
        columns = {name: 0.5 * ones for name in QUANTITIES}
        columns["R_f"] = 0.7 * ones
        table = SpectrumTable(axis=axis, values=axis.values(), columns=columns, base=fig2a)
        metrics = contrast_metrics(table)
        assert metrics.mean_contrast_R == pytest.approx(0.2)
        assert metrics.max_contrast_R == pytest.approx(0.2)
        assert metrics.mean_contrast_T == 0.0

    def test_coupling_series(self, fig2a, fig2b, fig2c):
        series = [contrast_metrics(spectrum_of(p)) for p in (fig2a, fig2b, fig2c)]
        reflection = [m.max_contrast_R for m in series]
        transmission = [m.max_contrast_T for m in series]
        assert reflection[0] > reflection[1] > reflection[2]
        assert transmission[0] < transmission[1] < transmission[2]


class TestRegime:
    def test_labels(self):
        assert label_for(0.5, 0.1, 0.2, 0.2) is Regime.UR_DOMINANT
        assert label_for(0.1, 0.5, 0.2, 0.2) is Regime.UT_DOMINANT
        assert label_for(0.5, 0.5, 0.2, 0.2) is Regime.UR_AND_UT
        assert label_for(0.1, 0.1, 0.2, 0.2) is Regime.NEITHER

    @pytest.mark.parametrize("eta, regime", [
        (1.0, Regime.UR_DOMINANT),
        (3.8, Regime.UR_AND_UT),
        (6.0, Regime.UT_DOMINANT),
    ])
    def test_coupling_regimes(self, eta, regime):
        label = classify_regime(zeeman_params(eta), BAND)
        assert label.regime is regime
        assert label.tau_R == 0.2 and label.tau_T == 0.2

    @pytest.mark.parametrize("eta", [1.0, 3.8, 6.0])
    def test_resolution_doubling(self, eta):
        coarse = classify_regime(zeeman_params(eta), BAND, resolution=601)
        fine = classify_regime(zeeman_params(eta), BAND, resolution=1201)
        assert coarse.regime is fine.regime

    def test_empty_band(self, fig2a):
        with pytest.raises(ConfigError):
            classify_regime(fig2a, (1.0, 1.0))

    def test_label_matches_metrics(self, fig2b):
        label = classify_regime(fig2b, BAND)
        assert label.regime is label_for(label.max_contrast_R, label.max_contrast_T, label.tau_R, label.tau_T)


class TestZeemanDips:
    def test_unidirectional_reflection(self, fig2a):
        table = spectrum_of(fig2a)
        for position in (-2.0, 2.0):
            found = dips_near(find_dips(table, "R_f"), position)
            assert found, f"no R_f dip near {position}"
            assert found[0].depth < 0.05
            r_b = np.interp(found[0].location, table.values, table.columns["R_b"])
            assert r_b - found[0].depth > 0.3
        for position in (-3.5, 3.5):
            assert dips_near(find_dips(table, "R_b"), position), f"no R_b dip near {position}"

    def test_unidirectional_dips_helper(self, fig2a):
        dips = unidirectional_dips(spectrum_of(fig2a), "R_f")
        assert dips_near(dips, -2.0) and dips_near(dips, 2.0)

    def test_unidirectional_transmission(self, fig2b):
        table = spectrum_of(fig2b)
        t_f = find_dips(table, "T_f")
        t_b = find_dips(table, "T_b")
        for position in (-2.0, -3.5):
            assert dips_near(t_f, position), f"no T_f dip near {position}"
        for position in (2.0, 3.5):
            assert dips_near(t_b, position), f"no T_b dip near {position}"

    def test_transmission_dip_depth(self, fig2b):
        table = spectrum_of(fig2b)
        i = int(np.argmin(np.abs(table.values + 2.0)))
        assert table.columns["T_f"][i] < 0.05
        assert table.columns["T_b"][i] - table.columns["T_f"][i] > 0.3

    def test_full_correspondence(self, fig2b):
        table = spectrum_of(fig2b)
        for quantity in ("R_f", "R_b", "T_f", "T_b"):
            report = dip_correspondence(find_dips(table, quantity), 2.0, 3.5, 0.15, quantity=quantity)
            assert report.complete, (quantity, report.to_dict())
            assert len(report.pairs) == 2

    def test_resolution_stability(self, fig2b):
        coarse = find_dips(spectrum_of(fig2b, count=601), "T_f")
        fine = find_dips(spectrum_of(fig2b, count=1201), "T_f")
        for dip in dips_near(coarse, -2.0) + dips_near(coarse, -3.5):
            match = min(fine, key=lambda d: abs(d.location - dip.location))
            assert abs(match.location - dip.location) <= CELL


class TestCorrespondence:
    def test_expected_positions(self):
        assert expected_positions("R_f", 2.0, 3.5) == [-2.0, 2.0]
        assert expected_positions("R_b", 2.0, 3.5) == [-3.5, 3.5]
        assert expected_positions("T_f", 2.0, 3.5) == [-3.5, -2.0]
        assert expected_positions("T_b", 2.0, 3.5) == [2.0, 3.5]
        assert expected_positions(None, 2.0, 3.5) == [-3.5, -2.0, 2.0, 3.5]
        with pytest.raises(ValueError):
            expected_positions("contrast_R", 2.0, 3.5)

    def test_no_dips(self):
        report = dip_correspondence([], 2.0, 3.5, 0.15)
        assert report.pairs == []
        assert report.unmatched_expected == [-3.5, -2.0, 2.0, 3.5]

    def test_each_dip_used_once(self):
        dip = Dip(location=2.02, depth=0.01, prominence=0.5, width_at_half_prominence=0.2, index=0)
        report = dip_correspondence([dip], 2.0, 2.05, 0.15, quantity="T_b")
        assert len(report.pairs) == 1
        assert report.pairs[0].expected == 2.0
        assert report.unmatched_expected == [2.05]

    def test_outside_tolerance(self):
        dip = Dip(location=2.4, depth=0.01, prominence=0.5, width_at_half_prominence=0.2, index=0)
        report = dip_correspondence([dip], 2.0, 3.5, 0.15, quantity="R_f")
        assert report.pairs == []
        assert report.unmatched_dips == [dip]

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            dip_correspondence([], 2.0, 3.5, 0.0)


class TestParameterScans:
    def test_phase_red_shifts_reflection_dip(self, fig2b):
        reflection, transmission = [], []
        for factor in (0.9, 1.0, 1.1):
            table = spectrum_of(fig2b.with_values(theta=factor * np.pi))
            found = dips_near(find_dips(table, "R_f"), 2.0, 0.5)
            assert found, factor
            reflection.append(min(found, key=lambda d: abs(d.location - 2.0)).location)
            found = dips_near(find_dips(table, "T_f"), -2.0)
            assert found, factor
            transmission.append(found[0].location)
        assert reflection[0] > reflection[1] > reflection[2]
        assert reflection[0] - reflection[2] < 0.5
        assert max(transmission) - min(transmission) < CELL

    def test_transmission_dips_immobile_in_strong_coupling(self, fig2b):
        locations = []
        for eta in (4.72, 6.0, 7.5):
            found = dips_near(find_dips(spectrum_of(fig2b.with_values(eta=eta)), "T_f"), -2.0)
            assert found, eta
            locations.append(found[0].location)
        assert max(locations) - min(locations) < CELL

    @pytest.mark.parametrize("eta", [1.0, 1.5, 2.52])
    def test_weak_coupling_transmission_is_tiny(self, fig2b, eta):
        table = spectrum_of(fig2b.with_values(eta=eta))
        assert max(table.columns["T_f"].max(), table.columns["T_b"].max()) < 0.2

    @pytest.mark.parametrize("h", [0.9, 1.2, 1.4])
    def test_reflection_and_transmission_dips_coexist_over_h(self, fig2b, h):
        table = spectrum_of(fig2b.with_values(h=h))
        reflection = unidirectional_dips(table, "R_f", margin=0.2)
        transmission = unidirectional_dips(table, "T_f", margin=0.2)
        assert dips_near(reflection, -2.0) and dips_near(reflection, 2.0)
        assert dips_near(transmission, -2.0)

    def test_weak_backscattering_suppresses_reflection(self, fig2b):
        weak = spectrum_of(fig2b.with_values(h=0.3))
        strong = spectrum_of(fig2b)
        weak_max = max(weak.columns["R_f"].max(), weak.columns["R_b"].max())
        assert weak_max < 0.15
        assert weak_max < 0.3 * strong.columns["R_f"].max()

    def test_window_over_g(self, fig2b):
        report = regime_window(fig2b, "g", np.linspace(0, 2, 11), BAND)
        assert report.labels[0].regime is Regime.NEITHER
        assert any(lo <= 1.0 <= hi for lo, hi in report.intervals)
        assert report.to_dict()["parameter"] == "g"

    def test_window_over_h(self, fig2b):
        report = regime_window(fig2b, "h", np.linspace(0, 2, 11), BAND)
        assert any(lo <= 1.0 <= hi for lo, hi in report.intervals)
        assert report.labels[0].regime is not Regime.UR_AND_UT

    def test_window_rejects_delta(self, fig2b):
        with pytest.raises(ConfigError):
            regime_window(fig2b, "delta", [0.0, 1.0], BAND)
