import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucsk.channel import (
    WaterProperties,
    WaterTableError,
    WavelengthRangeError,
    attenuation_coefficient,
    effective_range,
    evaluate_path_loss,
    load_water_csv,
    path_loss,
    seawater,
)

import numpy as np


class TestAttenuation:
    def test_red_knot(self, water):
        assert attenuation_coefficient(water, 700.0) == pytest.approx(
            0.650 + 0.0007, rel=1e-12
        )

    def test_blue_knot(self, water):
        assert attenuation_coefficient(water, 460.0) == pytest.approx(
            0.0156 + 0.004, rel=1e-12
        )

    def test_green_knot(self, water):
        assert attenuation_coefficient(water, 550.0) == pytest.approx(
            0.0638 + 0.0019, rel=1e-12
        )

    def test_zero_coefficients(self):
        w = WaterProperties(
            np.array([400.0, 500.0]), np.zeros(2), np.zeros(2), "null"
        )
        assert attenuation_coefficient(w, 450.0) == 0.0

    def test_out_of_range(self, water):
        with pytest.raises(WavelengthRangeError):
            attenuation_coefficient(water, 400.0)
        with pytest.raises(WavelengthRangeError):
            attenuation_coefficient(water, 750.0)


class TestPathLoss:
    def test_zero_distance(self):
        assert path_loss(12.3, 0.0) == 1.0

    def test_blue_50m(self):
        # exp(-0.98) from the seawater blue attenuation over 50 m
        assert path_loss(0.0196, 50.0) == pytest.approx(0.3753, abs=1e-4)

    def test_red_10m(self):
        assert path_loss(0.6507, 10.0) == pytest.approx(1.496e-3, rel=1e-2)

    def test_negative_inputs(self):
        with pytest.raises(ValueError):
            path_loss(-0.1, 1.0)
        with pytest.raises(ValueError):
            path_loss(0.1, -1.0)

    @given(
        st.floats(0.0, 2.0),
        st.floats(0.0, 50.0),
        st.floats(0.0, 50.0),
    )
    @settings(deadline=None)
    def test_exponential_composition(self, c, d1, d2):
        assert path_loss(c, d1 + d2) == pytest.approx(
            path_loss(c, d1) * path_loss(c, d2), rel=1e-9
        )

    def test_result_record(self, water):
        res = evaluate_path_loss(water, 460.0, 50.0)
        assert res.attenuation == pytest.approx(0.0196, rel=1e-12)
        assert res.loss_factor == pytest.approx(math.exp(-0.98), rel=1e-12)


class TestEffectiveRange:
    def test_blue_reaches_80m(self):
        # solves exp(-0.0196 d) = 0.208
        assert effective_range(0.0196, 0.208) == pytest.approx(80.11, abs=0.01)

    def test_red_barely_5m(self):
        assert effective_range(0.6507, 0.04) == pytest.approx(4.947, abs=5e-3)

    def test_threshold_near_one(self):
        assert effective_range(0.5, 0.999999) == pytest.approx(0.0, abs=1e-5)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            effective_range(0.0, 0.5)
        with pytest.raises(ValueError):
            effective_range(0.5, 0.0)
        with pytest.raises(ValueError):
            effective_range(0.5, 1.0)

    def test_color_ordering_for_all_thresholds(self, water):
        c = {wl: attenuation_coefficient(water, wl) for wl in (460.0, 550.0, 700.0)}
        for tau in (0.001, 0.04, 0.2, 0.5, 0.9, 0.99):
            blue = effective_range(c[460.0], tau)
            green = effective_range(c[550.0], tau)
            red = effective_range(c[700.0], tau)
            assert blue > green > red


class TestLoadWaterCsv:
    def test_seawater_preset(self, water):
        assert water.name == "seawater"
        assert list(water.wavelength_nm) == [460.0, 550.0, 700.0]
        assert attenuation_coefficient(water, 550.0) == pytest.approx(0.0657)

    def test_shuffled_rows_sorted(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text(
            "wavelength_nm,a_per_m,b_per_m\n"
            "700,0.650,0.0007\n460,0.0156,0.004\n550,0.0638,0.0019\n"
        )
        w = load_water_csv(path)
        assert list(w.wavelength_nm) == [460.0, 550.0, 700.0]
        assert attenuation_coefficient(w, 550.0) == pytest.approx(0.0657)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("wl,a,b\n460,0.1,0.1\n")
        with pytest.raises(WaterTableError, match=":1"):
            load_water_csv(path)

    def test_non_numeric_cell_line_number(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("wavelength_nm,a_per_m,b_per_m\n460,0.1,0.1\n550,oops,0.1\n")
        with pytest.raises(WaterTableError, match=":3"):
            load_water_csv(path)

    def test_duplicate_wavelength(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text(
            "wavelength_nm,a_per_m,b_per_m\n460,0.1,0.1\n460,0.2,0.1\n"
        )
        with pytest.raises(WaterTableError, match="duplicate"):
            load_water_csv(path)

    def test_non_positive_wavelength(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("wavelength_nm,a_per_m,b_per_m\n0,0.1,0.1\n")
        with pytest.raises(WaterTableError, match=":2"):
            load_water_csv(path)

    def test_negative_coefficient(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("wavelength_nm,a_per_m,b_per_m\n460,-0.1,0.1\n")
        with pytest.raises(WaterTableError, match=":2"):
            load_water_csv(path)

    def test_empty_data(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("wavelength_nm,a_per_m,b_per_m\n")
        with pytest.raises(WaterTableError, match="no data"):
            load_water_csv(path)
