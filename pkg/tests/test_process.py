import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import robust_arma as ra
from robust_arma.core import process_std
from robust_arma.sim.process import (CLEAN, Contaminant, ContaminationSpec, contaminate,
                                     generate_arma, outlier_positions)

TABLE3_AR4 = ra.ArmaParams([2.7607, -3.8106, 2.6535, -0.9238])


class TestGenerate:
    def test_white_noise_moments(self):
        n = 100_000
        y = generate_arma(ra.ArmaParams(), n, seed=1)
        assert abs(y.mean()) < 3 / np.sqrt(n)
        assert abs(y.var() - 1) < 3 * np.sqrt(2 / n)

    def test_ar1_autocorrelation(self):
        y = generate_arma(ra.ArmaParams([0.5]), 10_000, seed=2)
        y = y - y.mean()
        assert np.dot(y[1:], y[:-1]) / np.dot(y, y) == pytest.approx(0.5, abs=0.05)

    def test_ar4_variance(self):
        y = generate_arma(TABLE3_AR4, 100_000, seed=3)
        assert y.var() == pytest.approx(process_std(TABLE3_AR4) ** 2, rel=0.05)

    def test_location_and_scale(self):
        y = generate_arma(ra.ArmaParams([], [], 5.0), 10_000, innovation_sigma=2.0, seed=4)
        assert y.mean() == pytest.approx(5.0, abs=0.1)
        assert y.std() == pytest.approx(2.0, rel=0.05)

    def test_deterministic(self):
        a = generate_arma(ra.ArmaParams([0.3], [0.2]), 50, seed=5)
        b = generate_arma(ra.ArmaParams([0.3], [0.2]), 50, seed=5)
        np.testing.assert_array_equal(a, b)

    def test_outside_raises(self):
        with pytest.raises(ValueError):
            generate_arma(ra.ArmaParams([1.0]), 10)

    def test_innovation_outliers(self):
        spec = ContaminationSpec("IO", 0.1, "independent", Contaminant("constant", 50.0))
        y = generate_arma(ra.ArmaParams(), 1000, seed=6, innovation_outliers=spec)
        assert 50 < np.sum(y > 25) < 150


class TestContaminate:
    def test_clean_identity(self):
        x = np.random.default_rng(7).standard_normal(20)
        out = contaminate(x, CLEAN, 1)
        np.testing.assert_array_equal(out.values, x)
        assert not out.mask.any()

    def test_single_patch(self):
        spec = ContaminationSpec("AO", 0.2667, "patchy", Contaminant("half_normal", 5.0), 20)
        for seed in range(20):
            idx = outlier_positions(spec, 75, seed)
            assert idx.size == 20
            assert np.all(np.diff(idx) == 1)

    def test_point_mass(self):
        x = np.random.default_rng(8).standard_normal(500)
        spec = ContaminationSpec("AO", 0.2, "independent", Contaminant("point_mass", 7.0))
        out = contaminate(x, spec, 9)
        d = out.values - x
        np.testing.assert_allclose(np.abs(d[out.mask]), 7.0, rtol=0, atol=1e-12)
        assert np.all(d[~out.mask] == 0)
        assert (d[out.mask] > 0).any() and (d[out.mask] < 0).any()

    def test_replacement(self):
        x = np.zeros(100) + 3.0
        spec = ContaminationSpec("RO", 0.1, "isolated", Contaminant("constant", -1.0))
        out = contaminate(x, spec, 10)
        assert np.all(out.values[out.mask] == -1.0) and out.mask.sum() == 10

    @given(st.integers(1, 37), st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_isolated_not_adjacent(self, k, seed):
        spec = ContaminationSpec("AO", k / 75, "isolated")
        idx = outlier_positions(spec, 75, seed)
        assert idx.size == k and np.all(np.diff(idx) >= 2)
        assert idx.min() >= 0 and idx.max() < 75

    def test_equispaced(self):
        spec = ContaminationSpec("AO", 0.1, "equispaced", Contaminant("constant", 10.0))
        idx = outlier_positions(spec, 1000, None)
        assert idx.size == 100 and np.all(np.diff(idx) == 10)

    def test_infeasible_patch(self):
        spec = ContaminationSpec("AO", 0.5, "patchy", n_patch=40)
        with pytest.raises(ValueError):
            outlier_positions(spec, 75, 0)

    def test_io_rejected(self):
        with pytest.raises(ValueError):
            contaminate(np.zeros(5), ContaminationSpec("IO", 0.1), 0)

    @pytest.mark.parametrize("kw", [dict(kind="XO"), dict(temporal="bursty"),
                                    dict(epsilon=1.5), dict(n_patch=0)])
    def test_invalid_spec(self, kw):
        with pytest.raises(ValueError):
            ContaminationSpec(**kw)

    def test_names(self):
        assert CLEAN.name == "clean"
        assert ContaminationSpec("AO", 0.1).name == "AO_0.1"
        assert ContaminationSpec("AO", 0.1, label="x").name == "x"
