import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import robust_arma as ra
from robust_arma.core import (levinson_update, min_root_modulus, partials_to_coeffs,
                              process_std, shrink_roots)

TABLE3_AR4 = np.array([2.7607, -3.8106, 2.6535, -0.9238])


def octic(x):
    return 0.002 * x**8 - 0.052 * x**6 + 0.432 * x**4 - 0.972 * x**2 + 1.792


class TestScoreFamily:
    def test_rho_values(self, eff):
        assert eff.rho2(0.0) == 0.0
        assert eff.rho2(3.5) == 3.25
        assert eff.rho2(-7.0) == 3.25

    @pytest.mark.parametrize("x, value", [(2.0, 2.0), (3.0, 3.25)])
    def test_continuity_at_knots(self, eff, x, value):
        # both adjacent branches give the same value
        assert abs(octic(x) - value) < 1e-12
        for s in (1.0, -1.0):
            assert abs(eff.rho2(s * x) - value) < 1e-12
            assert abs(eff.rho2(s * (x + 1e-13)) - value) < 1e-9
            assert abs(eff.rho2(s * (x - 1e-13)) - value) < 1e-9

    def test_psi_is_derivative(self, eff):
        x = np.linspace(-4, 4, 2001)
        h = 1e-6
        num = (eff.rho2(x + h) - eff.rho2(x - h)) / (2 * h)
        np.testing.assert_allclose(eff.psi2(x), num, atol=1e-6)
        num = (eff.psi2(x + h) - eff.psi2(x - h)) / (2 * h)
        np.testing.assert_allclose(eff.dpsi2(x), num, atol=1e-5)

    def test_psi_knots(self, eff):
        assert eff.psi2(2.0) == pytest.approx(2.0, abs=1e-12)
        assert eff.psi2(3.0) == pytest.approx(0.0, abs=1e-12)
        assert eff.psi2(10.0) == 0.0

    def test_rho1_scaling(self, eff):
        x = np.linspace(-5, 5, 101)
        np.testing.assert_array_equal(eff.rho1(x), eff.rho2(x / eff.c1))
        np.testing.assert_allclose(eff.psi1(x), eff.psi2(x / eff.c1) / eff.c1)

    def test_a6_inequality(self, eff):
        x = np.linspace(-10, 10, 10_000)
        assert np.all(2 * eff.rho2(x) - eff.psi2(x) * x >= -1e-12)

    def test_eta_is_psi(self, eff):
        x = np.linspace(-5, 5, 55)
        np.testing.assert_array_equal(eff.eta(x), eff.psi2(x))

    @given(st.floats(-50, 50))
    def test_rho_even_and_bounded(self, x):
        fam = ra.RhoFamily()
        assert fam.rho2(x) == fam.rho2(-x)
        assert 0.0 <= fam.rho2(x) <= 3.25

    @given(st.floats(0, 20), st.floats(0, 20))
    def test_rho_monotone(self, a, b):
        fam = ra.RhoFamily()
        lo, hi = sorted((a, b))
        assert fam.rho2(lo) <= fam.rho2(hi) + 1e-15

    @pytest.mark.parametrize("c1", [0.0, -1.0, float("nan")])
    def test_invalid_c1(self, c1):
        with pytest.raises(ValueError):
            ra.make_rho_family(c1)


class TestParams:
    def test_vector_round_trip(self):
        p = ra.ArmaParams([0.5, -0.2], [0.3], 1.5)
        q = ra.ArmaParams.from_vector(p.to_vector(), 2, 1)
        assert p == q and p.spec == ra.ArmaSpec(2, 1)

    def test_immutable(self):
        p = ra.ArmaParams([0.5])
        with pytest.raises(ValueError):
            p.phi[0] = 0.1

    def test_negative_order(self):
        with pytest.raises(ValueError):
            ra.ArmaSpec(-1, 0)


class TestRoots:
    def test_table3_model_stationary(self):
        assert ra.roots_within_margin(ra.ArmaParams(TABLE3_AR4), 0.01)
        # companion-matrix oracle
        k = TABLE3_AR4.size
        comp = np.zeros((k, k))
        comp[0] = TABLE3_AR4
        comp[1:, :-1] = np.eye(k - 1)
        rho = np.abs(np.linalg.eigvals(comp)).max()
        assert min_root_modulus(TABLE3_AR4) == pytest.approx(1 / rho, rel=1e-10)

    def test_unit_root_rejected(self):
        assert not ra.roots_within_margin(ra.ArmaParams([1.0]))
        assert not ra.roots_within_margin(ra.ArmaParams([], [1.2]))

    def test_shrink_roots(self):
        out = shrink_roots([1.5, -0.5], 1.02)
        assert min_root_modulus(out) == pytest.approx(1.02, rel=1e-10)

    @given(st.lists(st.floats(-0.98, 0.98), min_size=1, max_size=8))
    @settings(max_examples=50)
    def test_partials_give_stationary(self, partials):
        phi = partials_to_coeffs(partials)
        assert min_root_modulus(phi) > 1.0

    def test_levinson_update(self):
        np.testing.assert_allclose(levinson_update([0.5], 0.2), [0.4, 0.2])


class TestMaInfinity:
    def test_ar1_geometric(self):
        lam = ra.ma_infinity_coeffs(ra.ArmaParams([0.5]), 30)
        np.testing.assert_allclose(lam, 0.5 ** np.arange(1, 31), rtol=1e-14)

    def test_white_noise(self):
        assert np.all(ra.ma_infinity_coeffs(ra.ArmaParams(), 10) == 0)

    def test_ma1(self):
        lam = ra.ma_infinity_coeffs(ra.ArmaParams([], [0.4]), 10)
        assert lam[0] == pytest.approx(-0.4)
        assert np.all(lam[1:] == 0)

    def test_outside_raises(self):
        with pytest.raises(ValueError):
            ra.ma_infinity_coeffs(ra.ArmaParams([1.1]), 10)

    def test_process_std_ar1(self):
        assert process_std(ra.ArmaParams([0.5])) == pytest.approx(np.sqrt(4 / 3), rel=1e-12)

    def test_table3_process_std(self):
        assert process_std(ra.ArmaParams(TABLE3_AR4)) == pytest.approx(27.599, abs=1e-3)
