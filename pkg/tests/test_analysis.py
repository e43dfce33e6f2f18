import numpy as np
import pytest

import robust_arma as ra
from robust_arma.analysis import (DegenerateWeightError, asymptotic_efficiency,
                                  asymptotic_weight, influence_function_ar1,
                                  ls_influence_function_ar1, psi_tau, psi_tau_asymptotic,
                                  select_order, tau_weight)
from robust_arma.sim.process import Contaminant, ContaminationSpec, contaminate, generate_arma

# frozen quadrature values
W_EFF = 0.05865549123997209
EFF_EFF = 0.9077493424273279
GES = 3.5537


class TestPsiTau:
    def test_quadratic_is_least_squares(self, quadratic_family):
        r = np.random.default_rng(1).standard_normal(200)
        assert tau_weight(r, quadratic_family) == pytest.approx(0.0, abs=1e-12)
        x = np.linspace(-5, 5, 21)
        np.testing.assert_allclose(psi_tau(x, r, quadratic_family), x, atol=1e-12)

    def test_s_estimator_case(self):
        fam = ra.make_rho_family(1.0)
        r = np.random.default_rng(2).standard_normal(200)
        x = np.linspace(0.1, 2.9, 15)
        ratio = psi_tau(x, r, fam) / fam.psi1(x)
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)

    def test_odd(self, eff):
        r = np.random.default_rng(3).standard_normal(200)
        x = np.linspace(-10, 10, 401)
        np.testing.assert_allclose(psi_tau(-x, r, eff), -psi_tau(x, r, eff), atol=1e-15)
        np.testing.assert_allclose(psi_tau_asymptotic(-x, eff), -psi_tau_asymptotic(x, eff),
                                   atol=1e-15)

    def test_redescending(self, eff):
        assert psi_tau_asymptotic(3 * eff.c1 + 3.01, eff) == 0.0

    def test_finite_sample_weight_converges(self, eff):
        r = np.random.default_rng(4).standard_normal(1_000_000)
        assert tau_weight(r, eff) == pytest.approx(asymptotic_weight(eff), abs=0.005)

    def test_degenerate(self, eff):
        with pytest.raises(DegenerateWeightError):
            tau_weight(np.zeros(10), eff)


class TestEfficiency:
    def test_frozen(self, eff):
        assert asymptotic_weight(eff) == pytest.approx(W_EFF, abs=1e-12)
        assert asymptotic_efficiency(eff) == pytest.approx(EFF_EFF, abs=1e-10)

    def test_least_squares(self, quadratic_family):
        assert asymptotic_efficiency(quadratic_family) == pytest.approx(1.0, abs=1e-12)

    def test_node_stability(self, eff, rob):
        for fam in (eff, rob):
            a, b = asymptotic_efficiency(fam, 200), asymptotic_efficiency(fam, 400)
            assert abs(a - b) < 1e-6 * a

    def test_robust_tuning(self, rob):
        assert asymptotic_efficiency(rob) < 0.95

    def test_ordering(self, eff, rob):
        assert asymptotic_efficiency(eff) > asymptotic_efficiency(rob)


@pytest.fixture(scope="module")
def curve(eff):
    return influence_function_ar1(-0.5, np.arange(0, 50.01, 0.25), eff)


class TestInfluence:
    def test_origin(self, curve):
        assert curve.if_values[0] == 0.0

    def test_ges(self, curve):
        assert curve.ges == pytest.approx(GES, abs=1e-3)
        k = int(np.argmax(np.abs(curve.if_values)))
        assert 0 < k < curve.cw_grid.size - 1
        assert curve.cw_grid[k] == pytest.approx(4.75)

    def test_redescent(self, curve):
        assert abs(curve.if_values[-1]) < 0.05 * curve.ges

    def test_ls_exceeds(self, curve):
        ls = ls_influence_function_ar1(-0.5, curve.cw_grid)
        sel = curve.cw_grid <= 10
        assert np.any(np.abs(ls.if_values[sel]) > curve.ges)
        np.testing.assert_allclose(ls.if_values, 0.5 * 0.75 * curve.cw_grid ** 2)

    def test_node_stability(self, eff):
        cw = [1.0, 4.75, 10.0]
        a = influence_function_ar1(-0.5, cw, eff, nodes=200).if_values
        b = influence_function_ar1(-0.5, cw, eff, nodes=400).if_values
        np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-12)

    def test_single_sign(self, eff):
        cw = np.array([1.0, 3.0])
        a = influence_function_ar1(-0.5, cw, eff, symmetric=False).if_values
        b = influence_function_ar1(-0.5, -cw, eff, symmetric=False).if_values
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_least_squares_family(self, quadratic_family):
        cw = np.array([1.0, 2.0, 5.0])
        tau = influence_function_ar1(0.3, cw, quadratic_family).if_values
        np.testing.assert_allclose(tau, ls_influence_function_ar1(0.3, cw).if_values, rtol=1e-10)

    def test_bad_phi(self, eff):
        with pytest.raises(ValueError):
            influence_function_ar1(1.0, [1.0], eff)


class TestOrderSelection:
    def test_ar3(self, eff):
        m = ra.ArmaParams([0.6, -0.4, 0.3])
        spec = ContaminationSpec("AO", 0.1, "isolated", Contaminant("normal", 10.0))
        y = contaminate(generate_arma(m, 1000, seed=1), spec, 2).values
        sel = select_order(y, 6, "SIC", eff)
        assert sel.p_hat == 3 and sel.ic.size == 7

    def test_white_noise(self, eff):
        y = np.random.default_rng(5).standard_normal(500)
        assert select_order(y, 5, "sic", eff).p_hat == 0

    def test_scales_non_increasing(self, eff):
        y = generate_arma(ra.ArmaParams([0.5, 0.2]), 800, seed=6)
        sig = select_order(y, 6, "AIC", eff).sigma
        assert np.all(np.diff(sig) <= 0.01 * sig[:-1])

    @pytest.mark.parametrize("crit", ["AIC", "SIC", "HQC"])
    def test_penalties(self, eff, crit):
        y = np.random.default_rng(7).standard_normal(300)
        sel = select_order(y, 3, crit, eff)
        n = 300
        pen = {"AIC": 2 * (sel.orders + 1) / n, "SIC": np.log(n) * sel.orders / n,
               "HQC": 2 * np.log(np.log(n)) * sel.orders / n}[crit]
        np.testing.assert_allclose(sel.ic, np.log(sel.sigma ** 2) + pen)

    def test_errors(self, eff):
        with pytest.raises(ValueError):
            select_order(np.ones(10), 5, "SIC", eff)
        with pytest.raises(ValueError):
            select_order(np.ones(100), 2, "BIC", eff)
