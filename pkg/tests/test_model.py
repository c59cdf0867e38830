import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from truncelb import (
    ModelParams,
    NoBifurcation,
    ParameterError,
    Regime,
    baseline_params,
    d_bar,
    d_bar0,
    eigenvalues_2x2,
    elb_inflation_threshold,
    f_of_p,
    p_bar,
    regime_system,
    spectral_radius_2x2,
    validate_params,
)

from .draws import random_params, rng_for
from .oracles import affine_law, bisect_p_bar, power_iteration_radius, spending_loading

unit = st.floats(0.3, 1.0)


@st.composite
def valid_params(draw):
    sigma = draw(st.floats(0.5, 3.0))
    beta = draw(st.floats(0.95, 0.995))
    lam = draw(st.floats(0.02, 0.5))
    m_xx, m_xpi, m_pipi = draw(unit), draw(unit), draw(unit)
    hi = m_xpi / (beta * m_pipi)
    lo = max(1e-3, m_xpi + (1 - m_xx) * (beta * m_pipi - 1) / (lam * sigma))
    assume(hi - lo > 1e-3)
    frac = draw(st.floats(0.01, 0.99))
    return ModelParams(sigma, beta, lo + frac * (hi - lo), lam, m_xx, m_xpi, m_pipi)


class TestParams:
    def test_baseline_defaults(self, baseline):
        assert baseline.mu == pytest.approx(1 / 0.99 - 1, rel=1e-15)
        assert baseline.kappa == baseline.lam
        assert baseline.q_g == pytest.approx(0.02, rel=1e-12)
        assert baseline.d_max == pytest.approx(2 * d_bar0(baseline), rel=1e-15)

    @pytest.mark.parametrize(
        "field,value",
        [
            ("sigma", 0.0),
            ("sigma", -1.0),
            ("beta", 1.0),
            ("beta", 0.0),
            ("psi", -0.1),
            ("lambda", 0.0),
            ("m_xx", 0.0),
            ("m_xpi", 1.2),
            ("m_pipi", math.nan),
            ("sigma", math.inf),
            ("mu", -0.01),
        ],
    )
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ParameterError) as info:
            baseline_params(**{field: value})
        assert info.value.field == field

    def test_rejects_non_numeric(self):
        with pytest.raises(ParameterError):
            baseline_params(sigma="1.5")

    def test_json_round_trip(self, baseline):
        again = ModelParams.from_json(baseline.to_json())
        assert again == baseline
        assert json.loads(baseline.to_json())["lambda"] == 0.1

    def test_unknown_key_rejected(self):
        record = baseline_params().to_dict()
        record["gamma"] = 1.0
        with pytest.raises(ParameterError) as info:
            ModelParams.from_dict(record)
        assert info.value.field == "gamma"

    def test_missing_key_rejected(self):
        record = baseline_params().to_dict()
        del record["m_pipi"]
        with pytest.raises(ParameterError) as info:
            ModelParams.from_dict(record)
        assert info.value.field == "m_pipi"

    def test_frozen_and_hashable(self, baseline):
        with pytest.raises(AttributeError):
            baseline.sigma = 2.0
        assert hash(baseline) == hash(baseline_params())


class TestAssumptions:
    def test_baseline_passes(self, baseline):
        report = validate_params(baseline)
        assert report.a1_ok and report.a2_ok and report.ok
        assert report.eig_A.is_real
        assert 0 < report.rho_A < 1

    def test_a2_fails_below_taylor_principle(self):
        report = validate_params(baseline_params(psi=0.9))
        assert report.a1_ok and not report.a2_ok
        assert any("Assumption 2 fails" in m for m in report.messages)

    def test_a1_fails_above_bound(self):
        report = validate_params(baseline_params(psi=1.4))
        assert not report.a1_ok and report.a2_ok

    def test_a1_bound_is_strict(self):
        psi = 1.0 / (0.99 * 0.74)
        assert not validate_params(baseline_params(psi=psi)).a1_ok

    def test_a1_gives_real_eigenvalues(self):
        for seed in range(50):
            params = random_params(rng_for(seed), need_p_bar=False)
            assert validate_params(params).eig_A.is_real


class TestRegimeSystems:
    @pytest.mark.parametrize("regime", [Regime.NORMAL, Regime.ELB])
    def test_matches_structural_solve(self, baseline, regime):
        rf = regime_system(baseline, regime)
        m_ref, force = affine_law(baseline, regime.value, 0.01)
        np.testing.assert_allclose(rf.m, np.array(m_ref.tolist(), dtype=float), rtol=1e-14)
        np.testing.assert_allclose(
            rf.f_d * 0.01 + rf.f_const, np.array(force.tolist(), dtype=float).ravel(), rtol=1e-13
        )

    @pytest.mark.parametrize("regime", [Regime.NORMAL, Regime.ELB])
    def test_spending_loading(self, baseline, regime):
        ref = np.array(spending_loading(baseline, regime.value).tolist(), dtype=float).ravel()
        np.testing.assert_allclose(regime_system(baseline, regime).f_g, ref, rtol=1e-14, atol=1e-18)

    def test_arrays_read_only(self, baseline):
        with pytest.raises(ValueError):
            regime_system(baseline, Regime.ELB).m[0, 0] = 2.0

    def test_vanishing_feedback_normal_tends_to_elb_slope(self, baseline):
        params = baseline.replace(psi=1e-13)
        np.testing.assert_allclose(
            regime_system(params, Regime.NORMAL).m, regime_system(params, Regime.ELB).m, rtol=1e-12
        )


class TestThresholds:
    def test_f_at_zero(self, baseline):
        assert f_of_p(baseline, 0.0) == 1.0

    def test_f_is_det(self, baseline):
        a = regime_system(baseline, Regime.ELB).m
        for p in np.linspace(0, 0.99, 23):
            assert f_of_p(baseline, p) == pytest.approx(np.linalg.det(np.eye(2) - p * a), abs=1e-14)

    def test_baseline_p_bar(self, baseline):
        pb = p_bar(baseline)
        assert pb == pytest.approx(0.75, abs=0.005)
        assert abs(f_of_p(baseline, 0.75)) < 2e-3
        assert abs(f_of_p(baseline, pb)) < 1e-15

    def test_p_bar_against_bisection(self):
        for seed in range(10):
            params = random_params(rng_for(100 + seed))
            assert p_bar(params) == pytest.approx(bisect_p_bar(params), rel=1e-12)

    def test_p_bar_small_m_limit(self):
        tiny = 1e-12
        params = ModelParams(3.0, 0.99, 1e-3, 0.5, tiny, 1.0, tiny)
        assert p_bar(params) == pytest.approx(1 / (0.5 * 3.0 * 1.0), rel=1e-9)

    def test_no_bifurcation(self):
        # tiny slope keeps the smaller root of F above one
        params = ModelParams(0.5, 0.95, 0.6, 0.01, 0.5, 0.6, 0.5)
        with pytest.raises(NoBifurcation):
            p_bar(params)

    def test_d_bar_values(self, baseline):
        assert d_bar0(baseline) == pytest.approx(0.100536216, rel=1e-8)
        assert d_bar(baseline, 0.0) == pytest.approx(d_bar0(baseline), rel=1e-14)
        expected = baseline.mu / (baseline.lam * baseline.psi) * (f_of_p(baseline, 0.5) + 0.1 * 1.5 * 1.183)
        assert d_bar(baseline, 0.5) == pytest.approx(expected, rel=1e-14)

    def test_d_bar_decreasing_on_grid(self, baseline):
        values = np.array([d_bar(baseline, p) for p in np.linspace(0, 1, 1000)])
        assert np.all(np.diff(values) < 0)

    def test_d_bar_positive_at_one(self, baseline):
        assert d_bar(baseline, 1.0) > 0

    def test_pi_floor(self, baseline):
        assert elb_inflation_threshold(baseline) == pytest.approx(-0.0085385, abs=5e-8)

    @settings(max_examples=200, deadline=None)
    @given(valid_params(), st.floats(0.0, 0.999))
    def test_d_bar_monotone_property(self, params, p):
        assert d_bar(params, p) > d_bar(params, min(p + 1e-3, 1.0))
        assert d_bar(params, 1.0) > 0

    @settings(max_examples=200, deadline=None)
    @given(valid_params())
    def test_p_bar_root_property(self, params):
        try:
            pb = p_bar(params)
        except NoBifurcation:
            return
        assert abs(f_of_p(params, pb)) < 1e-12
        assert all(f_of_p(params, p) > 0 for p in np.linspace(0, pb, 50)[:-1])


class TestEigenvalues:
    def test_identity(self):
        eig = eigenvalues_2x2(np.eye(2))
        assert eig == (1.0, 1.0, True)
        assert type(eig.first) is float

    def test_rotation_is_complex(self):
        eig = eigenvalues_2x2([[0, -1], [1, 0]])
        assert not eig.is_real
        assert abs(eig.first) == pytest.approx(1.0)

    def test_matches_numpy(self):
        rng = rng_for(7)
        for _ in range(200):
            m = rng.uniform(-2, 2, (2, 2))
            ours = eigenvalues_2x2(m)
            ref = sorted(np.linalg.eigvals(m), key=lambda z: (z.real, z.imag), reverse=True)
            np.testing.assert_allclose(sorted([ours.first, ours.second], key=lambda z: (complex(z).real, complex(z).imag), reverse=True), ref, rtol=1e-10, atol=1e-12)

    def test_spectral_radius_against_power_iteration(self, baseline):
        a = regime_system(baseline, Regime.ELB).m
        rho = spectral_radius_2x2(0.8 * a)
        assert rho > 1
        assert rho == pytest.approx(power_iteration_radius(0.8 * a), rel=1e-12)

    def test_spectral_radius_one_at_p_bar(self, baseline):
        a = regime_system(baseline, Regime.ELB).m
        assert spectral_radius_2x2(p_bar(baseline) * a) == pytest.approx(1.0, rel=1e-13)


def test_small_feedback_is_continuous(baseline):
    a = regime_system(baseline.replace(psi=1e-10), Regime.NORMAL)
    b = regime_system(baseline.replace(psi=2e-10), Regime.NORMAL)
    np.testing.assert_allclose(a.m, b.m, rtol=1e-9)
    np.testing.assert_allclose(a.f_g, b.f_g, rtol=1e-9, atol=1e-10)


def test_psi_must_be_positive():
    with pytest.raises(ParameterError):
        baseline_params(psi=0.0)

