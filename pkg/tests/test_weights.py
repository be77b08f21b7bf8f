from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from bmcost.errors import DegenerateWarning
from bmcost.sampled import Grid
from bmcost.transforms import ct_constant
from bmcost.weights import (SUP_CONST, LogHolderWeight, deriv_bound, epsilon_weight, error_bound,
                            holder_smoothing_integral, load_weight, particular_smoothing_time,
                            particular_weight, smooth, smoothing_time, sqrt_weight_smoothing_time,
                            table_weight, verify_holder, weight_from_descriptor)


class TestHolder:
    def test_particular_weight_is_half_holder(self):
        w = particular_weight()
        assert w.K0 == pytest.approx(np.sqrt(2 * np.pi))
        rep = verify_holder(w)
        assert rep.passed and rep.max_ratio <= 1.0

    def test_linear_log_weight_ratio(self):
        # Omega(x) = x with K0 = 1, alpha = 1/2: the ratio is |x - y|^(1/2), at most sqrt(2 span)
        w = LogHolderWeight(lambda x: np.asarray(x, float), 1.0, 0.5)
        rep = verify_holder(w, pairs=20000, span=10.0, seed=3)
        assert not rep.passed
        assert rep.max_ratio <= np.sqrt(20.0)
        assert rep.max_ratio > 0.95 * np.sqrt(20.0)

    def test_pairs_minimum(self):
        with pytest.raises(ValueError):
            verify_holder(particular_weight(), pairs=10)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            LogHolderWeight(lambda x: x, -1.0, 0.5)
        with pytest.raises(ValueError):
            LogHolderWeight(lambda x: x, 1.0, 1.0)


class TestConstants:
    def test_generic_smoothing_time(self):
        # (K0 / (pi sigma' cos(pi/4)))^2 with K0 = sqrt(2 pi), sigma' = 0.08
        t = smoothing_time(np.sqrt(2 * np.pi), 0.5, 0.08)
        assert t == pytest.approx((np.sqrt(2 * np.pi) / (np.pi * 0.08 * np.cos(np.pi / 4))) ** 2, rel=1e-12)
        assert t == pytest.approx(198.94, abs=5e-3)

    def test_smoothing_time_balances_derivative_bound(self):
        for K0, a, sp in [(1.0, 0.3, 0.05), (2.5, 0.7, 0.09)]:
            t = smoothing_time(K0, a, sp)
            assert deriv_bound(K0, a, t) == pytest.approx(np.pi * sp, rel=1e-12)

    def test_particular_smoothing_time(self):
        t = particular_smoothing_time(0.5, 0.2)
        assert t == pytest.approx(3 * np.sqrt(3) / (16 * np.pi * 0.16), rel=1e-14)
        assert t == pytest.approx(0.646089, abs=5e-7)
        # the sharp derivative bound equals pi T (1 - eps) there
        assert SUP_CONST / np.sqrt(t) == pytest.approx(np.pi * 0.4, rel=1e-12)
        assert sqrt_weight_smoothing_time(1.0, 0.4) == pytest.approx(t, rel=1e-12)

    def test_degenerate_K0(self):
        with pytest.warns(DegenerateWarning):
            assert smoothing_time(0.0, 0.5, 0.1) == 0.0

    @pytest.mark.parametrize("alpha,t", [(0.3, 0.5), (0.5, 1.0), (0.8, 2.0)])
    def test_holder_smoothing_integral(self, alpha, t):
        ref = 2 * quad(lambda y: y**alpha / (t * t + y * y), 0, np.inf, limit=200)[0]
        assert holder_smoothing_integral(alpha, t) == pytest.approx(ref, rel=1e-8)

    def test_error_bound_is_kernel_average(self):
        # K0 |y|^alpha averaged against the Poisson kernel
        K0, a, t = 1.7, 0.4, 0.6
        ref = K0 * t / np.pi * 2 * quad(lambda y: y**a / (t * t + y * y), 0, np.inf, limit=200)[0]
        assert error_bound(K0, a, t) == pytest.approx(ref, rel=1e-8)


class TestClosedForms:
    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.05, 8.0), st.floats(-50, 50))
    def test_sandwich(self, t, x):
        w = particular_weight()
        P = w.closed_forms.poisson_of_Omega(t, np.array([x]))[0]
        d = P - w.Omega(np.array([x]))[0]
        assert -1e-12 <= d <= np.sqrt(np.pi * t) + 1e-12

    @pytest.mark.parametrize("t", [0.3, 1.0, 3.0])
    def test_poisson_against_quad(self, t):
        w = particular_weight()
        for x in (-3.0, 0.0, 2.0):
            ref = quad(lambda y: t / (np.pi * ((x - y) ** 2 + t * t)) * np.sqrt(2 * np.pi * y),
                       0, np.inf, limit=400)[0]
            assert w.closed_forms.poisson_of_Omega(t, np.array([x]))[0] == pytest.approx(ref, rel=1e-8)

    def test_derivative_against_finite_difference(self):
        cf = particular_weight().closed_forms
        t = 0.7
        x = np.linspace(-5, 5, 41)
        e = 1e-5
        fd = (cf.conj_poisson_kober_of_Omega(t, x + e) - cf.conj_poisson_kober_of_Omega(t, x - e)) / (2 * e)
        assert np.max(np.abs(fd - cf.H_poisson_derivative(t, x))) < 1e-8

    @pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
    def test_sup_location_and_value(self, t):
        cf = particular_weight().closed_forms
        x = np.linspace(-3 * t, 3 * t, 600001)
        d = np.abs(cf.H_poisson_derivative(t, x))
        j = np.argmax(d)
        assert abs(x[j] + t / np.sqrt(3)) <= x[1] - x[0]
        assert d[j] == pytest.approx(SUP_CONST / np.sqrt(t), rel=1e-9)

    def test_ct_closed_form_against_transform(self):
        w = particular_weight()
        t = 1.0
        g = Grid(-400.0, 1 / 64, 51201)
        c = ct_constant(w.transform_input(g), t).value
        assert c == pytest.approx(w.closed_forms.ct_of_Omega(t), abs=1e-6)
        # and against an independent quad of the kernel
        ref = quad(lambda y: -y * t * (t + 2) * np.sqrt(2 * np.pi * y)
                   / (np.pi * (y * y + 1) * (y * y + (t + 1) ** 2)), 0, np.inf, limit=400)[0]
        assert w.closed_forms.ct_of_Omega(t) == pytest.approx(ref, rel=1e-9)

    def test_epsilon_weight_scales(self):
        w = epsilon_weight(0.2)
        x = np.linspace(-3, 3, 7)
        assert np.allclose(w.Omega(x), 1.2 * particular_weight().Omega(x))
        assert w.closed_forms.H_poisson_deriv_sup(1.0) == pytest.approx(1.2 * SUP_CONST)


class TestSmooth:
    def test_closed_form_path(self):
        sw = smooth(particular_weight(), 1.0, Grid(-50.0, 0.25, 401))
        assert sw.closed_form
        assert sw.sampled_error_sup <= np.sqrt(np.pi) + 1e-12
        assert sw.deriv_bound_used == pytest.approx(SUP_CONST)
        assert sw.deriv_bound_used <= sw.deriv_bound

    def test_numeric_path_table_weight(self):
        xs = np.linspace(-4, 4, 161)
        w = table_weight(xs, 0.3 * np.sqrt(np.abs(xs)), 0.3, 0.5)
        g = Grid(-200.0, 1 / 32, 12801)
        sw = smooth(w, 2.0, g)
        assert not sw.closed_form
        assert sw.sampled_error_sup <= sw.error_bound
        assert sw.sampled_deriv_sup <= sw.deriv_bound


class TestDescriptors:
    def test_roundtrip(self, tmp_path):
        w = table_weight([0, 1, 2], [0.0, 0.5, 0.7], 0.5, 0.5)
        p = tmp_path / "w.json"
        p.write_text(json.dumps(w.descriptor))
        w2 = load_weight(p)
        x = np.linspace(-1, 3, 9)
        assert np.allclose(w.Omega(x), w2.Omega(x))

    def test_particular_descriptors(self):
        assert weight_from_descriptor({"kind": "particular"}).K0 == pytest.approx(np.sqrt(2 * np.pi))
        assert weight_from_descriptor({"kind": "particular_eps", "epsilon": 0.2}).K0 == \
            pytest.approx(1.2 * np.sqrt(2 * np.pi))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            weight_from_descriptor({"kind": "mystery"})
