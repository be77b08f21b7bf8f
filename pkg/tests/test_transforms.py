from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import dawsn

from bmcost.errors import GrowthError, TailError
from bmcost.sampled import Grid, SampledFunction
from bmcost.transforms import (Envelope, GrowthClass, TailTerm, TransformInput, conj_poisson,
                               conj_poisson_kober, ct_constant, ct_kernel, hilbert0,
                               hilbert_kober, poisson)


def grid(L, h):
    return Grid(-L, h, int(round(2 * L / h)) + 1)


def cauchy(L=200.0, h=1 / 128):
    g = grid(L, h)
    env = Envelope((TailTerm(1.0, -2.0), TailTerm(-1.0, -4.0)),
                   (TailTerm(1.0, -2.0), TailTerm(-1.0, -4.0)), True)
    return g, TransformInput(SampledFunction(g, 1 / (1 + g.points**2)), GrowthClass.INV1, env)


def gauss(L=32.0, h=1 / 256):
    g = grid(L, h)
    return g, SampledFunction(g, np.exp(-g.points**2))


class TestHilbert:
    def test_gaussian_against_dawson(self):
        g, f = gauss()
        H = hilbert0(f)
        ref = 2 / np.sqrt(np.pi) * dawsn(g.points)
        m = g.interior_mask()
        assert np.max(np.abs(H.values - ref)[m]) < 1e-5

    def test_gaussian_spectral_route(self):
        g, f = gauss()
        H = hilbert0(f, route="spectral")
        ref = 2 / np.sqrt(np.pi) * dawsn(g.points)
        m = g.interior_mask()
        assert np.max(np.abs(H.values - ref)[m]) < 1e-3

    def test_cauchy(self):
        g, tf = cauchy()
        H = hilbert0(tf)
        x = g.points
        m = g.interior_mask()
        assert np.max(np.abs(H.values - x / (1 + x**2))[m]) < 1e-5

    def test_unknown_route(self):
        g, f = gauss()
        with pytest.raises(ValueError):
            hilbert0(f, route="nope")

    def test_growth_class_enforced(self):
        g, f = gauss()
        with pytest.raises(GrowthError):
            hilbert0(TransformInput(f, GrowthClass.INV2))

    def test_envelope_incompatible_with_class(self):
        g, f = gauss()
        with pytest.raises(GrowthError):
            TransformInput(f, GrowthClass.INV1, Envelope.power(1.0, 0.5, 1.0, 0.5))

    def test_samples_above_envelope(self):
        g = grid(8.0, 1 / 16)
        f = SampledFunction(g, 1 / (1 + g.points**2))
        with pytest.raises(GrowthError):
            TransformInput(f, GrowthClass.INV1, Envelope.power(0.1, -2.0, 0.1, -2.0))

    def test_tail_guard_on_fitted_envelope(self):
        g = grid(4.0, 1 / 16)
        f = SampledFunction(g, np.sqrt(np.abs(g.points)))
        env = Envelope.fit(f, (0.5,))
        with pytest.raises(TailError):
            hilbert_kober(TransformInput(f, GrowthClass.INV2, env))

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1))
    def test_linearity(self, a, b, shift):
        g, f = gauss(L=16.0, h=1 / 64)
        h_ = SampledFunction(g, np.exp(-(g.points - shift) ** 2))
        lhs = hilbert0(a * f + b * h_, max_tail_fraction=np.inf).values
        rhs = a * hilbert0(f, max_tail_fraction=np.inf).values + b * hilbert0(h_, max_tail_fraction=np.inf).values
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * (1 + abs(a) + abs(b))

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.3, 3.0))
    def test_even_to_odd(self, width):
        g = grid(16.0, 1 / 64)
        f = SampledFunction(g, np.exp(-(g.points / width) ** 2))
        H = hilbert0(f, max_tail_fraction=np.inf).values
        assert np.max(np.abs(H + H[::-1])) < 1e-12

    def test_kober_of_constant_vanishes(self):
        g = grid(50.0, 1 / 16)
        f = SampledFunction(g, np.full(g.count, 2.5))
        env = Envelope((TailTerm(2.5, 0.0),), (TailTerm(2.5, 0.0),), True)
        H = hilbert_kober(TransformInput(f, GrowthClass.INV2, env))
        # endpoints carry the split log singularity of the kernel
        assert np.max(np.abs(H.values[g.interior_mask(0.9)])) < 1e-6

    def test_kober_differs_by_constant(self):
        g = grid(32.0, 1 / 128)
        x = g.points
        f = SampledFunction(g, np.exp(-(x - 0.7) ** 2))
        d = hilbert_kober(f, growth_class=GrowthClass.INV1).values - hilbert0(f).values
        ref = np.sum(f.values * x / (1 + x**2)) * g.step / np.pi
        assert np.max(np.abs(d - ref)) < 1e-12


class TestPoisson:
    def test_cauchy_closed_form(self):
        g, tf = cauchy()
        x = g.points
        m = g.interior_mask()
        for t in (0.1, 1.0, 3.0):
            P = poisson(tf, t, growth_class=GrowthClass.INV1).values
            Q = conj_poisson(tf, t).values
            assert np.max(np.abs(P - (1 + t) / (x**2 + (1 + t) ** 2))[m]) < 1e-5
            assert np.max(np.abs(Q - x / (x**2 + (1 + t) ** 2))[m]) < 1e-5

    def test_second_order(self):
        errs = []
        for h in (1 / 16, 1 / 32, 1 / 64):
            g, tf = cauchy(L=100.0, h=h)
            x = g.points
            P = poisson(tf, 0.1, growth_class=GrowthClass.INV1).values
            errs.append(np.max(np.abs(P - 1.1 / (x**2 + 1.21))[g.interior_mask()]))
        assert errs[0] / errs[1] == pytest.approx(4, rel=0.15)
        assert errs[1] / errs[2] == pytest.approx(4, rel=0.15)

    def test_height_far_below_step(self):
        # product integration stays second order for t << h
        for h in (1 / 8, 1 / 16):
            g, tf = cauchy(L=100.0, h=h)
            P = poisson(tf, 1e-6, growth_class=GrowthClass.INV1).values
            err = np.max(np.abs(P - 1 / (1 + g.points**2)))
            assert err < 0.05 * h**2

    def test_invalid_height(self):
        g, f = gauss()
        with pytest.raises(ValueError):
            poisson(f, 0.0)
        with pytest.raises(ValueError):
            conj_poisson(f, -1.0)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.01, 5.0), st.floats(-3, 3), st.floats(0.2, 2.0))
    def test_positivity_and_maximum_principle(self, t, c, w):
        g = grid(16.0, 1 / 32)
        v = np.exp(-((g.points - c) / w) ** 2)
        P = poisson(SampledFunction(g, v), t, growth_class=GrowthClass.INV1,
                    max_tail_fraction=np.inf).values
        assert P.min() >= -1e-14
        assert P.max() <= v.max() + 1e-12

    def test_semigroup(self):
        g, f = gauss(L=200.0, h=1 / 64)
        t, s = 0.5, 0.25
        Pt = poisson(f, t, growth_class=GrowthClass.INV1)
        env = Envelope.power(t / np.sqrt(np.pi), -2.0, t / np.sqrt(np.pi), -2.0, trusted=True)
        lhs = poisson(TransformInput(Pt, GrowthClass.INV1, env, validate=False), s,
                      growth_class=GrowthClass.INV1).values
        rhs = poisson(f, t + s, growth_class=GrowthClass.INV1).values
        m = g.interior_mask()
        assert np.max(np.abs(lhs - rhs)[m]) < 1e-5

    def test_conj_kober_converges_to_hilbert(self):
        g, f = gauss(L=64.0, h=1 / 512)
        H = hilbert_kober(f, growth_class=GrowthClass.INV1).values
        m = g.interior_mask()
        errs = [np.max(np.abs(conj_poisson_kober(f, t, growth_class=GrowthClass.INV1).values - H)[m])
                for t in (0.08, 0.04, 0.02)]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] / errs[1] == pytest.approx(0.5, abs=0.1)


class TestCt:
    def test_zero_height(self):
        g, f = gauss()
        assert ct_constant(f, 0.0).value == 0.0

    def test_odd_kernel_vanishes_on_even_input(self):
        g, f = gauss()
        assert abs(ct_constant(f, 1.0, growth_class=GrowthClass.INV1).value) < 1e-14

    def test_against_quad(self):
        from scipy.integrate import quad
        g = grid(64.0, 1 / 128)
        v = np.exp(-(g.points - 1) ** 2)
        c = ct_constant(SampledFunction(g, v), 0.7, growth_class=GrowthClass.INV1).value
        ref, _ = quad(lambda y: ct_kernel(y, 0.7) * np.exp(-(y - 1) ** 2), -40, 40, limit=200)
        assert c == pytest.approx(ref, abs=1e-10)
