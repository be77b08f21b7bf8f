"""Identity suites run by ``bmcost --command selftest``.

Each check returns a measured error that is compared against a tolerance;
tolerances can be overridden by name.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .sampled import Grid, SampledFunction
from .transforms import (Envelope, GrowthClass, TailTerm, TransformInput, conj_poisson,
                         conj_poisson_kober, hilbert0, hilbert_kober, poisson)
from .weights import SUP_CONST, particular_weight, smooth


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    run: Callable[[], float]
    description: str


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float
    seconds: float
    description: str

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: error {self.error:.3e} (tol {self.tol:.1e}, {self.seconds:.1f}s)"


def _gauss(L: float, h: float) -> SampledFunction:
    g = Grid(-L, h, int(round(2 * L / h)) + 1)
    return SampledFunction(g, np.exp(-g.points**2))


def _gauss_hilbert_env() -> Envelope:
    # H0 of exp(-x^2) ~ 1/(sqrt(pi) x) + 1/(2 sqrt(pi) x^3)
    c1, c3 = 1 / np.sqrt(np.pi), 1 / (2 * np.sqrt(np.pi))
    return Envelope((TailTerm(-c1, -1.0), TailTerm(-c3, -3.0)),
                    (TailTerm(c1, -1.0), TailTerm(c3, -3.0)), True)


def hilbert_involution_error(L: float = 32.0, h: float = 1 / 1024) -> float:
    f = _gauss(L, h)
    Hf = hilbert0(f)
    HHf = hilbert0(TransformInput(Hf, GrowthClass.INV1, _gauss_hilbert_env()))
    m = f.grid.interior_mask()
    return float(np.max(np.abs(HHf.values + f.values)[m]))


def hilbert_routes_error(L: float = 32.0, h: float = 1 / 256) -> float:
    f = _gauss(L, h)
    a = hilbert0(f).values
    b = hilbert0(f, route="spectral").values
    m = f.grid.interior_mask()
    return float(np.max(np.abs(a - b)[m]))


def conj_semigroup_error(L: float = 200.0, h: float = 1 / 64, t: float = 0.5,
                         s: float = 0.25) -> float:
    f = _gauss(L, h)
    Pt = poisson(f, t, growth_class=GrowthClass.INV1)
    env = Envelope.power(t / np.sqrt(np.pi), -2.0, t / np.sqrt(np.pi), -2.0, trusted=True)
    lhs = conj_poisson(TransformInput(Pt, GrowthClass.INV1, env, validate=False), s)
    rhs = conj_poisson(f, t + s)
    m = f.grid.interior_mask()
    return float(np.max(np.abs(lhs.values - rhs.values)[m]))


def _sqrt_setup(t: float, L: float, h: float):
    w = particular_weight()
    cf = w.closed_forms
    g = Grid(-L, h, int(round(2 * L / h)) + 1)
    x = g.points
    return w, cf, g, x


def _sqrt_envelope(scale: float = 1.0) -> Envelope:
    return Envelope((), (TailTerm(scale * np.sqrt(2 * np.pi), 0.5),), True)


def poisson_hilbert_error(t: float = 1.0, L: float = 400.0, h: float = 1 / 256) -> float:
    """``H(P_t Omega) - (Q~_t Omega + C_t)`` for the square-root weight."""
    w, cf, g, x = _sqrt_setup(t, L, h)
    P = SampledFunction(g, cf.poisson_of_Omega(t, x))
    # P_t Omega ~ sqrt(2 pi x) on the right and t sqrt(pi/2) |x|^-1/2 on the left
    env = Envelope((TailTerm(t * np.sqrt(np.pi / 2), -0.5),),
                   (TailTerm(np.sqrt(2 * np.pi), 0.5),), True)
    H = hilbert_kober(TransformInput(P, GrowthClass.INV2, env, validate=False))
    ref = cf.conj_poisson_kober_of_Omega(t, x) + cf.ct_of_Omega(t)
    m = g.interior_mask()
    return float(np.max(np.abs(H.values - ref)[m]))


def kober_involution_error(t: float = 1.0, L: float = 400.0, h: float = 1 / 256) -> float:
    """``H(H f) = -f + P_1 f(0)`` with ``f = P_t Omega`` and ``H f`` in closed form."""
    w, cf, g, x = _sqrt_setup(t, L, h)
    Hf = cf.conj_poisson_kober_of_Omega(t, x) + cf.ct_of_Omega(t)
    c0 = -np.sqrt(np.pi) + cf.ct_of_Omega(t)
    # Q~_t Omega ~ sqrt(2 pi |x|) on the left and t sqrt(pi/2) x^-1/2 on the right
    env = Envelope((TailTerm(np.sqrt(2 * np.pi), 0.5), TailTerm(c0, 0.0)),
                   (TailTerm(c0, 0.0), TailTerm(t * np.sqrt(np.pi / 2), -0.5)), True)
    HH = hilbert_kober(TransformInput(SampledFunction(g, Hf), GrowthClass.INV2, env, validate=False))
    f = cf.poisson_of_Omega(t, x)
    p1 = float(cf.poisson_of_Omega(t + 1.0, np.array([0.0]))[0])
    m = g.interior_mask(0.25)
    return float(np.max(np.abs(HH.values - (-f + p1))[m]))


def cauchy_ratio_error(L: float = 64.0, h: float = 1 / 512) -> float:
    """Successive differences of ``Q~_t f`` halve with ``t`` (deviation of the ratio from 1/2)."""
    f = _gauss(L, h)
    ts = [0.2, 0.1, 0.05, 0.025]
    Q = [conj_poisson_kober(f, t, growth_class=GrowthClass.INV1).values for t in ts]
    m = f.grid.interior_mask()
    d = [np.max(np.abs(Q[i + 1] - Q[i])[m]) for i in range(len(Q) - 1)]
    return float(max(abs(d[i + 1] / d[i] - 0.5) for i in range(len(d) - 1)))


def cauchy_limit_error(L: float = 64.0, h: float = 1 / 512, t: float = 1e-3) -> float:
    f = _gauss(L, h)
    Q = conj_poisson_kober(f, t, growth_class=GrowthClass.INV1).values
    H = hilbert_kober(f, growth_class=GrowthClass.INV1).values
    m = f.grid.interior_mask()
    return float(np.max(np.abs(Q - H)[m]))


@dataclass(frozen=True)
class OracleDeltas:
    poisson_rel: float
    deriv_abs: float
    argmax_offset: float
    step: float
    sup_rel: float
    sandwich_violation: float


def particular_oracle_deltas(t: float, L: float = 400.0, h: float = 1 / 1024) -> OracleDeltas:
    """Numerical smoothing of the square-root weight against its closed forms."""
    w = particular_weight()
    g = Grid(-L, h, int(round(2 * L / h)) + 1)
    sw = smooth(w, t, g, use_closed_forms=False)
    cf = w.closed_forms
    x = g.points
    m = g.interior_mask()
    P_ref = cf.poisson_of_Omega(t, x)
    prel = float(np.max(np.abs(sw.POmega.values - P_ref)[m] / np.abs(P_ref[m])))
    d_num = sw.hilbert_deriv_fn(x)
    d_ref = cf.H_poisson_derivative(t, x)
    dabs = float(np.max(np.abs(d_num - d_ref)[m]))
    j = int(np.argmax(np.where(m, np.abs(d_num), 0.0)))
    off = float(abs(x[j] + t / np.sqrt(3)))
    sup_rel = float(abs(abs(d_num[j]) - SUP_CONST / np.sqrt(t)) / (SUP_CONST / np.sqrt(t)))
    diff = sw.POmega.values - w.Omega(x)
    viol = float(max(0.0, -diff.min(), (diff - np.sqrt(np.pi * t)).max()))
    return OracleDeltas(prel, dabs, off, h, sup_rel, viol)


def closed_form_checks(t: float = 1.0) -> list[Check]:
    cache = {}

    def get():
        if "d" not in cache:
            try:
                cache["d"] = particular_oracle_deltas(t)
            except Exception as exc:
                cache["d"] = exc
        if isinstance(cache["d"], Exception):
            raise cache["d"]
        return cache["d"]

    return [
        Check("closed_form_poisson", 1e-4, lambda: get().poisson_rel,
              f"numerical P_t Omega vs closed form (relative), t={t:g}"),
        Check("closed_form_deriv", 1e-3, lambda: get().deriv_abs,
              f"numerical H(P_t Omega)' vs closed form, t={t:g}"),
        Check("sup_location", 1.0, lambda: get().argmax_offset / get().step,
              "argmax of |H(P_t Omega)'| vs -t/sqrt3, in grid steps"),
        Check("sup_value", 1e-3, lambda: get().sup_rel,
              "sup|H(P_t Omega)'| vs sqrt(pi) 3^(3/4) / (4 sqrt t), relative"),
        Check("sandwich", 1e-12, lambda: get().sandwich_violation,
              "0 <= P_t Omega - Omega <= sqrt(pi t), violation"),
    ]


def default_checks() -> list[Check]:
    return [
        Check("hilbert_involution", 1e-5, hilbert_involution_error, "H0(H0 f) = -f, Gaussian"),
        Check("hilbert_routes", 1e-3, hilbert_routes_error, "spectral vs product-integration H0"),
        Check("conj_semigroup", 1e-5, conj_semigroup_error, "Q_s(P_t f) = Q_(t+s) f, Gaussian"),
        Check("kober_involution", 1e-4, kober_involution_error, "H(H f) = -f + P_1 f(0), square-root weight"),
        Check("poisson_hilbert", 1e-4, poisson_hilbert_error, "H(P_t Omega) = Q~_t Omega + C_t"),
        Check("cauchy_ratio", 0.1, cauchy_ratio_error, "Q~_t f Cauchy as t -> 0 (halving ratio)"),
        Check("cauchy_limit", 1e-2, cauchy_limit_error, "Q~_t f -> H f at t = 1e-3"),
    ] + closed_form_checks()


def run_checks(checks: Sequence[Check], tolerances: Optional[dict] = None,
               tol_all: Optional[float] = None) -> list[CheckResult]:
    tolerances = tolerances or {}
    out = []
    for c in checks:
        tol = tol_all if tol_all is not None else tolerances.get(c.name, c.tol)
        t0 = time.perf_counter()
        try:
            err = float(c.run())
        except Exception as exc:  # reported as a failure, not raised
            err = float("nan")
            desc = f"{c.description} [{type(exc).__name__}: {exc}]"
        else:
            desc = c.description
        out.append(CheckResult(c.name, err, float(tol), time.perf_counter() - t0, desc))
    return out
