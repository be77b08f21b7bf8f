"""Log-Hölder weights, Poisson smoothing, and the square-root weight.

A weight is stored through its log ``Omega = -log(omega)``.  The square-root
weight ``Omega(x) = sqrt(2 pi x)`` for ``x > 0`` (zero otherwise) comes with
closed forms for its Poisson extension, its modified conjugate Poisson
transform and the derivative of ``H(P_t Omega)``; these serve both as fast
paths and as oracles for the numerical transforms.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

import numpy as np
from scipy import integrate as sp_integrate

from .errors import DegenerateWarning, QuadratureError
from .sampled import Grid, SampledFunction
from .transforms import (Envelope, GrowthClass, TailTerm, TransformInput, ct_kernel,
                         hilbert_kober, poisson)

SQRT_PI = np.sqrt(np.pi)
SQRT_2PI = np.sqrt(2 * np.pi)
SUP_CONST = SQRT_PI * 3**0.75 / 4  # sup|H(P_t Omega)'| * sqrt(t) for the square-root weight


@dataclass(frozen=True)
class ClosedForms:
    """Closed forms ``(t, x) -> value`` attached to a weight."""

    poisson_of_Omega: Callable
    conj_poisson_kober_of_Omega: Callable
    H_poisson_derivative: Callable
    ct_of_Omega: Optional[Callable] = None
    H_poisson_deriv_sup: Optional[Callable] = None


@dataclass(frozen=True)
class LogHolderWeight:
    """A weight ``omega = exp(-Omega)`` with Hölder data ``(K0, alpha)``.

    ``envelope`` is the tail model of ``Omega`` used by the transforms.
    """

    Omega: Callable[[np.ndarray], np.ndarray]
    K0: float
    alpha: float
    omega_bound: float = 1.0
    closed_forms: Optional[ClosedForms] = None
    envelope: Envelope = field(default_factory=Envelope.zero)
    name: str = "weight"
    descriptor: Optional[dict] = None

    def __post_init__(self):
        if self.K0 < 0:
            raise ValueError("K0 must be nonnegative")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    def omega(self, x) -> np.ndarray:
        return np.exp(-self.Omega(np.asarray(x, float)))

    def sample(self, grid: Grid) -> SampledFunction:
        return SampledFunction(grid, self.Omega(grid.points))

    def transform_input(self, grid: Grid) -> TransformInput:
        return TransformInput(self.sample(grid), GrowthClass.INV2, self.envelope)


@dataclass(frozen=True)
class HolderReport:
    max_ratio: float
    passed: bool
    worst_pair: tuple
    pairs: int
    span: float


def verify_holder(w: LogHolderWeight, pairs: int = 10_000, span: float = 100.0,
                  seed: int = 0) -> HolderReport:
    """Largest ratio ``(|dOmega| - 1e-9) / (K0 |dx|^alpha)`` over random pairs."""
    if pairs < 100:
        raise ValueError("need at least 100 pairs")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-span, span, pairs)
    y = rng.uniform(-span, span, pairs)
    diff = np.abs(w.Omega(x) - w.Omega(y)) - 1e-9
    bound = w.K0 * np.abs(x - y) ** w.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(diff <= 0, 0.0, np.where(bound > 0, diff / bound, np.inf))
    i = int(np.argmax(ratio))
    r = float(ratio[i])
    return HolderReport(r, bool(r <= 1 + 1e-9), (float(x[i]), float(y[i])), pairs, span)


def smoothing_time(K0: float, alpha: float, sigma_prime: float) -> float:
    """Height ``t`` at which the derivative bound ``K0 t^(alpha-1)/cos`` equals ``pi sigma'``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if sigma_prime <= 0:
        raise ValueError("sigma_prime must be positive")
    if K0 == 0:
        warnings.warn("K0 = 0: constant weight, smoothing time degenerates to 0",
                      DegenerateWarning, stacklevel=2)
        return 0.0
    base = K0 / (np.pi * sigma_prime * np.cos(np.pi * alpha / 2))
    return float(base ** (1.0 / (1.0 - alpha)))


def holder_smoothing_integral(alpha: float, t: float) -> float:
    """``int |y|^alpha / (t^2 + y^2) dy = pi t^(alpha-1) / cos(pi alpha / 2)``."""
    return float(np.pi * t ** (alpha - 1) / np.cos(np.pi * alpha / 2))


def error_bound(K0: float, alpha: float, t: float) -> float:
    return float(K0 * t**alpha / np.cos(np.pi * alpha / 2))


def deriv_bound(K0: float, alpha: float, t: float) -> float:
    return float(K0 * t ** (alpha - 1) / np.cos(np.pi * alpha / 2))


@dataclass(frozen=True)
class SmoothedWeight:
    """``P_t Omega`` with its certified and sampled bounds.

    ``poisson_fn``, ``hilbert_fn`` and ``hilbert_deriv_fn`` evaluate
    ``P_t Omega``, ``H(P_t Omega)`` and its derivative at arbitrary points
    (closed forms when available, interpolated samples otherwise).
    """

    t: float
    POmega: SampledFunction
    error_bound: float
    deriv_bound: float
    sampled_error_sup: float
    sampled_deriv_sup: float
    poisson_fn: Callable
    hilbert_fn: Callable
    hilbert_deriv_fn: Callable
    weight: LogHolderWeight
    closed_form: bool
    sharp_deriv_bound: Optional[float] = None

    @property
    def deriv_bound_used(self) -> float:
        """Sharp derivative bound when known, the Hölder bound otherwise."""
        return self.deriv_bound if self.sharp_deriv_bound is None else self.sharp_deriv_bound


def default_smoothing_grid(t: float, half_width: float = 400.0) -> Grid:
    h = min(1e-2, t / 64)
    L = max(half_width, 200 * t)
    n = int(round(2 * L / h)) + 1
    if n > 2**21 + 1:
        h = 2 * L / 2**21
        n = 2**21 + 1
    return Grid(-L, 2 * L / (n - 1), n)


def _interp(grid: Grid, values: np.ndarray) -> Callable:
    from scipy.interpolate import CubicSpline
    # no extrapolation: NaN outside the sampled range
    return CubicSpline(grid.points, values, extrapolate=False)


def _smoothed_envelope(env: Envelope, Pf: SampledFunction) -> Envelope:
    """Tail model of ``P_t Omega``: the leading terms of ``Omega`` plus fitted lower-order terms.

    The Poisson extension of ``c |y|^p`` agrees with it up to ``O(|x|^(p-2))``
    on the same side; what leaks to the other side decays, so a fitted
    ``|x|^0`` and ``|x|^-1/2`` correction covers both.
    """
    resid = Pf.with_values(Pf.values - env(Pf.x))
    corr = Envelope.fit(resid, (0.0, -0.5))
    return Envelope(env.left + corr.left, env.right + corr.right, env.trusted)


def smooth(w: LogHolderWeight, t: float, grid: Optional[Grid] = None,
           *, use_closed_forms: bool = True, rtol: float = 1e-3) -> SmoothedWeight:
    """Poisson-smooth the log-weight at height ``t`` and certify the bounds."""
    if t <= 0:
        raise ValueError("t must be positive")
    grid = grid or default_smoothing_grid(t)
    x = grid.points
    eb = error_bound(w.K0, w.alpha, t)
    db = deriv_bound(w.K0, w.alpha, t)
    Om = w.Omega(x)
    cf = w.closed_forms if use_closed_forms else None
    if cf is not None:
        P = cf.poisson_of_Omega(t, x)
        pfn = partial(cf.poisson_of_Omega, t)
        dfn = partial(cf.H_poisson_derivative, t)
        C = cf.ct_of_Omega(t) if cf.ct_of_Omega else 0.0
        hfn = lambda y: cf.conj_poisson_kober_of_Omega(t, y) + C
        dsamp = dfn(x)
        dsup = float(np.max(np.abs(dsamp)))
        if cf.H_poisson_deriv_sup is not None:
            dsup = max(dsup, float(cf.H_poisson_deriv_sup(t)))
    else:
        Pf = poisson(w.transform_input(grid), t)
        P = Pf.values
        env = _smoothed_envelope(w.envelope, Pf)
        H = hilbert_kober(TransformInput(Pf, GrowthClass.INV2, env, validate=False))
        d = np.gradient(H.values, grid.step)
        pfn = _interp(grid, P)
        hfn = _interp(grid, H.values)
        dfn = _interp(grid, d)
        interior = grid.interior_mask()
        dsup = float(np.max(np.abs(d[interior])))
    esup = float(np.max(np.abs(P - Om)))
    if w.K0 > 0:
        if esup > eb * (1 + rtol):
            raise QuadratureError(f"sampled sup|P_t Omega - Omega| = {esup:.6g} exceeds the "
                                  f"certified bound {eb:.6g}")
        if dsup > db * (1 + rtol):
            raise QuadratureError(f"sampled sup|H(P_t Omega)'| = {dsup:.6g} exceeds the "
                                  f"certified bound {db:.6g}")
    sharp = float(cf.H_poisson_deriv_sup(t)) if cf is not None and cf.H_poisson_deriv_sup else None
    return SmoothedWeight(t, SampledFunction(grid, P), eb, db, esup, dsup, pfn, hfn, dfn, w,
                          cf is not None, sharp)


# ---------------------------------------------------------------------------
# the square-root weight
# ---------------------------------------------------------------------------

def _omega_sqrt(scale: float, x):
    x = np.asarray(x, float)
    return scale * np.sqrt(2 * np.pi * np.maximum(x, 0.0))


def _p_sqrt(scale, t, x):
    x = np.asarray(x, float)
    return scale * np.sqrt(np.pi * (np.hypot(x, t) + x))


def _q_sqrt(scale, t, x):
    x = np.asarray(x, float)
    return scale * (-SQRT_PI + np.sqrt(np.pi * (np.hypot(x, t) - x)))


def _dh_sqrt(scale, t, x):
    x = np.asarray(x, float)
    r = np.hypot(x, t)
    return -scale * np.sqrt(np.pi * (r - x)) / (2 * r)


def _ct_sqrt_unit(t: float) -> float:
    if t == 0:
        return 0.0
    val, _ = sp_integrate.quad(lambda y: ct_kernel(y, t) * SQRT_2PI * np.sqrt(y), 0, np.inf,
                               limit=400, epsabs=1e-14, epsrel=1e-13)
    return float(val)


def _ct_sqrt(scale, t):
    return scale * _ct_sqrt_unit(t)


def _sup_sqrt(scale, t):
    return scale * SUP_CONST / np.sqrt(t)


def sqrt_weight(scale: float = 1.0, name: str = "particular") -> LogHolderWeight:
    cf = ClosedForms(
        poisson_of_Omega=partial(_p_sqrt, scale),
        conj_poisson_kober_of_Omega=partial(_q_sqrt, scale),
        H_poisson_derivative=partial(_dh_sqrt, scale),
        ct_of_Omega=partial(_ct_sqrt, scale),
        H_poisson_deriv_sup=partial(_sup_sqrt, scale),
    )
    env = Envelope((), (TailTerm(scale * SQRT_2PI, 0.5),), True)
    return LogHolderWeight(partial(_omega_sqrt, scale), scale * SQRT_2PI, 0.5, 1.0, cf, env, name)


def particular_weight() -> LogHolderWeight:
    """``omega(x) = exp(-sqrt(2 pi x))`` for ``x > 0`` and 1 otherwise."""
    w = sqrt_weight(1.0, "particular")
    return _with_descriptor(w, {"kind": "particular", "K0": w.K0, "alpha": w.alpha})


def epsilon_weight(epsilon: float) -> LogHolderWeight:
    """The weight with log ``(1+epsilon) sqrt(2 pi x)``."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    w = sqrt_weight(1.0 + epsilon, "particular_eps")
    return _with_descriptor(w, {"kind": "particular_eps", "epsilon": epsilon,
                                "K0": w.K0, "alpha": w.alpha})


def particular_smoothing_time(T: float, epsilon: float) -> float:
    """Height at which ``sup|H(P_t Omega)'| = pi T (1-epsilon)``."""
    if T <= 0 or not 0 < epsilon < 1:
        raise ValueError("need T > 0 and 0 < epsilon < 1")
    return float(3 * np.sqrt(3) / (16 * np.pi * (T * (1 - epsilon)) ** 2))


def sqrt_weight_smoothing_time(scale: float, sigma_prime: float) -> float:
    """Sharp height for the scaled square-root weight: sup derivative equals ``pi sigma'``."""
    return float((scale * SUP_CONST / (np.pi * sigma_prime)) ** 2)


# ---------------------------------------------------------------------------
# table weights and JSON descriptors
# ---------------------------------------------------------------------------

def table_weight(xs, Omegas, K0: float, alpha: float) -> LogHolderWeight:
    """Piecewise-linear log-weight, constant beyond the table."""
    xs = np.asarray(xs, float)
    Os = np.asarray(Omegas, float)
    order = np.argsort(xs)
    xs, Os = xs[order], Os[order]
    fn = partial(np.interp, xp=xs, fp=Os)
    env = Envelope((TailTerm(float(Os[0]), 0.0),) if Os[0] else (),
                   (TailTerm(float(Os[-1]), 0.0),) if Os[-1] else (), True)
    desc = {"kind": "table", "table": [[float(a), float(b)] for a, b in zip(xs, Os)],
            "K0": K0, "alpha": alpha}
    bound = float(np.exp(-Os.min()))
    return LogHolderWeight(lambda x: fn(np.asarray(x, float)), K0, alpha, max(bound, 1.0),
                           None, env, "table", desc)


def _with_descriptor(w: LogHolderWeight, desc: dict) -> LogHolderWeight:
    object.__setattr__(w, "descriptor", desc)
    return w


def weight_from_descriptor(desc: dict) -> LogHolderWeight:
    kind = desc.get("kind")
    if kind == "particular":
        return particular_weight()
    if kind == "particular_eps":
        return epsilon_weight(float(desc["epsilon"]))
    if kind == "table":
        tab = np.asarray(desc["table"], float)
        if tab.ndim != 2 or tab.shape[1] != 2:
            raise ValueError("table must be a list of [x, Omega] pairs")
        return table_weight(tab[:, 0], tab[:, 1], float(desc["K0"]), float(desc["alpha"]))
    raise ValueError(f"unknown weight kind {kind!r}")


def load_weight(path) -> LogHolderWeight:
    with open(path) as fh:
        return weight_from_descriptor(json.load(fh))
