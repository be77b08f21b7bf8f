"""Effective multipliers for log-Hölder weights.

Pipeline: smooth the log-weight at height ``t``, build the well-prepared
weight ``omega_tilde = exp(-(M + Omega_0))`` with
``Omega_0 = P_t Omega + 3 log(x^2 + A^2)``, ``s_0 = pi sigma x + H(Omega_0)``
and ``M = H(s)`` where ``s`` is the sawtooth ``s_0 - pi k - pi/2``, then take
``psi`` as the inverse Fourier transform of the outer-type spectrum
``omega_tilde * exp(-i theta)``.

``M`` is evaluated exactly (up to quadrature of a smooth function) from the
zeros of ``s_0 - j pi``: on each interval between consecutive zeros ``s`` is
``s_0`` minus a constant, so the Hilbert transform splits into a smooth
principal-value integral plus explicit logarithms at the jumps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConstructionError, PreconditionError, RegimeWarning
from .sampled import Grid, SampledFunction, inverse_fourier
from .transforms import Envelope, GrowthClass, TransformInput, hilbert_kober
from .weights import (LogHolderWeight, SmoothedWeight, epsilon_weight, particular_weight,
                      particular_smoothing_time, smooth, smoothing_time,
                      default_smoothing_grid)

REGIME_LIMIT = 0.1
M_BOUND_MID = 0.5 + 3 * np.log(3.0)
LOWER_INTERVALS = {"right": (0.5, 1.0), "left": (-1.0, -0.5)}
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def kober_prefactor(sigma: float, sigma_prime: float) -> float:
    """The constant ``A = 6 / (pi (sigma - sigma'))``."""
    return 6.0 / (np.pi * (sigma - sigma_prime))


def certified_exponent(K0: float, alpha: float, sigma_prime: float) -> float:
    c = np.cos(np.pi * alpha / 2)
    return float((K0 / c) ** (1 / (1 - alpha)) * (1 / (np.pi * sigma_prime)) ** (alpha / (1 - alpha)))


@dataclass(frozen=True)
class MultiplierRequest:
    sigma: float
    sigma_prime: float
    weight: LogHolderWeight
    strict: bool = False

    def __post_init__(self):
        if not 0 < self.sigma_prime < self.sigma:
            raise PreconditionError(
                f"need 0 < sigma' < sigma, got sigma={self.sigma}, sigma'={self.sigma_prime}")
        if self.sigma >= REGIME_LIMIT:
            if self.strict:
                raise PreconditionError(f"sigma = {self.sigma} outside the proven range sigma < 1/10")
            warnings.warn(self.regime_warning, RegimeWarning, stacklevel=3)

    @property
    def regime_warning(self) -> Optional[str]:
        if self.sigma >= REGIME_LIMIT:
            return (f"sigma = {self.sigma:g} >= 1/10: outside the proven range; "
                    "bounds are verified a posteriori only")
        return None


class Atomization:
    """Zeros of ``s_0 - j pi`` on ``[-R, R]`` and the exact ``H(s)``.

    Parameters
    ----------
    sigma : float
        Slope of the linear part of ``s_0``.
    h, dh : callable
        ``H(Omega_0)`` and its derivative.
    R : float
        Half-width of the window outside of which ``s`` is set to zero.
    scale : float
        Smallest length scale of ``h`` (used to grade the quadrature panels).
    """

    def __init__(self, sigma: float, h: Callable, dh: Callable, R: float, scale: float):
        self.sigma = float(sigma)
        self.h = h
        self.dh = dh
        self.R = float(R)
        J0 = int(np.ceil(self.s0(np.array([-R]))[0] / np.pi))
        J1 = int(np.floor(self.s0(np.array([R]))[0] / np.pi))
        if J1 - J0 < 2:
            raise ConstructionError("window too small: fewer than two phase jumps")
        self.J0, self.J1 = J0, J1
        js = np.arange(J0, J1 + 1)
        lo = np.full(js.shape, -R)
        hi = np.full(js.shape, R)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            below = self.s0(mid) < js * np.pi
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        self.zeros = 0.5 * (lo + hi)
        a, b = self.zeros[0], self.zeros[-1]
        self.a, self.b = a, b
        # graded panels for the smooth principal-value part
        base = scale / 8
        g = [0.0]
        v = base
        while v < max(-a, b):
            g.append(v)
            v *= 1.4
        g = np.array(g)
        bp = np.unique(np.concatenate([-g, g, [a, b]]))
        bp = bp[(bp >= a) & (bp <= b)]
        p, q = bp[:-1], bp[1:]
        self._ys = (0.5 * (q - p)[:, None] * _GL_X + 0.5 * (q + p)[:, None]).ravel()
        self._ws = (0.5 * (q - p)[:, None] * _GL_W).ravel()
        self._hy = h(self._ys)
        # per-jump panels: Kober constant and P_1(s)(0)
        pa, pb = self.zeros[:-1], self.zeros[1:]
        yy = 0.5 * (pb - pa)[:, None] * _GL_X + 0.5 * (pb + pa)[:, None]
        ww = 0.5 * (pb - pa)[:, None] * _GL_W
        sv = self.s0(yy) - np.pi * (js[:-1, None] + 0.5)
        self.kober_s = float(np.sum(sv * yy / (1 + yy * yy) * ww))
        self.p1_s = float(np.sum(sv / (1 + yy * yy) * ww) / np.pi)
        self._c_first = np.pi * (J0 + 0.5)
        self._c_last = np.pi * (J1 - 1 + 0.5)

    @property
    def jump_count(self) -> int:
        return len(self.zeros)

    def s0(self, x):
        x = np.asarray(x, float)
        return np.pi * self.sigma * x + self.h(x)

    def k(self, x) -> np.ndarray:
        """``floor(s_0(x) / pi)`` read off the precomputed zeros."""
        x = np.asarray(x, float)
        return np.searchsorted(self.zeros, x, side="right") - 1 + self.J0

    def s(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        val = self.s0(x) - np.pi * self.k(x) - np.pi / 2
        inside = (x >= self.a) & (x < self.b)
        return np.where(inside, val, 0.0)

    def _smooth_pv(self, x: np.ndarray, chunk: int = 512) -> np.ndarray:
        out = np.empty_like(x)
        ys, ws, hy = self._ys, self._ws, self._hy
        for i in range(0, len(x), chunk):
            xx = x[i:i + chunk, None]
            d = xx - ys[None, :]
            hx = self.h(xx)
            with np.errstate(divide="ignore", invalid="ignore"):
                q = (hy[None, :] - hx) / d
            tiny = np.abs(d) <= 1e-12 * (1 + np.abs(xx))
            if tiny.any():
                q = np.where(tiny, -self.dh(xx) + 0 * d, q)
            out[i:i + chunk] = q @ ws
        return out

    def _log_sum(self, x: np.ndarray, chunk: int = 256) -> np.ndarray:
        inner = self.zeros[1:-1]
        out = np.empty_like(x)
        for i in range(0, len(x), chunk):
            d = np.abs(x[i:i + chunk, None] - inner[None, :])
            out[i:i + chunk] = np.log(np.maximum(d, 1e-300)).sum(axis=1)
        return out

    def M(self, x) -> np.ndarray:
        """Kober-modified Hilbert transform of ``s``."""
        x = np.atleast_1d(np.asarray(x, float))
        sx = self.s0(x)
        a, b = self.a, self.b
        with np.errstate(divide="ignore"):
            la = np.log(np.maximum(np.abs(x - a), 1e-300))
            lb = np.log(np.maximum(np.abs(x - b), 1e-300))
        val = (self._smooth_pv(x) + (sx - self._c_first) * la - (sx - self._c_last) * lb
               - np.pi * self._log_sum(x) + self.kober_s - np.pi * self.sigma * (b - a))
        return val / np.pi

    def theta(self, x) -> np.ndarray:
        """Exact ``H(M + Omega_0) = -s + P_1(s)(0) + H(Omega_0)``."""
        x = np.asarray(x, float)
        return self.h(x) + self.p1_s - self.s(x)


@dataclass
class WellPreparedWeight:
    """Intermediate objects of the construction, sampled on ``grid``."""

    request: MultiplierRequest
    smoothed: SmoothedWeight
    A: float
    grid: Grid
    omega0: SampledFunction
    s0: SampledFunction
    k: SampledFunction
    s: SampledFunction
    M: SampledFunction
    omega_tilde: SampledFunction
    jumps: np.ndarray
    atoms: Atomization
    diagnostics: dict = field(default_factory=dict)

    @property
    def sigma(self) -> float:
        return self.request.sigma

    @property
    def sigma_prime(self) -> float:
        return self.request.sigma_prime

    def Omega0(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return self.smoothed.poisson_fn(x) + 3 * np.log(x * x + self.A**2)

    def log_omega_tilde(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, float))
        return -(self.atoms.M(x) + self.Omega0(x))

    def lower_interval_check(self, samples: int = 401) -> dict:
        out = {}
        for name, (lo, hi) in LOWER_INTERVALS.items():
            xs = np.linspace(lo, hi, samples)[1:-1]
            m = np.abs(self.atoms.M(xs))
            out[name] = {"max_abs_M": float(m.max()), "ok": bool(m.max() <= M_BOUND_MID)}
        return out


def default_window(A: float, extra: float = 0.0) -> float:
    return 30.0 * A + extra


def multiplier_grid(time_window: float, half_width: float) -> Grid:
    """Spectral grid with step ``1/time_window`` covering ``[-half_width, half_width]``."""
    dx = 1.0 / time_window
    n = 1 << int(np.ceil(np.log2(2 * half_width / dx)))
    return Grid(-0.5 * n * dx, dx, n)


def prepare(req: MultiplierRequest, smoothed: SmoothedWeight, grid: Optional[Grid] = None,
            R: Optional[float] = None) -> WellPreparedWeight:
    """Build the well-prepared weight from ``P_t Omega``."""
    sigma, sigp = req.sigma, req.sigma_prime
    if smoothed.deriv_bound_used > np.pi * sigp * (1 + 1e-9):
        raise PreconditionError(
            f"sup|H(P_t Omega)'| = {smoothed.deriv_bound_used:.6g} exceeds pi sigma' = {np.pi * sigp:.6g}")
    A = kober_prefactor(sigma, sigp)
    if grid is None:
        grid = multiplier_grid(4 * sigma, default_window(A))
    x = grid.points
    if R is None:
        R = 1.5 * max(abs(grid.x_min), abs(grid.x_max)) + 500.0
    hfn, dfn = smoothed.hilbert_fn, smoothed.hilbert_deriv_fn

    def h(y):
        return hfn(y) - 6.0 * np.arctan(y / A)

    def dh(y):
        return dfn(y) - 6.0 * A / (y * y + A * A)

    if not np.all(np.isfinite(h(np.array([-R, R])))):
        raise ConstructionError(f"smoothed weight is not available on the window [-{R:g}, {R:g}]")
    atoms = Atomization(sigma, h, dh, R, min(smoothed.t, A))
    Om0 = smoothed.poisson_fn(x) + 3 * np.log(x * x + A * A)
    s0 = atoms.s0(x)
    k = atoms.k(x)
    s = atoms.s(x)
    M = atoms.M(x)
    logwt = -(M + Om0)
    diag = {}
    ds0 = np.diff(s0)
    diag["s0_monotone"] = bool(np.all(ds0 >= -1e-9 * np.abs(s0).max()))
    if not diag["s0_monotone"]:
        raise ConstructionError("s0 is not monotone on the grid (grid too coarse)")
    inside = (x >= atoms.a) & (x < atoms.b)
    diag["s_sup"] = float(np.max(np.abs(s)))
    diag["s_in_range"] = bool(diag["s_sup"] <= np.pi / 2 + 1e-9)
    lower = -0.5 - 3 * np.log(np.abs(x) + 2)
    core = np.abs(x) <= R / 1.5
    margin = M - lower
    diag["M_lower_margin"] = float(np.min(margin[core]))
    diag["M_lower_ok"] = bool(diag["M_lower_margin"] >= 0)
    # omega_tilde <= exp(-P_t Omega) / (x^2 + A^2)
    ratio = logwt + smoothed.poisson_fn(x) + np.log(x * x + A * A)
    diag["omega_tilde_ratio_max"] = float(np.exp(ratio.max()))
    diag["omega_tilde_bound_ok"] = bool(ratio.max() <= 1e-12)
    dhs = np.max(np.abs(dh(x)))
    diag["H_Omega0_deriv_sup"] = float(dhs)
    diag["H_Omega0_deriv_ok"] = bool(dhs <= np.pi * sigma * (1 + 1e-9))
    diag["jumps"] = atoms.jump_count
    diag["window_R"] = atoms.R
    diag["grid_inside_window"] = bool(inside.all())
    wp = WellPreparedWeight(
        req, smoothed, A, grid,
        SampledFunction(grid, np.exp(-Om0)),
        SampledFunction(grid, s0), SampledFunction(grid, k.astype(float)),
        SampledFunction(grid, s), SampledFunction(grid, M),
        SampledFunction(grid, np.exp(logwt)), atoms.zeros, atoms, diag)
    wp.diagnostics["lower_intervals"] = wp.lower_interval_check()
    return wp


@dataclass
class MultiplierResult:
    """The multiplier ``psi`` with its spectrum and verification data."""

    psi: SampledFunction
    spectrum: SampledFunction
    support_leakage: float
    upper_ok: bool
    lower_interval: str
    lower_constant: float
    certified_factor: float
    sigma: float
    sigma_prime: float
    t: float
    A: float
    direction: str
    prepared: WellPreparedWeight
    regime_warning: Optional[str] = None
    flags: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def m_shift(self) -> float:
        return -0.25 if self.lower_interval == "left" else 0.25

    def log_spectrum(self, x):
        """``(log|F psi(x)|, arg F psi(x))`` evaluated exactly at arbitrary ``x``."""
        x = np.atleast_1d(np.asarray(x, float))
        wp = self.prepared
        lm = wp.log_omega_tilde(x)
        th = wp.atoms.theta(x)
        phase = -th if self.direction == "inverse" else th
        return lm, phase

    def spectrum_at(self, x) -> np.ndarray:
        lm, ph = self.log_spectrum(x)
        return np.exp(lm + 1j * ph)

    def to_json(self) -> dict:
        out = {
            "sigma": self.sigma,
            "sigma_prime": self.sigma_prime,
            "t": self.t,
            "A": self.A,
            "support_leakage": self.support_leakage,
            "upper_ok": self.upper_ok,
            "lower_interval": self.lower_interval,
            "lower_constant": self.lower_constant,
            "certified_factor": self.certified_factor,
            "grid": self.spectrum.grid.to_dict(),
            "direction": self.direction,
            "flags": list(self.flags),
        }
        if self.regime_warning:
            out["regime_warning"] = self.regime_warning
        return out


def leakage(psi: SampledFunction, lo: float, hi: float) -> float:
    """Relative L2 mass of ``psi`` outside ``[lo, hi]``."""
    t = psi.x
    p2 = np.abs(psi.values) ** 2
    out = (t < lo) | (t > hi)
    tot = p2.sum()
    return float(np.sqrt(p2[out].sum() / tot)) if tot > 0 else float("nan")


def synthesize_psi(wp: WellPreparedWeight, sigma: Optional[float] = None, *,
                   upper: Optional[Callable] = None, lower_ref: Optional[Callable] = None,
                   certified_factor: float = 1.0, t_smooth: Optional[float] = None,
                   max_leak: float = 0.1) -> MultiplierResult:
    """Outer-type spectrum, its inverse Fourier transform and the bound checks.

    ``upper(x)`` is the requested majorant of ``|F psi|`` and ``lower_ref(x)``
    the reference profile against which the lower constant is measured.
    """
    sigma = wp.sigma if sigma is None else sigma
    x = wp.grid.points
    logwt = np.log(wp.omega_tilde.values)
    theta = wp.atoms.theta(x)
    G = wp.omega_tilde.values * np.exp(-1j * theta)
    cand = {}
    for name, spec in (("inverse", G), ("reflected", np.conj(G))):
        S = SampledFunction(wp.grid, spec)
        psi = inverse_fourier(S, x_min=-0.5 / wp.grid.step)
        cand[name] = (S, psi, leakage(psi, 0.0, sigma))
    direction = min(cand, key=lambda k: cand[k][2])
    S, psi, leak = cand[direction]
    if leak > max_leak:
        raise ConstructionError(
            f"both Fourier directions leak: inverse {cand['inverse'][2]:.3e}, "
            f"reflected {cand['reflected'][2]:.3e}")
    weight = wp.request.weight
    upper = upper or (lambda y: certified_factor * weight.omega(y))
    absS = np.abs(S.values)
    up = upper(x)
    upper_ok = bool(np.all(absS <= up * (1 + 1e-12)))
    lower_ref = lower_ref or (lambda y: weight.omega(y) / certified_factor)
    checks = wp.diagnostics["lower_intervals"]
    if checks["right"]["ok"]:
        interval = "right"
    elif checks["left"]["ok"]:
        interval = "left"
    else:
        interval = "none"
    res = MultiplierResult(psi, S, leak, upper_ok, interval, 0.0, certified_factor, sigma,
                           wp.sigma_prime, wp.smoothed.t if t_smooth is None else t_smooth,
                           wp.A, direction, wp, wp.request.regime_warning)
    consts = {}
    for name, (lo, hi) in LOWER_INTERVALS.items():
        xs = np.linspace(lo, hi, 401)[1:-1]
        lm, _ = res.log_spectrum(xs)
        consts[name] = float(np.min(np.exp(lm) / lower_ref(xs)))
    res.lower_constant = consts[interval] if interval != "none" else 0.0
    res.diagnostics.update({
        "leakage_inverse": cand["inverse"][2],
        "leakage_reflected": cand["reflected"][2],
        "lower_constants": consts,
        "modulus_error": float(np.max(np.abs(absS - wp.omega_tilde.values))),
        "upper_margin": float(np.min(np.log(up) - logwt)),
    })
    res.diagnostics.update(wp.diagnostics)
    if res.lower_constant <= 0:
        res.flags.append("lower_bound_not_verified")
    if not upper_ok:
        res.flags.append("upper_bound_violated")
    return res


def m_consistency(res: MultiplierResult, half_width: float = 2000.0, step: float = 1 / 256,
                  probe: float = 50.0, exclude: float = 1.0) -> dict:
    """Compare the exact ``M`` with a direct quadrature of ``H(s)``.

    The sawtooth is sampled on ``[-half_width, half_width]`` and transformed
    numerically; the comparison uses points of ``[-probe, probe]`` at least
    ``exclude`` away from a jump, where the discretization error of the jumps
    (first order in ``step``) is small.  The phase ``theta`` then follows
    from ``M`` by the inversion identity ``H(H s) = -s + P_1 s(0)``.
    """
    atoms = res.prepared.atoms
    g = Grid(-half_width, step, int(round(2 * half_width / step)) + 1)
    s = SampledFunction(g, atoms.s(g.points))
    H = hilbert_kober(TransformInput(s, GrowthClass.INV2, Envelope.zero(), validate=False))
    j0 = int(np.rint((-probe - g.x_min) / step))
    j = np.arange(j0, g.count - j0, max(1, int(round(0.025 / step))))
    xs = g.points[j]
    dist = np.min(np.abs(xs[:, None] - atoms.zeros[None, :]), axis=1)
    use = dist > exclude
    d = np.abs(H.values[j] - atoms.M(xs))[use]
    return {"max_deviation": float(d.max()), "median_deviation": float(np.median(d)),
            "points": int(use.sum())}


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def build_multiplier(req: MultiplierRequest, grid: Optional[Grid] = None,
                     smoothing_grid: Optional[Grid] = None) -> MultiplierResult:
    """Generic pipeline: smoothing height, smoothing, preparation, synthesis."""
    w = req.weight
    t = smoothing_time(w.K0, w.alpha, req.sigma_prime)
    flags = []
    if t == 0:
        raise PreconditionError("K0 = 0: constant weights need no smoothing; use a flat request")
    if grid is None:
        grid = multiplier_grid(4 * req.sigma, default_window(kober_prefactor(req.sigma, req.sigma_prime)))
    R = 1.5 * max(abs(grid.x_min), abs(grid.x_max)) + 500.0
    sw = smooth(w, t, smoothing_grid or default_smoothing_grid(t, 1.05 * R))
    expo = certified_exponent(w.K0, w.alpha, req.sigma_prime)
    factor = float(np.exp(expo))
    wp = prepare(req, sw, grid, R)
    degenerate = (req.sigma - req.sigma_prime) / req.sigma < 1e-3
    c6 = (req.sigma - req.sigma_prime) ** 6
    res = synthesize_psi(
        wp, upper=lambda y: factor * w.omega(y),
        lower_ref=lambda y: c6 * w.omega(y) / factor, certified_factor=factor)
    if degenerate:
        res.flags.append("degenerate_sigma_gap")
    res.flags.extend(flags)
    res.diagnostics["certified_exponent"] = expo
    return res


def particular_parameters(T: float, epsilon: float, variant: str = "eps") -> dict:
    """Support lengths, smoothing height and weight scale of the square-root pipelines.

    ``variant="plain"`` targets support ``[0, T]`` for the unscaled weight;
    ``variant="eps"`` targets support ``[0, T(1-eps)]`` for the weight scaled
    by ``1+eps``, with ``sigma' = T(1-eps)(1-eps^2)`` so that the sharp
    derivative bound ``(1+eps) sqrt(pi) 3^(3/4) / (4 sqrt t)`` equals
    ``pi sigma'`` at ``t = 3 sqrt3 / (16 pi (T (1-eps)^2)^2)``.
    """
    if T <= 0 or not 0 < epsilon < 1:
        raise PreconditionError("need T > 0 and 0 < epsilon < 1")
    if variant == "plain":
        return {"sigma": T, "sigma_prime": T * (1 - epsilon),
                "t": particular_smoothing_time(T, epsilon), "scale": 1.0,
                "exponent": 3**0.75 / (4 * T * (1 - epsilon))}
    if variant == "eps":
        return {"sigma": T * (1 - epsilon), "sigma_prime": T * (1 - epsilon) * (1 - epsilon**2),
                "t": particular_smoothing_time(T * (1 - epsilon), epsilon), "scale": 1.0 + epsilon,
                "exponent": 3**0.75 * (1 + epsilon) / (4 * T * (1 - epsilon) ** 2)}
    raise ValueError(f"unknown variant {variant!r}")


def build_multiplier_particular(T: float, epsilon: float, variant: str = "eps", *,
                                grid: Optional[Grid] = None, R: Optional[float] = None,
                                half_width: Optional[float] = None,
                                time_window: Optional[float] = None,
                                strict: bool = False) -> MultiplierResult:
    """Multiplier for the square-root weight with the sharp closed-form smoothing.

    The lower constant is measured against ``T^6 (1-eps)^6 omega exp(-e)``
    (plain) or ``T^6 omega_eps exp(-e)`` (eps), ``e`` being the exponent
    returned by :func:`particular_parameters`.
    """
    prm = particular_parameters(T, epsilon, variant)
    w = particular_weight() if variant == "plain" else epsilon_weight(epsilon)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        req = MultiplierRequest(prm["sigma"], prm["sigma_prime"], w, strict)
    t = prm["t"]
    sw = smooth(w, t, Grid(-50.0, 0.25, 401))
    A = kober_prefactor(prm["sigma"], prm["sigma_prime"])
    if grid is None:
        hw = half_width if half_width is not None else default_window(A)
        grid = multiplier_grid(time_window or 4 * T, hw)
    wp = prepare(req, sw, grid, R)
    expo = prm["exponent"]
    if variant == "plain":
        pref = T**6 * (1 - epsilon) ** 6
    else:
        pref = T**6
    factor = float(np.exp(sw.weight.closed_forms.poisson_of_Omega(t, np.array([0.0]))[0]))
    res = synthesize_psi(
        wp, upper=w.omega, lower_ref=lambda y: pref * w.omega(y) * np.exp(-expo),
        certified_factor=factor)
    res.diagnostics["exponent"] = expo
    res.diagnostics["variant"] = variant
    res.diagnostics["T"] = T
    res.diagnostics["epsilon"] = epsilon
    res.diagnostics["generic_certified_factor"] = float(np.exp(certified_exponent(w.K0, w.alpha, prm["sigma_prime"])))
    return res
