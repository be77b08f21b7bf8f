"""Hilbert, Poisson and conjugate Poisson transforms on uniform grids.

All quadratures integrate the exact kernel against the piecewise-linear
interpolant of the samples (product integration), so the rules stay
second-order accurate for any smoothing height, including heights far below
the grid step.  Contributions from outside the grid come from a declared
tail envelope and are integrated numerically after the substitution
``y = b + b0 (u^-q - 1)``.

The Kober-modified transforms add ``y/(1+y^2)`` to the kernel so that inputs
only need to be integrable against ``(1+x^2)^-1``; the constant part of the
kernel is integrated on the grid by the trapezoid rule and the tail is always
integrated with the combined kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import GrowthError, TailError
from .sampled import Grid, SampledFunction, fourier, inverse_fourier, trapezoid_weights


class GrowthClass(str, Enum):
    INV1 = "integrable_against_x^-1"
    INV2 = "integrable_against_x^-2"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class TailTerm:
    """One term ``coef * |y|^power * log(|y|)^logpower`` of a tail model."""

    coef: complex
    power: float
    logpower: int = 0

    def __call__(self, ay: np.ndarray) -> np.ndarray:
        out = self.coef * ay**self.power
        if self.logpower:
            out = out * np.log(ay) ** self.logpower
        return out


@dataclass(frozen=True)
class Envelope:
    """Tail model of a function on each side of the grid.

    ``trusted`` marks models that are exact asymptotics supplied by the
    caller; only untrusted models are subject to the tail-size guard.
    """

    left: tuple = ()
    right: tuple = ()
    trusted: bool = False

    @classmethod
    def zero(cls) -> "Envelope":
        return cls((), (), True)

    @classmethod
    def power(cls, c_left: complex, p_left: float, c_right: complex, p_right: float,
              trusted: bool = False) -> "Envelope":
        left = (TailTerm(c_left, p_left),) if c_left else ()
        right = (TailTerm(c_right, p_right),) if c_right else ()
        return cls(left, right, trusted)

    @classmethod
    def fit(cls, f: SampledFunction, powers: Sequence = (0.0,),
            fraction: float = 0.1) -> "Envelope":
        """Least-squares fit of the given (power, logpower) terms on each outer tail."""
        terms = [p if isinstance(p, tuple) else (float(p), 0) for p in powers]
        x, v = f.x, f.values
        n = len(x)
        m = max(3, int(fraction * n / 2))
        sides = []
        for idx in (np.arange(m), np.arange(n - m, n)):
            ay = np.abs(x[idx])
            basis = np.stack([TailTerm(1.0, p, q)(ay) for p, q in terms], axis=1)
            coef, *_ = np.linalg.lstsq(basis, v[idx], rcond=None)
            coef = coef if np.iscomplexobj(v) else coef.real
            sides.append(tuple(TailTerm(c, p, q) for c, (p, q) in zip(coef, terms)))
        return cls(sides[0], sides[1], False)

    def side(self, which: str) -> tuple:
        return self.left if which == "left" else self.right

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, float)
        out = np.zeros(y.shape, dtype=complex)
        ay = np.abs(y)
        for terms, mask in ((self.left, y < 0), (self.right, y >= 0)):
            for term in terms:
                out[mask] += term(ay[mask])
        if not np.iscomplexobj(self._coefs()):
            return out.real
        return out

    def _coefs(self):
        return np.array([t.coef for t in self.left + self.right] or [0.0])

    def max_power(self, which: Optional[str] = None) -> float:
        terms = self.left + self.right if which is None else self.side(which)
        return max((t.power for t in terms), default=-np.inf)

    def is_zero(self) -> bool:
        return not self.left and not self.right


_CLASS_LIMIT = {GrowthClass.INV1: 0.0, GrowthClass.INV2: 1.0, GrowthClass.BOUNDED: 0.0}


@dataclass(frozen=True)
class TransformInput:
    """A sampled function with its declared growth class and tail envelope."""

    f: SampledFunction
    growth_class: GrowthClass = GrowthClass.INV1
    envelope: Envelope = field(default_factory=Envelope.zero)
    validate: bool = True
    rtol: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "growth_class", GrowthClass(self.growth_class))
        if self.validate:
            self.check()

    def check(self):
        limit = _CLASS_LIMIT[self.growth_class]
        for t in self.envelope.left + self.envelope.right:
            if self.growth_class is GrowthClass.BOUNDED:
                bad = t.power > 0 or (t.power == 0 and t.logpower > 0)
            else:
                bad = t.power >= limit
            if bad and t.coef != 0:
                raise GrowthError(
                    f"envelope term |y|^{t.power} log^{t.logpower} is incompatible "
                    f"with growth class {self.growth_class.value}")
        x, v = self.f.x, np.abs(self.f.values)
        n = len(x)
        m = max(1, n // 20)
        idx = np.r_[0:m, n - m:n]
        env = np.abs(self.envelope(x[idx]))
        atol = 1e-8 * v.max() + 1e-300
        excess = v[idx] - (env * (1 + self.rtol) + atol)
        if np.any(excess > 0):
            j = idx[np.argmax(excess)]
            raise GrowthError(
                f"samples exceed the declared envelope at x={x[j]:.6g}: "
                f"|f|={v[j]:.6g} vs envelope {abs(self.envelope(np.array([x[j]]))[0]):.6g}")

    def require(self, *classes: GrowthClass):
        if self.growth_class not in classes:
            raise GrowthError(
                f"operation needs growth class in {[c.value for c in classes]}, "
                f"got {self.growth_class.value}")


def as_input(f, growth_class=GrowthClass.INV1, envelope=None, **kw) -> TransformInput:
    if isinstance(f, TransformInput):
        return f
    return TransformInput(f, growth_class, envelope or Envelope.zero(), **kw)


# ---------------------------------------------------------------------------
# kernels: value, first and second antiderivatives, second derivative
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Kernel:
    K: Callable
    K1: Callable
    K2: Callable
    Kdd: Callable
    decay: float  # kernel ~ |u|^-decay at infinity


def _log_abs(u):
    return np.log(np.maximum(np.abs(u), 1e-300))


def _hilbert_kernel() -> _Kernel:
    ip = 1.0 / np.pi
    return _Kernel(
        K=lambda u: ip / u,
        K1=lambda u: ip * _log_abs(u),
        K2=lambda u: ip * (u * _log_abs(u) - u),
        Kdd=lambda u: ip * 2.0 / u**3,
        decay=1.0,
    )


def _poisson_kernel(t: float) -> _Kernel:
    ip = 1.0 / np.pi
    return _Kernel(
        K=lambda u: ip * t / (u * u + t * t),
        K1=lambda u: ip * np.arctan(u / t),
        K2=lambda u: ip * (u * np.arctan(u / t) - 0.5 * t * np.log(u * u + t * t)),
        Kdd=lambda u: ip * t * (6 * u * u - 2 * t * t) / (u * u + t * t) ** 3,
        decay=2.0,
    )


def _conj_kernel(t: float) -> _Kernel:
    ip = 1.0 / np.pi
    return _Kernel(
        K=lambda u: ip * u / (u * u + t * t),
        K1=lambda u: 0.5 * ip * np.log(u * u + t * t),
        K2=lambda u: 0.5 * ip * (u * np.log(u * u + t * t) - 2 * u + 2 * t * np.arctan(u / t)),
        Kdd=lambda u: ip * (2 * u**3 - 6 * u * t * t) / (u * u + t * t) ** 3,
        decay=1.0,
    )


_FAR = 20


def _hat_weights(kern: _Kernel, h: float, n: int) -> np.ndarray:
    """Weights W(d) = int hat_0(y) K(d h - y) dy for d = -(n-1)..(n-1)."""
    d = np.arange(-(n - 1), n, dtype=float)
    c = d * h
    W = np.empty_like(c)
    near = np.abs(d) <= _FAR
    cn = c[near]
    with np.errstate(divide="ignore", invalid="ignore"):
        W[near] = (kern.K2(cn + h) - 2 * kern.K2(cn) + kern.K2(cn - h)) / h
        cf = c[~near]
        W[~near] = h * kern.K(cf) + h**3 / 12.0 * kern.Kdd(cf)
    return W


def _edge_pieces(kern: _Kernel, h: float, c_left: np.ndarray, c_right: np.ndarray):
    """Parts of the first/last hat functions lying outside the grid."""
    R = -kern.K1(c_left) + (kern.K2(c_left + h) - kern.K2(c_left)) / h
    F = kern.K1(c_right) - (kern.K2(c_right) - kern.K2(c_right - h)) / h
    return R, F


def _grid_part(kern: _Kernel, f: SampledFunction) -> np.ndarray:
    g = f.grid
    n, h = g.count, g.step
    W = _hat_weights(kern, h, n)
    conv = fftconvolve(f.values, W)[n - 1:2 * n - 1]
    x = g.points
    R, F = _edge_pieces(kern, h, x - g.x_min, x - g.x_max)
    return conv - f.values[0] * R - f.values[-1] * F


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------

_U_BREAKS = np.array([0.0, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.03, 0.1, 0.3, 0.6, 1.0])
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def _panels(a, b, gx, gw):
    a, b = np.asarray(a, float), np.asarray(b, float)
    nodes = (0.5 * (b - a)[:, None] * gx[None, :] + 0.5 * (b + a)[:, None]).ravel()
    wts = (0.5 * (b - a)[:, None] * gw[None, :]).ravel()
    return nodes, wts


def _tail_nodes(start: float, direction: int, q: float, s_min: float):
    """Nodes for int over y = start + direction*s, s in (0, inf).

    The first stretch ``s < b0`` uses geometrically graded panels so kernels
    peaked near the grid edge are resolved; the rest uses
    ``s = b0 u^-q`` on (0, 1].
    """
    b0 = max(abs(start), 1.0)
    edges = [0.0]
    v = s_min
    while v < b0:
        edges.append(v)
        v *= 2.0
    edges.append(b0)
    edges = np.array(edges)
    s_near, w_near = _panels(edges[:-1], edges[1:], _GL8_X, _GL8_W)
    u, wu = _panels(_U_BREAKS[:-1], _U_BREAKS[1:], _GL_X, _GL_W)
    s_far = b0 * u ** (-q)
    w_far = b0 * q * u ** (-q - 1.0) * wu
    s = np.concatenate([s_near, s_far])
    return start + direction * s, np.concatenate([w_near, w_far])


def _tail(x: np.ndarray, env: Envelope, kernel: Callable, side: str, start: float,
          decay: float, s_min: float = 1e-3, chunk: int = 2048) -> np.ndarray:
    terms = env.side(side)
    if not terms:
        return np.zeros(x.shape)
    p = max(t.power for t in terms)
    q = max(1.0, 1.0 / max(decay - 1.0 - p, 1e-3))
    direction = 1 if side == "right" else -1
    y, dy = _tail_nodes(start, direction, q, s_min)
    fy = np.zeros(y.shape, dtype=complex)
    for t in terms:
        fy += t(np.abs(y))
    wts = fy * dy
    if not np.iscomplexobj(np.array([t.coef for t in terms])):
        wts = wts.real
    out = np.empty(x.shape, dtype=wts.dtype)
    for i in range(0, len(x), chunk):
        xx = x[i:i + chunk, None]
        out[i:i + chunk] = kernel(xx, y[None, :]) @ wts
    return out


def _both_tails(tf: TransformInput, kernel: Callable, decay: float) -> np.ndarray:
    g = tf.f.grid
    x = g.points
    env = tf.envelope
    return (_tail(x, env, kernel, "left", g.x_min, decay, 0.5 * g.step)
            + _tail(x, env, kernel, "right", g.x_max, decay, 0.5 * g.step))


def _guard(result: np.ndarray, tail: np.ndarray, tf: TransformInput, max_tail_fraction: float):
    if tf.envelope.trusted or tf.envelope.is_zero():
        return
    mask = tf.f.grid.interior_mask()
    mag = np.max(np.abs(result[mask]))
    tl = np.max(np.abs(tail[mask]))
    if mag > 0 and tl > max_tail_fraction * mag:
        raise TailError(
            f"tail correction {tl:.3e} exceeds {max_tail_fraction:.0%} of the "
            f"interior result magnitude {mag:.3e}; enlarge the grid")


def _kober_constant_part(f: SampledFunction) -> complex:
    y = f.x
    return np.dot(trapezoid_weights(f.grid), f.values * y / (1 + y * y)) / np.pi


def _wrap(tf: TransformInput, values: np.ndarray) -> SampledFunction:
    if not np.iscomplexobj(tf.f.values):
        values = np.real(values)
    return SampledFunction(tf.f.grid, values)


# ---------------------------------------------------------------------------
# public transforms
# ---------------------------------------------------------------------------

def hilbert0(f, route: str = "pv_quadrature", *, envelope: Optional[Envelope] = None,
             max_tail_fraction: float = 0.01, pad_factor: int = 8) -> SampledFunction:
    """Standard Hilbert transform ``(1/pi) pv int f(y)/(x-y) dy``.

    ``route="spectral"`` multiplies the zero-padded spectrum by
    ``-i sign(xi)``; ``route="pv_quadrature"`` uses product integration on
    the piecewise-linear interpolant, which pairs the offsets ``+-k*step``
    symmetrically around the singular sample.
    """
    tf = as_input(f, envelope=envelope)
    tf.require(GrowthClass.INV1)
    kern = _hilbert_kernel()
    tail = _both_tails(tf, lambda x, y: 1.0 / (np.pi * (x - y)), kern.decay)
    if route == "spectral":
        core = _spectral_hilbert(tf.f, pad_factor)
    elif route in ("pv", "pv_quadrature"):
        core = _grid_part(kern, tf.f)
    else:
        raise ValueError(f"unknown route {route!r}")
    out = core + tail
    _guard(out, tail, tf, max_tail_fraction)
    return _wrap(tf, out)


def _spectral_hilbert(f: SampledFunction, pad_factor: int) -> np.ndarray:
    n = f.grid.count
    m = 1 << int(np.ceil(np.log2(pad_factor * n)))
    start = (m - n) // 2
    vals = np.zeros(m, dtype=complex)
    vals[start:start + n] = f.values
    big = SampledFunction(Grid(f.grid.x_min - start * f.grid.step, f.grid.step, m), vals)
    F = fourier(big)
    xi = F.x
    mult = -1j * np.sign(xi)
    mult[0] = 0.0  # Nyquist bin
    back = inverse_fourier(F.with_values(F.values * mult))
    return back.values[start:start + n]


def poisson(f, t: float, *, envelope: Optional[Envelope] = None,
            growth_class: GrowthClass = GrowthClass.INV2,
            max_tail_fraction: float = 0.01) -> SampledFunction:
    """Poisson extension ``P_t * f`` with kernel ``t/(pi (x^2+t^2))``."""
    if t <= 0:
        raise ValueError("t must be positive")
    tf = as_input(f, growth_class, envelope)
    kern = _poisson_kernel(t)
    tail = _both_tails(tf, lambda x, y: kern.K(x - y), kern.decay)
    out = _grid_part(kern, tf.f) + tail
    _guard(out, tail, tf, max_tail_fraction)
    return _wrap(tf, out)


def conj_poisson(f, t: float, *, envelope: Optional[Envelope] = None,
                 max_tail_fraction: float = 0.01) -> SampledFunction:
    """Conjugate Poisson ``Q_t * f`` with kernel ``x/(pi (x^2+t^2))``."""
    if t <= 0:
        raise ValueError("t must be positive")
    tf = as_input(f, envelope=envelope)
    tf.require(GrowthClass.INV1)
    kern = _conj_kernel(t)
    tail = _both_tails(tf, lambda x, y: kern.K(x - y), kern.decay)
    out = _grid_part(kern, tf.f) + tail
    _guard(out, tail, tf, max_tail_fraction)
    return _wrap(tf, out)


def _kober_tail_kernel(base: Callable):
    return lambda x, y: base(x - y) + y / (np.pi * (1 + y * y))


def hilbert_kober(f, *, envelope: Optional[Envelope] = None,
                  growth_class: GrowthClass = GrowthClass.INV2,
                  max_tail_fraction: float = 0.01) -> SampledFunction:
    """Kober-modified Hilbert transform with kernel ``1/(x-y) + y/(y^2+1)``."""
    tf = as_input(f, growth_class, envelope)
    kern = _hilbert_kernel()
    tail = _both_tails(tf, _kober_tail_kernel(kern.K), 2.0)
    out = _grid_part(kern, tf.f) + _kober_constant_part(tf.f) + tail
    _guard(out, tail, tf, max_tail_fraction)
    return _wrap(tf, out)


def conj_poisson_kober(f, t: float, *, envelope: Optional[Envelope] = None,
                       growth_class: GrowthClass = GrowthClass.INV2,
                       max_tail_fraction: float = 0.01) -> SampledFunction:
    """Kober-modified conjugate Poisson transform."""
    if t <= 0:
        raise ValueError("t must be positive")
    tf = as_input(f, growth_class, envelope)
    kern = _conj_kernel(t)
    tail = _both_tails(tf, _kober_tail_kernel(kern.K), 2.0)
    out = _grid_part(kern, tf.f) + _kober_constant_part(tf.f) + tail
    _guard(out, tail, tf, max_tail_fraction)
    return _wrap(tf, out)


@dataclass(frozen=True)
class KoberConstant:
    value: float


def ct_kernel(y, t: float):
    return -y * t * (t + 2) / (np.pi * (y * y + 1) * (y * y + (t + 1) ** 2))


def ct_constant(f, t: float, *, envelope: Optional[Envelope] = None,
                growth_class: GrowthClass = GrowthClass.INV2,
                max_tail_fraction: float = 0.01) -> KoberConstant:
    """The constant ``C_t(f)`` linking ``H(P_t f)`` and the modified ``Q_t f``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    tf = as_input(f, growth_class, envelope)
    if t == 0:
        return KoberConstant(0.0)
    y = tf.f.x
    core = np.dot(trapezoid_weights(tf.f.grid), tf.f.values * ct_kernel(y, t))
    g = tf.f.grid
    x0 = np.zeros(1)
    kern = lambda x, yy: ct_kernel(yy, t) + 0 * x
    tail = (_tail(x0, tf.envelope, kern, "left", g.x_min, 3.0)
            + _tail(x0, tf.envelope, kern, "right", g.x_max, 3.0))[0]
    total = core + tail
    if not (tf.envelope.trusted or tf.envelope.is_zero()):
        if abs(tail) > max_tail_fraction * max(abs(total), 1e-300):
            raise TailError(f"C_t tail {abs(tail):.3e} exceeds {max_tail_fraction:.0%} of {abs(total):.3e}")
    val = total.real if not np.iscomplexobj(tf.f.values) else total
    return KoberConstant(float(np.real(val)) if np.isrealobj(val) else val)
