"""Uniform grids, sampled functions and whole-line Fourier transforms.

Convention: ``Ff(xi) = int exp(-2 pi i x xi) f(x) dx`` with inverse
``int exp(+2 pi i x xi) g(xi) dxi``.  The discrete transforms below are
Riemann sums of these integrals evaluated with the FFT; the phase factors
coming from a grid origin ``x_min != 0`` are applied explicitly so that the
result approximates the line transform rather than a torus transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import GridError, NonFiniteError

PAD_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``x_min + j*step`` for ``j = 0..count-1``."""

    x_min: float
    step: float
    count: int

    def __post_init__(self):
        if not np.isfinite(self.x_min) or not np.isfinite(self.step):
            raise GridError("grid parameters must be finite")
        if self.step <= 0:
            raise GridError(f"grid step must be positive, got {self.step}")
        if int(self.count) != self.count or self.count < 2:
            raise GridError(f"grid needs at least 2 points, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def from_range(cls, x_min: float, x_max: float, count: int) -> "Grid":
        if x_max <= x_min:
            raise GridError("x_max must exceed x_min")
        return cls(float(x_min), (x_max - x_min) / (count - 1), count)

    @classmethod
    def centered(cls, half_width: float, count: int) -> "Grid":
        return cls.from_range(-half_width, half_width, count)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.step * np.arange(self.count)

    @property
    def x_max(self) -> float:
        return self.x_min + self.step * (self.count - 1)

    def padded(self, count: int) -> "Grid":
        return replace(self, count=count)

    def interior_mask(self, fraction: float = 0.5) -> np.ndarray:
        """Boolean mask of the central ``fraction`` of the grid span."""
        c = 0.5 * (self.x_min + self.x_max)
        half = 0.5 * fraction * (self.x_max - self.x_min)
        return np.abs(self.points - c) <= half

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "step": self.step, "count": self.count}


@dataclass(frozen=True)
class FrequencyGrid(Grid):
    """Frequency-side grid.  ``origin`` remembers the spatial dual's x_min."""

    origin: float = 0.0

    @property
    def xi_min(self) -> float:
        return self.x_min

    @classmethod
    def dual_of(cls, grid: Grid) -> "FrequencyGrid":
        n = grid.count
        dxi = 1.0 / (n * grid.step)
        return cls(-0.5 * n * dxi if n % 2 == 0 else -(n - 1) / 2 * dxi, dxi, n, grid.x_min)

    def spatial_dual(self, x_min: Optional[float] = None) -> Grid:
        x0 = self.origin if x_min is None else x_min
        return Grid(x0, 1.0 / (self.count * self.step), self.count)


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a (real or complex) function on a uniform grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.dtype.kind not in "fc":
            v = v.astype(float)
        if v.shape != (self.grid.count,):
            raise GridError(f"expected {self.grid.count} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("sampled values contain NaN or Inf")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "SampledFunction":
        return cls(grid, fn(grid.points))

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        _check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        _check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c: complex) -> "SampledFunction":
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def norm2(self) -> float:
        return float(np.sqrt(self.grid.step * np.sum(np.abs(self.values) ** 2)))


def _check_same_grid(f: SampledFunction, g: SampledFunction):
    if f.grid != g.grid:
        raise GridError("sampled functions live on different grids")


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _pad_to_pow2(f: SampledFunction) -> SampledFunction:
    n = f.grid.count
    if _is_pow2(n):
        return f
    v = f.values
    peak = np.max(np.abs(v))
    ends = max(abs(v[0]), abs(v[-1]))
    if peak > 0 and ends >= PAD_TOLERANCE * peak:
        raise GridError(
            f"cannot zero-pad {n} samples: endpoint magnitude {ends:.3e} "
            f"is not below {PAD_TOLERANCE:g} x max|f| = {PAD_TOLERANCE * peak:.3e}"
        )
    m = 1 << int(np.ceil(np.log2(n)))
    out = np.zeros(m, dtype=v.dtype)
    out[:n] = v
    grid = f.grid.padded(m)
    return SampledFunction(grid, out)


def _check_decay(f: SampledFunction, decay_tol: Optional[float]):
    if decay_tol is None:
        return
    v = np.abs(f.values)
    peak = v.max()
    if peak > 0 and max(v[0], v[-1]) > decay_tol * peak:
        raise GridError(
            f"samples do not decay at the grid ends: {max(v[0], v[-1]):.3e} "
            f"> {decay_tol:g} x max|f|"
        )


def fourier(f: SampledFunction, *, decay_tol: Optional[float] = None,
            bandwidth: Optional[float] = None) -> SampledFunction:
    """Fourier transform ``int exp(-2 pi i x xi) f(x) dx`` on the dual grid.

    Parameters
    ----------
    f : SampledFunction
        Samples; padded with zeros to a power of two when needed.
    decay_tol : float, optional
        Reject inputs whose end samples exceed ``decay_tol * max|f|``.
    bandwidth : float, optional
        Highest frequency the caller needs; must not exceed the Nyquist
        frequency ``1/(2 step)``.

    Returns
    -------
    SampledFunction
        Spectrum on a :class:`FrequencyGrid` remembering the spatial origin.
    """
    nyquist = 0.5 / f.grid.step
    if bandwidth is not None and bandwidth > nyquist:
        raise GridError(f"requested bandwidth {bandwidth:g} exceeds the Nyquist frequency {nyquist:g}")
    _check_decay(f, decay_tol)
    f = _pad_to_pow2(f)
    g = f.grid
    fg = FrequencyGrid.dual_of(g)
    j = np.arange(g.count)
    xi = fg.points
    chirp = np.exp(-2j * np.pi * fg.x_min * (j * g.step))
    spec = g.step * np.exp(-2j * np.pi * g.x_min * xi) * np.fft.fft(f.values * chirp)
    return SampledFunction(fg, spec)


def inverse_fourier(g: SampledFunction, *, x_min: Optional[float] = None,
                    decay_tol: Optional[float] = None) -> SampledFunction:
    """Inverse transform ``int exp(+2 pi i x xi) g(xi) dxi``.

    The output origin defaults to the origin stored on a
    :class:`FrequencyGrid` (so round trips land on the original grid) and to
    a centred grid otherwise.
    """
    _check_decay(g, decay_tol)
    g = _pad_to_pow2(g)
    fg = g.grid
    n = fg.count
    if x_min is None:
        if isinstance(fg, FrequencyGrid):
            x_min = fg.origin
        else:
            x_min = -0.5 * n / (n * fg.step)
    h = 1.0 / (n * fg.step)
    x = x_min + h * np.arange(n)
    k = np.arange(n)
    pre = g.values * np.exp(2j * np.pi * x_min * (k * fg.step))
    vals = fg.step * n * np.exp(2j * np.pi * x * fg.x_min) * np.fft.ifft(pre)
    return SampledFunction(Grid(float(x_min), h, n), vals)


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.count, grid.step)
    w[0] = w[-1] = 0.5 * grid.step
    return w


def integrate(f: SampledFunction, *, decay_tol: Optional[float] = None) -> complex:
    """Trapezoid rule over the grid span."""
    _check_decay(f, decay_tol)
    val = np.dot(trapezoid_weights(f.grid), f.values)
    return complex(val) if np.iscomplexobj(val) else float(val)


@dataclass(frozen=True)
class LogIntegral:
    """Truncated logarithmic integral with its tail diagnostics."""

    value: float
    cutoff: float
    tail_estimate: float
    divergent: bool
    converged: bool
    tail_power: float


def _fit_tail_power(x: np.ndarray, logw: np.ndarray) -> tuple[float, float]:
    """Fit ``|log w| ~ c |x|^p`` on samples; returns (c, p)."""
    a = np.abs(logw)
    ok = (a > 1e-300) & (np.abs(x) > 1)
    if ok.sum() < 3:
        return 0.0, 0.0
    p, logc = np.polyfit(np.log(np.abs(x[ok])), np.log(a[ok]), 1)
    return float(np.exp(logc)), float(p)


def log_integral(omega: SampledFunction, cutoff: float, *,
                 envelope: Optional[tuple[float, float]] = None,
                 tol: float = 1e-3) -> LogIntegral:
    """Trapezoid value of ``int log(omega)/(1+x^2)`` over ``[-cutoff, cutoff]``.

    ``envelope = (c, p)`` declares ``|log omega(x)| <= c |x|^p`` for large
    ``|x|``; without it the pair is fitted on the outer 10% of samples.  The
    integral diverges iff ``p >= 1``.
    """
    v = np.asarray(omega.values)
    if np.iscomplexobj(v) or np.any(v <= 0):
        raise GridError("log_integral needs strictly positive samples")
    x = omega.x
    mask = np.abs(x) <= cutoff
    if mask.sum() < 2:
        raise GridError("cutoff leaves fewer than two samples")
    xs = x[mask]
    ys = np.log(v[mask]) / (1 + xs**2)
    value = float(np.trapezoid(ys, xs))
    if envelope is None:
        edge = np.abs(xs) >= 0.9 * np.abs(xs).max()
        c, p = _fit_tail_power(xs[edge], np.log(v[mask])[edge])
        if abs(p - 1) < 1e-6:  # least-squares noise on an exactly linear tail
            p = 1.0
    else:
        c, p = envelope
    a = min(cutoff, np.abs(xs).max())
    if c == 0:
        tail = 0.0
    elif p >= 1:
        tail = np.inf
    else:
        # 2 * int_a^inf c x^p / x^2 dx, both sides
        tail = 2 * c * a ** (p - 1) / (1 - p)
    return LogIntegral(value, float(cutoff), float(tail), bool(not np.isfinite(tail)),
                       bool(np.isfinite(tail) and abs(tail) <= tol), float(p))
