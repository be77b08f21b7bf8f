"""Mode ladders, the canonical fraction ``P_l`` and biorthogonal families.

The Dirichlet Laplacian on ``(0, 1)`` has eigenvalues ``lambda_k = k^2 pi^2``;
in the Fourier convention of :mod:`bmcost.sampled` the exponentials
``exp(i lambda_k t)`` correspond to the frequencies ``-mu_k`` with
``mu_k = pi k^2 / 2``.  ``P_l`` is the entire function of order 1/2 that
vanishes at ``-mu_k`` for ``k != l`` and equals 1 at ``-mu_l``:

    P_l(x) = 2 (-1)^(l+1) mu_l sinh(sqrt(2 pi x)) / (sqrt(2 pi x) (x + mu_l)).
"""

from __future__ import annotations

import csv
import io
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConstructionError, LogScaleWarning, TruncationError
from .multiplier import MultiplierResult, leakage
from .sampled import Grid, SampledFunction, inverse_fourier

SERIES_RADIUS = 1e-4
LOG_MAX = np.log(np.finfo(float).max) - 1.0


@dataclass(frozen=True)
class ModeLadder:
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("mode count must be a positive integer")

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.count + 1)

    @property
    def lambdas(self) -> np.ndarray:
        return (self.k * np.pi) ** 2

    @property
    def mus(self) -> np.ndarray:
        return np.pi * self.k**2 / 2


def mu(l: int) -> float:
    return np.pi * l * l / 2


# ---------------------------------------------------------------------------
# P_l
# ---------------------------------------------------------------------------

def _sinhc_series(z: np.ndarray) -> np.ndarray:
    """``sinh(sqrt z)/sqrt z`` for small ``|z|`` (either sign)."""
    out = np.ones_like(z)
    term = np.ones_like(z)
    for n in range(1, 6):
        term = term * z / ((2 * n) * (2 * n + 1))
        out = out + term
    return out


def _pl_series(l: int, x: np.ndarray) -> np.ndarray:
    m = mu(l)
    return 2 * (-1) ** (l + 1) * m * _sinhc_series(2 * np.pi * x) / (x + m)


def _pl_negative(l: int, x: np.ndarray) -> np.ndarray:
    # sin(w) = (-1)^(l+1) sin(l pi - w), and x + mu_l = (l pi - w)(l pi + w) / (2 pi)
    m = mu(l)
    w = np.sqrt(2 * np.pi * np.abs(x))
    d = l * np.pi - w
    return 4 * np.pi * m * np.sinc(d / np.pi) / (w * (w + l * np.pi))


def _log_pl_positive(l: int, x: np.ndarray) -> np.ndarray:
    m = mu(l)
    w = np.sqrt(2 * np.pi * x)
    lsh = w + np.log1p(-np.exp(-2 * w)) - np.log(2.0) - np.log(w)
    return np.log(2 * m) + lsh - np.log(x + m)


def log_Pl(l: int, x) -> tuple[np.ndarray, np.ndarray]:
    """``(log|P_l(x)|, sign P_l(x))`` without overflow."""
    x = np.atleast_1d(np.asarray(x, float))
    la = np.empty_like(x)
    sg = np.empty_like(x)
    small = np.abs(2 * np.pi * x) < SERIES_RADIUS
    pos = (x > 0) & ~small
    neg = (x < 0) & ~small
    if small.any():
        v = _pl_series(l, x[small])
        la[small], sg[small] = np.log(np.abs(v)), np.sign(v)
    if pos.any():
        la[pos] = _log_pl_positive(l, x[pos])
        sg[pos] = (-1.0) ** (l + 1)
    if neg.any():
        v = _pl_negative(l, x[neg])
        with np.errstate(divide="ignore"):
            la[neg] = np.log(np.abs(v))
        sg[neg] = np.sign(v)
    return la, sg


def eval_Pl(l: int, x) -> np.ndarray:
    """``P_l(x)``; values beyond double range come back as ``+-inf`` with a warning."""
    la, sg = log_Pl(l, x)
    big = la > LOG_MAX
    if big.any():
        warnings.warn(f"P_{l} overflows at {int(big.sum())} points; use log_Pl", LogScaleWarning,
                      stacklevel=2)
    with np.errstate(over="ignore"):
        return sg * np.exp(la)


# ---------------------------------------------------------------------------
# g_l
# ---------------------------------------------------------------------------

def sinc_factor(z, a: float) -> np.ndarray:
    """``i (exp(-2 pi i a z) - 1) / (2 pi a z)``, the spectrum of the box ``[0, a]`` / a."""
    z = np.asarray(z, float)
    return np.exp(-1j * np.pi * a * z) * np.sinc(a * z)


def _interp_spectrum(spec: SampledFunction, xi: np.ndarray,
                     envelope: Optional[Callable]) -> np.ndarray:
    xg = spec.x
    v = spec.values
    out = np.interp(xi, xg, v.real) + 1j * np.interp(xi, xg, v.imag)
    lo, hi = xi < xg[0], xi > xg[-1]
    if lo.any() or hi.any():
        if envelope is None:
            out[lo | hi] = 0.0
        else:
            out[lo] = envelope(xi[lo]) * np.exp(1j * np.angle(v[0]))
            out[hi] = envelope(xi[hi]) * np.exp(1j * np.angle(v[-1]))
    return out


def eval_gl(l: int, x, source, m_shift: float, epsilon: float, T: float, *,
            envelope: Optional[Callable] = None) -> np.ndarray:
    """``F psi(x - m + mu_l) / F psi(m)`` times the box factor of width ``epsilon T``.

    ``source`` is either a :class:`MultiplierResult` (evaluated exactly) or
    a sampled spectrum (interpolated linearly; ``envelope`` bounds the
    modulus beyond the sampled range, where the boundary phase is frozen).
    """
    x = np.atleast_1d(np.asarray(x, float))
    xi = x - m_shift + mu(l)
    box = sinc_factor(x + mu(l), epsilon * T)
    if isinstance(source, MultiplierResult):
        lm, pm = source.log_spectrum(np.array([m_shift]))
        lg, pg = source.log_spectrum(xi)
        return np.exp(lg - lm[0] + 1j * (pg - pm[0])) * box
    vals = source.values
    gm = _interp_spectrum(source, np.array([m_shift]), envelope)[0]
    if abs(gm) < 1e-12 * np.abs(vals).max():
        raise ConstructionError(f"|F psi(m)| = {abs(gm):.3e} is negligible: normalization impossible")
    return _interp_spectrum(source, xi, envelope) / gm * box


# ---------------------------------------------------------------------------
# family
# ---------------------------------------------------------------------------

@dataclass
class BiorthogonalFamily:
    T: float
    epsilon: float
    m_shift: float
    ladder: ModeLadder
    frequency_grid: Grid
    time_grid: Grid
    spectra: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    renormalization: np.ndarray = field(repr=False)
    leakage: np.ndarray = field(repr=False)
    end_ratio: np.ndarray = field(repr=False)
    multiplier: Optional[MultiplierResult] = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return self.ladder.count

    @property
    def t(self) -> np.ndarray:
        return self.time_grid.points

    def psi_l(self, l: int) -> SampledFunction:
        return SampledFunction(self.time_grid, self.psi[l - 1])

    def spectrum_l(self, l: int) -> SampledFunction:
        return SampledFunction(self.frequency_grid, self.spectra[l - 1])

    def window_weights(self) -> np.ndarray:
        """Trapezoid weights of ``[0, T]`` on the time grid (zero elsewhere)."""
        t = self.t
        dt = self.time_grid.step
        inside = (t >= -1e-12 * self.T) & (t <= self.T * (1 + 1e-12))
        w = np.where(inside, dt, 0.0)
        idx = np.flatnonzero(inside)
        w[idx[0]] *= 0.5
        w[idx[-1]] *= 0.5
        return w

    def to_json(self) -> dict:
        return {
            "T": self.T, "epsilon": self.epsilon, "K": self.K, "m_shift": self.m_shift,
            "time_grid": self.time_grid.to_dict(),
            "renormalization": [[float(z.real), float(z.imag)] for z in self.renormalization],
            "support_leakage": [float(v) for v in self.leakage],
            "psi": [{"l": l + 1, "re": self.psi[l].real.tolist(), "im": self.psi[l].imag.tolist()}
                    for l in range(self.K)],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["t"]
        for l in range(1, self.K + 1):
            head += [f"psi_{l}_re", f"psi_{l}_im"]
        w.writerow(head)
        for j, tj in enumerate(self.t):
            row = [f"{tj:.16e}"]
            for l in range(self.K):
                z = self.psi[l, j]
                row += [f"{z.real:.16e}", f"{z.imag:.16e}"]
            w.writerow(row)
        return buf.getvalue()


def choose_m_shift(mult: MultiplierResult) -> float:
    if mult.lower_interval == "none":
        raise ConstructionError("multiplier has no verified lower-bound interval")
    return -0.25 if mult.lower_interval == "left" else 0.25


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("BMCOST_WORKERS", "1")))
    except ValueError:
        return 1


def build_family(T: float, epsilon: float, K: int, mult: MultiplierResult, *,
                 end_tol: float = 1e-8, max_leak: float = 1e-3) -> BiorthogonalFamily:
    """Sample ``g_l P_l`` on the multiplier's grid and invert to ``psi_l``.

    The grid must resolve the time window ``[0, T]`` and the spectra must
    have decayed to ``end_tol`` of their peak at both ends.
    """
    ladder = ModeLadder(K)
    m = choose_m_shift(mult)
    grid = mult.spectrum.grid
    if 1.0 / grid.step < 2 * T:
        raise TruncationError("frequency step too coarse for the time window [0, T]")
    atoms = mult.prepared.atoms
    reach = max(abs(grid.x_min), abs(grid.x_max)) + mu(K) + 1
    if reach > atoms.R:
        raise TruncationError(f"shifted abscissas reach {reach:.1f} beyond the phase window {atoms.R:.1f}")
    x = grid.points
    n = np.arange(grid.count)
    t0 = -0.5 / grid.step

    def one(l):
        S = eval_gl(l, x, mult, m, epsilon, T)
        la, sg = log_Pl(l, x)
        S = S * sg * np.exp(np.minimum(la, LOG_MAX))
        ren = eval_gl(l, np.array([-mu(l)]), mult, m, epsilon, T)[0]
        S = S / ren
        a = np.abs(S)
        ends = max(a[: grid.count // 64].max(), a[-grid.count // 64:].max()) / a.max()
        psi = inverse_fourier(SampledFunction(grid, S), x_min=t0)
        return S, psi.values, ren, ends, psi.grid

    nw = _workers()
    if nw > 1:
        with ThreadPoolExecutor(nw) as ex:
            parts = list(ex.map(one, ladder.k))
    else:
        parts = [one(l) for l in ladder.k]
    spectra = np.array([p[0] for p in parts])
    psis = np.array([p[1] for p in parts])
    ren = np.array([p[2] for p in parts])
    ends = np.array([p[3] for p in parts])
    tgrid = parts[0][4]
    if ends.max() > end_tol:
        raise TruncationError(f"spectra not decayed at the grid ends: ratio {ends.max():.3e} > {end_tol:g}")
    leaks = np.array([leakage(SampledFunction(tgrid, p), 0.0, T) for p in psis])
    fam = BiorthogonalFamily(T, epsilon, m, ladder, grid, tgrid, spectra, psis, ren, leaks, ends, mult)
    if leaks.max() > max_leak:
        raise ConstructionError(f"family leaks outside [0, T]: {leaks.max():.3e}")
    return fam


def biorth_matrix(fam: BiorthogonalFamily, K_check: Optional[int] = None) -> tuple[np.ndarray, float]:
    """``M_kl = int_0^T exp(2 pi i mu_k t) psi_l(t) dt`` and ``max|M - I|``."""
    K = fam.K if K_check is None else K_check
    if K > fam.K:
        raise ValueError("K_check exceeds the family size")
    w = fam.window_weights()
    E = np.exp(2j * np.pi * np.outer(ModeLadder(K).mus, fam.t)) * w
    M = E @ fam.psi[:K].T
    return M, float(np.max(np.abs(M - np.eye(K))))


def frequency_oracle(fam: BiorthogonalFamily, K_check: Optional[int] = None) -> np.ndarray:
    """``(g_l P_l)(-mu_k)`` evaluated directly from the closed forms."""
    K = fam.K if K_check is None else K_check
    mult = fam.multiplier
    if mult is None:
        raise ValueError("family carries no multiplier")
    out = np.empty((K, K), complex)
    mus = ModeLadder(K).mus
    for l in range(1, K + 1):
        g = eval_gl(l, -mus, mult, fam.m_shift, fam.epsilon, fam.T) / fam.renormalization[l - 1]
        out[:, l - 1] = g * eval_Pl(l, -mus)
    return out


def matrix_to_csv(M: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "l", "re", "im"])
    for k in range(M.shape[0]):
        for l in range(M.shape[1]):
            w.writerow([k + 1, l + 1, f"{M[k, l].real:.16e}", f"{M[k, l].imag:.16e}"])
    return buf.getvalue()
