"""Boundary controls from a biorthogonal family and their cost.

The modal coefficients of the state evolve as
``c_k(T) = a_k exp(-i lambda_k T) + b_k int_0^T exp(-i lambda_k (T - s)) u(s) ds``
with ``b_k = sqrt 2`` for every mode, so ``u = -sum a_l psi_l / b_l`` drives
every active coefficient to zero when ``psi_l`` is biorthogonal to
``exp(i lambda_k t)`` on ``[0, T]``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BMCostError, GramError, GridError
from .moment import BiorthogonalFamily, ModeLadder, biorth_matrix, build_family
from .multiplier import build_multiplier_particular
from .sampled import SampledFunction

SCHEMA_VERSION = 1
CSV_COLUMNS = ("T", "epsilon", "K", "cost", "T_log_cost", "certified_ceiling", "biorth_dev",
               "support_leakage", "error")


def b_coefficient(k) -> np.ndarray | float:
    """Boundary observation coefficient of mode ``k``: ``sqrt 2`` for every mode."""
    k = np.asarray(k)
    if np.any(k < 1):
        raise ValueError("mode index must be >= 1")
    out = np.full(k.shape, np.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def certified_exponent(T: float, epsilon: float) -> float:
    return 3**0.75 * (1 + epsilon) / (4 * T * (1 - epsilon) ** 2)


def certified_ceiling(epsilon: float) -> float:
    """``T`` times :func:`certified_exponent`."""
    return 3**0.75 * (1 + epsilon) / (4 * (1 - epsilon) ** 2)


ASYMPTOTE = 3**0.75 / 4
PRIOR_BOUND = 1.5


@dataclass(frozen=True)
class InitialData:
    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, complex)
        if a.ndim != 1 or not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be a finite 1-d sequence")
        object.__setattr__(self, "a", a)

    @property
    def K(self) -> int:
        return len(self.a)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.a))

    @classmethod
    def mode(cls, k: int, K: int) -> "InitialData":
        a = np.zeros(K, complex)
        a[k - 1] = 1
        return cls(a)

    @classmethod
    def random(cls, K: int, seed: int = 0) -> "InitialData":
        rng = np.random.default_rng(seed)
        return cls(rng.standard_normal(K) + 1j * rng.standard_normal(K))


@dataclass
class ControlResult:
    u: SampledFunction
    residuals: np.ndarray
    cost: float
    certified_exponent: float
    flags: list = field(default_factory=list)
    spillover: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residuals))


def moment_residuals(u: SampledFunction, a: InitialData, fam: BiorthogonalFamily,
                     K_check: Optional[int] = None) -> np.ndarray:
    """Final modal coefficients ``c_k(T)`` for ``k <= K_check``; modes beyond ``a`` start at 0."""
    if u.grid != fam.time_grid:
        raise GridError("control and family live on different time grids")
    K = max(a.K, K_check or a.K)
    aa = np.zeros(K, complex)
    aa[: a.K] = a.a
    lam = ModeLadder(K).lambdas
    w = fam.window_weights()
    T = fam.T
    E = np.exp(-1j * np.outer(lam, T - fam.t)) * w
    return aa * np.exp(-1j * lam * T) + b_coefficient(np.arange(1, K + 1)) * (E @ u.values)


def synthesize_control(a: InitialData, fam: BiorthogonalFamily,
                       K_check: Optional[int] = None) -> ControlResult:
    """``u = -sum a_l psi_l / b_l``; residuals up to ``K_check``, spillover up to ``3 a.K``."""
    if a.K > fam.K:
        raise ValueError(f"initial data has {a.K} modes, family only {fam.K}")
    b = b_coefficient(np.arange(1, a.K + 1))
    u = -(a.a / b) @ fam.psi[: a.K]
    usf = SampledFunction(fam.time_grid, u)
    K_res = max(a.K, K_check or a.K)
    full = moment_residuals(usf, a, fam, max(K_res, 3 * a.K))
    res, spill = full[:K_res], full[K_res:]
    flags = []
    if a.norm == 0:
        cost = float("nan")
        flags.append("zero_initial_data")
    else:
        cost = float(np.sqrt(np.sum(np.abs(u) ** 2 * fam.window_weights())) / a.norm)
    return ControlResult(usf, res, cost, certified_exponent(fam.T, fam.epsilon), flags, spill)


def gram_matrix(fam: BiorthogonalFamily, K: Optional[int] = None) -> np.ndarray:
    K = fam.K if K is None else K
    w = fam.window_weights()
    P = fam.psi[:K] * np.sqrt(w)
    b = b_coefficient(np.arange(1, K + 1))
    return (P.conj() @ P.T) / np.outer(b, b)


def empirical_cost(fam: BiorthogonalFamily, K: Optional[int] = None) -> float:
    """Operator norm of ``a -> u`` on the first ``K`` modes."""
    G = gram_matrix(fam, K)
    if np.max(np.abs(G - G.conj().T)) > 1e-10 * np.abs(G).max():
        raise GramError("Gram matrix is not Hermitian")
    ev = np.linalg.eigvalsh(G)
    if ev[0] < -1e-10 * ev[-1]:
        raise GramError(f"Gram matrix has negative eigenvalue {ev[0]:.3e}")
    return float(np.sqrt(ev[-1]))


def power_iteration_cost(fam: BiorthogonalFamily, K: Optional[int] = None, iters: int = 500,
                         seed: int = 0) -> float:
    """Same operator norm by power iteration on ``a -> u`` and its adjoint."""
    K = fam.K if K is None else K
    w = fam.window_weights()
    b = b_coefficient(np.arange(1, K + 1))
    Psi = fam.psi[:K]
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(K) + 1j * rng.standard_normal(K)
    a /= np.linalg.norm(a)
    lam = 0.0
    for _ in range(iters):
        u = -(a / b) @ Psi
        v = -(Psi.conj() * w) @ u / b
        lam_new = np.linalg.norm(v)
        a = v / lam_new
        if abs(lam_new - lam) <= 1e-15 * lam_new:
            lam = lam_new
            break
        lam = lam_new
    return float(np.sqrt(lam))


def hilbert_form_matrix(N: int) -> np.ndarray:
    n = np.arange(N)
    return 1.0 / (1.0 + np.abs(n[:, None] - n[None, :]))


def hilbert_form_check(N: int) -> float:
    """Top eigenvalue of ``[1 / (1 + |n - m|)]_{n,m < N}``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return float(np.linalg.eigvalsh(hilbert_form_matrix(N))[-1])


def hilbert_form_threshold(N: int) -> float:
    """Envelope ``1 + 2 log N`` fixed by brute force for ``N <= 4096``."""
    return 1.0 + 2.0 * math.log(N)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class CostRow:
    T: float
    epsilon: float
    K: int
    cost: float = float("nan")
    T_log_cost: float = float("nan")
    certified_ceiling: float = float("nan")
    biorth_dev: float = float("nan")
    support_leakage: float = float("nan")
    error: str = ""

    def csv_fields(self) -> list:
        out = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            if isinstance(v, float):
                out.append(f"{v:.16e}")
            else:
                out.append(str(v))
        return out


@dataclass
class CostCurve:
    rows: list

    def to_json(self) -> dict:
        # JSON has no NaN: failed cells become null
        rows = [{k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                 for k, v in asdict(r).items()} for r in self.rows]
        return {"schema_version": SCHEMA_VERSION, "rows": rows}

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], float)


def log_cost(fam: BiorthogonalFamily, K: Optional[int] = None) -> float:
    """``log`` of :func:`empirical_cost`, computed from the rescaled Gram matrix."""
    G = gram_matrix(fam, K)
    s = np.abs(G).max()
    ev = np.linalg.eigvalsh(G / s)
    return 0.5 * (math.log(s) + math.log(ev[-1]))


def cost_row(T: float, epsilon: float, K: int) -> CostRow:
    row = CostRow(T, epsilon, K, certified_ceiling=certified_ceiling(epsilon))
    try:
        mult = build_multiplier_particular(T, epsilon, "eps")
        fam = build_family(T, epsilon, K, mult)
        _, dev = biorth_matrix(fam)
        lc = log_cost(fam)
        row.cost = math.exp(lc) if lc < 700 else float("inf")
        row.T_log_cost = T * lc
        row.biorth_dev = dev
        row.support_leakage = float(fam.leakage.max())
    except BMCostError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def _read_done(path) -> dict:
    done = {}
    if path and os.path.exists(path):
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                try:
                    done[float(rec["T"])] = rec
                except (KeyError, ValueError):
                    continue
    return done


def _row_from_csv(rec: dict) -> CostRow:
    return CostRow(float(rec["T"]), float(rec["epsilon"]), int(rec["K"]), float(rec["cost"]),
                   float(rec["T_log_cost"]), float(rec["certified_ceiling"]),
                   float(rec["biorth_dev"]), float(rec["support_leakage"]), rec.get("error", ""))


def cost_sweep(T_list: Sequence[float], epsilon: float, K: int = 15, *,
               csv_path: Optional[str] = None) -> CostCurve:
    """One row per ``T`` (strictly decreasing); rows are appended to ``csv_path`` as they finish.

    Rows already present in ``csv_path`` with matching ``epsilon`` and ``K``
    are reused, so an interrupted sweep resumes where it stopped.
    """
    T_list = [float(T) for T in T_list]
    if not T_list:
        raise ValueError("empty T list")
    if any(b >= a for a, b in zip(T_list, T_list[1:])):
        raise ValueError("T list must be strictly decreasing")
    done = _read_done(csv_path)
    fresh = csv_path is not None and not done
    if fresh:
        with open(csv_path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(CSV_COLUMNS)
    rows = []
    for T in T_list:
        rec = done.get(T)
        if rec is not None and float(rec["epsilon"]) == epsilon and int(rec["K"]) == K:
            rows.append(_row_from_csv(rec))
            continue
        row = cost_row(T, epsilon, K)
        rows.append(row)
        if csv_path is not None:
            with open(csv_path, "a", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerow(row.csv_fields())
    return CostCurve(rows)


def write_curve_json(curve: CostCurve, path) -> None:
    with open(path, "w") as fh:
        json.dump(curve.to_json(), fh, sort_keys=True, indent=1, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))
