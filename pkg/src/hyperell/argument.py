"""Arguments of L and P_K on the critical circle, and zero counting.

S(theta) = (1/pi) arg L(q^(-1/2) e(theta)) is evaluated with the right-limit
convention at zeros, so N(theta) = 2 g theta + S(theta) holds for every
theta in [0, 1] when no zero sits at theta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lfunction import LData, trace_data

INT_TOL = 1e-12


def _frac(x):
    """Fractional part, snapped to 0 within INT_TOL of an integer."""
    x = np.asarray(x, dtype=float)
    f = x - np.floor(x)
    return np.where((f < INT_TOL) | (f > 1 - INT_TOL), 0.0, f)


def sawtooth(x):
    """s(x) = {x} - 1/2 off the integers, 0 on them."""
    x = np.asarray(x, dtype=float)
    f = x - np.floor(x)
    on_int = (f < INT_TOL) | (f > 1 - INT_TOL)
    out = np.where(on_int, 0.0, f - 0.5)
    return float(out) if out.ndim == 0 else out


def sawtooth_right(x):
    """Right limit of the sawtooth: {x} - 1/2 everywhere, so -1/2 on the integers."""
    out = _frac(x) - 0.5
    return float(out) if np.ndim(out) == 0 else out


def dist_to_int(x):
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.round(x))


def _grid(theta):
    th = np.asarray(theta, dtype=float)
    return th, th.ndim == 0


def S_theta(ld: LData, theta, check: bool = True):
    """S(theta) = -sum_j s(theta - theta_j) taken as a right limit at zeros.

    With ``check`` the two-term form sum_j (s(-theta_j) - s(theta - theta_j))
    is evaluated as well and required to agree to 1e-10.
    """
    th, scalar = _grid(theta)
    tj = ld.theta_array()
    x = np.atleast_1d(th)[:, None] - tj[None, :]
    one = -np.sum(sawtooth_right(x), axis=1)
    if check:
        two = np.sum(sawtooth(-tj)) - np.sum(sawtooth_right(x), axis=1)
        if np.max(np.abs(one - two)) > 1e-10:
            raise ArithmeticError(f"S forms disagree by {np.max(np.abs(one - two)):.3g}")
    return float(one[0]) if scalar else one


def S_theta_midpoint(ld: LData, theta):
    """-sum_j s(theta - theta_j) with s(0) = 0: the average of the two one-sided limits at a zero."""
    th, scalar = _grid(theta)
    x = np.atleast_1d(th)[:, None] - ld.theta_array()[None, :]
    out = -np.sum(sawtooth(x), axis=1)
    return float(out[0]) if scalar else out


def sum_s_minus_theta(ld: LData) -> float:
    return float(np.sum(sawtooth(-ld.theta_array())))


def S_K_from_zeros(ld: LData, theta, K: int):
    """sum_j sum_{k<=K} sin(2 pi (theta - theta_j) k) / (pi k)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    th, scalar = _grid(theta)
    x = np.atleast_1d(th)[:, None] - ld.theta_array()[None, :]
    acc = np.zeros(x.shape[0])
    for k in range(1, K + 1):
        acc += np.sin(2 * np.pi * k * x).sum(axis=1) / (np.pi * k)
    return float(acc[0]) if scalar else acc


def S_K_from_primes(ld: LData, theta, K: int):
    """-(1/pi) Im sum_{k<=K} e(k theta) q^(-k/2) psi(k) / k; needs no zeros."""
    if K < 1:
        raise ValueError("K must be at least 1")
    th, scalar = _grid(theta)
    t = trace_data(ld, K).normalized()[:K]
    ks = np.arange(1, K + 1)
    phase = np.exp(2j * np.pi * np.atleast_1d(th)[:, None] * ks[None, :])
    out = -np.imag(phase @ (t / ks)) / np.pi
    return float(out[0]) if scalar else out


def S_K_theta(ld: LData, theta, K: int):
    """(value from zeros, value from primes); equal by the trace formula."""
    return S_K_from_zeros(ld, theta, K), S_K_from_primes(ld, theta, K)


def gap_bound(ld: LData, theta, K: int):
    """sum_j min(1/2, 1/(4 pi K ||theta - theta_j||)), an upper bound for |S - S_K|."""
    if K < 1:
        raise ValueError("K must be at least 1")
    th, scalar = _grid(theta)
    d = dist_to_int(np.atleast_1d(th)[:, None] - ld.theta_array()[None, :])
    with np.errstate(divide="ignore"):
        terms = np.where(d > 0, 1.0 / (4 * np.pi * K * np.where(d > 0, d, 1.0)), np.inf)
    out = np.minimum(0.5, terms).sum(axis=1)
    return float(out[0]) if scalar else out


def N_theta(ld: LData, theta):
    """#{j : theta_j <= theta} for theta in [0, 1]."""
    th, scalar = _grid(theta)
    tj = ld.theta_array()
    out = np.sum(tj[None, :] <= np.atleast_1d(th)[:, None] + INT_TOL, axis=1)
    return int(out[0]) if scalar else out


def counting_defect(ld: LData, theta):
    """|N(theta) - 2 g theta - S(theta)|."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    d = np.abs(N_theta(ld, th) - 2 * ld.g * th - S_theta(ld, th))
    return float(d[0]) if np.ndim(theta) == 0 else d


@dataclass
class ArgEval:
    theta: float
    S: float
    N: int
    S_K: dict = field(default_factory=dict)
    S_K_primes: dict = field(default_factory=dict)
    gap: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"theta": self.theta, "S": self.S, "N": self.N,
                "S_K": {str(k): v for k, v in self.S_K.items()},
                "S_K_primes": {str(k): v for k, v in self.S_K_primes.items()},
                "gap_bound": {str(k): v for k, v in self.gap.items()}}


def arg_eval(ld: LData, theta: float, Ks=(1,)) -> ArgEval:
    ev = ArgEval(float(theta), S_theta(ld, theta), N_theta(ld, theta))
    for K in Ks:
        z, p = S_K_theta(ld, theta, K)
        ev.S_K[K] = z
        ev.S_K_primes[K] = p
        ev.gap[K] = gap_bound(ld, theta, K)
    return ev


def s_bound_scan(ld: LData, grid: int = 4096, K: int | None = None) -> dict:
    """Sup of |S| and |S_K| over a uniform grid, with ratios to g / log_q g.

    ``K`` defaults to the smallest integer >= log_q g * log g (at least 1).
    """
    g, q = ld.g, ld.q
    th = np.arange(grid) / grid
    S = S_theta(ld, th, check=False)
    if K is None:
        K = max(1, math.ceil(math.log(g, q) * math.log(g))) if g > 1 else 1
    SK = S_K_from_primes(ld, th, K)
    gaps = gap_bound(ld, th, K)
    sup_S = float(np.max(np.abs(S)))
    sup_SK = float(np.max(np.abs(SK)))
    scale = g / math.log(g, q) if g > 1 else float("nan")
    out = {
        "q": q, "g": g, "K": K, "grid": grid,
        "sup_S": sup_S, "sup_S_K": sup_SK, "sup_gap": float(np.max(gaps)),
        "ratio_S": sup_S / scale if g > 1 else None,
        "ratio_S_K": sup_SK / scale if g > 1 else None,
    }
    if not (math.isfinite(sup_S) and math.isfinite(sup_SK)):
        raise ArithmeticError("non-finite argument values")
    if sup_S > g + 1e-9:
        raise ArithmeticError(f"sup |S| = {sup_S} exceeds the trivial bound g = {g}")
    if np.any(np.abs(SK) > np.abs(S) + gaps + 1e-9):
        raise ArithmeticError("|S_K| exceeds |S| + gap bound")
    return out
