"""The harmonic companion F of L, its Euler-product model F_K, and the zeros of F_K.

On the circle u = q^(-1/2) e(theta),

    F_K = 1/2 P_K (1 + e(f_K(theta))),   f_K(theta) = 2 g theta + S_K(theta),

so the zeros of F_K are the solutions of f_K(theta) = m + 1/2.  f_K is
evaluated from the prime side (psi values only); the zero side is used as
a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .argument import S_K_from_primes, S_K_from_zeros, dist_to_int
from .hybrid import p_k, truncation_profile
from .lfunction import LData, circle_scale, lvalue, trace_data

RESIDUAL_TOL = 1e-9
TANGENT_WIDTH = 1e-12


class MissedCrossingError(ArithmeticError):
    """Net crossing count of f_K disagrees with f_K(1) - f_K(0) = 2g."""


# ---------------------------------------------------------------- F and F_K values

def f_value(ld: LData, u):
    """F(u) = (L(u) + (q u^2)^g L(conj u)) / 2."""
    u = np.asarray(u, dtype=complex)
    out = 0.5 * (lvalue(ld, u) + (ld.q * u * u) ** ld.g * lvalue(ld, np.conj(u)))
    return complex(out) if np.ndim(out) == 0 else out


def f_k_value(ld: LData, u, K: int):
    """F_K(u) = (P_K(u) + (q u^2)^g P_K(conj u)) / 2."""
    u = np.asarray(u, dtype=complex)
    out = 0.5 * (p_k(ld, u, K) + (ld.q * u * u) ** ld.g * p_k(ld, np.conj(u), K))
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class FEval:
    u: complex
    F: complex
    F_K: complex


def circle(ld: LData, n: int, radius: float = 1.0) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(n) / n) / math.sqrt(ld.q)


def f_zero_equivalence(ld: LData, grid: int = 1024, radii=(0.5, 0.8, 0.95)) -> dict:
    """F = L on the circle, F free of zeros inside, and F small at the zeros of L."""
    scale = circle_scale(ld)
    us = circle(ld, grid)
    on_circle = float(np.max(np.abs(f_value(ld, us) - lvalue(ld, us))) / scale)
    margins = {}
    for r in radii:
        margins[r] = float(np.min(np.abs(f_value(ld, circle(ld, grid, r)))))
    at_zeros = float(np.max(np.abs(f_value(ld, ld.roots())))) / scale
    return {
        "F_eq_L_defect": on_circle,
        "interior_min_abs_F": margins,
        "interior_margin": min(margins.values()),
        "F_at_zeros": at_zeros,
        "F_at_0": complex(f_value(ld, 0.0)),
    }


def rh_check_fk(ld: LData, K: int, samples: int = 512, radii=(0.5, 0.9)) -> dict:
    """Numerical form of the argument that F_K has all its zeros on the circle."""
    us = circle(ld, samples)
    modulus = float(np.max(np.abs(np.abs(p_k(ld, np.conj(us), K) / p_k(ld, us, K)) - 1.0)))
    margins = {r: float(np.min(np.abs(f_k_value(ld, circle(ld, samples, r), K)))) for r in radii}
    return {
        "K": K,
        "modulus_identity_defect": modulus,
        "interior_min_abs_F_K": margins,
        "interior_margin": min(margins.values()),
        "F_K_at_0": complex(f_k_value(ld, 0.0, K)),
    }


# ---------------------------------------------------------------- f_K on the circle

class _FK:
    """f_K and its first two derivatives from the normalised trace values."""

    def __init__(self, ld: LData, K: int):
        if K < 1:
            raise ValueError("K must be at least 1")
        self.g = ld.g
        self.K = K
        self.t = trace_data(ld, K).normalized()[:K]
        self.ks = np.arange(1, K + 1)
        # rigorous Lipschitz bounds for f_K and f_K'
        self.lip = 2 * self.g + 2 * float(np.sum(np.abs(self.t)))
        self.lip2 = 4 * np.pi * float(np.sum(self.ks * np.abs(self.t)))

    def _phase(self, th):
        return np.exp(2j * np.pi * np.asarray(th, dtype=float)[..., None] * self.ks)

    def f(self, th):
        e = self._phase(th)
        return 2 * self.g * np.asarray(th) - np.imag(e @ (self.t / self.ks)) / np.pi

    def df(self, th):
        e = self._phase(th)
        return 2 * self.g - 2 * np.real(e @ self.t)


def f_k_arg(ld: LData, theta, K: int):
    """f_K(theta) = 2 g theta + S_K(theta), prime side."""
    th = np.asarray(theta, dtype=float)
    out = 2 * ld.g * th + S_K_from_primes(ld, th, K)
    return float(out) if np.ndim(out) == 0 else out


def f_k_deriv(ld: LData, theta, K: int, side: str = "zeros"):
    """f_K'(theta) = 2g + 2 sum_j sum_{k<=K} cos(2 pi (theta - theta_j) k).

    ``side="primes"`` uses -2 Re sum t_k e(k theta) instead, t_k = q^(-k/2) psi(k).
    """
    th = np.asarray(theta, dtype=float)
    if side == "primes":
        out = _FK(ld, K).df(th)
    elif side == "zeros":
        x = np.atleast_1d(th)[:, None] - ld.theta_array()[None, :]
        acc = np.zeros(x.shape[0])
        for k in range(1, K + 1):
            acc += np.cos(2 * np.pi * k * x).sum(axis=1)
        out = 2 * ld.g + 2 * acc
        if th.ndim == 0:
            out = out[0]
    else:
        raise ValueError(f"unknown side {side!r}")
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class ModelZeroSet:
    """Zeros q^(-1/2) e(phi_j) of F_K, phi_j in [0, 1) ascending.

    ``levels[j]`` is the half-integer m + 1/2 that f_K crosses at phi_j and
    ``brackets[j]`` an interval on which f_K - level changes sign (or, for a
    tangential zero, the tiny interval where it was located).  Tangential
    zeros are listed once with ``tangential[j]`` set.
    """

    K: int
    g: int
    phis: np.ndarray
    derivs: np.ndarray
    levels: np.ndarray
    brackets: list = field(default_factory=list)
    residuals: np.ndarray | None = None
    tangential: np.ndarray | None = None

    @property
    def count(self) -> int:
        return len(self.phis)

    def to_rows(self) -> list[dict]:
        return [
            {"phi": float(p), "deriv": float(d), "level": float(lv),
             "bracket_lo": float(b[0]), "bracket_hi": float(b[1]),
             "residual": float(r), "tangential": bool(t)}
            for p, d, lv, b, r, t in zip(self.phis, self.derivs, self.levels, self.brackets,
                                         self.residuals, self.tangential)
        ]


def find_fk_zeros(ld: LData, K: int, grid_factor: int = 4) -> ModelZeroSet:
    """All phi in [0, 1) with f_K(phi) = 1/2 (mod 1).

    A uniform grid of step 1/(4M), M = 2g(1 + 2K), flags intervals that may
    meet a level m + 1/2.  Each flagged interval is split until a piece is
    either excluded by the Lipschitz bound, certified monotone by the bound
    on f_K'' (then a sign change is refined with Brent's method), or shorter
    than 1e-12, where the minimum of |f_K - level| decides a tangential zero.
    """
    fk = _FK(ld, K)
    g = ld.g
    M = 2 * g * (1 + 2 * K)
    n = int(math.ceil(grid_factor * M))
    xs = np.linspace(0.0, 1.0, n + 1)
    fs = fk.f(xs)
    lip, lip2 = fk.lip, fk.lip2
    # (phi, level, bracket, tangential, direction)
    found: list[tuple[float, float, tuple[float, float], bool, int]] = []

    def scalar_f(x):
        return float(fk.f(np.array([x]))[0])

    def scalar_df(x):
        return float(fk.df(np.array([x]))[0])

    def classify(a, b, fa, fb, level, depth=0):
        ga, gb = fa - level, fb - level
        ell = b - a
        if ga == 0.0 or gb == 0.0:
            x = a if ga == 0.0 else b
            d = scalar_df(x)
            found.append((x, level, (a, b), d == 0.0, int(np.sign(d))))
            return
        same = ga * gb > 0
        if same:
            lo = min(abs(ga), abs(gb))
            # first-order and second-order exclusion
            if abs(ga) + abs(gb) > lip * ell or lo > lip2 * ell * ell / 8:
                return
        mid = 0.5 * (a + b)
        if abs(scalar_df(mid)) > lip2 * ell / 2:
            if not same:
                r = brentq(lambda x: scalar_f(x) - level, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                found.append((r, level, (a, b), False, 1 if gb > 0 else -1))
            return
        if ell < TANGENT_WIDTH:
            if same:
                res = minimize_scalar(lambda x: abs(scalar_f(x) - level), bounds=(a, b),
                                      method="bounded", options={"xatol": 1e-16})
                if res.fun < RESIDUAL_TOL:
                    found.append((float(res.x), level, (a, b), True, 0))
            else:
                r = brentq(lambda x: scalar_f(x) - level, a, b, xtol=1e-16)
                found.append((r, level, (a, b), False, 1 if gb > 0 else -1))
            return
        fm = scalar_f(mid)
        classify(a, mid, fa, fm, level, depth + 1)
        classify(mid, b, fm, fb, level, depth + 1)

    for i in range(n):
        a, b, fa, fb = xs[i], xs[i + 1], fs[i], fs[i + 1]
        half = lip * (b - a) / 2
        lo, hi = (fa + fb) / 2 - half, (fa + fb) / 2 + half
        m = math.ceil(lo - 0.5)
        while m + 0.5 <= hi:
            classify(a, b, fa, fb, m + 0.5)
            m += 1

    # wrap to [0, 1), sort, merge duplicates from shared endpoints
    found.sort(key=lambda t: t[0] % 1.0)
    merged: list = []
    for phi, level, br, tang, sgn in found:
        p = phi % 1.0
        if p > 1 - 1e-13:
            p = 0.0
        if merged and (abs(p - merged[-1][0]) < 1e-10):
            continue
        merged.append((p, level, br, tang, sgn))
    if len(merged) > 1 and merged[0][0] + 1.0 - merged[-1][0] < 1e-10:
        merged.pop()

    phis = np.array([m_[0] for m_ in merged])
    derivs = fk.df(phis) if len(phis) else np.zeros(0)
    levels = np.array([m_[1] for m_ in merged])
    tang = np.array([m_[3] for m_ in merged], dtype=bool)
    fvals = fk.f(phis) if len(phis) else np.zeros(0)
    residuals = np.abs((fvals - 0.5) - np.round(fvals - 0.5))

    net = sum(m_[4] for m_ in merged)
    if net != 2 * g:
        raise MissedCrossingError(f"net crossings {net} != 2g = {2 * g} for K={K}; refine the grid")
    if len(residuals) and residuals.max() >= RESIDUAL_TOL:
        raise ArithmeticError(f"level residual {residuals.max():.3g} for K={K}")
    return ModelZeroSet(K, g, phis, derivs, levels, [m_[2] for m_ in merged], residuals, tang)


def fk_zeros_by_critical_points(ld: LData, K: int) -> np.ndarray:
    """Independent route: split [0, 1] at the zeros of f_K' and solve on each monotone piece.

    f_K' = 2g - 2 Re sum t_k e(k theta) is z^(-K) times a degree-2K
    polynomial in z = e(theta); its roots on |z| = 1 are the critical points.
    """
    fk = _FK(ld, K)
    t = fk.t
    # z^K f_K'(z) = 2g z^K - sum_k (t_k z^(K+k) + t_k z^(K-k))
    poly = np.zeros(2 * K + 1, dtype=complex)
    poly[K] += 2 * ld.g
    for k in range(1, K + 1):
        poly[K + k] -= t[k - 1]
        poly[K - k] -= t[k - 1]
    roots = np.roots(poly[::-1])
    crit = np.sort((np.angle(roots[np.abs(np.abs(roots) - 1) < 1e-6]) / (2 * np.pi)) % 1.0)
    pts = np.unique(np.concatenate([[0.0], crit, [1.0]]))
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        fa, fb = fk.f(np.array([a, b]))
        lo, hi = sorted((fa, fb))
        m = math.ceil(lo - 0.5)
        while m + 0.5 <= hi:
            lv = m + 0.5
            if (fa - lv) * (fb - lv) < 0:
                out.append(brentq(lambda x: float(fk.f(np.array([x]))[0]) - lv, a, b, xtol=1e-15))
            m += 1
    return np.unique(np.round(np.array(out) % 1.0, 12))


# ---------------------------------------------------------------- statistics

def n_k_count(zeros: ModelZeroSet, theta: float) -> int:
    return int(np.sum(zeros.phis <= theta + 1e-12))


def simplicity_stats(zeros: ModelZeroSet, tol: float = 1e-6) -> float:
    """Fraction of zeros with |f_K'| <= tol (multiple zeros of F_K)."""
    if zeros.count == 0:
        return 0.0
    return float(np.mean(np.abs(zeros.derivs) <= tol))


def phi_function(g: int, q: int) -> float:
    """Default Phi(g) = g / log_q g."""
    return g / math.log(g, q) if g > 1 else float("inf")


def n_k_deviation(ld: LData, zeros: ModelZeroSet, grid: int = 1024, phi=phi_function) -> dict:
    """sup and inf of N_K(theta) - 2 g theta over a grid, with Phi(g) for scale."""
    th = np.arange(grid + 1) / grid
    nk = np.array([n_k_count(zeros, t) for t in th])
    dev = nk - 2 * ld.g * th
    return {"min_dev": float(dev.min()), "max_dev": float(dev.max()), "Phi": phi(ld.g, ld.q)}


class PreconditionError(ValueError):
    pass


def distinct_zeros(ld: LData, tol: float = 1e-9) -> np.ndarray:
    th = ld.theta_array()
    out = [th[0]]
    for t in th[1:]:
        if t - out[-1] > tol:
            out.append(t)
    if len(out) > 1 and out[0] + 1.0 - out[-1] <= tol:
        out.pop()
    return np.array(out)


def min_zero_gap(ld: LData) -> float:
    th = distinct_zeros(ld)
    if len(th) == 1:
        return 1.0
    return float(np.min(np.diff(np.append(th, th[0] + 1.0))))


def clustering_intervals(ld: LData, Delta: float) -> list[tuple[float, float]]:
    th = distinct_zeros(ld)
    nxt = np.append(th[1:], th[0] + 1.0)
    return [(a + Delta, b - Delta) for a, b in zip(th, nxt)]


def clustering_check(ld: LData, K: int, Delta: float, zeros: ModelZeroSet | None = None) -> bool:
    """True iff no zero of F_K lies in any [theta_i + Delta, theta_(i+1) - Delta].

    The consecutive pair (theta_2g, theta_1 + 1) wraps around the circle.
    """
    gap = min_zero_gap(ld)
    if not 0 < Delta < gap / 2:
        raise PreconditionError(f"Delta={Delta} must lie in (0, {gap / 2:.6g})")
    if not K > ld.g / (math.pi * Delta):
        raise PreconditionError(f"K={K} must exceed g/(pi Delta) = {ld.g / (math.pi * Delta):.4g}")
    if zeros is None:
        zeros = find_fk_zeros(ld, K)
    for a, b in clustering_intervals(ld, Delta):
        for p in zeros.phis:
            for shift in (0.0, 1.0):
                if a <= p + shift <= b:
                    return False
    return True


def hausdorff_circle(a, b) -> float:
    """Hausdorff distance between two finite subsets of R/Z."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    d = dist_to_int(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def fk_truncation_profile(ld: LData, K: int, **kw):
    """sup |F/F_K - 1| on the same sets as the L/P_K profile."""
    return truncation_profile(ld, K, ratio_fn=lambda l_, us, k_: f_value(l_, us) / f_k_value(l_, us, k_), **kw)


__all__ = [
    "FEval", "ModelZeroSet", "MissedCrossingError", "PreconditionError",
    "f_value", "f_k_value", "f_k_arg", "f_k_deriv", "f_zero_equivalence", "rh_check_fk",
    "find_fk_zeros", "fk_zeros_by_critical_points", "n_k_count", "simplicity_stats",
    "clustering_check", "hausdorff_circle", "fk_truncation_profile", "S_K_from_zeros",
]
