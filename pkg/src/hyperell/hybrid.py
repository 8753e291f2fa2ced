"""Truncated Euler products P_K, zero-side tails Z_K and the hybrid identity L = P_K Z_K."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lfunction import LData, TraceData, lvalue, trace_data

NEAR_ZERO_RADIUS = 1e-6


def _trace(src: LData | TraceData, K: int) -> TraceData:
    if isinstance(src, TraceData):
        if src.kmax < K:
            raise ValueError(f"trace table has {src.kmax} terms, need {K}")
        return src
    return trace_data(src, max(K, 1))


def log_p_k(src: LData | TraceData, u, K: int):
    """sum_{k<=K} psi(k) u^k / k, computed as sum t_k (q^(1/2) u)^k / k."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    u = np.asarray(u, dtype=complex)
    if K == 0:
        return np.zeros_like(u)
    td = _trace(src, K)
    t = td.normalized()[:K]
    w = math.sqrt(td.q) * u
    acc = np.zeros_like(u)
    power = np.ones_like(u)
    for k in range(1, K + 1):
        power = power * w
        acc = acc + t[k - 1] * power / k
    return acc


def p_k(src: LData | TraceData, u, K: int):
    """P_K(u) = exp(sum_{k<=K} psi(k) u^k / k); P_0 = 1."""
    out = np.exp(log_p_k(src, u, K))
    return complex(out) if np.ndim(out) == 0 else out


def z_k(ld: LData, u, K: int):
    """Z_K(u) in closed form: exp(sum_j [Log(1 - a_j) + sum_{k<=K} a_j^k / k]), a_j = alpha_j u.

    Valid on |u| <= q^(-1/2); returns 0 exactly at the zeros of L.
    """
    u = np.asarray(u, dtype=complex)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    alpha = math.sqrt(ld.q) * np.exp(-2j * np.pi * ld.theta_array())
    a = u[:, None] * alpha[None, :]
    one_minus = 1.0 - a
    at_zero = np.any(np.abs(one_minus) < 1e-14, axis=1)
    safe = np.where(np.abs(one_minus) < 1e-14, 1.0, one_minus)
    acc = np.log(safe)
    power = np.ones_like(a)
    for k in range(1, K + 1):
        power = power * a
        acc = acc + power / k
    out = np.exp(acc.sum(axis=1))
    out[at_zero] = 0.0
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class HybridEval:
    u: complex
    K: int
    L: complex
    P_K: complex
    Z_K: complex
    defect: float

    def to_json(self) -> dict:
        return {
            "u": [self.u.real, self.u.imag],
            "K": self.K,
            "L": [self.L.real, self.L.imag],
            "P_K": [self.P_K.real, self.P_K.imag],
            "Z_K": [self.Z_K.real, self.Z_K.imag],
            "defect": self.defect,
        }


def hybrid_check(ld: LData, u: complex, K: int, eps: float = 1e-300) -> HybridEval:
    if abs(u) > ld.q ** -0.5 * (1 + 1e-12):
        raise ValueError(f"|u| = {abs(u)} lies outside the disk |u| <= q^(-1/2)")
    L = lvalue(ld, u)
    P = p_k(ld, u, K)
    if P == 0:
        raise ArithmeticError("P_K vanished")
    Z = z_k(ld, u, K)
    defect = abs(L - P * Z) / max(abs(L), eps)
    return HybridEval(complex(u), K, complex(L), complex(P), complex(Z), float(defect))


def hybrid_grid(ld: LData, us, K: int) -> np.ndarray:
    """Vectorised relative defects |L - P_K Z_K| / |L| at the points ``us``."""
    us = np.asarray(us, dtype=complex)
    L = lvalue(ld, us)
    prod = p_k(ld, us, K) * z_k(ld, us, K)
    return np.abs(L - prod) / np.maximum(np.abs(L), 1e-300)


def min_zero_distance(ld: LData, us) -> np.ndarray:
    us = np.atleast_1d(np.asarray(us, dtype=complex))
    return np.min(np.abs(us[:, None] - ld.roots()[None, :]), axis=1)


def separated_circle_points(ld: LData, count: int) -> np.ndarray:
    """``count`` points on |u| = q^(-1/2) at midpoints between consecutive distinct zeros."""
    th = np.unique(np.round(ld.theta_array(), 12))
    nxt = np.append(th[1:], th[0] + 1.0)
    mids = (th + nxt) / 2
    gaps = nxt - th
    # spread extra points inside the widest gaps, away from their ends
    pts = list(mids)
    i = 0
    order = np.argsort(-gaps)
    while len(pts) < count:
        j = order[i % len(order)]
        level = i // len(order) + 1
        frac = 0.5 + (-1) ** i * 0.35 * (level / (level + 1))
        pts.append(th[j] + frac * gaps[j])
        i += 1
    pts = np.array(pts[:count]) % 1.0
    return np.exp(2j * np.pi * pts) / math.sqrt(ld.q)


def interior_points(ld: LData, count: int, rng: np.random.Generator, rmax: float = 0.99) -> np.ndarray:
    r = rmax * np.sqrt(rng.uniform(0, 1, count)) / math.sqrt(ld.q)
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, count))


# ---------------------------------------------------------------- truncation profiles

@dataclass(frozen=True)
class TruncationProfile:
    branch: str  # "disk" (sigma > 1/2 radius) or "circle" (separated boundary points)
    K: int
    sup_error: float
    bound_shape: float
    points: int
    params: dict

    @property
    def ratio(self) -> float:
        return self.sup_error / self.bound_shape

    def to_json(self) -> dict:
        return {"branch": self.branch, "K": self.K, "sup_error": self.sup_error,
                "bound_shape": self.bound_shape, "ratio": self.ratio,
                "points": self.points, **self.params}


def _disk_radius(ld: LData, C: float, K: int) -> float:
    g, q = ld.g, ld.q
    if g < 2:
        raise ValueError("the disk branch needs g >= 2 (log g > 0)")
    if C < 1:
        raise ValueError("C must be at least 1")
    if K < 2 * C * math.log(g):
        raise ValueError(f"K={K} is below 2 C log g = {2 * C * math.log(g):.3f}")
    sigma = 0.5 + C * math.log(g, q) / K
    return q ** -sigma


def separated_thetas(ld: LData, c: float, grid: int = 256) -> np.ndarray:
    th = ld.theta_array()
    cand = np.arange(grid) / grid
    d = np.abs(cand[:, None] - th[None, :]) % 1.0
    d = np.minimum(d, 1.0 - d).min(axis=1)
    return cand[d >= c / (2 * ld.g)]


def truncation_profile(ld: LData, K: int, *, C: float | None = None, c: float | None = None,
                       grid: int = 256, ratio_fn=None, sigma_K: int | None = None) -> TruncationProfile:
    """sup |L/P_K - 1| over a 256-point grid of the relevant set.

    With ``C``: the circle |u| = q^(-sigma), sigma = 1/2 + C log_q g / K
    (the supremum over the disk is attained there, L/P_K - 1 being analytic).
    With ``c``: grid points on |u| = q^(-1/2) at distance >= c/2g from every
    zero, K >= g^2/c.  ``ratio_fn(ld, u, K)`` overrides L/P_K (used for F/F_K).
    ``sigma_K`` freezes the disk radius at the value sigma takes for that K,
    so a series over growing K is measured on one fixed circle.
    """
    if (C is None) == (c is None):
        raise ValueError("give exactly one of C (disk branch) or c (circle branch)")
    g, q = ld.g, ld.q
    fn = ratio_fn or (lambda ld_, us, K_: lvalue(ld_, us) / p_k(ld_, us, K_))
    if C is not None:
        if sigma_K is not None and sigma_K > K:
            raise ValueError("sigma_K may not exceed K")
        r = _disk_radius(ld, C, sigma_K or K)
        us = r * np.exp(2j * np.pi * np.arange(grid) / grid)
        shape = 1.0 / (C * g ** (C - 1) * math.log(g))
        params = {"C": C, "radius": r, "sigma_K": sigma_K or K}
    else:
        if c <= 0:
            raise ValueError("c must be positive")
        if K < g * g / c:
            raise ValueError(f"K={K} is below g^2/c = {g * g / c:.3f}")
        th = separated_thetas(ld, c, grid)
        if len(th) == 0:
            raise ValueError("no grid point is separated from the zeros by c/2g")
        us = np.exp(2j * np.pi * th) / math.sqrt(q)
        shape = g * g / (c * K)
        params = {"c": c}
    err = np.abs(fn(ld, us, K) - 1.0)
    return TruncationProfile("disk" if C is not None else "circle", K, float(err.max()),
                             float(shape), len(us), params)


def profile_series(ld: LData, Ks, nested: bool = False, **kw) -> list[TruncationProfile]:
    """Profiles at each K; ``nested`` keeps the disk radius of the smallest K."""
    if nested and kw.get("C") is not None:
        kw = {**kw, "sigma_K": min(Ks)}
    return [truncation_profile(ld, K, **kw) for K in Ks]


def weakly_decreasing(values, slack: float = 0.0) -> bool:
    return all(b <= a * (1 + slack) for a, b in zip(values, values[1:]))


def limit_K(ld: LData, u: complex, target: float = 1e-6, kmax: int = 2**12) -> int | None:
    """Smallest K in 1, 2, 4, ... <= kmax with |P_K(u) - L(u)| < target, else None."""
    L = lvalue(ld, u)
    K = 1
    while K <= kmax:
        if abs(p_k(ld, u, K) - L) < target:
            return K
        K *= 2
    return None
