"""The L-polynomial of chi_D: exact coefficients, zeros, and trace sums.

Coefficients are Python integers, so the functional equation, the
approximate functional equation and the oracle comparison are exact
equalities.  Zeros are reported as angles theta in [0, 1) with
u_j = q^(-1/2) e(theta_j).
"""

from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .characters import QuadraticCharacter, _chi_raw
from .ff_core import eta_table
from .poly import Poly, _monic_tuples, cached_prime_table, check_budget

ROOT_TOL = 1e-8
PSI_DIRECT_LIMIT = 20000
SCHEMA = "hyperell.ldata/1"


class RootFindingError(ArithmeticError):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class LData:
    """Everything computed for one D.

    ``thetas`` are sorted, closed under theta -> 1 - theta (mod 1) and listed
    with multiplicity; ``root_magnitude_defects`` holds |u_j| q^(1/2) - 1 for
    the raw roots before symmetrisation.
    """

    chi: QuadraticCharacter
    coeffs: tuple[int, ...]
    thetas: tuple[float, ...] | None = None
    root_magnitude_defects: tuple[float, ...] | None = None
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        c, q, g = self.coeffs, self.chi.q, self.chi.g
        if len(c) != 2 * g + 1:
            raise ValueError(f"expected {2 * g + 1} coefficients, got {len(c)}")
        if c[0] != 1:
            raise ValueError(f"c_0 must be 1, got {c[0]}")
        for n in range(g + 1):
            if c[2 * g - n] != q ** (g - n) * c[n]:
                raise ValueError(f"functional equation fails at n={n}: "
                                 f"c_{2 * g - n}={c[2 * g - n]} vs q^{g - n} c_{n}={q ** (g - n) * c[n]}")

    @property
    def q(self) -> int:
        return self.chi.q

    @property
    def g(self) -> int:
        return self.chi.g

    @property
    def D(self) -> Poly:
        return self.chi.D

    def theta_array(self) -> np.ndarray:
        if self.thetas is None:
            raise ValueError("zeros not computed; call compute_zeros first")
        return np.asarray(self.thetas, dtype=float)

    def roots(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.theta_array()) / math.sqrt(self.q)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "q": self.q,
            "g": self.g,
            "D": list(self.D.coeffs),
            "coeffs": [str(c) for c in self.coeffs],
            "thetas": None if self.thetas is None else [float(t) for t in self.thetas],
            "defects": None if self.root_magnitude_defects is None
            else [float(d) for d in self.root_magnitude_defects],
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LData":
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {obj.get('schema')!r}")
        chi = QuadraticCharacter(Poly(tuple(obj["D"]), obj["q"]))
        thetas = obj.get("thetas")
        defects = obj.get("defects")
        return cls(chi, tuple(int(c) for c in obj["coeffs"]),
                   None if thetas is None else tuple(thetas),
                   None if defects is None else tuple(defects),
                   tuple(obj.get("flags", ())))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# ---------------------------------------------------------------- coefficients

def _degree_sum(D, q, n, shard=None) -> int:
    return sum(_chi_raw(D, f, q) for f in _monic_tuples(q, n, shard))


def _shard_job(args):
    D, q, n, shard = args
    return _degree_sum(D, q, n, shard)


def character_sums(chi: QuadraticCharacter, max_degree: int, workers: int = 1) -> list[int]:
    """[sum over monic f of degree n of chi_D(f) for n = 0..max_degree]."""
    q, D = chi.q, chi.D.coeffs
    check_budget(sum(q**n for n in range(max_degree + 1)),
                 f"character sums to degree {max_degree} over F_{q}")
    if workers <= 1:
        return [_degree_sum(D, q, n) for n in range(max_degree + 1)]
    jobs = [(D, q, n, (i, workers)) for n in range(max_degree + 1) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_shard_job, jobs))
    return [sum(parts[n * workers:(n + 1) * workers]) for n in range(max_degree + 1)]


def compute_coeffs(chi: QuadraticCharacter, workers: int = 1) -> LData:
    """c_n by direct summation for n <= g, the rest by c_(2g-n) = q^(g-n) c_n."""
    g, q = chi.g, chi.q
    low = character_sums(chi, g, workers)
    coeffs = low + [q ** (g - n) * low[n] for n in range(g - 1, -1, -1)]
    return LData(chi, tuple(coeffs))


def coeffs_oracle_full(chi: QuadraticCharacter) -> list[int]:
    """Brute-force c_0..c_2g straight from the Dirichlet series."""
    return character_sums(chi, 2 * chi.g)


def afe_identity_holds(chi: QuadraticCharacter, coeffs: Sequence[int]) -> bool:
    """Exact check of the approximate functional equation against ``coeffs``.

    Right side: sum_{deg f <= g} chi(f) u^deg f + (q u^2)^g sum_{deg f <= g-1} chi(f) (q u)^(-deg f).
    """
    g, q = chi.g, chi.q
    sums = character_sums(chi, g)
    rhs = [0] * (2 * g + 1)
    for n in range(g + 1):
        rhs[n] += sums[n]
    for n in range(g):
        rhs[2 * g - n] += q ** (g - n) * sums[n]
    return list(coeffs) == rhs


def afe_check(ld: LData) -> bool:
    return afe_identity_holds(ld.chi, ld.coeffs)


def functional_equation_holds(coeffs: Sequence[int], q: int) -> bool:
    g = (len(coeffs) - 1) // 2
    return all(coeffs[2 * g - n] == q ** (g - n) * coeffs[n] for n in range(2 * g + 1) if n <= g)


# ---------------------------------------------------------------- evaluation

def lvalue(ld: LData | Sequence[int], u):
    """Horner evaluation of sum c_n u^n; ``u`` may be a scalar or an array."""
    coeffs = ld.coeffs if isinstance(ld, LData) else ld
    u = np.asarray(u, dtype=complex)
    acc = np.zeros_like(u)
    for c in reversed(coeffs):
        acc = acc * u + float(c)
    return complex(acc) if acc.ndim == 0 else acc


def circle_scale(ld: LData) -> float:
    """sum |c_n| q^(-n/2), an upper bound for |L| on |u| <= q^(-1/2)."""
    return float(sum(abs(c) * ld.q ** (-n / 2) for n, c in enumerate(ld.coeffs)))


# ---------------------------------------------------------------- zeros

def aberth(coeffs: Sequence[complex], tol: float = 1e-13, maxiter: int = 200,
           offset: float = 0.37) -> tuple[np.ndarray, bool]:
    """Aberth-Ehrlich iteration for a polynomial (ascending coefficients).

    Starts from points on the unit circle at phases (j + offset)/n.
    Returns the roots and whether the step criterion was met.
    """
    a = np.asarray(coeffs, dtype=complex)
    n = len(a) - 1
    if n < 1:
        return np.zeros(0, dtype=complex), True
    desc = a[::-1] / a[-1]
    ddesc = np.polyder(desc)
    z = np.exp(2j * np.pi * (np.arange(n) + offset) / n)
    if n == 1:
        return np.array([-desc[1]]), True
    for _ in range(maxiter):
        w = np.polyval(desc, z) / np.polyval(ddesc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0
        step = w / (1.0 - w * s)
        z = z - step
        if np.max(np.abs(step)) < tol:
            return z, True
    return z, False


def _newton_polish(desc, z, steps=2):
    ddesc = np.polyder(desc)
    for _ in range(steps):
        d = np.polyval(ddesc, z)
        ok = d != 0
        z = np.where(ok, z - np.polyval(desc, z) / np.where(ok, d, 1), z)
    return z


def _strip_real_circle_factor(c: list[int], q: int) -> tuple[list[int], int]:
    """Divide out (1 - q u^2) as often as it divides exactly."""
    m = 0
    while len(c) >= 3:
        N = len(c) - 1
        b = [0] * (N - 1)
        for n in range(N - 1):
            b[n] = c[n] + (q * b[n - 2] if n >= 2 else 0)
        top1 = c[N - 1] + (q * b[N - 3] if N >= 3 else 0)
        top2 = c[N] + q * b[N - 2]
        if top1 != 0 or top2 != 0:
            break
        c, m = b, m + 1
    return c, m


def _squarefree_parts(c: list[int]) -> list[tuple[list[int], int]]:
    import sympy

    if len(c) <= 1:
        return []
    u = sympy.Symbol("u")
    P = sympy.Poly(list(reversed(c)), u, domain="ZZ")
    _, parts = P.sqf_list()
    out = []
    for fac, mult in parts:
        asc = [int(v) for v in reversed(fac.all_coeffs())]
        if len(asc) > 1:
            out.append((asc, mult))
    return out


def compute_zeros(ld: LData, tol: float = ROOT_TOL) -> LData:
    """Fill in the zero angles.

    Real zeros u = +-q^(-1/2) are split off exactly as powers of (1 - q u^2);
    what remains is made square-free over Q and each factor is solved with
    Aberth-Ehrlich in the variable z = q^(1/2) u (companion-matrix
    eigenvalues if the iteration stalls).
    """
    q, g = ld.q, ld.g
    sq = math.sqrt(q)
    rest, m = _strip_real_circle_factor(list(ld.coeffs), q)
    thetas: list[float] = [0.0] * m + [0.5] * m
    defects: list[float] = [0.0] * (2 * m)
    flags: list[str] = []
    if m:
        flags.append(f"real_zeros:{m}")
    for fac, mult in _squarefree_parts(rest):
        deg = len(fac) - 1
        zc = np.array([c * sq ** (-n) for n, c in enumerate(fac)], dtype=complex)
        zc /= np.max(np.abs(zc))
        roots, ok = aberth(zc)
        desc = zc[::-1]
        if not ok:
            roots = np.roots(desc)
        roots = _newton_polish(desc, roots)
        resid = np.abs(np.polyval(desc, roots)) / np.sum(np.abs(zc))
        if np.max(resid) > 1e-10 or len(roots) != deg:
            raise RootFindingError(f"root finder failed for D={ld.D}", residuals=resid.tolist())
        order = np.argsort(-roots.imag)
        upper = roots[order[: deg // 2]]
        if np.any(upper.imag <= 0):
            raise RootFindingError(f"roots of a real factor are not in conjugate pairs for D={ld.D}",
                                   residuals=resid.tolist())
        for r in upper:
            th = (cmath.phase(r) / (2 * math.pi)) % 1.0
            thetas.extend([th, 1.0 - th] * mult)
        defects.extend([abs(r) - 1.0 for r in roots] * mult)
        if mult > 1:
            flags.append(f"multiple_zeros:{mult}")
    if len(thetas) != 2 * g:
        raise RootFindingError(f"found {len(thetas)} zeros, expected {2 * g}")
    worst = max((abs(d) for d in defects), default=0.0)
    if worst >= tol:
        raise RootFindingError(f"zero off the circle by {worst:.3g} for D={ld.D}", residuals=defects)
    if min(thetas) < 1e-9:
        flags.append("zero_at_theta_0")
    return replace(ld, thetas=tuple(sorted(thetas)), root_magnitude_defects=tuple(defects),
                   flags=tuple(flags))


def lpoly(chi: QuadraticCharacter, workers: int = 1) -> LData:
    return compute_zeros(compute_coeffs(chi, workers))


# ---------------------------------------------------------------- trace sums

def psi_sum(chi: QuadraticCharacter, n: int) -> int:
    """sum over monic f of degree n of Lambda(f) chi_D(f), via prime powers."""
    if n < 1:
        raise ValueError("n must be at least 1")
    q, D = chi.q, chi.D.coeffs
    check_budget(q**n, f"prime-power sum in degree {n} over F_{q}")
    table = cached_prime_table(q, n)
    total = 0
    for d in range(1, n + 1):
        if n % d:
            continue
        k = n // d
        for P in table[d]:
            v = _chi_raw(D, P.coeffs, q)
            total += d * (v if k % 2 else v * v)
    return total


def psi_newton(coeffs: Sequence[int], kmax: int) -> list[int]:
    """psi(1..kmax) from u L'/L = sum psi(n) u^n, exact in integers."""
    c = list(coeffs)
    top = len(c) - 1
    psi: list[int] = []
    for n in range(1, kmax + 1):
        acc = n * c[n] if n <= top else 0
        for k in range(max(1, n - top), n):
            acc -= psi[k - 1] * c[n - k]
        psi.append(acc)
    return psi


@dataclass(frozen=True)
class TraceData:
    """psi(n) for n = 1..len(psi); ``source[n-1]`` says how it was computed."""

    q: int
    psi: tuple[int, ...]
    source: tuple[str, ...]

    @property
    def kmax(self) -> int:
        return len(self.psi)

    def normalized(self) -> np.ndarray:
        """psi(n) q^(-n/2) as floats, index 0 <-> n = 1."""
        q = self.q
        out = np.empty(len(self.psi))
        for i, p in enumerate(self.psi):
            n = i + 1
            out[i] = (p / q ** (n // 2)) / (math.sqrt(q) if n % 2 else 1.0)
        return out


def trace_data(ld: LData, kmax: int, direct_limit: int = PSI_DIRECT_LIMIT) -> TraceData:
    """psi table; prime-power sums while q^n <= direct_limit, Newton sums after.

    Where both are available they are required to agree.
    """
    return _trace_data(ld.D.coeffs, ld.q, ld.coeffs, kmax, direct_limit)


@lru_cache(maxsize=256)
def _trace_data(D, q, coeffs, kmax, direct_limit) -> TraceData:
    newton = psi_newton(coeffs, kmax)
    source = []
    for n in range(1, kmax + 1):
        if q**n <= direct_limit:
            direct = _psi_direct(D, q, n)
            if direct != newton[n - 1]:
                raise ArithmeticError(f"psi({n}) disagrees: primes {direct}, Newton {newton[n - 1]}")
            source.append("primes")
        else:
            source.append("newton")
    return TraceData(q, tuple(newton), tuple(source))


@lru_cache(maxsize=4096)
def _psi_direct(D, q, n) -> int:
    return psi_sum(QuadraticCharacter(Poly(D, q)), n)


def trace_check(ld: LData, n: int) -> float:
    """|-sum_j e(-n theta_j) - q^(-n/2) psi(n)|."""
    if not 1 <= n:
        raise ValueError("n must be at least 1")
    th = ld.theta_array()
    zero_side = -np.sum(np.exp(-2j * np.pi * n * th))
    t = trace_data(ld, max(n, 2 * ld.g)).normalized()[n - 1]
    return float(abs(zero_side - t))


def point_count_check(ld: LData) -> int:
    """|N_1 - q - 1 - psi(1)| with N_1 the projective point count of y^2 = D(x)."""
    q = ld.q
    eta = eta_table(q)
    D = ld.D
    n1 = 1 + sum(1 + eta[D(x)] for x in range(q))
    return abs(n1 - q - 1 - psi_sum(ld.chi, 1))
