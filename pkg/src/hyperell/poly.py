"""Dense polynomials over F_q.

A polynomial is a tuple of canonical residues, constant term first, with a
nonzero last entry; the empty tuple is the zero polynomial.  The low-level
helpers (prefixed ``_``) work directly on such tuples and are what the hot
loops in :mod:`hyperell.characters` call; :class:`Poly` wraps them for
everything else.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .ff_core import FieldElement, FqContext, inverse_mod, is_prime

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An enumeration would visit more polynomials than allowed."""


def enumeration_budget() -> int:
    env = os.environ.get("HYPERELL_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(visits: int, what: str, budget: int | None = None) -> None:
    limit = enumeration_budget() if budget is None else budget
    if visits > limit:
        raise BudgetExceeded(f"{what} needs {visits} polynomial visits, budget is {limit}")


# ---------------------------------------------------------------- raw tuples

def _trim(c) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _add(a, b, q):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % q
    return _trim(out)


def _sub(a, b, q):
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % q
    return _trim(out)


def _mul(a, b, q):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % q for v in out])


def _scale(a, c, q):
    c %= q
    if c == 0:
        return ()
    return tuple(v * c % q for v in a)


def _divmod(a, b, q):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    db = len(b) - 1
    r = list(a)
    if len(r) <= db:
        return (), _trim(r)
    inv = inverse_mod(b[-1], q)
    quot = [0] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] % q
        if c:
            c = c * inv % q
            quot[k - db] = c
            off = k - db
            for j in range(db + 1):
                r[off + j] -= c * b[j]
        r[k] = 0
    return _trim(quot), _trim([v % q for v in r[:db]])


def _mod(a, b, q):
    db = len(b) - 1
    if len(a) <= db:
        return a
    r = list(a)
    lead = b[-1]
    inv = 1 if lead == 1 else inverse_mod(lead, q)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] % q
        if c:
            if inv != 1:
                c = c * inv % q
            off = k - db
            for j in range(db):
                r[off + j] -= c * b[j]
    r = r[:db]
    while r and r[-1] % q == 0:
        r.pop()
    return tuple(v % q for v in r)


def _monic(a, q):
    if not a or a[-1] == 1:
        return a
    return _scale(a, inverse_mod(a[-1], q), q)


def _gcd(a, b, q):
    while b:
        a, b = b, _mod(a, b, q)
    return _monic(a, q)


def _powmod(base, e, m, q):
    result = (1,)
    base = _mod(base, m, q)
    while e:
        if e & 1:
            result = _mod(_mul(result, base, q), m, q)
        e >>= 1
        if e:
            base = _mod(_mul(base, base, q), m, q)
    return result


def _derivative(a, q):
    return _trim([(i * a[i]) % q for i in range(1, len(a))])


# ---------------------------------------------------------------- Poly

@dataclass(frozen=True)
class Poly:
    """Polynomial over F_q; ``coeffs`` holds canonical residues, constant first."""

    coeffs: tuple[int, ...]
    q: int

    def __post_init__(self) -> None:
        c = tuple(int(v) % self.q for v in self.coeffs)
        object.__setattr__(self, "coeffs", _trim(c))

    @classmethod
    def from_vector(cls, vec: Sequence[int], q: int) -> "Poly":
        return cls(tuple(vec), q)

    @classmethod
    def x(cls, q: int) -> "Poly":
        return cls((0, 1), q)

    @classmethod
    def const(cls, c: int, q: int) -> "Poly":
        return cls((c,), q)

    @property
    def context(self) -> FqContext:
        return _context(self.q)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def coeff(self, i: int) -> FieldElement:
        v = self.coeffs[i] if 0 <= i < len(self.coeffs) else 0
        return FieldElement(v, self.context)

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lead == 1

    def monic(self) -> "Poly":
        return Poly(_monic(self.coeffs, self.q), self.q)

    def _same(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise TypeError("Poly expected")
        if other.q != self.q:
            raise ValueError(f"mismatched fields F_{self.q} and F_{other.q}")

    def __add__(self, other: "Poly") -> "Poly":
        return poly_arith(self, other, "add")

    def __sub__(self, other: "Poly") -> "Poly":
        return poly_arith(self, other, "sub")

    def __mul__(self, other: "Poly") -> "Poly":
        return poly_arith(self, other, "mul")

    def __divmod__(self, other: "Poly"):
        return poly_arith(self, other, "divmod")

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __pow__(self, e: int) -> "Poly":
        out = Poly((1,), self.q)
        for _ in range(e):
            out = out * self
        return out

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.q
        return acc

    def to_vector(self) -> list[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, q={self.q})"


@lru_cache(maxsize=None)
def _context(q: int) -> FqContext:
    return FqContext(q)


def poly_arith(a: Poly, b: Poly, op: str):
    a._same(b)
    q = a.q
    if op == "add":
        return Poly(_add(a.coeffs, b.coeffs, q), q)
    if op == "sub":
        return Poly(_sub(a.coeffs, b.coeffs, q), q)
    if op == "mul":
        return Poly(_mul(a.coeffs, b.coeffs, q), q)
    if op == "divmod":
        quo, rem = _divmod(a.coeffs, b.coeffs, q)
        return Poly(quo, q), Poly(rem, q)
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    a._same(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    return Poly(_gcd(a.coeffs, b.coeffs, a.q), a.q)


def derivative(f: Poly) -> Poly:
    return Poly(_derivative(f.coeffs, f.q), f.q)


def is_squarefree(f: Poly) -> bool:
    if f.is_zero():
        raise ValueError("the zero polynomial is not square-free or otherwise")
    return _is_squarefree(f.coeffs, f.q)


def _is_squarefree(c, q) -> bool:
    if len(c) <= 1:
        return True
    d = _derivative(c, q)
    if not d:
        return False
    return len(_gcd(c, d, q)) == 1


def _prime_factors_int(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: Poly) -> bool:
    """Rabin's test."""
    if f.degree < 1 or not f.is_monic():
        raise ValueError(f"irreducibility test needs a monic non-constant polynomial, got {f}")
    return _rabin(f.coeffs, f.q)


def _rabin(c, q) -> bool:
    n = len(c) - 1
    if n == 1:
        return True
    x = (0, 1)
    # x^(q^k) mod f for k = 0..n by repeated q-th powering
    frob = [x]
    for _ in range(n):
        frob.append(_powmod(frob[-1], q, c, q))
    if _sub(frob[n], x, q):
        return False
    for ell in _prime_factors_int(n):
        h = _sub(frob[n // ell], x, q)
        if len(_gcd(c, h, q)) != 1:
            return False
    return True


# ---------------------------------------------------------------- enumeration

def enumerate_monic(q: int, n: int, shard: tuple[int, int] | None = None) -> Iterator[Poly]:
    """All monic polynomials of degree exactly ``n`` in lexicographic order.

    The order is lexicographic on the constant-first coefficient vector.
    ``shard=(i, m)`` restricts to the i-th of m contiguous blocks of values
    of the x^(n-1) coefficient; shards partition the full set.
    """
    for c in _monic_tuples(q, n, shard):
        yield Poly(c, q)


def _monic_tuples(q: int, n: int, shard: tuple[int, int] | None = None):
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        if shard is None or shard[0] == 0:
            yield (1,)
        return
    tops = range(q)
    if shard is not None:
        i, m = shard
        if not 0 <= i < m:
            raise ValueError(f"bad shard {shard}")
        lo, hi = (i * q) // m, ((i + 1) * q) // m
        tops = range(lo, hi)
    tops = list(tops)
    for low in itertools.product(range(q), repeat=n - 1):
        for top in tops:
            yield low + (top, 1)


def monic_index(f: Poly) -> int:
    """Position of a monic f among degree-deg(f) monics, base-q little-endian."""
    idx = 0
    for c in reversed(f.coeffs[:-1]):
        idx = idx * f.q + c
    return idx


def mobius(n: int) -> int:
    if n == 1:
        return 1
    ps = _prime_factors_int(n)
    m = n
    for p in ps:
        m //= p
        if m % p == 0:
            return 0
    return -1 if len(ps) % 2 else 1


def prime_count(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over F_q (Möbius formula)."""
    total = sum(mobius(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0)
    assert total % n == 0
    return total // n


@dataclass(frozen=True)
class PrimeTable:
    q: int
    by_degree: tuple[tuple[Poly, ...], ...]  # entry 0 is empty

    @property
    def max_degree(self) -> int:
        return len(self.by_degree) - 1

    def __getitem__(self, n: int) -> tuple[Poly, ...]:
        return self.by_degree[n]

    def primes_upto(self, n: int):
        for d in range(1, min(n, self.max_degree) + 1):
            yield from self.by_degree[d]


def build_prime_table(q: int, max_degree: int, budget: int | None = None,
                      verify: bool = True) -> PrimeTable:
    """Sieve monic irreducibles up to ``max_degree``.

    Composites of degree n are marked as products P*Q with P prime of degree
    d <= n/2; survivors are re-checked with Rabin's test when ``verify`` is
    set, and every count is compared with the Möbius formula.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    _context(q)
    check_budget(sum(q**n for n in range(1, max_degree + 1)),
                 f"prime table to degree {max_degree} over F_{q}", budget)
    table: list[tuple[Poly, ...]] = [()]
    raw: list[list[tuple[int, ...]]] = [[]]
    for n in range(1, max_degree + 1):
        composite = bytearray(q**n)
        for d in range(1, n // 2 + 1):
            for P in raw[d]:
                for Q in _monic_tuples(q, n - d):
                    prod = _mul(P, Q, q)
                    idx = 0
                    for c in reversed(prod[:-1]):
                        idx = idx * q + c
                    composite[idx] = 1
        primes = []
        for idx in range(q**n):
            if composite[idx]:
                continue
            c, v = [], idx
            for _ in range(n):
                c.append(v % q)
                v //= q
            c.append(1)
            c = tuple(c)
            if verify and not _rabin(c, q):
                raise AssertionError(f"sieve survivor {c} failed Rabin's test")
            primes.append(c)
        primes.sort()
        expected = prime_count(q, n)
        if len(primes) != expected:
            raise AssertionError(f"degree {n}: sieve found {len(primes)} primes, Möbius says {expected}")
        raw.append(primes)
        table.append(tuple(Poly(c, q) for c in primes))
    return PrimeTable(q, tuple(table))


@lru_cache(maxsize=32)
def cached_prime_table(q: int, max_degree: int) -> PrimeTable:
    return build_prime_table(q, max_degree)


def factor(f: Poly, table: PrimeTable | None = None) -> list[tuple[Poly, int]]:
    """Factor a monic polynomial into primes by trial division."""
    if f.is_zero() or not f.is_monic():
        raise ValueError(f"factor needs a monic polynomial, got {f}")
    q = f.q
    rest = f.coeffs
    out = []
    half = (len(rest) - 1) // 2
    if table is None or table.max_degree < half:
        table = cached_prime_table(q, max(half, 1))
    for P in table.primes_upto(half):
        if len(rest) - 1 < 2 * P.degree:
            break
        e = 0
        while True:
            quo, rem = _divmod(rest, P.coeffs, q)
            if rem:
                break
            rest, e = quo, e + 1
        if e:
            out.append((P, e))
    if len(rest) > 1:
        # whatever survives has no factor of degree <= deg/2 among those tried
        out.append((Poly(rest, q), 1))
    return _merge(out)


def _merge(pairs):
    acc: dict[tuple[int, ...], list] = {}
    for P, e in pairs:
        if P.coeffs in acc:
            acc[P.coeffs][1] += e
        else:
            acc[P.coeffs] = [P, e]
    return sorted(((P, e) for P, e in acc.values()), key=lambda t: (t[0].degree, t[0].coeffs))


def von_mangoldt(f: Poly) -> int:
    if f.degree < 1 or not f.is_monic():
        raise ValueError(f"von Mangoldt needs a monic non-constant polynomial, got {f}")
    fac = factor(f)
    return fac[0][0].degree if len(fac) == 1 else 0


# ---------------------------------------------------------------- text forms

_TERM = re.compile(r"^(?:(\d+)\*?)?(x)(?:\^(\d+))?$|^(\d+)$")


def parse_poly(text: str, q: int) -> Poly:
    """Parse ``"x^3+2*x+1"`` or the vector form ``"[1,2,0,1]"`` (constant first)."""
    s = text.replace(" ", "")
    if s.startswith("["):
        if not s.endswith("]"):
            raise ValueError(f"unterminated vector {text!r}")
        body = s[1:-1]
        vec = [int(v) for v in body.split(",")] if body else []
        return Poly(tuple(vec), q)
    if not s:
        raise ValueError("empty polynomial")
    terms = re.findall(r"([+-]?)([^+-]+)", s)
    if "".join(sign + term for sign, term in terms) != s:
        raise ValueError(f"cannot parse {text!r}")
    coeffs: dict[int, int] = {}
    for sign, term in terms:
        m = _TERM.match(term)
        if m is None:
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        if m.group(4) is not None:
            c, k = int(m.group(4)), 0
        else:
            c = int(m.group(1)) if m.group(1) else 1
            k = int(m.group(3)) if m.group(3) else 1
        if sign == "-":
            c = -c
        coeffs[k] = coeffs.get(k, 0) + c
    deg = max(coeffs)
    return Poly(tuple(coeffs.get(i, 0) for i in range(deg + 1)), q)


def format_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for k in range(f.degree, -1, -1):
        c = f.coeffs[k]
        if c == 0:
            continue
        if k == 0:
            parts.append(str(c))
        else:
            mono = "x" if k == 1 else f"x^{k}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)


def format_vector(f: Poly) -> str:
    return "[" + ",".join(str(c) for c in f.coeffs) + "]"
