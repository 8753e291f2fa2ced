"""Arithmetic in the prime field F_q and its quadratic character."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FqContext:
    """The prime field F_q, q an odd prime."""

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 3 or not is_prime(self.q):
            raise ValueError(f"q must be an odd prime, got {self.q!r}")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.q, self)

    def elements(self):
        return [FieldElement(a, self) for a in range(self.q)]


@dataclass(frozen=True)
class FieldElement:
    value: int
    context: FqContext

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.context.q:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.context.q}")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError("field element expected")
        if other.context != self.context:
            raise ValueError(f"mismatched fields F_{self.context.q} and F_{other.context.q}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "add")

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "sub")

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "mul")

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "div")

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value % self.context.q, self.context)

    def __pow__(self, e: int) -> "FieldElement":
        return field_pow(self, e)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.context.q})"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    a._check(b)
    q = a.context.q
    if op == "add":
        v = a.value + b.value
    elif op == "sub":
        v = a.value - b.value
    elif op == "mul":
        v = a.value * b.value
    elif op == "div":
        if b.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{q}")
        v = a.value * inverse_mod(b.value, q)
    else:
        raise ValueError(f"unknown field operation {op!r}")
    return FieldElement(v % q, a.context)


def field_pow(a: FieldElement, e: int) -> FieldElement:
    """Square-and-multiply; 0^0 = 1."""
    if e < 0:
        raise ValueError("negative exponent")
    q = a.context.q
    result, base = 1, a.value
    while e:
        if e & 1:
            result = result * base % q
        base = base * base % q
        e >>= 1
    return FieldElement(result, a.context)


def inverse_mod(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {q}")
    return pow(a, -1, q)


@lru_cache(maxsize=None)
def eta_table(q: int) -> tuple[int, ...]:
    """Quadratic character of F_q as a lookup table indexed by residue."""
    half = (q - 1) // 2
    out = []
    for a in range(q):
        r = pow(a, half, q)
        out.append(0 if a == 0 else (1 if r == 1 else -1))
    return tuple(out)


def fq_quadratic_character(a: FieldElement) -> int:
    """Euler criterion a^((q-1)/2) read as a sign in {-1, 0, 1}."""
    q = a.context.q
    r = field_pow(a, (q - 1) // 2).value
    if r == 0:
        return 0
    return 1 if r == 1 else -1
