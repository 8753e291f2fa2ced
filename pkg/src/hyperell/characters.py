"""Quadratic residue and Jacobi symbols in F_q[x], and the character chi_D."""

from __future__ import annotations

from dataclasses import dataclass

from .ff_core import eta_table, inverse_mod
from .poly import (
    Poly,
    PrimeTable,
    _mod,
    _powmod,
    _rabin,
    _scale,
    factor,
    is_squarefree,
)


def residue_symbol(f: Poly, P: Poly, check: bool = True) -> int:
    """(f/P) for a prime P by Euler's criterion f^((|P|-1)/2) mod P."""
    f._same(P)
    if P.degree < 1 or not P.is_monic():
        raise ValueError(f"residue symbol needs a monic prime, got {P}")
    if check and not _rabin(P.coeffs, P.q):
        raise ValueError(f"{P} is not irreducible")
    q = P.q
    r = _mod(f.coeffs, P.coeffs, q)
    if not r:
        return 0
    v = _powmod(r, (q**P.degree - 1) // 2, P.coeffs, q)
    if v == (1,):
        return 1
    if v == (q - 1,):
        return -1
    raise ArithmeticError(f"Euler criterion gave non-constant {v} mod {P}")


def jacobi_by_factoring(A: Poly, Q: Poly, table: PrimeTable | None = None) -> int:
    """(A/Q) straight from the definition: product over the factorization of Q."""
    A._same(Q)
    if Q.is_zero() or not Q.is_monic():
        raise ValueError(f"Jacobi symbol needs a monic modulus, got {Q}")
    out = 1
    if Q.degree == 0:
        return 1
    for P, e in factor(Q, table):
        out *= residue_symbol(A, P, check=False) ** e
        if out == 0:
            return 0
    return out


def jacobi(A: Poly, Q: Poly) -> int:
    """(A/Q) by Euclidean descent with quadratic reciprocity."""
    A._same(Q)
    if Q.is_zero() or not Q.is_monic():
        raise ValueError(f"Jacobi symbol needs a monic modulus, got {Q}")
    return _jacobi(A.coeffs, Q.coeffs, A.q)


def _jacobi(a, b, q) -> int:
    # b monic throughout; a arbitrary
    eta = eta_table(q)
    odd_half = ((q - 1) // 2) % 2 == 1
    result = 1
    while True:
        db = len(b) - 1
        if db == 0:
            return result
        a = _mod(a, b, q)
        if not a:
            return 0
        c = a[-1]
        if c != 1:
            a = _scale(a, inverse_mod(c, q), q)
            if db % 2 and eta[c] == -1:
                result = -result
        da = len(a) - 1
        if da == 0:
            return result
        if odd_half and da % 2 and db % 2:
            result = -result
        a, b = b, a


@dataclass(frozen=True)
class QuadraticCharacter:
    """chi_D for D monic square-free of odd degree 2g+1."""

    D: Poly

    def __post_init__(self) -> None:
        D = self.D
        if not D.is_monic():
            raise ValueError(f"D must be monic, got {D}")
        if D.degree < 3 or D.degree % 2 == 0:
            raise ValueError(f"D must have odd degree 2g+1 >= 3, got degree {D.degree}")
        if not is_squarefree(D):
            raise ValueError(f"D = {D} is not square-free")

    @property
    def q(self) -> int:
        return self.D.q

    @property
    def g(self) -> int:
        return (self.D.degree - 1) // 2

    def __call__(self, f: Poly) -> int:
        return chi_D(self, f)


def chi_D(chi: QuadraticCharacter, f: Poly) -> int:
    if f.is_zero() or not f.is_monic():
        raise ValueError(f"chi_D is evaluated on monic polynomials, got {f}")
    return _jacobi(chi.D.coeffs, f.coeffs, chi.q)


def _chi_raw(D, f, q) -> int:
    """chi_D(f) on raw tuples, flipped so the descent starts from (f/D)."""
    # (D/f) = (f/D) * (-1)^(((q-1)/2) deg D deg f); deg D is odd
    s = _jacobi(f, D, q)
    if ((q - 1) // 2) % 2 and (len(f) - 1) % 2:
        s = -s
    return s


def symbol_text(A: Poly, Q: Poly) -> dict:
    return {"A": str(A), "Q": str(Q), "q": A.q, "symbol": jacobi(A, Q)}


__all__ = [
    "QuadraticCharacter",
    "chi_D",
    "jacobi",
    "jacobi_by_factoring",
    "residue_symbol",
]
