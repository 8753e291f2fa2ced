import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperell.poly import (
    BudgetExceeded,
    Poly,
    build_prime_table,
    check_budget,
    derivative,
    enumerate_monic,
    factor,
    format_poly,
    format_vector,
    is_irreducible,
    is_squarefree,
    mobius,
    parse_poly,
    poly_arith,
    poly_gcd,
    prime_count,
    von_mangoldt,
)


def P(text, q=3):
    return parse_poly(text, q)


def test_arith_examples():
    assert P("x+1") * P("x+1") == P("x^2+2*x+1")
    assert divmod(P("x^2+1"), P("x")) == (P("x"), P("1"))
    assert (P("x^2+3", 5) - P("x^2+3", 5)).is_zero()
    assert poly_arith(P("x+2"), P("x"), "add") == P("2*x+2")
    with pytest.raises(ZeroDivisionError):
        divmod(P("x"), Poly((), 3))
    with pytest.raises(ValueError):
        P("x") + P("x", 5)


def test_gcd_examples():
    assert poly_gcd(P("x^2-1"), P("x-1")) == P("x+2")
    assert poly_gcd(P("x"), P("x+1")) == P("1")
    assert poly_gcd(P("2*x+2", 5), P("x+1", 5)) == P("x+1", 5)
    with pytest.raises(ValueError):
        poly_gcd(Poly((), 3), Poly((), 3))


def test_derivative_examples():
    assert derivative(P("x^3")).is_zero()
    assert derivative(P("x^2+x+1")) == P("2*x+1")
    assert derivative(P("7", 5)).is_zero()


def test_squarefree_examples():
    assert not is_squarefree(P("x^2+2*x+1"))
    assert is_squarefree(P("x^2+1"))
    assert not is_squarefree(P("x^3"))
    with pytest.raises(ValueError):
        is_squarefree(Poly((), 3))


def test_irreducible_examples():
    assert is_irreducible(P("x"))
    assert not is_irreducible(P("x^2+2"))
    assert is_irreducible(P("x^2+1"))
    for bad in ("2*x+1", "2"):
        with pytest.raises(ValueError):
            is_irreducible(P(bad))


def test_enumeration_examples():
    assert list(enumerate_monic(3, 0)) == [P("1")]
    assert [format_poly(f) for f in enumerate_monic(3, 1)] == ["x", "x+1", "x+2"]
    four = list(enumerate_monic(3, 4))
    assert len(four) == 81 == len(set(four))
    vecs = [f.coeffs for f in four]
    assert vecs == sorted(vecs)


@pytest.mark.parametrize("q,n,m", [(3, 3, 2), (5, 2, 3), (3, 4, 3)])
def test_shards_partition(q, n, m):
    full = list(enumerate_monic(q, n))
    parts = [list(enumerate_monic(q, n, (i, m))) for i in range(m)]
    assert Counter(f for p in parts for f in p) == Counter(full)


def test_prime_table_examples():
    t = build_prime_table(3, 3)
    assert [len(t[n]) for n in (1, 2, 3)] == [3, 3, 8]
    assert all(is_irreducible(p) for n in (1, 2, 3) for p in t[n])


@pytest.mark.parametrize("q,nmax", [(3, 6), (5, 6)])
def test_prime_count_matches_enumeration(q, nmax):
    # Rabin filter over every monic polynomial, independent of the sieve
    for n in range(1, nmax + 1 if q == 3 else 5):
        direct = sum(is_irreducible(f) for f in enumerate_monic(q, n))
        assert direct == prime_count(q, n)
    t = build_prime_table(q, nmax)
    assert [len(t[n]) for n in range(1, nmax + 1)] == [prime_count(q, n) for n in range(1, nmax + 1)]


def test_mobius():
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_von_mangoldt_examples():
    assert von_mangoldt(P("x^2")) == 1
    assert von_mangoldt(P("x^2+x")) == 0
    assert von_mangoldt(P("x^2+1")) == 2
    with pytest.raises(ValueError):
        von_mangoldt(P("1"))


@pytest.mark.parametrize("q,nmax", [(3, 6), (5, 4)])
def test_chebyshev_identity(q, nmax):
    for n in range(1, nmax + 1):
        assert sum(von_mangoldt(f) for f in enumerate_monic(q, n)) == q**n


def test_squarefree_count():
    for n in range(2, 7):
        assert sum(is_squarefree(f) for f in enumerate_monic(3, n)) == 3**n - 3 ** (n - 1)


def test_unique_factorization():
    table = build_prime_table(3, 5)
    for n in range(1, 6):
        for f in enumerate_monic(3, n):
            prod = Poly((1,), 3)
            for p, e in factor(f, table):
                assert is_irreducible(p)
                prod = prod * p**e
            assert prod == f


def test_budget():
    with pytest.raises(BudgetExceeded):
        check_budget(11, "test", budget=10)
    with pytest.raises(BudgetExceeded):
        build_prime_table(3, 30)


def test_parse_forms():
    f = P("x^3+2*x+1")
    assert P("[1,2,0,1]") == f
    assert format_vector(f) == "[1,2,0,1]"
    assert P("x^3 - x + 1") == f
    assert P("4*x^2+x", 3) == P("x^2+x")
    assert format_poly(Poly((), 3)) == "0"
    for bad in ("x^", "y+1", "[1,a]", "x**2"):
        with pytest.raises(ValueError):
            P(bad)


coeff_lists = st.lists(st.integers(0, 4), max_size=7)


@settings(max_examples=200)
@given(coeff_lists, coeff_lists)
def test_text_round_trip_and_ring_laws(a, b):
    q = 5
    f, h = Poly(tuple(a), q), Poly(tuple(b), q)
    assert parse_poly(format_poly(f), q) == f
    assert parse_poly(format_vector(f), q) == f
    assert f * h == h * f
    assert (f + h) - h == f
    if not h.is_zero():
        quo, rem = divmod(f, h)
        assert quo * h + rem == f
        assert rem.degree < h.degree


def test_all_degree_two_products_are_composite():
    primes1 = list(enumerate_monic(3, 1))
    comps = {a * b for a, b in itertools.product(primes1, repeat=2)}
    for f in enumerate_monic(3, 2):
        assert is_irreducible(f) == (f not in comps)
