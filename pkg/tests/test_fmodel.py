import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperell.argument import S_K_from_primes
from hyperell.fmodel import (
    ModelZeroSet,
    PreconditionError,
    circle,
    clustering_check,
    f_k_arg,
    f_k_deriv,
    f_k_value,
    f_value,
    f_zero_equivalence,
    find_fk_zeros,
    fk_truncation_profile,
    fk_zeros_by_critical_points,
    hausdorff_circle,
    min_zero_gap,
    n_k_count,
    n_k_deviation,
    rh_check_fk,
    simplicity_stats,
)
from hyperell.lfunction import circle_scale, lvalue

from conftest import sampled_ldata


def test_f_real_axis_and_origin(small_family):
    for ld in small_family:
        us = np.linspace(-0.5, 0.5, 11) / math.sqrt(ld.q)
        # on the real axis conj(u) = u, so F = (1 + (q u^2)^g) L / 2
        expected = 0.5 * (1 + (ld.q * us * us) ** ld.g) * lvalue(ld, us)
        assert np.max(np.abs(f_value(ld, us) - expected)) < 1e-15
        edge = 1 / math.sqrt(ld.q)
        assert abs(f_value(ld, edge) - lvalue(ld, edge)) < 1e-14
        assert f_value(ld, 0.0) == 0.5
        assert f_k_value(ld, 0.0, 5) == 0.5
        assert np.max(np.abs(np.imag(f_k_value(ld, us, 7)))) < 1e-15


def test_f_equals_l_on_circle(small_family):
    for ld in small_family:
        us = circle(ld, 1024)
        rel = np.abs(f_value(ld, us) - lvalue(ld, us)) / circle_scale(ld)
        assert rel.max() < 1e-10
        assert np.max(np.abs(f_value(ld, ld.roots()))) < 1e-8 * circle_scale(ld)


def test_f_zero_equivalence(small_family):
    for ld in small_family:
        rep = f_zero_equivalence(ld)
        assert rep["interior_margin"] > 1e-6
        assert rep["F_eq_L_defect"] < 1e-10
        assert rep["F_at_0"] == 0.5


def test_f_k_arg_examples(small_family):
    for ld in small_family:
        for K in (1, 4, 16):
            assert f_k_arg(ld, 1.0, K) - f_k_arg(ld, 0.0, K) == pytest.approx(2 * ld.g, abs=1e-9)
            assert f_k_arg(ld, 0.0, K) == S_K_from_primes(ld, 0.0, K)
            th = np.linspace(0, 1, 97)
            M = 2 * ld.g * (1 + 2 * K)
            h = 1e-6
            assert np.all(np.abs(f_k_arg(ld, th + h, K) - f_k_arg(ld, th, K)) <= M * h)
            np.testing.assert_allclose(f_k_arg(ld, th + 1, K), f_k_arg(ld, th, K) + 2 * ld.g, atol=1e-9)


def test_f_k_deriv(small_family, rng):
    for ld in small_family:
        th = ld.theta_array()
        for K in (1, 8, 30):
            grid = np.arange(4 * K + 4) / (4 * K + 4)
            assert np.mean(f_k_deriv(ld, grid, K)) == pytest.approx(2 * ld.g, abs=1e-9)
            x = rng.uniform(0, 1, 64)
            fd = (f_k_arg(ld, x + 1e-7, K) - f_k_arg(ld, x - 1e-7, K)) / 2e-7
            assert np.max(np.abs(fd - f_k_deriv(ld, x, K))) < 1e-4
            assert np.max(np.abs(f_k_deriv(ld, x, K, "primes") - f_k_deriv(ld, x, K))) < 1e-9
        j1 = f_k_deriv(ld, th[0], 1)
        others = 2 * ld.g + 2 + 2 * np.sum(np.cos(2 * np.pi * (th[0] - th[1:])))
        assert j1 == pytest.approx(others, abs=1e-12)
    with pytest.raises(ValueError):
        f_k_deriv(small_family[0], 0.1, 2, side="bogus")


def _check_zero_set(ld, z: ModelZeroSet):
    g = ld.g
    assert z.count >= 2 * g
    assert np.all(np.diff(z.phis) > 0) and z.phis.min() >= 0 and z.phis.max() < 1
    vals = f_k_arg(ld, z.phis, z.K)
    frac = vals - np.floor(vals)
    assert np.max(np.abs(frac - 0.5)) < 1e-9
    assert np.max(z.residuals) < 1e-9
    br = sorted(z.brackets)
    for (a0, b0), (a1, b1) in zip(br, br[1:]):
        assert b0 <= a1
    for phi, (a, b), lv, t in zip(z.phis, z.brackets, z.levels, z.tangential):
        assert a - 1e-12 <= phi <= b + 1e-12 or a - 1e-12 <= phi + 1 <= b + 1e-12
        if not t:
            fa, fb = f_k_arg(ld, np.array([a, b]), z.K) - lv
            assert fa * fb <= 0
    assert n_k_count(z, 1.0) == z.count
    assert np.sum(np.abs(z.derivs) <= 1e-6) <= 2 * z.K


@pytest.mark.parametrize("K", [1, 4, 8, 16, 32, 64])
def test_find_fk_zeros(small_family, K):
    for ld in small_family:
        z = find_fk_zeros(ld, K)
        _check_zero_set(ld, z)
        alt = fk_zeros_by_critical_points(ld, K)
        assert len(alt) == z.count
        assert hausdorff_circle(z.phis, alt) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 40))
def test_find_fk_zeros_property(seed, K):
    ld = sampled_ldata(3, 3, 1, seed=seed % 97)[0]
    _check_zero_set(ld, find_fk_zeros(ld, K))


def test_find_fk_zeros_rejects_K0(small_family):
    with pytest.raises(ValueError):
        find_fk_zeros(small_family[0], 0)


def test_zeros_approach_theta(small_family):
    for ld in small_family:
        gap = min_zero_gap(ld)
        c = ld.g * gap  # c/2g = gap/2
        K = math.ceil(ld.g**2 / c) + 1
        z = find_fk_zeros(ld, max(K, 64))
        assert hausdorff_circle(z.phis, ld.theta_array()) < c / (2 * ld.g)


def test_hausdorff_shrinks(small_family):
    for ld in small_family:
        d = [hausdorff_circle(find_fk_zeros(ld, 2**k).phis, ld.theta_array()) for k in range(4, 10)]
        assert d[-1] <= d[0] and d[-1] < 1e-3


def test_rh_check_fk(small_family):
    for ld in small_family:
        for K in (1, 8, 64):
            r = rh_check_fk(ld, K)
            assert r["modulus_identity_defect"] < 1e-12
            assert r["interior_margin"] > 0
            assert r["F_K_at_0"] == 0.5


def test_clustering_examples():
    ran = 0
    for ld in sampled_ldata(3, 3, 8, seed=21):
        gap = min_zero_gap(ld)
        if gap < 0.04:
            continue
        ran += 1
        assert clustering_check(ld, 64, 0.02)
        delta = 0.49 * gap
        K = math.floor(ld.g / (math.pi * delta)) + 1
        assert clustering_check(ld, K, delta)
        with pytest.raises(PreconditionError):
            clustering_check(ld, 10, 0.02)
        with pytest.raises(PreconditionError):
            clustering_check(ld, 10**4, 0.6 * gap)
    assert ran > 0


def test_simplicity_and_counting():
    ld = sampled_ldata(3, 8, 1, seed=4)[0]
    K = math.ceil(math.log(8) * math.log(8, 3))
    z = find_fk_zeros(ld, K)
    assert 0 <= simplicity_stats(z) <= 1
    assert 1 - simplicity_stats(z) >= 0.9
    dev = n_k_deviation(ld, z)
    assert dev["Phi"] == pytest.approx(8 / math.log(8, 3))
    empty = ModelZeroSet(1, 1, np.zeros(0), np.zeros(0), np.zeros(0), [], np.zeros(0), np.zeros(0, bool))
    assert simplicity_stats(empty) == 0.0 and n_k_count(empty, 0.5) == 0
    fake = ModelZeroSet(1, 1, np.array([0.1, 0.2]), np.array([0.0, 3.0]), np.array([0.5, 1.5]),
                        [(0, 0.15), (0.15, 0.3)], np.zeros(2), np.array([True, False]))
    assert simplicity_stats(fake) == 0.5
    assert n_k_count(fake, 0.15) == 1


def test_fk_circle_profile_shape(small_family):
    for ld in small_family:
        K = math.ceil(2 * ld.g**2 / 0.5)
        assert fk_truncation_profile(ld, K, c=0.5).ratio < 10


def test_rows_are_serialisable(small_family):
    z = find_fk_zeros(small_family[0], 4)
    rows = z.to_rows()
    assert len(rows) == z.count and {"phi", "deriv", "level", "residual"} <= set(rows[0])
