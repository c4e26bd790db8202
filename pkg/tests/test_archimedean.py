from fractions import Fraction
from math import factorial, pi

import pytest

from yflift import archimedean as ar
from yflift.errors import DomainError


def test_pairing_integral_all_small_weights():
    for k1 in range(7):
        for k2 in range(k1 + 1):
            assert ar.su2_pairing_integral(k1, k2) == ar.su2_pairing_closed(k1, k2)


def test_pairing_sign():
    for k1 in range(5):
        for k2 in range(k1 + 1):
            assert (ar.su2_pairing_closed(k1, k2) > 0) == (k2 % 2 == 0)


def test_alternating_binomial_sum_up_to_50():
    for k1 in range(51):
        for k2 in range(k1 + 1):
            lhs, rhs = ar.binomial_identity_8I(k1, k2)
            assert lhs == rhs


def test_quadruple_binomial_sum():
    for k1 in range(5):
        for k2 in range(k1 + 1):
            for b in range(-k2, k2 + 1):
                lhs, rhs = ar.coeff_identity_7I(k1, k2, b)
                assert lhs == rhs == ar.coeff_closed_7I(k1, k2, b)


def test_trig_moment_closed_form():
    for K in range(10):
        for A in range(-12, 13):
            assert ar.trig_moment(K, A) == ar.trig_moment_closed(K, A)


def test_weight_check():
    with pytest.raises(DomainError):
        ar.su2_pairing_closed(1, 2)


def test_gaussian_integral_exact():
    for k1 in range(7):
        for k2 in range(k1 + 1):
            v = ar.gaussian_integral_I(k1, k2)
            c = ar.gaussian_integral_closed(k1, k2)
            assert (v.q, v.e) == (c.q, c.e)
    assert float(ar.gaussian_integral_I(0, 0)) == pytest.approx(2 ** -8)


@pytest.mark.parametrize("k", [(0, 0), (1, 0), (1, 1), (2, 1)])
def test_gauss_hermite_oracle(k):
    assert ar.gauss_hermite_I(*k) == pytest.approx(float(ar.gaussian_integral_I(*k)), rel=1e-9)


@pytest.mark.parametrize("k", [(1, 0), (2, 1)])
def test_monte_carlo_oracle(k):
    est, se = ar.monte_carlo_I(*k, samples=10 ** 6, threads=2)
    exact = float(ar.gaussian_integral_I(*k))
    assert abs(est - exact) <= max(1e-2 * abs(exact), 5 * se)


def test_monte_carlo_deterministic():
    a = ar.monte_carlo_I(1, 1, samples=200000, seed=4, threads=2)
    b = ar.monte_carlo_I(1, 1, samples=200000, seed=4, threads=2)
    assert a == b


def test_radial_factor():
    r = ar.radial_factor(0)
    assert float(r) == pytest.approx(0.5 * (4 * pi) ** -2)


def test_sweep_table():
    rows = ar.sweep(3)
    assert len(rows) == 10 and all(r["sign_ok"] for r in rows)
