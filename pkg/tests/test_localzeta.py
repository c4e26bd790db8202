from fractions import Fraction
import math

import numpy as np
import pytest

from yflift import localzeta as lz
from yflift.errors import ConfigError, DomainError


def test_macdonald_small_m():
    s = lz.unitary_satake(0.7, 1 / 3)
    assert abs(lz.macdonald_c(0, s) - 1) < 1e-15
    expect = math.sqrt(1 / 3) * (s.alpha + s.beta) / (1 + 1 / 3)
    assert abs(lz.macdonald_c(1, s) - expect) < 1e-15


def test_macdonald_matches_hecke_recursion():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = lz.unitary_satake(rng.uniform(0, 2 * math.pi), 1 / 5)
        rec = lz.spherical_c_recursive(12, s)
        for m in range(13):
            assert abs(lz.macdonald_c(m, s) - rec[m]) < 1e-12


def test_macdonald_confluent_limit():
    s = lz.SatakeDatum(1, 1, 1 / 2)
    near = lz.SatakeDatum(np.exp(1e-7j), np.exp(-1e-7j), 1 / 2)
    for m in range(6):
        assert abs(lz.macdonald_c(m, s) - lz.macdonald_c(m, near)) < 1e-6


def test_ramanujan_slack_enforced():
    with pytest.raises(DomainError):
        lz.SatakeDatum(3, 1 / 3, 1 / 2)


def test_unknown_place_type():
    with pytest.raises(ConfigError):
        lz.LocalZetaDatum("split-weird", 2)


def test_split_unram_identity_coset():
    d = lz.LocalZetaDatum("split-unram", 3, s1=lz.unitary_satake(0.3, 1 / 3), s2=lz.unitary_satake(1.1, 1 / 3))
    assert abs(lz.zeta_series_oracle(d, 0) - 1) < 1e-15


def test_weil_volumes():
    d1 = lz.LocalZetaDatum("split-Nplus", 3, chi1=1, chi2=1)
    assert lz.weil_volume(d1, (0, 0, 0, 0)) == Fraction(1, 9)
    d0 = lz.LocalZetaDatum("split-unram", 3, s1=lz.unitary_satake(0, 1 / 3), s2=lz.unitary_satake(0, 1 / 3))
    for n, a in [(0, 0), (1, 0), (2, 1), (-1, 3)]:
        assert lz.weil_volume(d0, (0, 0, n, a)) == Fraction(1, 3) ** (2 * (abs(n) + abs(a)))


@pytest.mark.parametrize("place", lz.PLACE_TYPES)
def test_closed_form_matches_series(place):
    rows = lz.compare_table(place, primes=(2, 3, 5), draws=8, seed=11)
    assert all(r["passed"] for r in rows)


@pytest.mark.parametrize("place,kw", [
    ("split-Nminus", {"eps_p": 1, "eps_pc": -1}),
    ("inert-Nplus", {"chi1": 1}),
    ("split-Nplus", {"chi1": -1, "chi2": 1}),
])
def test_vanishing_cases_are_exact_zero(place, kw):
    d = lz.LocalZetaDatum(place, 5, **kw)
    assert d.epsilon == -1
    assert lz.zeta_closed(d) == 0
    assert lz.zeta_series_oracle(d, 30) == 0


def test_ramified_closed_form():
    rng = np.random.default_rng(5)
    d = lz.LocalZetaDatum("ramified", 5, s1=lz.unitary_satake(rng.uniform(0, 6), 1 / 5))
    expect = float(lz.ramified_scalar(d)) * (1 + 1 / 5) * lz.asai_local_factor(d) / (lz.zeta_p(5, 1) * lz.zeta_p(5, 2))
    assert abs(lz.zeta_closed(d) - expect) < 1e-15


def test_formal_sum():
    assert lz.formal_sum_check(0.0, 0.5, 0.25) == (0.25, 0.25)
    lhs, rhs = lz.formal_sum_check(0.1, 0.2, 0.3, M=80)
    assert abs(lhs - rhs) < 1e-12
    lhs, rhs = lz.formal_sum_check(degree=12)
    assert lhs == rhs
    with pytest.raises(DomainError):
        lz.formal_sum_check(1.5, 0.1, 0.1)


def test_stabilized_norm_two_ways():
    rng = np.random.default_rng(2)
    for _ in range(10):
        d = lz.LocalZetaDatum("split-Nplus", 3, s1=lz.unitary_satake(rng.uniform(0, 6), 1 / 3), chi2=1)
        assert abs(lz.bsigma_fdag_closed(d) - lz.bsigma_fdag_oracle(d)) < 1e-13
