from fractions import Fraction

import numpy as np
import pytest

from yflift import quatlat as ql
from yflift.errors import ConfigError, InvalidDiscriminant


@pytest.mark.parametrize("N", [2, 3, 5, 7, 11, 30, 42])
def test_algebra_ramification(N):
    alg = ql.build_algebra(N)
    assert alg.ramified_places() == ql.prime_factors(N) + [0]


@pytest.mark.parametrize("N", [6, 1, 4, 15])
def test_invalid_discriminant(N):
    with pytest.raises(InvalidDiscriminant):
        ql.build_algebra(N)


@pytest.mark.parametrize("N", [2, 3, 11, 13])
def test_maximal_order_discriminant(N):
    alg = ql.build_algebra(N)
    O = ql.eichler_order(alg, 1)
    assert O.discriminant == N
    assert ql.is_order(alg, O.basis)


def test_eichler_order_level():
    alg = ql.build_algebra(11)
    R = ql.eichler_order(alg, 3)
    assert R.discriminant == 33
    with pytest.raises(ConfigError):
        ql.eichler_order(alg, 11)
    with pytest.raises(ConfigError):
        ql.eichler_order(alg, 9)


def test_short_vectors_match_box_search():
    alg = ql.build_algebra(11)
    O = ql.eichler_order(alg, 1)
    G = ql.norm_gram(alg, O.basis)
    fast = sorted(map(tuple, ql.short_vectors(G, 12)))
    slow = sorted(map(tuple, ql.short_vectors_naive(G, 12, 8)))
    assert fast == slow


def test_short_vectors_include_zero_and_respect_bound():
    G = [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 4]]
    v = ql.short_vectors(G, 5)
    norms = np.einsum("mi,ij,mj->m", v, np.array(G), v) // 2
    assert norms.max() <= 5
    assert (v == 0).all(axis=1).sum() == 1


def test_quad_lattice_rejects_bad_gram():
    with pytest.raises(ConfigError):
        ql.QuadLattice([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]])
    with pytest.raises(ConfigError):
        ql.QuadLattice([[2, 3, 0, 0], [3, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]])


def test_hurwitz_pairs_with_identity_gram():
    """Pairs of Hurwitz units with n = 1 and (x1, x2) = 0, counted by brute force."""
    alg = ql.build_algebra(2)
    O = ql.eichler_order(alg, 1)
    lat = ql.QuadLattice(ql.norm_gram(alg, O.basis))
    units = ql.short_vectors(lat.gram, 1)
    units = [u for u in units if lat.norm(u) == 1]
    assert len(units) == 24
    brute = sum(1 for x in units for y in units if lat.pair(x, y) == 0)
    assert brute == 24 * 6
    assert len(ql.vectors_with_gram(lat, (1, 0, 1))) == brute


@pytest.mark.parametrize("N_minus,level,h", [(2, 1, 1), (3, 1, 1), (11, 1, 2), (11, 3, 4), (13, 1, 1), (23, 1, 3), (37, 1, 3)])
def test_class_numbers_and_mass(N_minus, level, h):
    alg = ql.build_algebra(N_minus)
    cs = ql.ideal_classes(ql.eichler_order(alg, level))
    assert cs.size == h
    assert cs.mass() == ql.eichler_mass(N_minus, level)


def test_class_set_independent_of_neighbour_prime():
    alg = ql.build_algebra(11)
    R = ql.eichler_order(alg, 3)
    a = ql.ideal_classes(R, prime=2)
    b = ql.ideal_classes(R, prime=5)
    assert a.size == b.size
    assert sorted(a.unit_orders) == sorted(b.unit_orders)
    for J in b.representatives:
        a.find(J)


def test_worked_instance_masses():
    assert ql.eichler_mass(11, 1) == Fraction(5, 6)
    assert ql.eichler_mass(11, 3) == Fraction(10, 3)
