from fractions import Fraction
import random

import numpy as np
import pytest

from yflift import polyrep as pr
from yflift.errors import DegreeError


def test_pair_n_values():
    X, Y = pr.HomPoly.monomial(1, 1), pr.HomPoly.monomial(1, 0)
    assert pr.pair_n(Y, X) == 1
    assert pr.pair_n(X, Y) == -1
    assert pr.pair_n(X, X) == 0


def test_pair_n_degree_mismatch():
    with pytest.raises(DegreeError):
        pr.pair_n(pr.HomPoly.monomial(2, 0), pr.HomPoly.monomial(1, 0))


def test_homogeneous_poly_length_checked():
    with pytest.raises(DegreeError):
        pr.HomPoly(2, (1, 2))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pairing_invariant_under_sl2(n):
    rng = random.Random(n)
    for _ in range(5):
        a, b, c = (Fraction(rng.randint(-5, 5)) for _ in range(3))
        if a == 0:
            a = Fraction(1)
        g = ((a, b), (c, (1 + b * c) / a))
        P = pr.HomPoly(n, tuple(Fraction(rng.randint(-3, 3)) for _ in range(n + 1)))
        Q = pr.HomPoly(n, tuple(Fraction(rng.randint(-3, 3)) for _ in range(n + 1)))
        kappa = (n, 0)
        assert pr.pair_n(pr.act_rho(kappa, g, P), pr.act_rho(kappa, g, Q)) == pr.pair_n(P, Q)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_tau_is_a_representation(k):
    g = ((Fraction(2), Fraction(1)), (Fraction(1), Fraction(1)))
    h = ((Fraction(1), Fraction(-3)), (Fraction(2), Fraction(5)))
    gh = pr.matmul([list(r) for r in g], [list(r) for r in h])
    lhs = pr.tau_matrix(k, gh)
    rhs = pr.matmul(pr.tau_matrix(k, g), pr.tau_matrix(k, h))
    assert lhs == rhs


def test_tau_trivial_on_scalars():
    s = ((Fraction(7), 0), (0, Fraction(7)))
    M = pr.tau_matrix(2, s)
    assert M == [[1 if i == j else 0 for j in range(5)] for i in range(5)]


def test_pair_W_matches_weight_array():
    k1, k2 = 2, 1
    rng = np.random.default_rng(0)
    u = pr.WeightVector(k1, k2, [[Fraction(int(x)) for x in r] for r in rng.integers(-4, 5, size=(5, 3))])
    v = pr.WeightVector(k1, k2, [[Fraction(int(x)) for x in r] for r in rng.integers(-4, 5, size=(5, 3))])
    c = pr.pair_W_weights(k1, k2)
    num = np.sum(u.as_array().real * v.as_array().real[::-1, ::-1] * c)
    assert abs(num - float(pr.pair_W(u, v))) < 1e-12


def test_dual_basis_is_dual():
    k1, k2 = 1, 1
    for i in range(3):
        for j in range(3):
            for r in range(3):
                for s in range(3):
                    val = pr.pair_W(pr.WeightVector.basis(k1, k2, r, s), pr.dual_basis(k1, k2, i, j))
                    assert val == (1 if (r, s) == (i, j) else 0)


@pytest.mark.parametrize("k2", [0, 1, 2, 3])
def test_su2_pairing_constant(k2):
    assert abs(pr.su2_pairing_quadrature(k2) - float(pr.pairing_constant_bb(k2))) < 1e-6
