from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from yflift import autoforms as af
from yflift import quatlat as ql
from yflift.errors import GaloisSelfDualError, RamifiedPrimeError


@pytest.fixture(scope="module")
def spaces(worked):
    return worked.space(1, 0), worked.space(3, 0)


def test_brandt_row_sums_and_commutation(spaces):
    for S in spaces:
        mats = {p: af.brandt_matrix(p, 0, S).full() for p in (2, 5, 7)}
        for p, M in mats.items():
            assert M.dtype.kind == "i"
            assert (M.sum(axis=1) == p + 1).all()
        assert (mats[2] @ mats[5] == mats[5] @ mats[2]).all()
        assert (mats[5] @ mats[7] == mats[7] @ mats[5]).all()


def test_brandt_self_adjoint_for_mass_pairing(spaces):
    for S in spaces:
        w = np.array([len(u) for u in S.unit_groups])
        B = af.brandt_matrix(2, 0, S).full()
        assert (B * w[None, :] == (B * w[None, :]).T).all()


def test_brandt_at_ramified_prime(spaces):
    with pytest.raises(RamifiedPrimeError):
        af.brandt_matrix(11, 0, spaces[0])


@pytest.mark.parametrize("p", [2, 5, 7])
def test_brandt_eigenvalues_match_point_counts(worked, p):
    f1, f2 = worked.forms
    assert f1.hecke_exact[p] == af.ec_ap(af.CURVES["11a"], p)
    assert f2.hecke_exact[p] == af.ec_ap(af.CURVES["33a"], p)


def test_exact_eigenvectors(worked):
    f1, f2 = worked.forms
    assert f1.exact is not None and f2.exact is not None
    S1 = worked.space(1, 0)
    B = af.brandt_matrix(2, 0, S1).full()
    v = [Fraction(x) for x in f1.exact]
    Bv = [sum(int(B[i, j]) * v[j] for j in range(len(v))) for i in range(len(v))]
    assert Bv == [f1.hecke_exact[2] * x for x in v]


def test_atkin_lehner_signs(worked):
    f1, f2 = worked.forms
    # classical a_11(11a) = 1, a_3(33a) = -1, a_11(33a) = 1
    assert af.classical_bad_ap(f1, 11, 11) == 1
    assert af.classical_bad_ap(f2, 3, 11) == -1
    assert af.classical_bad_ap(f2, 11, 11) == 1
    S3 = worked.space(3, 0)
    W = af.atkin_lehner_matrix(S3, 3)
    assert np.allclose(W @ W, np.eye(S3.H))
    assert np.allclose(W @ f2.values, f2.al_signs[3] * f2.values)


def test_new_and_old_dimensions(worked):
    S1, S3 = worked.space(1, 0), worked.space(3, 0)
    assert len(af.newforms(S1)) == 1
    assert len(af.newforms(S3)) == 1
    # two copies of the level-1 space, sharing the constant function
    old = af.old_subspace(S3, [S1])
    assert old.shape[1] == 2 * S1.H - 1


def test_theta_eigenvalues_match_curves(worked):
    f1, f2 = worked.forms
    primes = ql.primes_up_to(150)
    th1 = af.theta_hecke_eigenvalues(worked.space(1, 0), f1, 150)
    th2 = af.theta_hecke_eigenvalues(worked.space(3, 0), f2, 150)
    c1 = af.ec_ap_table(af.CURVES["11a"], [p for p in primes if p != 11])
    c2 = af.ec_ap_table(af.CURVES["33a"], [p for p in primes if p not in (3, 11)])
    assert th1 == {p: Fraction(v) for p, v in c1.items()}
    assert th2 == {p: Fraction(v) for p, v in c2.items()}


def test_point_count_table_matches_naive():
    ps = [2, 3, 5, 7, 13, 17, 19, 23]
    assert af.ec_ap_table(af.CURVES["33a"], ps) == {p: af.ec_ap(af.CURVES["33a"], p) for p in ps}


def test_stabilization(worked):
    fd = worked.fdag
    assert fd.P == [3]
    assert fd.eps == {3: 1}
    assert fd.exact1 == tuple(Fraction(x) for x in (4, -1, -6, -1))
    S3 = worked.space(3, 0)
    W = af.atkin_lehner_matrix(S3, 3)
    assert np.allclose(W @ fd.values1, fd.eps[3] * fd.values1)


def test_stabilization_primes():
    assert af.stabilization_primes(11, 33, 11) == [3]
    assert af.stabilization_primes(33, 33, 11) == []
    assert af.stabilization_primes(55, 33, 11) == [3, 5]


def test_self_dual_pair_rejected(worked):
    f1, _ = worked.forms
    S1 = worked.space(1, 0)
    with pytest.raises(GaloisSelfDualError):
        af.stabilize(f1, f1, 11, 11, S1, {1: S1})


def test_weight_four_eigenvalues():
    """Weight 2k+2 = 4, level 11: a_2 = 1 +- sqrt 3, a_3 = -1 +- 4 sqrt 3."""
    alg = ql.build_algebra(11)
    S = af.FormSpace(ql.ideal_classes(ql.eichler_order(alg, 1)), 1)
    fs = af.newforms(S)
    assert sorted(round(f.a_p(2), 9) for f in fs) == sorted(round(1 + s * sqrt(3), 9) for s in (1, -1))
    assert sorted(round(f.a_p(3), 9) for f in fs) == sorted(round(-1 + 4 * s * sqrt(3), 9) for s in (1, -1))
    # Hecke relation T(4) = T(2)^2 - p^(2k+1) on the Brandt side
    B4 = af.brandt_matrix(4, 1, S).full()
    for f in fs:
        lam4 = (B4 @ f.values)[np.argmax(np.abs(f.values))] / f.values[np.argmax(np.abs(f.values))]
        assert abs(lam4 * 4 - (f.a_p(2) ** 2 - 8)) < 1e-9
