from fractions import Fraction

import numpy as np
import pytest

from yflift import siegelhecke as sh
from yflift.errors import ConfigError, DecompositionError


@pytest.mark.parametrize("p", [2, 3, 5])
def test_u1_has_p_cubed_disjoint_reps(p):
    d = sh.decompose("U1", p)
    assert d.degree == p ** 3
    rep = sh.verify_decomposition(d)
    assert rep["disjoint"] and rep["closed"]


@pytest.mark.parametrize("p", [2, 3])
def test_t1_degree(p):
    d = sh.decompose("T1", p)
    assert d.degree == sh.t1_degree(p)
    sh.verify_decomposition(d)


def test_t2_degree_stable():
    a, b = sh.decompose("T2", 2), sh.decompose("T2", 2)
    assert a.degree == b.degree == 30
    sh.verify_decomposition(a)


def test_duplicated_rep_detected():
    d = sh.decompose("U1", 2)
    d.reps.append(d.reps[3])
    with pytest.raises(DecompositionError):
        sh.verify_decomposition(d)


def test_equivalent_rep_detected():
    d = sh.decompose("T1", 2)
    M = np.array(d.reps[5], dtype=np.int64)
    shift = np.eye(4, dtype=np.int64)
    shift[2, 0] = 1  # lower-left block [[1,0],[0,0]] is symmetric, so this lies in Sp4(Z)
    d.reps[0] = tuple(tuple(int(v) for v in r) for r in (shift @ M))
    with pytest.raises(DecompositionError):
        sh.verify_decomposition(d)


def test_bad_operator_inputs():
    with pytest.raises(ConfigError):
        sh.decompose("T3", 2)
    with pytest.raises(ConfigError):
        sh.decompose("T1", 4)


def test_local_reps_are_similitudes():
    d = sh.decompose("U1", 3)
    J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    for L in d.local_reps()[:10]:
        L = np.array(L, dtype=float)
        assert np.allclose(L.T @ J @ L, 3 * J)


def test_t1_t2_eigenvalues(worked, expansion):
    reports = sh.check_eigen(worked.fdag, expansion, 2)
    assert [r.op for r in reports] == ["T1", "T2"]
    assert [r.predicted for r in reports] == [-2, -1]
    for r in reports:
        assert r.passed and len(r.measured) >= 5
        assert all(x == r.predicted for _, x in r.measured)


def test_u1_eigenvalue_and_w_signs(worked, expansion):
    Ew = worked.expansion(63, 64)
    r3 = sh.check_U1_and_Wp(worked.fdag, expansion, 3, w_expansion=Ew)
    assert r3["U1"]["predicted"] == -3 and r3["U1"]["passed"]
    assert r3["W"]["measured"] == r3["W"]["predicted"] == 1
    r11 = sh.check_U1_and_Wp(worked.fdag, expansion, 11, w_expansion=Ew)
    assert r11["W"]["measured"] == r11["W"]["predicted"] == 1
    assert r3["passed"] and r11["passed"]


def test_atkin_lehner_matrix_is_similitude():
    for p in (3, 11):
        (a, b), (c, d) = sh.atkin_lehner_matrix_siegel(33, p)
        assert a * d - b * c == p
        assert a % p == 0 and d % p == 0 and c % 33 == 0


@pytest.mark.parametrize("data,label,generic", [
    ({"splitting": "split"}, "(I)", True),
    ({"splitting": "split", "reducibility": True}, "(IIIb)", False),
    ({"splitting": "split", "divides": "Nminus", "mu_equal": True}, "(VIb)", False),
    ({"splitting": "split", "divides": "Nminus"}, "(Vb*)", False),
    ({"splitting": "split", "divides": "Nplus_one"}, "(IIa)", True),
    ({"splitting": "split", "divides": "Nplus_one", "reducibility": True}, "(IVc)", False),
    ({"splitting": "split", "divides": "Nplus_both", "mu_equal": True}, "(VIa)", True),
    ({"splitting": "split", "divides": "Nplus_both"}, "(Va)", True),
    ({"splitting": "nonsplit"}, "(I)", True),
    ({"splitting": "nonsplit", "divides": "Nplus"}, "(Va)", True),
    ({"splitting": "nonsplit", "divides": "Nplus", "mu_hat_square": "eta"}, "(IIIa)", True),
])
def test_representation_types(data, label, generic):
    out = sh.classify_theta_rep(data)
    assert out["type"] == label and out["generic"] == generic
    assert out["supercuspidal"] == (label == "(Vb*)")


def test_representation_type_rejects_bad_data():
    with pytest.raises(ConfigError):
        sh.classify_theta_rep({"splitting": "nonsplit", "divides": "Nminus"})
