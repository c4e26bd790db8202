from fractions import Fraction

import pytest

from yflift import lfunction as lf
from yflift.errors import DataError, TruncationError, UnsupportedFieldError


@pytest.fixture(scope="module")
def data(worked):
    return worked.hecke_data()


@pytest.fixture(scope="module")
def short_data(worked):
    return worked.hecke_data(extend=False)


def test_gamma_duplication():
    for s in (0.5, 1.0, 2.3, 7.0):
        assert lf.duplication_residual(s) < 1e-14 * lf.gamma_C(s) + 1e-300
    for n in range(1, 12):
        assert float(lf.gamma_R_exact(n)) == pytest.approx(lf.gamma_R(n), rel=1e-14)
        assert float(lf.gamma_C_exact(n)) == pytest.approx(lf.gamma_C(n), rel=1e-14)


def test_completed_identity_exact():
    for k1 in range(4):
        for k2 in range(k1 + 1):
            lhs, rhs = lf.completed_identity(1, k1, k2)
            assert (lhs.q, lhs.e) == (rhs.q, rhs.e)


def test_conductor(data):
    assert data.conductor == 1089


def test_euler_factor_shapes(data):
    assert lf.euler_factor(data, 2) == (1, 2, 2, 8, 16)
    assert lf.euler_factor(data, 3) == (1, -1, 3, 0, 0)
    assert lf.euler_factor(data, 11) == (1, -12, 11, 0, 0)
    fs = lf.euler_factors(data, [2, 3, 11])
    assert [fs.degree(p) for p in (2, 3, 11)] == [4, 2, 2]


def test_dirichlet_coefficients(short_data):
    b = lf.dirichlet_coefficients(short_data, 12)
    assert b[1:] == [1, -2, 1, 2, -2, -2, -8, -8, -2, 4, 12, 2]


def test_missing_eigenvalue(short_data):
    with pytest.raises(DataError):
        short_data.a(1, 401)


def test_short_data_truncation(short_data):
    with pytest.raises(TruncationError):
        lf.lvalue(short_data, 2.0)


def test_explicit_X_too_small(data):
    with pytest.raises(TruncationError):
        lf.lvalue(data, 2.0, X=50, eps=1)


def test_root_number(data):
    assert lf.root_number(data)[0] == 1


def test_lvalue_matches_euler_product(data):
    v = lf.lvalue(data, 4.0, eps=1)
    assert abs(v.value - lf.euler_product(data, 4.0, 9973)) < 1e-6
    assert v.error < 1e-9


def test_central_value(data):
    v = lf.lvalue(data, 2.0, eps=1)
    assert v.value == pytest.approx(0.49233386718833727, abs=1e-10)
    assert v.error < 1e-9


def test_curve_extension_checks_agreement(short_data):
    with pytest.raises(DataError):
        lf.extend_with_curves(short_data, (0, -1, 1, -10, -20), (0, -1, 1, 0, 0), 50)


def test_statement_equivalence():
    for k1 in range(11):
        for k2 in range(k1 + 1):
            assert lf.statement_equivalence(k1, k2, N=33, signs={11: 1})["equal"]


def test_beta_exponent():
    assert lf.beta_exponent(1, 0) == -6
    assert lf.beta_exponent(0, 2) == -11


def test_formula_vanishes_on_sign():
    rep = lf.formula_rhs(lf.Instance(33, signs={11: -1}, lvalue=0.5))
    assert rep.sign_block == 0 and rep.total == 0.0


def test_formula_total():
    rep = lf.formula_rhs(lf.Instance(33, signs={11: 1}, lvalue=0.5))
    expect = float(Fraction(33) * Fraction(2) ** -7) * float(rep.gamma_block) * 2 * 0.5
    assert rep.total == pytest.approx(expect, rel=1e-14)
    assert float(rep.closed_form_constant) * 0.5 == pytest.approx(rep.total, rel=1e-14)
    assert "Lvalue" in rep.to_json()


def test_unsupported_field():
    with pytest.raises(UnsupportedFieldError):
        lf.formula_rhs(lf.Instance(33, field_discriminant=5))
