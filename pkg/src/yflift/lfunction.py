"""Rankin-Selberg L-function of a pair of newforms and the inner-product constants.

Classical normalization: f_i has weight 2k_i + 2 and a_p(f_i) = alpha_i + beta_i
with alpha_i beta_i = P_i = p^(2k_i+1).  The good Euler factor is
1 - e1 X + e2 X^2 - e3 X^3 + e4 X^4 with reciprocal roots alpha_1 alpha_2,
alpha_1 beta_2, beta_1 alpha_2, beta_1 beta_2.  At p dividing exactly one
level the factor is (1 - a alpha X)(1 - a beta X) with a = a_p of the
Steinberg factor; at p dividing both it is (1 - c X)(1 - c p X) with
c = a_p(f1) a_p(f2).

The completed function Lambda(s) = Q^s Gamma(s) Gamma(s - m) L(s), with
Q = sqrt(N)/(4 pi^2) and m = 2k2 + 1, satisfies Lambda(s) = eps Lambda(w - s)
with w = 2k1 + 2k2 + 3.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, factorial, gamma, isqrt, log, pi, sqrt

import numpy as np
from scipy import integrate, special

from . import autoforms as af
from . import quatlat as ql
from .archimedean import PiMultiple
from .errors import DataError, IdentityError, TruncationError, UnsupportedFieldError


# -- Gamma factors ------------------------------------------------------------------

def gamma_R(s):
    return pi ** (-s / 2) * gamma(s / 2)


def gamma_C(s):
    return 2 * (2 * pi) ** (-s) * gamma(s)


def gamma_R_exact(n):
    """Gamma_R(n) = pi^(-n/2) Gamma(n/2) for integer n >= 1 as q * pi^e."""
    if n % 2 == 0:
        return PiMultiple(Fraction(factorial(n // 2 - 1)), -(n // 2))
    # Gamma(n/2) = (n-2)!! / 2^((n-1)/2) sqrt(pi)
    dfact = 1
    for j in range(n - 2, 0, -2):
        dfact *= j
    return PiMultiple(Fraction(dfact, 2 ** ((n - 1) // 2)), -((n - 1) // 2))


def gamma_C_exact(n):
    return PiMultiple(Fraction(2 * factorial(n - 1), 2 ** n), -n)


def duplication_residual(s):
    """|Gamma_C(s) - Gamma_R(s) Gamma_R(s+1)|."""
    return abs(gamma_C(s) - gamma_R(s) * gamma_R(s + 1))


# -- Euler factors --------------------------------------------------------------------

@dataclass
class HeckeData:
    """Classical a_p of the two factors, levels and weights."""
    ap1: dict
    ap2: dict
    N1: int
    N2: int
    k1: int = 0
    k2: int = 0
    source: str = ""

    @property
    def conductor(self):
        return euler_conductor(self.N1, self.N2)

    def a(self, which, p):
        table = self.ap1 if which == 1 else self.ap2
        if p not in table:
            raise DataError(f"missing Hecke eigenvalue a_{p}(f{which})")
        return table[p]

    def max_prime(self):
        ps = set(self.ap1) & set(self.ap2)
        bound = 1
        for p in ql.primes_up_to(max(ps) if ps else 1):
            if p not in ps:
                break
            bound = p
        return bound


def euler_conductor(N1, N2):
    """p^2 at each p dividing N1 N2 (both levels squarefree)."""
    N = 1
    for p in set(ql.prime_factors(N1)) | set(ql.prime_factors(N2)):
        N *= p * p
    return N


@dataclass
class EulerFactorSet:
    factors: dict  # p -> (1, c1, c2, c3, c4) in X = p^-s

    def degree(self, p):
        c = self.factors[p]
        return max(i for i, v in enumerate(c) if v != 0)


def euler_factor(data, p):
    a1, a2 = data.a(1, p), data.a(2, p)
    P1, P2 = p ** (2 * data.k1 + 1), p ** (2 * data.k2 + 1)
    in1, in2 = data.N1 % p == 0, data.N2 % p == 0
    if not in1 and not in2:
        return (1, -a1 * a2, P2 * a1 * a1 + P1 * a2 * a2 - 2 * P1 * P2, -P1 * P2 * a1 * a2, P1 * P1 * P2 * P2)
    if in1 and in2:
        c = a1 * a2
        return (1, -c * (1 + p), c * c * p, 0, 0)
    a_st, a_sph, P_sph = (a2, a1, P1) if in2 else (a1, a2, P2)
    return (1, -a_st * a_sph, a_st * a_st * P_sph, 0, 0)


def euler_factors(data, primes):
    return EulerFactorSet({p: euler_factor(data, p) for p in primes})


def _inverse_series(poly, e):
    """Coefficients of 1/poly(X) up to X^e."""
    out = [1] + [0] * e
    for n in range(1, e + 1):
        out[n] = -sum(poly[j] * out[n - j] for j in range(1, min(n, len(poly) - 1) + 1))
    return out


def dirichlet_coefficients(data, X):
    """b_n for n <= X (index 0 unused) from the Euler product."""
    b = [0] * (X + 1)
    if X >= 1:
        b[1] = 1
    for p in ql.primes_up_to(X):
        e = int(log(X) / log(p)) + 1
        ser = _inverse_series(euler_factor(data, p), e)
        # b is multiplicative: b[m p^j] = b[m] ser[j] for p not dividing m
        pk = p
        j = 1
        while pk <= X:
            for m in range(1, X // pk + 1):
                if m % p:
                    b[m * pk] = b[m] * ser[j]
            pk *= p
            j += 1
    return b


def euler_product(data, s, P):
    """prod_{p <= P} 1/factor(p^-s)."""
    total = 1.0
    for p in ql.primes_up_to(P):
        x = p ** (-s)
        c = euler_factor(data, p)
        total /= sum(ci * x ** i for i, ci in enumerate(c))
    return total


def form_eigenvalues(space, f, bound):
    """Classical a_p for p <= bound prime to the level, from Brandt matrices."""
    if space.k == 0:
        return {p: int(v) if Fraction(v).denominator == 1 else v
                for p, v in af.theta_hecke_eigenvalues(space, f, bound).items()}
    out = {}
    idx = int(np.argmax(np.abs(f.values)))
    for p in ql.primes_up_to(bound):
        if space.N % p == 0:
            continue
        Bf = af.brandt_matrix(p, space.k, space).full() @ f.values
        lam = (Bf[idx] / f.values[idx]).real
        out[p] = int(round(lam * p ** space.k)) if abs(lam - round(lam)) < 1e-8 else lam * p ** space.k
    return out


def hecke_data_from_forms(space1, f1, space2, f2, N_minus, bound):
    """HeckeData from quaternionic eigenforms of levels N_minus N_i+ (Jacquet-Langlands transfer)."""
    N1, N2 = space1.N, space2.N
    ap1 = form_eigenvalues(space1, f1, bound)
    ap2 = form_eigenvalues(space2, f2, bound)
    for p in ql.prime_factors(N1):
        ap1[p] = af.classical_bad_ap(f1, p, N_minus)
    for p in ql.prime_factors(N2):
        ap2[p] = af.classical_bad_ap(f2, p, N_minus)
    return HeckeData(ap1, ap2, N1, N2, f1.k, f2.k, f"Brandt eigenvalues up to {bound}")


def extend_with_curves(data, ainvs1, ainvs2, bound):
    """Extend the a_p tables by elliptic-curve point counts after checking agreement on every known prime."""
    if data.k1 or data.k2:
        raise DataError("curve extension applies to weight 2 only")
    primes = ql.primes_up_to(bound)
    good = [p for p in primes if (data.N1 * data.N2) % p]
    c1 = af.ec_ap_table(ainvs1, good)
    c2 = af.ec_ap_table(ainvs2, good)
    for p in good:
        for table, curve, name in ((data.ap1, c1, "f1"), (data.ap2, c2, "f2")):
            if p in table and table[p] != curve[p]:
                raise DataError(f"curve a_{p} disagrees with {name}: {curve[p]} vs {table[p]}")
    ap1 = {**c1, **data.ap1}
    ap2 = {**c2, **data.ap2}
    return HeckeData(ap1, ap2, data.N1, data.N2, data.k1, data.k2,
                     data.source + f"; curve point counts up to {bound}")


# -- smoothed evaluation ------------------------------------------------------------

def _incomplete(s, y, m):
    """I(s, y) = int_y^inf 2 u^(-m/2) K_m(2 sqrt u) u^(s-1) du."""
    a = 2 * s - 1 - m
    v0 = sqrt(y)
    f = lambda v: v ** a * special.kve(m, 2 * v) * exp(-2 * (v - v0))
    val, _ = integrate.quad(f, v0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return 4 * val * exp(-2 * v0)


@dataclass
class LValue:
    s: float
    value: float
    error: float
    terms: int
    root_number: int
    method: str
    details: dict = field(default_factory=dict)


def required_terms(data, s, eps=1e-12, t_min=1 / 1.25):
    """Smallest X for which the dropped smoothed terms are below eps."""
    N = data.conductor
    Q = sqrt(N) / (4 * pi * pi)
    w = 2 * data.k1 + 2 * data.k2 + 3
    n = 1
    while True:
        y = n * t_min / Q
        # |b_n| <= d_4(n) n^((w-1)/2) <= n^((w+1)/2) for the sizes used here
        bound = n ** ((w + 1) / 2) * (Q / n) ** min(s, w - s) * exp(-2 * sqrt(y)) * y ** (w + 1) * 8
        if bound < eps and n > 10:
            return n
        n += max(1, n // 20)


def _lambda(b, s, N, k1, k2, eps, t0):
    Q = sqrt(N) / (4 * pi * pi)
    m = 2 * k2 + 1
    w = 2 * k1 + 2 * k2 + 3
    total = 0.0
    for n in range(1, len(b)):
        if b[n] == 0:
            continue
        total += b[n] * ((Q / n) ** s * _incomplete(s, n * t0 / Q, m)
                         + eps * (Q / n) ** (w - s) * _incomplete(w - s, n / (t0 * Q), m))
    return total / (Q ** s * gamma(s) * gamma(s - m))


def root_number(data, X=None):
    """Scan eps = +-1: the true sign makes the value independent of the split point."""
    N = data.conductor
    w = 2 * data.k1 + 2 * data.k2 + 3
    s0 = w / 2 + 0.37
    X = X or required_terms(data, s0)
    b = dirichlet_coefficients(data, X)
    res = {}
    for eps in (1, -1):
        v1 = _lambda(b, s0, N, data.k1, data.k2, eps, 1.0)
        v2 = _lambda(b, s0, N, data.k1, data.k2, eps, 1.25)
        res[eps] = abs(v1 - v2) / max(abs(v1), 1e-300)
    eps = min(res, key=res.get)
    return eps, res


def lvalue(data, s, X=None, eps=None, tol=1e-10):
    """L(s) by the smoothed approximate functional equation, with a split-point error estimate."""
    N = data.conductor
    need = required_terms(data, s)
    if X is not None and X < need:
        raise TruncationError(f"X = {X} too small; need at least {need} terms")
    X = X or need
    if X > 1 and data.max_prime() < min(X, max(ql.primes_up_to(X)) if X >= 2 else 1):
        raise TruncationError(f"Hecke data only up to p = {data.max_prime()}, need {X}")
    if eps is None:
        eps, scan = root_number(data)
    else:
        scan = {}
    b = dirichlet_coefficients(data, X)
    v1 = _lambda(b, s, N, data.k1, data.k2, eps, 1.0)
    v2 = _lambda(b, s, N, data.k1, data.k2, eps, 1.25)
    return LValue(s, v1, abs(v1 - v2), X, eps, "smoothed", {"root_number_scan": scan})


def lvalue_from_coefficients(b, s, N, k1, k2, eps=1):
    """Smoothed value from an explicit coefficient list (b[0] unused)."""
    return _lambda(b, s, N, k1, k2, eps, 1.0)


# -- constants of the inner-product formula -------------------------------------------

@dataclass
class Instance:
    N: int  # lcm of the two levels
    k1: int = 0
    k2: int = 0
    P: tuple = ()
    signs: dict = field(default_factory=dict)  # p | N -> eps_p
    field_discriminant: int = 1  # 1 for Q + Q
    lvalue: float = None


def beta_exponent(nP, k1, r_F=0, r_F2=0):
    return nP + 4 * r_F2 - 2 * k1 - 7 - r_F


def completed_identity(s, k1, k2):
    """Completed L = Gamma_C(s+k1+k2+1) Gamma_C(s+k1-k2) * L(As(f), s+k1+k2+1), as q * pi^e factors."""
    a, b = s + k1 + k2 + 1, s + k1 - k2
    lhs = gamma_C_exact(a) * gamma_C_exact(b)
    # duplication Gamma_C(x) = Gamma_R(x) Gamma_R(x+1) applied to both factors
    rhs = gamma_R_exact(a) * gamma_R_exact(a + 1) * gamma_R_exact(b) * gamma_R_exact(b + 1)
    if (lhs.q, lhs.e) != (rhs.q, rhs.e):
        raise IdentityError(f"Gamma factor mismatch at s={s}, k=({k1},{k2})")
    return lhs, rhs


@dataclass
class FormulaReport:
    Lvalue: float
    gamma_block: PiMultiple
    constant_block: Fraction
    sign_block: int
    total: float
    closed_form_constant: PiMultiple = None
    provenance: list = field(default_factory=list)

    def to_json(self):
        out = {"Lvalue": self.Lvalue,
               "gamma_block": {"rational": str(self.gamma_block.q), "pi_exponent": self.gamma_block.e,
                               "value": float(self.gamma_block)},
               "constant_block": str(self.constant_block),
               "sign_block": self.sign_block,
               "total": self.total,
               "provenance": self.provenance}
        if self.closed_form_constant is not None:
            out["closed_form_constant"] = {"rational": str(self.closed_form_constant.q),
                                         "pi_exponent": self.closed_form_constant.e,
                                         "value": float(self.closed_form_constant)}
        return out


def closed_form_constant(k1, k2, N, signs):
    """(4 pi)^-(2k1+3) Gamma(k1+k2+2) Gamma(k1-k2+1) N 2^-2 / ((2k1+1)(2k2+1)) prod (1 + eps_p)."""
    sign = 1
    for e in signs.values():
        sign *= 1 + e
    q = Fraction(factorial(k1 + k2 + 1) * factorial(k1 - k2) * N * sign,
                 4 ** (2 * k1 + 3) * 4 * (2 * k1 + 1) * (2 * k2 + 1))
    return PiMultiple(q, -(2 * k1 + 3))


def formula_rhs(inst):
    """Ratio <theta, theta>/<f, f>_R: 2^beta N/((2k1+1)(2k2+1)) L(1, As) prod (1 + eps_p)."""
    if inst.field_discriminant != 1:
        raise UnsupportedFieldError("only the split case F = Q + Q is supported")
    k1, k2, N = inst.k1, inst.k2, inst.N
    beta = beta_exponent(len(inst.P), k1)
    gam = gamma_C_exact(k1 + k2 + 2) * gamma_C_exact(k1 - k2 + 1)
    const = Fraction(N, (2 * k1 + 1) * (2 * k2 + 1)) * (Fraction(2) ** beta)
    sign = 1
    for e in inst.signs.values():
        sign *= 1 + e
    L = inst.lvalue if inst.lvalue is not None else float("nan")
    total = float(const) * float(gam) * sign * L if sign else 0.0
    prov = ["gamma_block: archimedean factor Gamma_C(k1+k2+2) Gamma_C(k1-k2+1) of the completed L at s = 1",
            f"constant_block: 2^beta N/((2k1+1)(2k2+1)) with beta = #P - 2k1 - 7 = {beta}",
            "sign_block: prod over p | N of (1 + eps_p), eps_p = eps_(p) eps_(p^c) of the stabilized form (1 when p divides one level)",
            "Lvalue: classical L(f1 x f2, k1+k2+2); bad-prime factors are the standard Steinberg degenerations"]
    closed = closed_form_constant(k1, k2, N, inst.signs) if not inst.P else None
    return FormulaReport(L, gam, const, sign, total, closed, prov)


def statement_equivalence(k1, k2, N=1, signs=None):
    """Exact check: 2^beta Gamma_C Gamma_C N/((2k1+1)(2k2+1)) equals the closed-form constant (P empty)."""
    signs = signs or {}
    sign = 1
    for e in signs.values():
        sign *= 1 + e
    beta = beta_exponent(0, k1)
    lhs = PiMultiple(Fraction(2) ** beta * Fraction(N * sign, (2 * k1 + 1) * (2 * k2 + 1)), 0) \
        * gamma_C_exact(k1 + k2 + 2) * gamma_C_exact(k1 - k2 + 1)
    rhs = closed_form_constant(k1, k2, N, signs)
    if (lhs.q, lhs.e) != (rhs.q, rhs.e):
        raise IdentityError(f"statements disagree at k=({k1},{k2}): {lhs} vs {rhs}")
    return {"k1": k1, "k2": k2, "beta": beta, "lhs": str(lhs), "rhs": str(rhs), "equal": True}
