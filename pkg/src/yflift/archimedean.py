"""The archimedean integral of the harmonic test function.

The exact path reduces the SU(2)^2 pairing integral to a Laurent
coefficient extraction in e^{i theta}; the Gaussian integral over H^2 then
factors as (radial)^2 * vol(SU(2)^2) * (pairing integral).  Numeric
quadrature and Monte-Carlo evaluations serve as independent oracles.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, pi, sqrt

import numpy as np

from .errors import DomainError, IdentityError
from .kernel import harmonic_components, psi_numeric
from .polyrep import binom


# -- Laurent polynomials in e^{i theta} -------------------------------------

@dataclass(frozen=True)
class LaurentPoly:
    """Finite sum of c_n e^{i n theta} with exact coefficients."""
    terms: tuple = field(default_factory=tuple)

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(sorted((e, c) for e, c in d.items() if c != 0)))

    @classmethod
    def monomial(cls, e, c=1):
        return cls.from_dict({e: Fraction(c)})

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls):
        return cls.monomial(0)

    def as_dict(self):
        return dict(self.terms)

    def __add__(self, o):
        o = _lift(o)
        d = self.as_dict()
        for e, c in o.terms:
            d[e] = d.get(e, 0) + c
        return LaurentPoly.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) - self

    def __mul__(self, o):
        o = _lift(o)
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in o.terms:
                d[e1 + e2] = d.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly.from_dict(d)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = LaurentPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def conj(self):
        """Complex conjugate for real theta (coefficients are rational)."""
        return LaurentPoly.from_dict({-e: c for e, c in self.terms})

    def coeff(self, e):
        return self.as_dict().get(e, Fraction(0))

    def is_zero(self):
        return not self.terms


def _lift(x):
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.from_dict({0: Fraction(x)})


# |e^{i theta} - e^{-i theta}|^2 as a Laurent polynomial
WEYL_DENSITY = LaurentPoly.from_dict({-2: Fraction(-1), 0: Fraction(2), 2: Fraction(-1)})


def trig_moment(K, A):
    """(2 pi)^-1 * integral of |e^{it}-e^{-it}|^2 (e^{it}-e^{-it})^K e^{iAt} dt, exactly."""
    s = LaurentPoly.from_dict({1: Fraction(1), -1: Fraction(-1)})
    return (WEYL_DENSITY * s ** K * LaurentPoly.monomial(A)).coeff(0)


def trig_moment_closed(K, A):
    """The same moment in closed form: (-1)^((K+A)/2) C(K+2, (K+A+2)/2), zero for odd K+A."""
    if (K + A) % 2:
        return Fraction(0)
    return Fraction((-1) ** ((K + A) // 2) * binom(K + 2, (K + A + 2) // 2))


# -- pairing integral over SU(2)^2 ------------------------------------------

def _check(k1, k2):
    if not (0 <= k2 <= k1):
        raise DomainError(f"need 0 <= k2 <= k1, got ({k1},{k2})")


def _pair_dicts(u, v, k1, k2):
    """<u, v>_W for dict-valued weight vectors with LaurentPoly entries."""
    n1, n2 = 2 * k1, 2 * k2
    total = LaurentPoly.zero()
    for (i, j), a in u.items():
        b = v.get((n1 - i, n2 - j))
        if b is None:
            continue
        total = total + a * b * Fraction((-1) ** (i + j), comb(n1, i) * comb(n2, j))
    return total


def psi_weyl(k1, k2):
    """Psi(diag(e^{it}, e^{-it}), 1) as an exact Laurent polynomial."""
    _check(k1, k2)
    z1 = LaurentPoly.monomial(1)
    z2 = LaurentPoly.one()
    zero = LaurentPoly.zero()
    P = harmonic_components(k1, k2, z1, zero, z2, zero, conj=lambda x: x.conj(), one=LaurentPoly.one())
    total = LaurentPoly.zero()
    for a in range(2 * k2 + 1):
        total = total + _pair_dicts(P[a], P[2 * k2 - a], k1, k2) * ((-1) ** a * comb(2 * k2, a))
    return total


def su2_pairing_closed(k1, k2):
    """(-1)^k2 (2k1+1) Gamma(k1+k2+2) Gamma(k1-k2+1) / Gamma(k1+2)^2."""
    _check(k1, k2)
    return Fraction((-1) ** k2 * (2 * k1 + 1) * factorial(k1 + k2 + 1) * factorial(k1 - k2),
                    factorial(k1 + 1) ** 2)


def su2_pairing_integral(k1, k2, check=True):
    """Exact integral over SU(2)^2 of <P_k(u), P_k(u)>, Haar probability measure.

    Weyl integration: (1/4 pi) * integral of |e^{it}-e^{-it}|^2 Psi dt, i.e.
    half the constant term of WEYL_DENSITY * Psi.
    """
    val = (WEYL_DENSITY * psi_weyl(k1, k2)).coeff(0) / 2
    if check and val != su2_pairing_closed(k1, k2):
        raise IdentityError(f"pairing integral {val} != closed form {su2_pairing_closed(k1, k2)}")
    return val


# -- binomial identities ----------------------------------------------------

def binomial_identity_8I(k1, k2):
    """sum_b (-1)^(k2+b) / C(2k1, k1+b) over |b| <= k2, against its closed form."""
    _check(k1, k2)
    lhs = sum((Fraction((-1) ** (k2 + b), comb(2 * k1, k1 + b)) for b in range(-k2, k2 + 1)), Fraction(0))
    rhs = Fraction(2 * k1 + 1, k1 + 1) / comb(2 * k1 + 1, k1 - k2)
    if lhs != rhs:
        raise IdentityError(f"alternating binomial sum {lhs} != {rhs} at ({k1},{k2})")
    return lhs, rhs


def T_alpha_b(k1, k2, alpha, b):
    """The quadruple binomial sum T^alpha_b."""
    total = 0
    for a in range(alpha + 1):
        for c in range(2 * k2 - alpha + 1):
            total += ((-1) ** (a + c) * binom(alpha, a) * binom(2 * k2 - alpha, k2 + b - a)
                      * binom(2 * k2 - alpha, c) * binom(alpha, k2 - b - c)
                      * binom(2 * k1 - 2 * k2 + 2, k1 - 2 * k2 + a + c + 1))
    return total


def _trivariate_coeff(k1, k2, ex, ey, ez):
    """Coefficient of X^ex Y^ey Z^ez in (1+X)^(2k1+2) (Y-Z)^(2k2), by expanding."""
    poly = {(0, 0, 0): 1}
    factors = [{(0, 0, 0): 1, (1, 0, 0): 1}] * (2 * k1 + 2) + [{(0, 1, 0): 1, (0, 0, 1): -1}] * (2 * k2)
    for f in factors:
        new = {}
        for m, c in poly.items():
            for m2, c2 in f.items():
                k = (m[0] + m2[0], m[1] + m2[1], m[2] + m2[2])
                new[k] = new.get(k, 0) + c * c2
        poly = new
    return poly.get((ex, ey, ez), 0)


def coeff_identity_7I(k1, k2, b):
    """sum_alpha (-1)^alpha C(2k2,alpha) T^alpha_b against the X^(k1+1) Y^(k2-b) Z^(k2+b)
    coefficient of (1+X)^(2k1+2)(Y-Z)^(2k2)."""
    _check(k1, k2)
    if abs(b) > k2:
        raise DomainError(f"need |b| <= k2, got b={b}")
    lhs = sum((-1) ** a * comb(2 * k2, a) * T_alpha_b(k1, k2, a, b) for a in range(2 * k2 + 1))
    rhs = _trivariate_coeff(k1, k2, k1 + 1, k2 - b, k2 + b)
    if lhs != rhs:
        raise IdentityError(f"T-sum {lhs} != generating coefficient {rhs} at ({k1},{k2},{b})")
    return lhs, rhs


def coeff_closed_7I(k1, k2, b):
    """Closed form of the same coefficient: C(2k1+2,k1+1) (-1)^(k2+b) C(2k2,k2+b)."""
    return comb(2 * k1 + 2, k1 + 1) * (-1) ** (k2 + b) * comb(2 * k2, k2 + b)


# -- the Gaussian integral over H^2 ------------------------------------------

@dataclass(frozen=True)
class PiMultiple:
    """The exact real number q * pi^e."""
    q: Fraction
    e: int

    def __mul__(self, o):
        return PiMultiple(self.q * o.q, self.e + o.e)

    def __float__(self):
        return float(self.q) * pi ** self.e

    def __str__(self):
        return f"{self.q}" if self.e == 0 else f"{self.q}*pi^{self.e}"


def _gamma_int(n):
    return factorial(n - 1)


def _gamma_C(s):
    """Gamma_C(s) = 2 (2 pi)^-s Gamma(s) for integer s >= 1."""
    return PiMultiple(Fraction(2 * _gamma_int(s), 2 ** s), -s)


# Gamma_R(2) = 1/pi and Gamma_R(4) = 1/pi^2
_GAMMA_R_2_4 = PiMultiple(Fraction(1), -3)


def radial_factor(k1):
    """Integral of r^(2k1+3) e^(-4 pi r^2) dr = (1/2) (4 pi)^(-k1-2) Gamma(k1+2)."""
    return PiMultiple(Fraction(factorial(k1 + 1), 2 * 4 ** (k1 + 2)), -k1 - 2)


SU2_SQUARED_VOLUME = PiMultiple(Fraction(4), 4)


def gaussian_integral_closed(k1, k2):
    """(-1)^k2 (2k1+1)/2^(2k1+7) * Gamma_C(k1+k2+2) Gamma_C(k1-k2+1) / (Gamma_R(2) Gamma_R(4))."""
    _check(k1, k2)
    g = _gamma_C(k1 + k2 + 2) * _gamma_C(k1 - k2 + 1)
    pref = PiMultiple(Fraction((-1) ** k2 * (2 * k1 + 1), 2 ** (2 * k1 + 7)), 0)
    out = pref * g
    return PiMultiple(out.q / _GAMMA_R_2_4.q, out.e - _GAMMA_R_2_4.e)


def gaussian_integral_I(k1, k2):
    """Exact value of the integral over H^2 of <phi(x), phi(x)>, as q * pi^e.

    Computed as radial^2 * vol(SU(2)^2) * pairing integral and checked
    against the Gamma-factor closed form.
    """
    r = radial_factor(k1)
    val = r * r * SU2_SQUARED_VOLUME * PiMultiple(su2_pairing_integral(k1, k2), 0)
    closed = gaussian_integral_closed(k1, k2)
    if (val.q, val.e) != (closed.q, closed.e):
        raise IdentityError(f"factorized value {val} != closed form {closed}")
    return val


# -- numeric oracles ------------------------------------------------------------

def _quaternions(x):
    """(..., 4) real coordinates -> (z, w) with n(x) = |z|^2 + |w|^2."""
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def _psi_points(k1, k2, pts):
    z1, w1 = _quaternions(pts[:, :4])
    z2, w2 = _quaternions(pts[:, 4:])
    return psi_numeric(k1, k2, z1, w1, z2, w2)


def gauss_hermite_I(k1, k2, batch=200000):
    """Tensor Gauss-Hermite evaluation of the H^2 integral.

    With k1+1 nodes per coordinate the rule is exact for the polynomial
    part, so this agrees with the exact value to rounding error.
    """
    _check(k1, k2)
    t, w = np.polynomial.hermite.hermgauss(k1 + 1)
    s = 1 / sqrt(4 * pi)
    nodes, weights = t * s, w * s
    n = len(nodes)
    total = 0.0
    count = n ** 8
    for start in range(0, count, batch):
        idx = np.arange(start, min(count, start + batch))
        digits = np.stack([(idx // n ** d) % n for d in range(8)], axis=1)
        pts = nodes[digits]
        wt = np.prod(weights[digits], axis=1)
        total += float(np.sum(wt * _psi_points(k1, k2, pts)).real)
    return total


def monte_carlo_I(k1, k2, samples=10 ** 7, seed=0, threads=1, batch=250000):
    """Monte-Carlo estimate of the H^2 integral with Gaussian importance sampling.

    Samples x ~ N(0, 1/(8 pi)) in R^8, so the integral is 2^-8 E[Psi(x)].
    Each worker draws from its own spawned seed stream; partial sums are
    combined in worker order.  Returns (estimate, standard error).
    """
    _check(k1, k2)
    threads = max(1, int(threads))
    seqs = np.random.SeedSequence(seed).spawn(threads)
    shares = [samples // threads + (1 if i < samples % threads else 0) for i in range(threads)]
    sigma = 1 / sqrt(8 * pi)

    def work(i):
        rng = np.random.default_rng(seqs[i])
        s1 = s2 = 0.0
        left = shares[i]
        while left > 0:
            m = min(batch, left)
            vals = _psi_points(k1, k2, rng.normal(0.0, sigma, size=(m, 8))).real
            s1 += float(vals.sum())
            s2 += float((vals * vals).sum())
            left -= m
        return s1, s2

    if threads == 1:
        parts = [work(0)]
    else:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(work, range(threads)))
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return mean / 256, sqrt(var / samples) / 256


def _su2_grid(n_psi, n_ang):
    xs, ws = np.polynomial.legendre.leggauss(n_psi)
    psi = (xs + 1) * (pi / 4)
    wpsi = ws * (pi / 4)
    ang = np.arange(n_ang) * (2 * pi / n_ang)
    P, TH, PH = np.meshgrid(psi, ang, ang, indexing="ij")
    W = (wpsi[:, None, None] * np.sin(2 * P)) * (2 * pi / n_ang) ** 2 / (2 * pi) ** 2
    z = np.cos(P) * np.exp(1j * TH)
    w = np.sin(P) * np.exp(1j * PH)
    return z.ravel(), w.ravel(), W.ravel()


def su2_squared_quadrature(k1, k2, n_psi=16):
    """Full product quadrature of the pairing integral over SU(2) x SU(2)."""
    _check(k1, k2)
    z, w, W = _su2_grid(n_psi, 2 * k1 + 2)
    n = len(z)
    i1, i2 = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i1, i2 = i1.ravel(), i2.ravel()
    total = 0.0
    step = 200000
    for s in range(0, len(i1), step):
        a, b = i1[s:s + step], i2[s:s + step]
        vals = psi_numeric(k1, k2, z[a], w[a], z[b], w[b])
        total += float(np.sum(W[a] * W[b] * vals).real)
    return total


# -- exact class-function check --------------------------------------------

def _qmul(x, y):
    """Product of quaternions in (z, w) form."""
    (z, w), (z2, w2) = x, y
    return (z * z2 - w * w2.conj(), z * w2 + w * z2.conj())


def _qinv_unit(x):
    z, w = x
    return (z.conj(), -w)


def psi_exact(k1, k2, x1, x2):
    """Exact Psi(x1, x2) for quaternions with GQ coordinates."""
    from .gauss import GQ
    from .polyrep import pair_W
    from .kernel import as_weight_vector
    P = [as_weight_vector(k1, k2, d) for d in harmonic_components(k1, k2, x1[0], x1[1], x2[0], x2[1], one=GQ(1, 0))]
    total = 0
    for a in range(2 * k2 + 1):
        total = total + pair_W(P[a], P[2 * k2 - a]) * ((-1) ** a * comb(2 * k2, a))
    return total


def class_function_check(k1, k2, u1, u2):
    """(Psi(u1, u2), Psi(u2^-1 u1, 1)) at unit quaternions with GQ coordinates."""
    from .gauss import GQ
    one = (GQ(1, 0), GQ(0, 0))
    return psi_exact(k1, k2, u1, u2), psi_exact(k1, k2, _qmul(_qinv_unit(u2), u1), one)


def sweep(kmax):
    """Exact identity table for all 0 <= k2 <= k1 <= kmax."""
    rows = []
    for k1 in range(kmax + 1):
        for k2 in range(k1 + 1):
            val = su2_pairing_integral(k1, k2)
            gi = gaussian_integral_I(k1, k2)
            binomial_identity_8I(k1, k2)
            for b in range(-k2, k2 + 1):
                coeff_identity_7I(k1, k2, b)
            rows.append({"k1": k1, "k2": k2, "pairing_integral": str(val),
                         "gaussian_integral": str(gi), "gaussian_float": float(gi),
                         "sign_ok": (val > 0) == (k2 % 2 == 0)})
    return rows
