"""Homogeneous polynomial representations of GL(2) and their pairings.

A degree-n polynomial is stored by its coefficient vector, index i holding
the coefficient of X^i Y^(n-i).  Scalars may be ints, Fractions, GQ or
complex numbers; all routines only use ring operations plus division by
integers.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, cos, sin, pi

import numpy as np

from .errors import DegreeError, SingularMatrixError
from .gauss import conj


def binom(a, b):
    """Binomial coefficient, zero outside 0 <= b <= a."""
    if a < 0 or b < 0 or b > a:
        return 0
    return comb(a, b)


def _div(x, n):
    if isinstance(x, int):
        return Fraction(x, n)
    return x / n


def _pow(x, e):
    if e >= 0:
        return x ** e
    return 1 / (x ** (-e)) if not hasattr(x, "inverse") else x.inverse() ** (-e)


@dataclass(frozen=True)
class HomPoly:
    degree: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise DegreeError(f"expected {self.degree + 1} coefficients, got {len(self.coeffs)}")

    @classmethod
    def monomial(cls, n, i):
        return cls(n, tuple(1 if j == i else 0 for j in range(n + 1)))

    def __add__(self, o):
        if o.degree != self.degree:
            raise DegreeError("degree mismatch")
        return HomPoly(self.degree, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def scale(self, c):
        return HomPoly(self.degree, tuple(c * a for a in self.coeffs))

    def conj(self):
        return HomPoly(self.degree, tuple(conj(a) for a in self.coeffs))


def pair_n(P, Q, n=None):
    """The GL(2)-pairing <X^iY^(n-i), X^jY^(n-j)> = (-1)^i / C(n,i) if i+j=n."""
    n = P.degree if n is None else n
    if P.degree != n or Q.degree != n:
        raise DegreeError(f"pairing of degree {P.degree} and {Q.degree} at n={n}")
    total = 0
    for i in range(n + 1):
        term = P.coeffs[i] * Q.coeffs[n - i]
        total = total + _div(term if i % 2 == 0 else -term, comb(n, i))
    return total


def pair_coeffs(p, q):
    """Same pairing on raw coefficient sequences."""
    n = len(p) - 1
    return pair_n(HomPoly(n, tuple(p)), HomPoly(n, tuple(q)), n)


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _linpow(lin, e):
    out = [1]
    for _ in range(e):
        out = _polymul(out, lin)
    return out


def det2(g):
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def rho_matrix(kappa, g):
    """Matrix of rho_kappa(g) on the monomial basis (column i = image of X^iY^(n-i)).

    rho_kappa(g)P(X,Y) = P((X,Y)g) det(g)^b for kappa = (n+b, b).
    """
    n = kappa[0] - kappa[1]
    b = kappa[1]
    if n < 0:
        raise DegreeError("kappa must satisfy kappa1 >= kappa2")
    d = det2(g)
    if d == 0:
        raise SingularMatrixError("singular matrix in rho")
    (a, bb), (c, dd) = g
    # (X,Y)g = (aX + cY, bX + dY); linear forms as coefficient lists in X.
    xl = [c, a]
    yl = [dd, bb]
    scale = _pow(d, b)
    cols = []
    for i in range(n + 1):
        poly = _polymul(_linpow(xl, i), _linpow(yl, n - i))
        cols.append([scale * poly[j] for j in range(n + 1)])
    return [[cols[i][j] for i in range(n + 1)] for j in range(n + 1)]


def matvec(M, v):
    return tuple(sum((M[r][c] * v[c] for c in range(len(v))), 0) for r in range(len(M)))


def matmul(A, B):
    return [[sum((A[r][k] * B[k][c] for k in range(len(B))), 0) for c in range(len(B[0]))]
            for r in range(len(A))]


def act_rho(kappa, g, P):
    """rho_kappa(g) applied to a HomPoly of degree kappa1 - kappa2."""
    n = kappa[0] - kappa[1]
    if P.degree != n:
        raise DegreeError(f"polynomial degree {P.degree} does not match kappa {kappa}")
    return HomPoly(n, matvec(rho_matrix(kappa, g), P.coeffs))


def tau_matrix(k, g):
    """tau_k = rho_(k,-k) on degree-2k polynomials (a PGL(2) representation)."""
    return rho_matrix((k, -k), g)


W0 = ((0, 1), (-1, 0))


# -- weight vectors: W_k1 (x) W_k2 --------------------------------------------

@dataclass
class WeightVector:
    """Element of C[X1,Y1]_{2k1} (x) C[X2,Y2]_{2k2}; grid[i][j] is the
    coefficient of X1^i Y1^(2k1-i) X2^j Y2^(2k2-j)."""
    k1: int
    k2: int
    grid: list

    def __post_init__(self):
        if len(self.grid) != 2 * self.k1 + 1 or any(len(r) != 2 * self.k2 + 1 for r in self.grid):
            raise DegreeError("grid shape does not match (k1,k2)")

    @classmethod
    def zero(cls, k1, k2):
        return cls(k1, k2, [[0] * (2 * k2 + 1) for _ in range(2 * k1 + 1)])

    @classmethod
    def basis(cls, k1, k2, i, j):
        w = cls.zero(k1, k2)
        w.grid[i][j] = 1
        return w

    def __add__(self, o):
        return WeightVector(self.k1, self.k2,
                            [[a + b for a, b in zip(r, s)] for r, s in zip(self.grid, o.grid)])

    def scale(self, c):
        return WeightVector(self.k1, self.k2, [[c * a for a in r] for r in self.grid])

    def conj(self):
        return WeightVector(self.k1, self.k2, [[conj(a) for a in r] for r in self.grid])

    def as_array(self):
        return np.array([[complex(a) for a in r] for r in self.grid], dtype=complex)


def pair_W(u, v):
    """<,>_W = <,>_{2k1} (x) <,>_{2k2}."""
    n1, n2 = 2 * u.k1, 2 * u.k2
    total = 0
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            a = u.grid[i][j]
            if a == 0:
                continue
            b = v.grid[n1 - i][n2 - j]
            if b == 0:
                continue
            term = a * b
            if (i + j) % 2:
                term = -term
            total = total + _div(term, comb(n1, i) * comb(n2, j))
    return total


def pair_W_weights(k1, k2):
    """Array c with <u,v>_W = sum u[i,j] v[n1-i,n2-j] c[i,j] (float form)."""
    n1, n2 = 2 * k1, 2 * k2
    c = np.zeros((n1 + 1, n2 + 1))
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            c[i, j] = (-1) ** (i + j) / (comb(n1, i) * comb(n2, j))
    return c


def dual_basis(k1, k2, i, j):
    """v*_{(i,j)} = (-1)^(i+j) C(2k1,i) C(2k2,j) v_{(2k1-i, 2k2-j)}."""
    w = WeightVector.zero(k1, k2)
    w.grid[2 * k1 - i][2 * k2 - j] = (-1) ** (i + j) * comb(2 * k1, i) * comb(2 * k2, j)
    return w


def act_tau_W(a, d, v):
    """(tau_k1(a) (x) tau_k2(d)) v."""
    A = tau_matrix(v.k1, a)
    D = tau_matrix(v.k2, d)
    tmp = matmul(A, v.grid)
    out = matmul(tmp, [list(r) for r in zip(*D)])
    return WeightVector(v.k1, v.k2, out)


# -- L_kappa vectors ---------------------------------------------------------

def kappa_of(k1, k2):
    return (k1 + k2 + 2, k1 - k2 + 2)


@dataclass
class LValueVector:
    k1: int
    k2: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.k2 + 1:
            raise DegreeError("L-vector length must be 2k2+1")

    def as_poly(self):
        return HomPoly(2 * self.k2, tuple(self.coeffs))


def pairing_bl(v1, v2, kappa):
    """B_L(v1, v2) = <v1, rho_kappa(w0) conj(v2)>."""
    w = act_rho(kappa, W0, v2.conj())
    return pair_n(v1, w)


def pairing_constant_bb(k2):
    """The SU(2)-averaged pairing equals this constant times B_L."""
    return Fraction((-1) ** k2, 2 * k2 + 1)


def su2_pairing_quadrature(k2, n_psi=48):
    """Numeric SU(2) average of <rho(u)X^n, rho(conj u)X^n> / B_L(X^n, X^n), n = 2k2.

    Coordinates u = [[a, b], [-conj b, conj a]] with a = cos(psi)e^{i theta},
    b = sin(psi)e^{i phi}.  The Haar probability measure in these
    coordinates is (2 pi)^-2 sin(2 psi) dpsi dtheta dphi.  Gauss-Legendre in
    psi; the angular trapezoid rule is exact for the trigonometric
    polynomials that occur.
    """
    n = 2 * k2
    kappa = kappa_of(k2, k2)
    n_ang = 4 * n + 4
    xs, ws = np.polynomial.legendre.leggauss(n_psi)
    psi = (xs + 1) * (pi / 4)
    wpsi = ws * (pi / 4)
    ang = np.arange(n_ang) * (2 * pi / n_ang)
    P, TH, PH = np.meshgrid(psi, ang, ang, indexing="ij")
    W = (wpsi[:, None, None] * np.sin(2 * P)) * (2 * pi / n_ang) ** 2 / (2 * pi) ** 2
    al = np.cos(P) * np.exp(1j * TH)
    be = np.sin(P) * np.exp(1j * PH)
    # rho(u)X^n = (a X - conj(b) Y)^n and rho(conj u)X^n = (conj(a) X - b Y)^n (det = 1)
    total = 0
    for i in range(n + 1):
        j = n - i
        ci = comb(n, i) * al ** i * (-np.conj(be)) ** (n - i)
        cj = comb(n, j) * np.conj(al) ** j * (-be) ** (n - j)
        total = total + (-1) ** i / comb(n, i) * ci * cj
    v = HomPoly.monomial(n, n)
    bl = complex(pairing_bl(v, v, kappa))
    return float((np.sum(W * total) / bl).real)
