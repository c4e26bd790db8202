"""Definite quaternion algebras over Q, Eichler orders, right-ideal classes
and short-vector enumeration in positive-definite quaternary lattices.

Elements are 4-tuples of Fractions in the basis (1, i, j, k) with i^2 = a,
j^2 = b, k = ij.  Lattices are lists of four such rows in Hermite normal
form.  Right ideals I of an order R satisfy I R = I; two right ideals are in
the same class when I = gamma J for some nonzero gamma in the algebra.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor, ceil, gcd, isqrt, sqrt
from itertools import product

import numpy as np

from . import zlat
from .errors import ConfigError, InvalidDiscriminant


# -- small number theory ----------------------------------------------------

def factorize(n):
    n = abs(int(n))
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n):
    return sorted(factorize(n))


def is_squarefree(n):
    return n > 0 and all(e == 1 for e in factorize(n).values())


def primes_up_to(n):
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n + 1) if sieve[i]]


def _legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def hilbert_symbol(a, b, p):
    """Hilbert symbol (a, b)_p for nonzero integers; p = 0 means the real place."""
    if p == 0:
        return -1 if (a < 0 and b < 0) else 1
    va, vb = 0, 0
    while a % p == 0:
        a //= p
        va += 1
    while b % p == 0:
        b //= p
        vb += 1
    if p == 2:
        def eps(u):
            return ((u - 1) // 2) % 2

        def omega(u):
            return ((u * u - 1) // 8) % 2
        e = (eps(a) * eps(b) + va * omega(b) + vb * omega(a)) % 2
        return -1 if e else 1
    s = (-1) ** (va * vb * ((p - 1) // 2) % 2)
    return s * _legendre(a, p) ** vb * _legendre(b, p) ** va


# -- the algebra -----------------------------------------------------------------

def _frac4(x):
    return tuple(Fraction(c) for c in x)


@dataclass(frozen=True)
class QuaternionAlgebra:
    """The algebra (a, b | Q) with i^2 = a, j^2 = b, k = ij."""
    a: int
    b: int
    discriminant: int

    def mul(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1)

    @staticmethod
    def conj(x):
        return (x[0], -x[1], -x[2], -x[3])

    def norm(self, x):
        return x[0] * x[0] - self.a * x[1] * x[1] - self.b * x[2] * x[2] + self.a * self.b * x[3] * x[3]

    @staticmethod
    def trace(x):
        return 2 * x[0]

    def bilinear(self, x, y):
        """(x, y) = n(x + y) - n(x) - n(y) = trd(x conj(y))."""
        a, b = self.a, self.b
        return 2 * (x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] + a * b * x[3] * y[3])

    @property
    def form_matrix(self):
        a, b = self.a, self.b
        return [[2, 0, 0, 0], [0, -2 * a, 0, 0], [0, 0, -2 * b, 0], [0, 0, 0, 2 * a * b]]

    def inverse(self, x):
        n = self.norm(x)
        return tuple(c / n for c in self.conj(x))

    def ramified_places(self):
        """Places where (a, b)_v = -1, with 0 standing for infinity."""
        cands = set(prime_factors(2 * self.a * self.b))
        out = [p for p in sorted(cands) if hilbert_symbol(self.a, self.b, p) == -1]
        if hilbert_symbol(self.a, self.b, 0) == -1:
            out.append(0)
        return out

    def to_complex(self, x):
        """Phi_infinity: x -> (z, w) with x = [[z, w], [-conj w, conj z]]."""
        sa, sb = sqrt(-self.a), sqrt(-self.b)
        z = complex(float(x[0]), float(x[1]) * sa)
        w = complex(float(x[2]) * sb, float(x[3]) * sa * sb)
        return z, w

    def to_matrix(self, x):
        z, w = self.to_complex(x)
        return [[z, w], [-w.conjugate(), z.conjugate()]]


def build_algebra(N_minus):
    """Definite quaternion algebra ramified exactly at the primes of N_minus and infinity."""
    N_minus = int(N_minus)
    if N_minus <= 0 or not is_squarefree(N_minus) or len(prime_factors(N_minus)) % 2 == 0:
        raise InvalidDiscriminant(
            f"N- = {N_minus} must be a squarefree product of an odd number of primes")
    target = prime_factors(N_minus) + [0]
    if N_minus == 2:
        cands = [(-1, -1)]
    else:
        cands = []
        avals = [-1, -2] + [-q for q in primes_up_to(400) if q > 2]
        for bmul in [1] + primes_up_to(50):
            for a in avals:
                cands.append((a, -N_minus * bmul))
    for a, b in cands:
        alg = QuaternionAlgebra(a, b, N_minus)
        if alg.ramified_places() == target:
            return alg
    raise ConfigError(f"no algebra model found for N- = {N_minus}")


# -- lattices in the algebra ---------------------------------------------

def lattice(rows):
    return [list(r) for r in zlat.lattice_hnf([list(_frac4(r)) for r in rows])]


def lattice_product(alg, A, B):
    """Z-span of all products a*b."""
    return lattice([alg.mul(tuple(x), tuple(y)) for x in A for y in B])


def lattice_conj(alg, A):
    return lattice([alg.conj(tuple(x)) for x in A])


def lattice_scale(A, c):
    c = Fraction(c)
    return lattice([[c * x for x in r] for r in A])


def lattice_eq(A, B):
    return lattice(A) == lattice(B)


def gram_bilinear(alg, basis):
    """Gram matrix of (x, y) = trd(x conj y) on a basis, as Fractions."""
    return [[alg.bilinear(tuple(x), tuple(y)) for y in basis] for x in basis]


def norm_of_lattice(alg, basis):
    """The positive rational generating {n(x) : x in L} as a Z-module."""
    G = gram_bilinear(alg, basis)
    vals = [G[i][i] / 2 for i in range(4)] + [G[i][j] for i in range(4) for j in range(i + 1, 4)]
    vals = [Fraction(v) for v in vals if v != 0]
    num = 0
    den = 1
    for v in vals:
        den = den * v.denominator // gcd(den, v.denominator)
    for v in vals:
        num = gcd(num, int(v * den))
    return Fraction(num, den)


def discriminant_of_order(alg, basis):
    """Reduced discriminant: sqrt |det(trd(e_r e_s))|."""
    M = [[alg.trace(alg.mul(tuple(x), tuple(y))) for y in basis] for x in basis]
    d = abs(zlat.det(M))
    r = isqrt(int(d))
    if r * r != d:
        raise ConfigError("order discriminant is not a square")
    return r


def is_order(alg, basis):
    one = (1, 0, 0, 0)
    if not zlat.contains(basis, one):
        return False
    for x in basis:
        if alg.norm(tuple(x)).denominator != 1 or alg.trace(tuple(x)).denominator != 1:
            return False
        for y in basis:
            if not zlat.contains(basis, alg.mul(tuple(x), tuple(y))):
                return False
    return True


def _ring_closure(alg, basis, limit=20):
    L = lattice(basis)
    for _ in range(limit):
        for x in L:
            if alg.norm(tuple(x)).denominator != 1 or alg.trace(tuple(x)).denominator != 1:
                return None
        new = lattice(L + [alg.mul(tuple(x), tuple(y)) for x in L for y in L])
        if new == L:
            return L
        L = new
    return None


def maximal_order(alg):
    """A maximal order, by p-saturation of Z<1, i, j, k>."""
    O = lattice([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    while True:
        d = discriminant_of_order(alg, O)
        if d == alg.discriminant:
            return O
        p = next(q for q in prime_factors(d) if (d // alg.discriminant) % q == 0)
        grown = None
        for coeffs in product(range(p), repeat=4):
            if not any(coeffs):
                continue
            x = tuple(sum(Fraction(c, p) * O[r][s] for r, c in enumerate(coeffs)) for s in range(4))
            if alg.norm(x).denominator != 1 or alg.trace(x).denominator != 1:
                continue
            L = _ring_closure(alg, O + [list(x)])
            if L is not None and L != O:
                grown = L
                break
        if grown is None:
            raise ConfigError(f"could not enlarge order at p={p}")
        O = grown


def left_order(alg, I):
    """O_l(I) = {x : x I in I} = intersection of I b^-1 over a basis b of I."""
    out = None
    for b in I:
        binv = alg.inverse(tuple(b))
        L = lattice([alg.mul(tuple(x), binv) for x in I])
        out = L if out is None else lattice(zlat.lattice_intersection(out, L))
    return out


def right_order(alg, I):
    out = None
    for b in I:
        binv = alg.inverse(tuple(b))
        L = lattice([alg.mul(binv, tuple(x)) for x in I])
        out = L if out is None else lattice(zlat.lattice_intersection(out, L))
    return out


def _residues(basis, p):
    """Representatives of L / pL as integer coefficient tuples and elements."""
    for coeffs in product(range(p), repeat=4):
        yield coeffs, tuple(sum(c * basis[r][s] for r, c in enumerate(coeffs)) for s in range(4))


@dataclass
class EichlerOrder:
    algebra: QuaternionAlgebra
    basis: list
    level: int
    maximal: list

    @cached_property
    def discriminant(self):
        return discriminant_of_order(self.algebra, self.basis)


def eichler_order(alg, level=1, maximal=None):
    """Eichler order of squarefree level N+ inside a fixed maximal order O.

    For each p | N+ pick alpha in O with p | n(alpha), alpha not in pO; the
    left ideal O alpha + pO has norm p and R = O cap O_r(O alpha + pO).
    """
    O = maximal if maximal is not None else maximal_order(alg)
    if level < 1 or not is_squarefree(level) or gcd(level, alg.discriminant) != 1:
        raise ConfigError(f"level N+ = {level} must be squarefree and prime to N-")
    R = O
    for p in prime_factors(level):
        found = None
        for coeffs, x in _residues(O, p):
            if not any(coeffs) or alg.norm(x) % p != 0:
                continue
            J = lattice([alg.mul(tuple(o), x) for o in O] + [[p * c for c in r] for r in O])
            if zlat.index(J, O) == p * p:
                found = J
                break
        if found is None:
            raise ConfigError(f"no norm-{p} left ideal found")
        R = lattice(zlat.lattice_intersection(R, right_order(alg, found)))
    order = EichlerOrder(alg, R, level, O)
    if order.discriminant != alg.discriminant * level:
        raise ConfigError("Eichler order has the wrong discriminant")
    return order


def eichler_mass(N_minus, N_plus):
    """Sum over classes of 1/#(O_l(I)^x / +-1)."""
    m = Fraction(1, 12)
    for p in prime_factors(N_minus):
        m *= p - 1
    for p in prime_factors(N_plus):
        m *= p + 1
    return m


# -- short vectors ---------------------------------------------------------------

@dataclass
class QuadLattice:
    """Positive-definite lattice with integral Gram matrix of (x, y) = n(x+y)-n(x)-n(y)."""
    gram: list

    def __post_init__(self):
        self.gram = [[int(x) for x in r] for r in self.gram]
        if any(self.gram[i][j] != self.gram[j][i] for i in range(4) for j in range(4)):
            raise ConfigError("Gram matrix not symmetric")
        if any(self.gram[i][i] % 2 for i in range(4)):
            raise ConfigError("Gram matrix must be even (integral norm)")
        if np.min(np.linalg.eigvalsh(np.array(self.gram, dtype=float))) <= 0:
            raise ConfigError("Gram matrix not positive definite")

    def norm(self, x):
        G = self.gram
        return sum(x[i] * G[i][j] * x[j] for i in range(4) for j in range(4)) // 2

    def pair(self, x, y):
        G = self.gram
        return sum(x[i] * G[i][j] * y[j] for i in range(4) for j in range(4))

    def short_vectors(self, bound):
        return short_vectors(self.gram, bound)


def short_vectors(gram, bound):
    """All integer coordinate vectors x with n(x) = x G x / 2 <= bound.

    Fincke-Pohst enumeration on the Cholesky form with a small float slack;
    candidates are then filtered by the exact integer norm.  Returns an
    (m, n) int64 array including the zero vector.
    """
    G = np.array(gram, dtype=float) / 2
    n = G.shape[0]
    # q(x) = sum_i Q[i,i] (x_i + sum_{j>i} Q[i,j] x_j)^2
    Q = G.copy()
    for i in range(n):
        for j in range(i + 1, n):
            Q[j, i] = Q[i, j]
            Q[i, j] = Q[i, j] / Q[i, i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k, l] -= Q[k, i] * Q[i, l]
    B = float(bound) + 1e-7
    blocks = []  # (lo, hi, prefix x[1:]) for the innermost coordinate
    x = [0] * n

    def rec(i, remaining):
        c = sum(Q[i, j] * x[j] for j in range(i + 1, n))
        r = sqrt(max(remaining, 0.0) / Q[i, i])
        lo, hi = ceil(-c - r - 1e-9), floor(-c + r + 1e-9)
        if i == 0:
            if lo <= hi:
                blocks.append((lo, hi, tuple(x[1:])))
            return
        for v in range(lo, hi + 1):
            x[i] = v
            t = remaining - Q[i, i] * (v + c) ** 2
            if t >= -1e-7:
                rec(i - 1, t)
        x[i] = 0

    rec(n - 1, B)
    if not blocks:
        return np.zeros((0, n), dtype=np.int64)
    lens = np.array([hi - lo + 1 for lo, hi, _ in blocks], dtype=np.int64)
    starts = np.repeat(np.array([lo for lo, _, _ in blocks], dtype=np.int64), lens)
    offs = np.arange(lens.sum()) - np.repeat(np.cumsum(lens) - lens, lens)
    arr = np.empty((int(lens.sum()), n), dtype=np.int64)
    arr[:, 0] = starts + offs
    if n > 1:
        arr[:, 1:] = np.repeat(np.array([p for _, _, p in blocks], dtype=np.int64).reshape(-1, n - 1), lens, axis=0)
    Gi = np.array(gram, dtype=np.int64)
    norms = np.einsum("mi,ij,mj->m", arr, Gi, arr) // 2
    return arr[norms <= bound]


def short_vectors_naive(gram, bound, box):
    """Box search, for cross-checking the enumerator."""
    Gi = np.array(gram, dtype=np.int64)
    rng = np.arange(-box, box + 1)
    pts = np.array(np.meshgrid(*([rng] * Gi.shape[0]), indexing="ij")).reshape(Gi.shape[0], -1).T
    norms = np.einsum("mi,ij,mj->m", pts, Gi, pts) // 2
    return pts[norms <= bound]


def vectors_with_gram(lat, T):
    """Pairs (x1, x2) of coordinate vectors with n(x1)=a, n(x2)=c, (x1,x2)=b for T=(a,b,c)."""
    a, b, c = T
    if a < 0 or c < 0 or b * b > 4 * a * c:
        return []
    G = np.array(lat.gram, dtype=np.int64)
    vecs = short_vectors(lat.gram, max(a, c))
    norms = np.einsum("mi,ij,mj->m", vecs, G, vecs) // 2
    X1 = vecs[norms == a]
    X2 = vecs[norms == c]
    if len(X1) == 0 or len(X2) == 0:
        return []
    P = X1 @ G @ X2.T
    i, j = np.nonzero(P == b)
    return [(tuple(int(v) for v in X1[s]), tuple(int(v) for v in X2[t])) for s, t in zip(i, j)]


# -- ideals and classes ----------------------------------------------------------

@dataclass
class RightIdeal:
    basis: list
    norm: Fraction

    def key(self):
        return tuple(tuple(r) for r in self.basis)


def make_ideal(alg, basis):
    L = lattice(basis)
    return RightIdeal(L, norm_of_lattice(alg, L))


def lattice_coords(basis, x):
    """Integer coordinates of x in the given lattice basis."""
    inv = zlat.inverse(basis)
    c = [sum(Fraction(x[i]) * inv[i][j] for i in range(4)) for j in range(4)]
    if any(v.denominator != 1 for v in c):
        raise ConfigError("element not in lattice")
    return [int(v) for v in c]


def element(basis, coords):
    return tuple(sum(int(c) * basis[r][s] for r, c in enumerate(coords)) for s in range(4))


def elements_of_norm(alg, basis, m):
    """Elements y of the lattice with n(y) = m exactly (m rational)."""
    G = gram_bilinear(alg, basis)
    den = 1
    for r in G:
        for v in r:
            den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
    Gi = [[int(v * den) for v in r] for r in G]
    target = Fraction(m) * den
    if target.denominator != 1:
        return []
    vecs = short_vectors(Gi, int(target))
    Gn = np.array(Gi, dtype=np.int64)
    norms = np.einsum("mi,ij,mj->m", vecs, Gn, vecs) // 2
    return [element(basis, v) for v in vecs[norms == int(target)]]


def isomorphism(alg, I, J):
    """gamma with I = gamma J, or None."""
    M = lattice_product(alg, I.basis, lattice_conj(alg, J.basis))
    ys = elements_of_norm(alg, M, I.norm * J.norm)
    if not ys:
        return None
    y = ys[0]
    return tuple(c / J.norm for c in y)


def unit_count(alg, order_basis):
    """#O^x (including -1)."""
    return len(elements_of_norm(alg, order_basis, 1))


@dataclass
class IdealClassSet:
    order: EichlerOrder
    representatives: list
    unit_orders: list  # #Gamma_a = #O_l(I_a)^x / 2
    left_orders: list
    neighbor_prime: int

    @property
    def size(self):
        return len(self.representatives)

    def mass(self):
        return sum((Fraction(1, u) for u in self.unit_orders), Fraction(0))

    def find(self, ideal):
        """(index, gamma) with ideal = gamma * representative."""
        alg = self.order.algebra
        for idx, rep in enumerate(self.representatives):
            g = isomorphism(alg, ideal, rep)
            if g is not None:
                return idx, g
        raise ConfigError("ideal not equivalent to any representative")


def neighbors(alg, order_basis, I, ell):
    """The ell + 1 right ideals J in I with [I : J] = ell^2 (ell prime to the level)."""
    out = {}
    for coeffs, x in _residues(I.basis, ell):
        if not any(coeffs):
            continue
        if (alg.norm(x) / I.norm) % ell != 0:
            continue
        J = lattice([alg.mul(x, tuple(r)) for r in order_basis] + [[ell * c for c in r] for r in I.basis])
        if zlat.index(J, I.basis) != ell * ell:
            continue
        key = tuple(tuple(r) for r in J)
        if key not in out:
            out[key] = RightIdeal(J, I.norm * ell)
    return list(out.values())


def smallest_good_prime(n):
    p = 2
    while n % p == 0:
        p += 1
        while any(p % q == 0 for q in range(2, isqrt(p) + 1)):
            p += 1
    return p


def ideal_classes(order, prime=None):
    """Right-ideal class representatives by neighbour closure, stopped by the mass formula."""
    alg = order.algebra
    N = alg.discriminant * order.level
    ell = prime or smallest_good_prime(N)
    if N % ell == 0:
        raise ConfigError("neighbour prime must not divide the level")
    target = eichler_mass(alg.discriminant, order.level)
    R = make_ideal(alg, order.basis)
    reps = [R]
    lefts = [order.basis]
    units = [unit_count(alg, order.basis) // 2]
    mass = Fraction(1, units[0])
    queue = [R]
    while queue and mass < target:
        I = queue.pop(0)
        for J in neighbors(alg, order.basis, I, ell):
            if any(isomorphism(alg, J, K) is not None for K in reps):
                continue
            Ol = left_order(alg, J.basis)
            u = unit_count(alg, Ol) // 2
            reps.append(J)
            lefts.append(Ol)
            units.append(u)
            queue.append(J)
            mass += Fraction(1, u)
            if mass >= target:
                break
    if mass != target:
        raise ConfigError(f"class mass {mass} does not match Eichler mass {target}")
    return IdealClassSet(order, reps, units, lefts, ell)


def unit_order(alg, ideal):
    """#Gamma_a = #O_l(I)^x / {+-1}."""
    return unit_count(alg, left_order(alg, ideal.basis)) // 2


def ideal_times(alg, I, B, norm_factor):
    """Right ideal I*B for a lattice B (e.g. an order or a two-sided ideal)."""
    return RightIdeal(lattice_product(alg, I.basis, B), I.norm * Fraction(norm_factor))


def two_sided_ideal(alg, order_basis, p):
    """A two-sided ideal of the order of norm p (p dividing its discriminant)."""
    for coeffs, x in _residues(order_basis, p):
        if not any(coeffs) or alg.norm(x) % p != 0:
            continue
        P = lattice([alg.mul(x, tuple(r)) for r in order_basis] + [[p * c for c in r] for r in order_basis])
        if zlat.index(P, order_basis) != p * p:
            continue
        left = lattice([alg.mul(tuple(r), tuple(s)) for r in order_basis for s in P])
        if left == P:
            return P
    raise ConfigError(f"no two-sided ideal of norm {p}")


def norm_gram(alg, basis, scale=1):
    """Integral Gram of (x,y)/scale on the basis; raises if not integral."""
    G = gram_bilinear(alg, basis)
    out = []
    for r in G:
        row = []
        for v in r:
            q = Fraction(v) / Fraction(scale)
            if q.denominator != 1:
                raise ConfigError("scaled Gram matrix is not integral")
            row.append(int(q))
        out.append(row)
    return out
