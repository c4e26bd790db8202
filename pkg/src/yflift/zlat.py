"""Exact Z-lattices in Q^n given by rational row bases.

Hermite normal form, sums, intersections and indices.  Everything is
integer or Fraction arithmetic; bases are lists of row lists.
"""

from fractions import Fraction
from math import gcd


def _lcm(a, b):
    return a * b // gcd(a, b)


def common_denominator(rows):
    d = 1
    for r in rows:
        for x in r:
            if isinstance(x, Fraction):
                d = _lcm(d, x.denominator)
    return d


def hnf(rows):
    """Row Hermite normal form of an integer matrix; zero rows dropped.

    The result is upper triangular with positive pivots and entries above
    each pivot reduced into [0, pivot).
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    out = []
    r0 = 0
    for c in range(ncols):
        # gather a gcd pivot for column c among rows r0..
        piv = None
        for i in range(r0, len(A)):
            if A[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        for i in range(r0 + 1, len(A)):
            while A[i][c] != 0:
                q = A[r0][c] // A[i][c]
                A[r0] = [x - q * y for x, y in zip(A[r0], A[i])]
                A[r0], A[i] = A[i], A[r0]
        if A[r0][c] < 0:
            A[r0] = [-x for x in A[r0]]
        p = A[r0][c]
        for i in range(r0):
            q = A[i][c] // p
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r0])]
        r0 += 1
        if r0 == len(A):
            break
    return [r for r in A[:r0]]


def lattice_hnf(rows):
    """Canonical basis (HNF) of the Z-span of rational rows."""
    d = common_denominator(rows)
    H = hnf([[int(x * d) for x in r] for r in rows])
    if d == 1:
        return H
    return [[Fraction(x, d) for x in r] for r in H]


def lattice_sum(a, b):
    return lattice_hnf(list(a) + list(b))


def det(M):
    """Exact determinant by fraction-free elimination (Bareiss)."""
    n = len(M)
    A = [[Fraction(x) for x in r] for r in M]
    sign = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[k])]
    out = Fraction(sign)
    for k in range(n):
        out *= A[k][k]
    return out


def inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[k], A[piv] = A[piv], A[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k]
                A[i] = [x - f * y for x, y in zip(A[i], A[k])]
    return [r[n:] for r in A]


def transpose(M):
    return [list(r) for r in zip(*M)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(x * y for x, y in zip(r, c)) for c in Bt] for r in A]


def dual(rows):
    """Dual lattice with respect to the standard dot product (full rank)."""
    return transpose(inverse(rows))


def lattice_intersection(a, b):
    """Intersection of two full-rank lattices via duality."""
    return lattice_hnf(dual(lattice_sum(dual(a), dual(b))))


def covolume(rows):
    """|det| of a full-rank basis."""
    return abs(det(rows))


def index(sub, sup):
    """[sup : sub] for full-rank lattices with sub contained in sup."""
    q = covolume(sub) / covolume(sup)
    if q.denominator != 1:
        raise ValueError("not a sublattice")
    return int(q)


def contains(rows, v):
    """Whether the vector v lies in the Z-span of the full-rank basis rows."""
    inv = inverse(rows)
    c = [sum(Fraction(v[i]) * inv[i][j] for i in range(len(v))) for j in range(len(rows))]
    return all(x.denominator == 1 for x in c)


def gram(rows, form):
    """Gram matrix rows_i . form . rows_j for a symmetric bilinear form matrix."""
    return matmul(matmul(rows, form), transpose(rows))


def vp(x, p):
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v
