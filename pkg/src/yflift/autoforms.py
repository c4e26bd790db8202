"""Quaternionic automorphic forms of weight k on a right-ideal class set.

A form is a tuple of vectors f(i) in W_k = C[X, Y]_{2k}, one per class,
with f(i) invariant under the unit group of the left order of I_i.  The
Hecke operator at p sums over the p+1 neighbours of each ideal; in class
coordinates it is the Brandt matrix

    (T_p f)(i) = sum_j (1/#O_l(I_j)^x) sum_gamma tau_k(gamma) f(j),

gamma running over I_i I_j^-1 with n(gamma) = p n(I_i)/n(I_j).  The
Atkin-Lehner operator at p | N acts by right multiplication with the
two-sided ideal of norm p, and the degeneracy maps to a larger Eichler
order R' are I -> I R' and I -> I P R'.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb

import mpmath
import numpy as np
import sympy

from . import quatlat as ql
from .errors import (GaloisSelfDualError, NotEigenError, PrecisionError,
                     RamifiedPrimeError, ConfigError)
from .polyrep import tau_matrix, pair_W_weights


TOL = 1e-10


def tau_numeric(k, alg, gamma):
    """tau_k(Phi_infinity(gamma)) as a complex (2k+1) x (2k+1) matrix."""
    if k == 0:
        return np.ones((1, 1), dtype=complex)
    g = alg.to_matrix(gamma)
    return np.array(tau_matrix(k, g), dtype=complex)


def _hermitian_weights(k):
    """Matrix M with <v, tau_k(J) conj w>_{2k} = w^H M v (positive definite, diagonal)."""
    n = 2 * k
    return np.diag([1.0 / comb(n, i) for i in range(n + 1)])


@dataclass
class FormSpace:
    """Weight-k forms on a class set."""
    classes: ql.IdealClassSet
    k: int = 0

    @property
    def alg(self):
        return self.classes.order.algebra

    @property
    def H(self):
        return self.classes.size

    @property
    def dim_w(self):
        return 2 * self.k + 1

    @property
    def level(self):
        return self.classes.order.level

    @property
    def N(self):
        return self.alg.discriminant * self.level

    @cached_property
    def unit_groups(self):
        return [ql.elements_of_norm(self.alg, Ol, 1) for Ol in self.classes.left_orders]

    @cached_property
    def inner_matrix(self):
        """Hermitian Gram matrix of <f, g>_R on full coordinates."""
        M = _hermitian_weights(self.k)
        blocks = [M / e for e in self.classes.unit_orders]
        n = self.H * self.dim_w
        out = np.zeros((n, n), dtype=complex)
        for i, b in enumerate(blocks):
            s = slice(i * self.dim_w, (i + 1) * self.dim_w)
            out[s, s] = b
        return out

    @cached_property
    def basis(self):
        """Columns spanning the invariant subspace (full coordinates)."""
        cols = []
        for i, units in enumerate(self.unit_groups):
            P = sum(tau_numeric(self.k, self.alg, u) for u in units) / len(units)
            u_, s, _ = np.linalg.svd(P)
            r = int(np.sum(s > 0.5))
            for c in range(r):
                v = np.zeros(self.H * self.dim_w, dtype=complex)
                v[i * self.dim_w:(i + 1) * self.dim_w] = u_[:, c]
                cols.append(v)
        return np.array(cols).T.reshape(self.H * self.dim_w, -1)

    @property
    def dimension(self):
        return self.basis.shape[1]

    def inner(self, f, g):
        """<f, g>_R = sum_a <f(a), tau_k(J) conj g(a)>_W / #Gamma_a."""
        return complex(np.conj(g) @ self.inner_matrix @ f)


# -- Brandt matrices -------------------------------------------------------------

@dataclass
class BrandtMatrix:
    n: int
    k: int
    blocks: object  # int ndarray (H x H) for k = 0, complex ndarray (H(2k+1))^2 otherwise

    def full(self):
        return np.asarray(self.blocks)


def _pair_elements(space, i, j, m):
    """gamma in I_i I_j^-1 with n(gamma) = m n(I_i)/n(I_j)."""
    alg = space.alg
    Ii, Ij = space.classes.representatives[i], space.classes.representatives[j]
    M = ql.lattice_product(alg, Ii.basis, ql.lattice_conj(alg, Ij.basis))
    ys = ql.elements_of_norm(alg, M, m * Ii.norm * Ij.norm)
    return [tuple(c / Ij.norm for c in y) for y in ys]


def brandt_matrix(p, k, classes):
    """Hecke operator at p on weight-k forms (p not dividing N-)."""
    if isinstance(classes, ql.EichlerOrder):
        classes = ql.ideal_classes(classes)
    space = classes if isinstance(classes, FormSpace) else FormSpace(classes, k)
    alg = space.alg
    if p != 1 and alg.discriminant % p == 0:
        raise RamifiedPrimeError(f"p={p} divides N-; use the Atkin-Lehner involution")
    H, d = space.H, space.dim_w
    units = [len(u) for u in space.unit_groups]
    if k == 0:
        B = np.zeros((H, H), dtype=np.int64)
        for i in range(H):
            for j in range(H):
                cnt = len(_pair_elements(space, i, j, p))
                if cnt % units[j]:
                    raise ConfigError("element count not divisible by unit count")
                B[i, j] = cnt // units[j]
        return BrandtMatrix(p, 0, B)
    B = np.zeros((H * d, H * d), dtype=complex)
    for i in range(H):
        for j in range(H):
            acc = np.zeros((d, d), dtype=complex)
            for g in _pair_elements(space, i, j, p):
                acc += tau_numeric(k, alg, g)
            B[i * d:(i + 1) * d, j * d:(j + 1) * d] = acc / units[j]
    return BrandtMatrix(p, k, B)


# -- ideal-theoretic operators -------------------------------------------------

def _class_map(space, ideals):
    """For each ideal find (index, gamma) with ideal = gamma * rep."""
    return [space.classes.find(I) for I in ideals]


def _operator_from_map(space_from, space_to, pairs):
    """Matrix of f -> (i -> tau(gamma_i) f(m_i)) from space_to forms to space_from forms."""
    d = space_from.dim_w
    M = np.zeros((space_from.H * d, space_to.H * d), dtype=complex)
    for i, (m, g) in enumerate(pairs):
        M[i * d:(i + 1) * d, m * d:(m + 1) * d] = tau_numeric(space_from.k, space_from.alg, g)
    return M


def two_sided(space, p):
    return ql.two_sided_ideal(space.alg, space.classes.order.basis, p)


def atkin_lehner_matrix(space, p):
    """(W_p f)(i) = tau(gamma) f(m) where I_i P = gamma I_m."""
    if space.N % p:
        raise ConfigError(f"p={p} does not divide the level")
    P = two_sided(space, p)
    ideals = [ql.ideal_times(space.alg, I, P, p) for I in space.classes.representatives]
    return _operator_from_map(space, space, _class_map(space, ideals))


def degeneracy_matrices(space, coarse):
    """Pullbacks f -> f o pi_1 and f -> f o pi_2 from a coarser level to this one.

    pi_1[I] = [I R'] and pi_2[I] = [I P R'], with P the two-sided ideal at
    the prime N+/N+'.
    """
    alg = space.alg
    Rp = coarse.classes.order.basis
    q = space.level // coarse.level
    if space.level % coarse.level or q == 1 or len(ql.prime_factors(q)) != 1:
        raise ConfigError("degeneracy maps need levels differing by one prime")
    P = two_sided(space, q)
    im1 = [ql.ideal_times(alg, I, Rp, 1) for I in space.classes.representatives]
    im2 = [ql.ideal_times(alg, ql.ideal_times(alg, I, P, q), Rp, 1) for I in space.classes.representatives]
    return (_operator_from_map(space, coarse, _class_map(coarse, im1)),
            _operator_from_map(space, coarse, _class_map(coarse, im2)))


# -- eigenforms -------------------------------------------------------------------

@dataclass
class QuatEigenform:
    k: int
    values: np.ndarray  # full coordinates, length H (2k+1)
    hecke: dict  # p -> Brandt eigenvalue
    al_signs: dict = field(default_factory=dict)
    level: tuple = (1, 1)
    is_new: bool = True
    exact: tuple = None  # rational values when available (k = 0)

    def value(self, i):
        d = 2 * self.k + 1
        return self.values[i * d:(i + 1) * d]

    def a_p(self, p):
        """Classical normalization a_p = p^k * (Brandt eigenvalue)."""
        return self.hecke[p] * p ** self.k


def good_primes(N, bound=13):
    return [p for p in ql.primes_up_to(bound) if N % p]


def snap(x, degree=4, tol=1e-8):
    """Integer minimal polynomial (leading coefficient first) of degree <= 4 matching x."""
    x = complex(x)
    if abs(x.imag) > tol:
        return None
    r = round(x.real)
    if abs(x.real - r) < tol:
        return (1, -r)
    mpmath.mp.dps = 30
    for d in range(2, degree + 1):
        c = mpmath.findpoly(mpmath.mpf(x.real), d, maxcoeff=10 ** 6)
        if c:
            val = sum(ci * x.real ** (len(c) - 1 - i) for i, ci in enumerate(c))
            if abs(val) < tol * 10 ** d:
                return tuple(int(ci) for ci in c)
    return None


def _exact_kernel_vector(mats, eigs):
    """Rational common eigenvector for integer matrices with rational eigenvalues."""
    M = sympy.Matrix.vstack(*[sympy.Matrix(m.tolist()) - sympy.Rational(e) * sympy.eye(m.shape[0])
                              for m, e in zip(mats, eigs)])
    ns = M.nullspace()
    if len(ns) != 1:
        return None
    v = ns[0]
    den = sympy.ilcm(*[sympy.fraction(x)[1] for x in v])
    v = v * den
    g = sympy.igcd(*[int(x) for x in v if x != 0])
    v = v / g
    first = next(x for x in v if x != 0)
    if first < 0:
        v = -v
    return tuple(Fraction(int(x)) for x in v)


def _hecke_operators(space, primes):
    return {p: brandt_matrix(p, space.k, space).full().astype(complex) for p in primes}


def _eisenstein_vector(space):
    if space.k != 0:
        return None
    return np.ones(space.H, dtype=complex)


def eigenforms(space, primes=None, subspace=None, seed=0):
    """Simultaneous eigenforms of the Hecke operators at good primes.

    ``subspace`` is an optional column basis (full coordinates) to restrict
    to; by default the cuspidal part of the invariant subspace.  Eigenvalues
    must be real and residuals at most TOL, else PrecisionError.
    """
    primes = primes or good_primes(space.N)
    ops = _hecke_operators(space, primes)
    V = space.basis if subspace is None else subspace
    if subspace is None:
        e = _eisenstein_vector(space)
        if e is not None:
            G = space.inner_matrix
            proj = V - np.outer(e, (np.conj(e) @ G @ V)) / (np.conj(e) @ G @ e)
            u, s, _ = np.linalg.svd(proj)
            V = u[:, :int(np.sum(s > 1e-8))]
    if V.shape[1] == 0:
        return []
    # orthonormalize V for the Petersson form
    G = space.inner_matrix
    L = np.linalg.cholesky(np.conj(V.T) @ G @ V)
    V = V @ np.linalg.inv(np.conj(L.T))
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=len(primes))
    T = sum(c * (np.conj(V.T) @ G @ ops[p] @ V) for c, p in zip(coeffs, primes))
    w, U = np.linalg.eigh((T + np.conj(T.T)) / 2)
    forms = []
    for col in range(U.shape[1]):
        f = V @ U[:, col]
        hecke = {}
        for p in primes:
            Tf = ops[p] @ f
            lam = (np.conj(f) @ G @ Tf) / (np.conj(f) @ G @ f)
            res = np.linalg.norm(Tf - lam * f) / np.linalg.norm(f)
            if res > 1e-8 * (p + 1):
                raise PrecisionError(f"eigen residual {res:.2e} at p={p}")
            if abs(lam.imag) > 1e-8:
                raise PrecisionError(f"non-real eigenvalue {lam} at p={p}")
            hecke[p] = lam.real
        forms.append(QuatEigenform(space.k, f, hecke, level=(space.alg.discriminant, space.level)))
    _normalize_forms(space, forms, ops)
    return forms


def _normalize_forms(space, forms, ops):
    """Snap eigenvalues; for k = 0 with rational eigenvalues use exact eigenvectors."""
    for f in forms:
        snapped = {}
        for p, lam in f.hecke.items():
            poly = snap(lam)
            if poly is not None and len(poly) == 2:
                snapped[p] = Fraction(-poly[1], poly[0])
        if space.k == 0 and len(snapped) == len(f.hecke):
            ps = sorted(snapped)
            mats = [brandt_matrix(p, 0, space).full() for p in ps]
            v = _exact_kernel_vector(mats, [snapped[p] for p in ps])
            if v is not None:
                f.exact = v
                f.values = np.array([complex(x) for x in v])
                f.hecke = {p: float(snapped[p]) for p in ps}
                f.hecke_exact = snapped
                continue
        # scale so the largest entry is real positive
        idx = int(np.argmax(np.abs(f.values)))
        f.values = f.values / f.values[idx] * abs(f.values[idx])


def atkin_lehner_sign(space, f, p):
    """epsilon with f(h eta_p) = epsilon f(h)."""
    W = atkin_lehner_matrix(space, p)
    g = W @ f.values
    eps = (np.conj(f.values) @ space.inner_matrix @ g) / space.inner(f.values, f.values)
    s = int(round(eps.real))
    if s not in (1, -1) or np.linalg.norm(g - s * f.values) > 1e-8 * np.linalg.norm(f.values):
        raise NotEigenError(f"form is not an Atkin-Lehner eigenvector at p={p}")
    return s


def old_subspace(space, coarse_spaces):
    """Span of pullbacks f o pi_1, f o pi_2 from each coarser level."""
    cols = []
    for coarse in coarse_spaces:
        D1, D2 = degeneracy_matrices(space, coarse)
        for D in (D1, D2):
            cols.append(D @ coarse.basis)
    if not cols:
        return np.zeros((space.H * space.dim_w, 0), dtype=complex)
    M = np.hstack(cols)
    u, s, _ = np.linalg.svd(M)
    return u[:, :int(np.sum(s > 1e-8))]


def new_subspace(space, coarse_spaces):
    """Orthogonal complement (Petersson form) of the old space in the invariant space."""
    old = old_subspace(space, coarse_spaces)
    V = space.basis
    if old.shape[1] == 0:
        return V
    G = space.inner_matrix
    # remove components along old: solve with the Gram of old
    Go = np.conj(old.T) @ G @ old
    proj = V - old @ np.linalg.solve(Go, np.conj(old.T) @ G @ V)
    u, s, _ = np.linalg.svd(proj)
    return u[:, :int(np.sum(s > 1e-8))]


def coarse_levels(order):
    """Eichler orders of level N+/p (same maximal order) for each p | N+."""
    alg = order.algebra
    out = []
    for p in ql.prime_factors(order.level):
        out.append(ql.eichler_order(alg, order.level // p, order.maximal))
    return out


def newforms(space, primes=None):
    """Eigenforms in the new subspace, with Atkin-Lehner signs at all p | N."""
    coarse = [FormSpace(ql.ideal_classes(o), space.k) for o in coarse_levels(space.classes.order)]
    V = new_subspace(space, coarse)
    if space.k == 0 and space.level == 1:
        forms = eigenforms(space, primes)
    else:
        forms = eigenforms(space, primes, subspace=_drop_eisenstein(space, V))
    for f in forms:
        f.is_new = True
        for p in ql.prime_factors(space.N):
            f.al_signs[p] = atkin_lehner_sign(space, f, p)
    return forms


def _drop_eisenstein(space, V):
    e = _eisenstein_vector(space)
    if e is None or V.shape[1] == 0:
        return V
    G = space.inner_matrix
    proj = V - np.outer(e, (np.conj(e) @ G @ V)) / (np.conj(e) @ G @ e)
    u, s, _ = np.linalg.svd(proj)
    return u[:, :int(np.sum(s > 1e-8))]


# -- stabilization --------------------------------------------------------------

@dataclass
class StabilizedForm:
    f1: QuatEigenform
    f2: QuatEigenform
    P: list
    space: FormSpace  # forms live on the class set of level N+ = lcm(N1+, N2+)
    values1: np.ndarray
    values2: np.ndarray
    eps: dict  # p -> epsilon of the other factor used in V_p
    exact1: tuple = None
    exact2: tuple = None


def stabilization_primes(N1, N2, N_minus):
    n1, n2 = N1 // N_minus, N2 // N_minus
    return sorted(p for p in set(ql.prime_factors(n1)) ^ set(ql.prime_factors(n2)))


def _pullback_to(space, f, f_space):
    """Express a form of level N_i+ on the finer class set via repeated pi_1."""
    vals = f.values
    cur = f_space
    # climb one prime at a time along the chain of Eichler orders
    chain = []
    order = space.classes.order
    while order.level != cur.level:
        chain.append(order)
        q = next(p for p in ql.prime_factors(order.level) if (cur.level % p))
        order = ql.eichler_order(order.algebra, order.level // q, order.maximal)
    spaces = [FormSpace(ql.ideal_classes(o), space.k) for o in reversed(chain)]
    lower = cur
    for s in spaces:
        D1, _ = degeneracy_matrices(s, lower)
        vals = D1 @ vals
        lower = s
    return vals


def stabilize(f1, f2, N1, N2, space, spaces_by_level):
    """f-dagger: pull both factors to level N+ and apply V_p for p in the stabilization set.

    ``spaces_by_level`` maps N_i+ (or (N_i+, k_i)) to the FormSpace each f_i lives on.
    V_p(f)(h) = f(h) + eps_{p^c} f(h eta_p), where eps_{p^c} is the
    Atkin-Lehner sign of the factor that has p in its level.
    """
    N_minus = space.alg.discriminant
    if f1.k == f2.k and all(abs(f1.hecke[p] - f2.hecke.get(p, np.inf)) < 1e-9 for p in f1.hecke):
        raise GaloisSelfDualError("f1 = f2: the representation is Galois self-dual")
    P = stabilization_primes(N1, N2, N_minus)
    n1, n2 = N1 // N_minus, N2 // N_minus
    # each factor lives on the fine class set in its own weight
    sp1 = space if f1.k == space.k else FormSpace(space.classes, f1.k)
    sp2 = space if f2.k == space.k else FormSpace(space.classes, f2.k)
    v1 = _pullback_to(sp1, f1, spaces_by_level.get((n1, f1.k), spaces_by_level.get(n1)))
    v2 = _pullback_to(sp2, f2, spaces_by_level.get((n2, f2.k), spaces_by_level.get(n2)))
    eps = {}
    for p in P:
        if n1 % p == 0:
            e = f1.al_signs[p]
            v2 = v2 + e * (atkin_lehner_matrix(sp2, p) @ v2)
        else:
            e = f2.al_signs[p]
            v1 = v1 + e * (atkin_lehner_matrix(sp1, p) @ v1)
        eps[p] = e
    out = StabilizedForm(f1, f2, P, space, v1, v2, eps)
    out.exact1 = _rationalize(v1) if space.k == 0 else None
    out.exact2 = _rationalize(v2) if space.k == 0 else None
    return out


def _rationalize(v, maxden=10 ** 6):
    """Exact rationals for a numerically rational vector, else None."""
    out = []
    for x in v:
        if abs(x.imag) > 1e-9:
            return None
        q = Fraction(x.real).limit_denominator(maxden)
        if abs(float(q) - x.real) > 1e-9:
            return None
        out.append(q)
    return tuple(out)


def petersson_norm_R(space, f, g=None):
    """sum_a <f(a), tau_k(J) conj g(a)>_W / #Gamma_a."""
    g = f if g is None else g
    return space.inner(np.asarray(f, dtype=complex), np.asarray(g, dtype=complex))


# -- elliptic-curve oracle ---------------------------------------------------------

CURVES = {
    "11a": (0, -1, 1, -10, -20),
    "33a": (1, 1, 0, -11, 0),
}


def ec_ap(ainvs, p):
    """a_p = p + 1 - #E(F_p) for a curve with good reduction at p, by point counting."""
    a1, a2, a3, a4, a6 = ainvs
    count = 1
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % p == 0:
                count += 1
    return p + 1 - count


def ec_ap_table(ainvs, primes):
    """a_p for many primes using Legendre symbols of the completed-square discriminant."""
    a1, a2, a3, a4, a6 = ainvs
    out = {}
    for p in primes:
        if p == 2:
            out[p] = ec_ap(ainvs, p)
            continue
        x = np.arange(p, dtype=np.int64)
        f = ((((x + a2) * x % p + a4) * x % p + a6) * 4 + (a1 * x + a3) ** 2) % p
        sq = np.zeros(p, dtype=np.int64)
        sq[(x * x) % p] = 1
        leg = np.where(f == 0, 0, 2 * sq[f] - 1)
        out[p] = int(-leg.sum())
    return out


def theta_hecke_eigenvalues(space, f, bound):
    """Brandt eigenvalues at all primes p <= bound, p prime to N, from norm counts (k = 0).

    The Brandt matrix of every n is read off the theta series of I_i conj(I_j),
    so a single short-vector enumeration per class pair serves all primes.
    """
    if space.k != 0:
        raise ConfigError("theta eigenvalues are implemented for weight 0")
    alg = space.alg
    reps = space.classes.representatives
    H = space.H
    units = [len(u) for u in space.unit_groups]
    counts = np.zeros((H, H, bound + 1), dtype=np.int64)
    for i, Ii in enumerate(reps):
        for j, Ij in enumerate(reps):
            L = ql.lattice_product(alg, Ii.basis, ql.lattice_conj(alg, Ij.basis))
            G = ql.norm_gram(alg, L, Ii.norm * Ij.norm)
            v = ql.short_vectors(G, bound)
            norms = np.einsum("mi,ij,mj->m", v, np.array(G, dtype=np.int64), v) // 2
            counts[i, j] = np.bincount(norms, minlength=bound + 1)[:bound + 1]
    vals = f.exact if f.exact is not None else f.values
    idx = int(np.argmax(np.abs(np.array([complex(v) for v in vals]))))
    out = {}
    for p in ql.primes_up_to(bound):
        if space.N % p == 0:
            continue
        row = sum(Fraction(int(counts[idx, j, p]), units[j]) * (vals[j] if f.exact else 1) for j in range(H)) \
            if f.exact is not None else sum(counts[idx, j, p] / units[j] * vals[j] for j in range(H))
        out[p] = row / vals[idx]
    return out


def classical_bad_ap(f, p, N_minus):
    """a_p at p | N from the quaternionic Atkin-Lehner sign (weight 2k+2 newform)."""
    s = f.al_signs[p]
    return (s if N_minus % p == 0 else -s) * p ** f.k
