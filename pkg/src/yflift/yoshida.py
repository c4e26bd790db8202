"""Fourier expansion and point evaluation of the Yoshida lift.

For a stabilized pair f-dagger on the right-ideal classes I_1..I_H of an
Eichler order R, the (i, j) block lattice is L_ij = I_i conj(I_j) with norm
form n(x)/(n(I_i) n(I_j)), which is primitive integral of level N.  The
lift has Fourier coefficients

    A(T) = sum_{i,j} (#Gamma_i #Gamma_j)^-1 sum_{x in L_ij^2, Q(x) = T}
           < P_k(x1, x2), f1(i) (x) f2(j) >_W

with Q(x) = (n(x1), (x1, x2), n(x2)) read as (a, b, c), T = [[a, b/2], [b/2, c]].
For k = (0, 0) the kernel is 1 and A(T) is an exact rational.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, exp, pi, sqrt

import numpy as np

from . import quatlat as ql
from .archimedean import _qinv_unit, _qmul
from .errors import ConfigError, DomainError, TruncationError
from .kernel import HarmonicKernel, harmonic_numeric
from .polyrep import WeightVector, pair_W_weights, tau_matrix


def harmonic_poly(k1, k2, x1, x2):
    """[P^alpha(x1, x2)] as WeightVectors; x given as (z, w) pairs of exact scalars."""
    return HarmonicKernel(k1, k2)(x1, x2)


def _apply_tau_pair(k1, k2, a, b, wv):
    """tau_k1(a) (x) tau_k2(b) applied to a WeightVector grid."""
    A = tau_matrix(k1, a)
    B = tau_matrix(k2, b)
    n1, n2 = 2 * k1 + 1, 2 * k2 + 1
    out = WeightVector.zero(k1, k2)
    for i in range(n1):
        for j in range(n2):
            out.grid[i][j] = sum(A[i][r] * B[j][s] * wv.grid[r][s] for r in range(n1) for s in range(n2))
    return out


def _as_matrix(q):
    from .gauss import conj
    z, w = q
    return [[z, w], [-conj(w), conj(z)]]


def equivariance_holds(k1, k2, a, b, x1, x2):
    """Exact check of P(a x1 b^-1, a x2 b^-1) = tau_k1(a) (x) tau_k2(b) P(x1, x2) for unit a, b."""
    bi = _qinv_unit(b)
    y1 = _qmul(_qmul(a, x1), bi)
    y2 = _qmul(_qmul(a, x2), bi)
    lhs = harmonic_poly(k1, k2, y1, y2)
    rhs = [_apply_tau_pair(k1, k2, _as_matrix(a), _as_matrix(b), v) for v in harmonic_poly(k1, k2, x1, x2)]
    return all(l.grid == r.grid for l, r in zip(lhs, rhs))


# -- block lattices ---------------------------------------------------------------

@dataclass
class BlockLattice:
    i: int
    j: int
    basis: list  # quaternion coordinates of the Z-basis
    gram: list  # integral even Gram of (x, y)/(n_i n_j)
    scale: Fraction  # n(I_i) n(I_j)


def block_lattices(space, maximal_at=None):
    """L_ij = I_i B conj(I_j), B = R (default) or a larger order for the conjugated lift."""
    alg = space.alg
    reps = space.classes.representatives
    out = {}
    for i, Ii in enumerate(reps):
        left = Ii.basis if maximal_at is None else ql.lattice_product(alg, Ii.basis, maximal_at)
        for j, Ij in enumerate(reps):
            L = ql.lattice_product(alg, left, ql.lattice_conj(alg, Ij.basis))
            scale = Ii.norm * Ij.norm
            out[(i, j)] = BlockLattice(i, j, L, ql.norm_gram(alg, L, scale), scale)
    return out


def _pair_keys(vecs, G, bound, trace_bound):
    """Yield (a, b, c) arrays for all vector pairs within the box/trace bounds, chunked."""
    norms = np.einsum("mi,ij,mj->m", vecs, G, vecs) // 2
    order = np.argsort(norms, kind="stable")
    vecs, norms = vecs[order], norms[order]
    GV = vecs @ G
    chunk = max(1, 2_000_000 // max(1, len(vecs)))
    for s in range(0, len(vecs), chunk):
        a = norms[s:s + chunk]
        lim = trace_bound - a.min()
        m = int(np.searchsorted(norms, min(bound, lim), side="right"))
        if m == 0:
            continue
        b = GV[s:s + chunk] @ vecs[:m].T
        c = norms[:m]
        A = np.broadcast_to(a[:, None], b.shape)
        C = np.broadcast_to(c[None, :], b.shape)
        keep = (A + C) <= trace_bound
        yield A[keep], b[keep], C[keep], s, m, keep


def theta_counts(lat, bound, trace_bound=None):
    """Representation numbers {(a, b, c): #pairs} for a <= bound, c <= bound, a + c <= trace_bound."""
    trace_bound = 2 * bound if trace_bound is None else trace_bound
    G = np.array(lat.gram, dtype=np.int64)
    vecs = ql.short_vectors(lat.gram, bound)
    off = 2 * bound + 1
    nb = 2 * off + 1
    size = (bound + 1) * nb * (bound + 1)
    hist = np.zeros(size, dtype=np.int64)
    for a, b, c, *_ in _pair_keys(vecs, G, bound, trace_bound):
        key = (a * nb + (b + off)) * (bound + 1) + c
        hist += np.bincount(key, minlength=size)
    out = {}
    for key in np.nonzero(hist)[0]:
        c = int(key % (bound + 1))
        r = int(key // (bound + 1))
        b = int(r % nb) - off
        a = int(r // nb)
        out[(a, b, c)] = int(hist[key])
    return out


# -- expansions -------------------------------------------------------------------

@dataclass
class SiegelFourierExpansion:
    k1: int
    k2: int
    level: int
    bound: int
    coeffs: dict  # (a, b, c) -> Fraction (k = (0,0)) or complex ndarray of length 2k2+1
    trace_bound: int = None
    exact: bool = True

    def __post_init__(self):
        if self.trace_bound is None:
            self.trace_bound = 2 * self.bound

    @property
    def weight(self):
        return self.k1 + 2

    def covers(self, T):
        a, b, c = T
        return a <= self.bound and c <= self.bound and a + c <= self.trace_bound

    def zero(self):
        return Fraction(0) if self.exact else np.zeros(2 * self.k2 + 1, dtype=complex)

    def __getitem__(self, T):
        a, b, c = T
        if a < 0 or c < 0 or b * b > 4 * a * c:
            return self.zero()
        if not self.covers(T):
            raise TruncationError(f"coefficient {T} outside bound {self.bound}")
        return self.coeffs.get(tuple(T), self.zero())

    def nonzero(self):
        return {T: v for T, v in self.coeffs.items() if np.any(np.asarray(v, dtype=complex) != 0)}

    def to_json(self):
        rows = []
        for (a, b, c), v in sorted(self.coeffs.items(), key=lambda kv: (4 * kv[0][0] * kv[0][2] - kv[0][1] ** 2, kv[0][0], kv[0][1], kv[0][2])):
            if self.exact:
                vals = [str(v)]
            else:
                vals = [[float(x.real), float(x.imag)] for x in np.atleast_1d(v)]
            rows.append({"a": a, "b": b, "c": c, "coeffs": vals})
        return {"k1": self.k1, "k2": self.k2, "level": self.level, "bound": self.bound,
                "trace_bound": self.trace_bound, "exact": self.exact, "coefficients": rows}

    @classmethod
    def from_json(cls, data):
        coeffs = {}
        for r in data["coefficients"]:
            T = (r["a"], r["b"], r["c"])
            if data["exact"]:
                coeffs[T] = Fraction(r["coeffs"][0])
            else:
                coeffs[T] = np.array([complex(x, y) for x, y in r["coeffs"]])
        return cls(data["k1"], data["k2"], data["level"], data["bound"], coeffs,
                   data.get("trace_bound"), data["exact"])

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _weights(space, fdag):
    """Exact weights f1(i) f2(j)/(e_i e_j) when available."""
    e = space.classes.unit_orders
    H = space.H
    if fdag.exact1 is not None and fdag.exact2 is not None:
        return {(i, j): fdag.exact1[i] * fdag.exact2[j] / (e[i] * e[j]) for i in range(H) for j in range(H)}
    return None


def fourier_expansion(fdag, bound, trace_bound=None, lattices=None, threads=1):
    """All coefficients A(T) with a, c <= bound (and a + c <= trace_bound)."""
    space = fdag.space
    k1, k2 = space.k, fdag.f2.k
    lattices = lattices or block_lattices(space)
    trace_bound = 2 * bound if trace_bound is None else trace_bound
    W = _weights(space, fdag) if (k1, k2) == (0, 0) else None
    if (k1, k2) == (0, 0):
        if W is None:
            e = space.classes.unit_orders
            W = {(i, j): complex(fdag.values1[i] * fdag.values2[j]) / (e[i] * e[j]) for (i, j) in lattices}
            exact = False
        else:
            exact = True
        jobs = [(key, lat) for key, lat in lattices.items() if W[key] != 0]

        def work(item):
            return item[0], theta_counts(item[1], bound, trace_bound)
        results = _map(work, jobs, threads)
        coeffs = {}
        for key, counts in sorted(results, key=lambda r: r[0]):
            w = W[key]
            for T, n in counts.items():
                coeffs[T] = coeffs.get(T, 0) + w * n
        if not exact:
            coeffs = {T: np.array([v]) for T, v in coeffs.items()}
        coeffs = {T: v for T, v in coeffs.items() if np.any(np.asarray(v) != 0)}
        return SiegelFourierExpansion(0, 0, space.N, bound, coeffs, trace_bound, exact)
    return _vector_expansion(fdag, bound, trace_bound, lattices, k1, k2)


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def _vector_expansion(fdag, bound, trace_bound, lattices, k1, k2):
    """Weight k != 0: kernel values paired against f1(i) (x) f2(j), numerically."""
    space = fdag.space
    alg = space.alg
    e = space.classes.unit_orders
    d1, d2 = 2 * k1 + 1, 2 * k2 + 1
    cw = np.array(pair_W_weights(k1, k2), dtype=float)
    coeffs = {}
    for (i, j), lat in lattices.items():
        u = fdag.values1[i * d1:(i + 1) * d1]
        v = fdag.values2[j * d2:(j + 1) * d2]
        # <P, u (x) v>_W with the pairing (-1)^... weights on reversed indices
        target = np.outer(u, v)[::-1, ::-1]
        G = np.array(lat.gram, dtype=np.int64)
        vecs = ql.short_vectors(lat.gram, bound)
        s = 1 / sqrt(float(lat.scale))
        quats = np.array([[float(sum(int(c) * lat.basis[r][t] for r, c in enumerate(x))) for t in range(4)] for x in vecs])
        zs, ws = _to_zw(alg, quats * s)
        for a, b, c, start, m, keep in _pair_keys(vecs, G, bound, trace_bound):
            I, J = np.nonzero(keep)
            I = I + start
            P = harmonic_numeric(k1, k2, zs[I], ws[I], zs[J], ws[J])
            vals = np.einsum("anij,ij,ij->na", P, cw, target) / (e[i] * e[j])
            for t in range(len(a)):
                T = (int(a[t]), int(b[t]), int(c[t]))
                coeffs[T] = coeffs.get(T, 0) + vals[t]
    coeffs = {T: v for T, v in coeffs.items() if np.max(np.abs(v)) > 1e-12}
    return SiegelFourierExpansion(k1, k2, space.N, bound, coeffs, trace_bound, False)


def _to_zw(alg, quats):
    """Phi_infinity: rows (x0..x3) -> (z, w) with x = [[z, w], [-conj w, conj z]]."""
    a, b = abs(alg.a), abs(alg.b)
    z = quats[:, 0] + 1j * quats[:, 1] * sqrt(a)
    w = quats[:, 2] * sqrt(b) + 1j * quats[:, 3] * sqrt(a * b)
    return z, w


def fourier_coefficient(fdag, T, lattices=None):
    """A(T) for a single index."""
    a, b, c = T
    if a < 0 or c < 0 or b * b > 4 * a * c:
        return Fraction(0)
    exp_ = fourier_expansion(fdag, max(a, c), a + c, lattices)
    return exp_[T]


def lift_conjugated_lattice(fdag, p, bound, trace_bound=None):
    """Lift with the local lattice at p replaced by a maximal order containing R.

    Both block factors become I_i O conj(I_j), i.e. the test function at p is
    the characteristic function of a conjugate of M_2(Z_p)^2.
    """
    space = fdag.space
    if space.level % p:
        raise ConfigError(f"p={p} does not divide N+")
    alg = space.alg
    coarse = ql.eichler_order(alg, space.level // p, space.classes.order.maximal)
    lats = block_lattices(space, maximal_at=coarse.basis)
    return fourier_expansion(fdag, bound, trace_bound, lats)


def gl2_action(T, u):
    """u^t T u on (a, b, c) coordinates."""
    a, b, c = T
    (p, q), (r, s) = u
    return (a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s)


# -- evaluation -------------------------------------------------------------------

@dataclass
class Evaluation:
    value: complex
    tail: float
    terms: int


def evaluate(expansion, Z, trunc=None):
    """sum_{a + c <= trunc} A(T) e(tr(T Z)) with a geometric tail estimate."""
    Z = np.asarray(Z, dtype=complex)
    Y = Z.imag
    if not np.allclose(Y, Y.T) or np.min(np.linalg.eigvalsh(Y)) <= 0:
        raise DomainError("Im Z must be positive definite")
    trunc = expansion.trace_bound if trunc is None else min(trunc, expansion.trace_bound)
    if trunc < 1:
        raise DomainError("truncation must be at least 1")
    total = 0
    growth = 0.0
    n = 0
    for (a, b, c), v in expansion.coeffs.items():
        if a + c > trunc:
            continue
        ph = 2j * pi * (a * Z[0, 0] + b * Z[0, 1] + c * Z[1, 1])
        v = complex(v) if expansion.exact else np.asarray(v, dtype=complex)
        total = total + v * np.exp(ph)
        growth = max(growth, float(np.max(np.abs(v))) / (a + c))
        n += 1
    lam = float(np.min(np.linalg.eigvalsh(Y)))
    tail = 0.0
    s = trunc + 1
    while True:
        term = growth * s * (s + 1) * (2 * s + 1) * exp(-2 * pi * lam * s)
        tail += term
        if term < 1e-18 * max(tail, 1e-300) or s > trunc + 100000:
            break
        s += 1
    val = total if expansion.k2 else complex(np.asarray(total).ravel()[0])
    return Evaluation(val, tail, n)


def siegel_slash(expansion, M, Z, trunc=None):
    """nu(M)^k det(CZ + D)^-k F(M Z) for scalar weight k = k1 + 2."""
    M = np.asarray(M, dtype=float)
    A, B, C, D = M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:]
    Z = np.asarray(Z, dtype=complex)
    J = C @ Z + D
    MZ = (A @ Z + B) @ np.linalg.inv(J)
    MZ = (MZ + MZ.T) / 2
    nu = (A.T @ D - C.T @ B)[0, 0]
    k = expansion.weight
    ev = evaluate(expansion, MZ, trunc)
    fac = nu ** k * np.linalg.det(J) ** (-k)
    return Evaluation(fac * ev.value, abs(fac) * ev.tail, ev.terms)
