"""The harmonic kernel P_k(x1, x2) of the archimedean test function.

A quaternion is written x = [[z, w], [-conj w, conj z]].  P^alpha is a
W_k-valued polynomial in the entries of (x1, x2); P_k assembles the P^alpha
into the L_kappa slots with binomial weights C(2k2, alpha).  Weight vectors
are dicts {(i, j): coeff} where i is the X1-exponent and j the X2-exponent.

Two evaluators share the definition: ``harmonic_components`` works over any
commutative coefficient ring (Fractions, GQ, Laurent polynomials) and
``harmonic_numeric`` is vectorized over numpy sample arrays.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .gauss import conj as _conj
from .polyrep import WeightVector, pair_W_weights


def _mul(a, b):
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out[k] + c1 * c2 if k in out else c1 * c2
    return out


def _pow(a, e, one):
    out = {(0, 0): one}
    for _ in range(e):
        out = _mul(out, a)
    return out


def kernel_factors(z1, w1, z2, w2, z1b, w1b, z2b, w2b):
    """The three linear/bilinear building blocks of P^alpha."""
    A = {(1, 0): z1 * z2b + w1 * w2b - w1b * w2 - z1b * z2,
         (2, 0): z1 * w2 - w1 * z2,
         (0, 0): z1b * w2b - z2b * w1b}
    B1 = {(0, 1): z1b, (1, 1): w1, (1, 0): -z1, (0, 0): w1b}
    B2 = {(0, 1): z2b, (1, 1): w2, (1, 0): -z2, (0, 0): w2b}
    return A, B1, B2


def harmonic_components(k1, k2, z1, w1, z2, w2, conj=_conj, one=1):
    """[P^alpha for alpha = 0..2k2] as dict-valued weight vectors."""
    z1b, w1b, z2b, w2b = conj(z1), conj(w1), conj(z2), conj(w2)
    A, B1, B2 = kernel_factors(z1, w1, z2, w2, z1b, w1b, z2b, w2b)
    base = _pow(A, k1 - k2, one)
    b1 = [{(0, 0): one}]
    b2 = [{(0, 0): one}]
    for _ in range(2 * k2):
        b1.append(_mul(b1[-1], B1))
        b2.append(_mul(b2[-1], B2))
    return [_mul(_mul(base, b1[a]), b2[2 * k2 - a]) for a in range(2 * k2 + 1)]


def as_weight_vector(k1, k2, d):
    w = WeightVector.zero(k1, k2)
    for (i, j), c in d.items():
        w.grid[i][j] = c
    return w


@dataclass
class HarmonicKernel:
    """Evaluator for (x1, x2) -> {P^alpha(x1, x2)}."""
    k1: int
    k2: int

    def __call__(self, x1, x2):
        """x1, x2 given as (z, w) pairs of exact scalars (GQ or rationals)."""
        comps = harmonic_components(self.k1, self.k2, x1[0], x1[1], x2[0], x2[1])
        return [as_weight_vector(self.k1, self.k2, c) for c in comps]


# -- numeric, vectorized ------------------------------------------------------

def harmonic_numeric(k1, k2, z1, w1, z2, w2):
    """Array of shape (2k2+1, N, 2k1+1, 2k2+1): P^alpha at N sample points."""
    z1, w1, z2, w2 = (np.asarray(v, dtype=complex) for v in (z1, w1, z2, w2))
    n = z1.shape[0]
    comps = harmonic_components(k1, k2, z1, w1, z2, w2, conj=np.conj, one=np.ones(n, dtype=complex))
    out = np.zeros((2 * k2 + 1, n, 2 * k1 + 1, 2 * k2 + 1), dtype=complex)
    for a, d in enumerate(comps):
        for (i, j), c in d.items():
            out[a, :, i, j] += c
    return out


def psi_numeric(k1, k2, z1, w1, z2, w2):
    """Psi = <P_k(x), P_k(x)>_{W (x) L} at N sample points.

    With P_k = sum_alpha C(2k2, alpha) P^alpha X^alpha Y^(2k2-alpha), the
    L-pairing collapses this to sum_alpha (-1)^alpha C(2k2,alpha) <P^alpha, P^(2k2-alpha)>_W.
    """
    P = harmonic_numeric(k1, k2, z1, w1, z2, w2)
    c = pair_W_weights(k1, k2)
    total = 0
    for a in range(2 * k2 + 1):
        u = P[a]
        v = P[2 * k2 - a][:, ::-1, ::-1]
        total = total + (-1) ** a * comb(2 * k2, a) * np.einsum("nij,nij,ij->n", u, v, c)
    return total
