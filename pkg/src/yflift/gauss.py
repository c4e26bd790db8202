"""Exact Gaussian rationals a + b*i with Fraction parts.

Used where quaternion entries must stay exact (Hamilton model, Lipschitz
units, harmonic-kernel identities).
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


@dataclass(frozen=True)
class GQ:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @staticmethod
    def lift(x):
        if isinstance(x, GQ):
            return x
        return GQ(_frac(x), Fraction(0))

    def conj(self):
        return GQ(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __add__(self, o):
        if not isinstance(o, GQ):
            if isinstance(o, complex):
                return NotImplemented
            o = GQ.lift(o)
        return GQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GQ.lift(o))

    def __rsub__(self, o):
        return GQ.lift(o) - self

    def __mul__(self, o):
        if not isinstance(o, GQ):
            if isinstance(o, complex):
                return NotImplemented
            o = GQ.lift(o)
        return GQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GQ zero")
        return GQ(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * GQ.lift(o).inverse()

    def __rtruediv__(self, o):
        return GQ.lift(o) * self.inverse()

    def __pow__(self, e):
        if not isinstance(e, int):
            raise TypeError("integer exponents only")
        base = self if e >= 0 else self.inverse()
        out = GQ(1)
        for _ in range(abs(e)):
            out = out * base
        return out

    def __eq__(self, o):
        if isinstance(o, GQ):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GQ({self.re}, {self.im})"


I = GQ(0, 1)


def conj(x):
    """Complex conjugate for GQ, complex, or real scalars."""
    if isinstance(x, GQ):
        return x.conj()
    if isinstance(x, complex):
        return x.conjugate()
    return x
