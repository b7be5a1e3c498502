"""Truncated power series in t, i.e. exact arithmetic in Q[t]/(t^k).

Used for multiples n*gamma far beyond the range where the full rational
functions are affordable.  Division requires a unit divisor; anything else
raises :class:`PrecisionError` instead of silently losing precision.
"""

from fractions import Fraction

import flint

from .errors import PrecisionError
from .exact import Polynomial, RationalFunction, _fmpq, _is_scalar, _to_fraction, as_rf

__all__ = ["Jet"]


def _inv_series(a: flint.fmpq_poly, k: int) -> flint.fmpq_poly:
    a0 = a[0]
    if a0 == 0:
        raise PrecisionError("divisor is not a unit in Q[[t]]")
    x = flint.fmpq_poly([1 / a0])
    prec = 1
    two = flint.fmpq_poly([2])
    while prec < k:
        prec = min(2 * prec, k)
        x = x.mul_low(two - a.mul_low(x, prec), prec)
    return x


class Jet:
    """Element of Q[t]/(t^prec)."""

    __slots__ = ("p", "prec")

    def __init__(self, value, prec: int):
        if prec < 1:
            raise ValueError("precision must be positive")
        self.prec = prec
        if isinstance(value, flint.fmpq_poly):
            p = value
        elif isinstance(value, Polynomial):
            p = value.flint
        elif _is_scalar(value):
            p = flint.fmpq_poly([_fmpq(value)])
        else:
            r = as_rf(value)
            p = r.num.flint.mul_low(_inv_series(r.den.flint, prec), prec)
        self.p = p.truncate(prec) if p.degree() >= prec else p

    def _other(self, o):
        if isinstance(o, Jet):
            if o.prec != self.prec:
                return Jet(o.p, min(o.prec, self.prec))
            return o
        if _is_scalar(o):
            return Jet(o, self.prec)
        return None

    def __add__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        k = min(self.prec, o.prec)
        return Jet(self.p + o.p, k)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.p, self.prec)

    def __sub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return Jet(self.p - o.p, min(self.prec, o.prec))

    def __rsub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        k = min(self.prec, o.prec)
        return Jet(self.p.mul_low(o.p, k), k)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        k = min(self.prec, o.prec)
        return Jet(self.p.mul_low(_inv_series(o.p, k), k), k)

    def __rtruediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if e < 0:
            return 1 / (self ** (-e))
        return Jet(self.p.pow_trunc(e, self.prec), self.prec)

    def __eq__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        k = min(self.prec, o.prec)
        return (self.p - o.p).truncate(k).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def valuation(self) -> int:
        """Index of the first nonzero coefficient; ``prec`` if the jet is zero
        (the true valuation is then only known to be at least ``prec``)."""
        for i, c in enumerate(self.p.coeffs()):
            if c != 0:
                return i
        return self.prec

    def __getitem__(self, i: int) -> Fraction:
        if i >= self.prec:
            raise PrecisionError(f"coefficient {i} beyond precision {self.prec}")
        return _to_fraction(self.p[i])

    def constant(self) -> Fraction:
        return self[0]

    def shift_down(self, k: int = 1) -> "Jet":
        """(self / t^k), requires the first k coefficients to vanish."""
        for i in range(k):
            if self.p[i] != 0:
                raise PrecisionError("not divisible by t^%d" % k)
        return Jet(self.p.right_shift(k), self.prec - k)

    def to_polynomial(self) -> Polynomial:
        return Polynomial(self.p)

    def __repr__(self):
        return f"Jet({Polynomial(self.p)} + O(t^{self.prec}))"
