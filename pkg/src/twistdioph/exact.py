"""Exact arithmetic: rationals, dense polynomials over Q, rational functions in t.

Rationals are :class:`fractions.Fraction`.  Polynomials wrap a
``flint.fmpq_poly``; gcds are taken on integer primitive parts.  Every
:class:`RationalFunction` is stored reduced with a monic denominator, so
``==`` is structural.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, List, Sequence, Tuple, Union

import flint

from .errors import DivisionByZero, NotInLocalRing, ParseError

Rational = Fraction

__all__ = [
    "INF",
    "Rational",
    "Polynomial",
    "RationalFunction",
    "poly_gcd",
    "ord_at_zero",
    "ord_at_infinity",
    "ord_at",
    "reduce_mod_m",
    "in_local_ring",
    "in_maximal_ideal",
    "substitute",
    "parse_rational_function",
    "parse_polynomial",
    "format_rational_function",
    "format_polynomial",
    "squarefree_decomposition",
    "rational_roots",
    "as_rf",
]


@functools.total_ordering
class _PlusInfinity:
    """The valuation of zero.  Larger than every integer, absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    __str__ = lambda self: "+inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("twistdioph.INF")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_PlusInfinity, ())


INF = _PlusInfinity()

Scalar = Union[int, Fraction]


def _fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    if isinstance(x, _RationalABC):
        return flint.fmpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"not a rational scalar: {x!r}")


def _to_fraction(c) -> Fraction:
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    if isinstance(c, flint.fmpz):
        return Fraction(int(c))
    return Fraction(c)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, flint.fmpq)) and not isinstance(x, bool)


def _qgcd(p: flint.fmpq_poly, q: flint.fmpq_poly) -> flint.fmpq_poly:
    """Monic gcd over Q, computed on integer numerators."""
    if p.is_zero():
        g = q
    elif q.is_zero():
        g = p
    else:
        g = flint.fmpq_poly(p.numer().gcd(q.numer()))
    if g.is_zero():
        return g
    return g / g.leading_coefficient()


def _trailing_zeros(p: flint.fmpq_poly) -> int:
    if p.is_zero():
        raise ValueError("zero polynomial")
    i = 0
    while p[i] == 0:
        i += 1
    return i


class Polynomial:
    """Dense univariate polynomial over Q, immutable.

    ``Polynomial([c0, c1, c2])`` is ``c0 + c1*t + c2*t^2``.
    """

    __slots__ = ("_p", "_hash")

    def __init__(self, coeffs: Union[Sequence[Scalar], flint.fmpq_poly, flint.fmpz_poly] = ()):
        if isinstance(coeffs, flint.fmpq_poly):
            p = coeffs
        elif isinstance(coeffs, flint.fmpz_poly):
            p = flint.fmpq_poly(coeffs)
        elif isinstance(coeffs, Polynomial):
            p = coeffs._p
        else:
            p = flint.fmpq_poly([_fmpq(c) for c in coeffs])
        self._p = p
        self._hash = None

    # construction helpers
    @classmethod
    def gen(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def const(cls, c: Scalar) -> "Polynomial":
        return cls([c])

    @property
    def flint(self) -> flint.fmpq_poly:
        return self._p

    @property
    def coefficients(self) -> List[Fraction]:
        """Ascending coefficients, no trailing zero; ``[]`` for zero."""
        return [_to_fraction(c) for c in self._p.coeffs()]

    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return self._p.degree()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return _to_fraction(self._p.leading_coefficient())

    def __getitem__(self, i: int) -> Fraction:
        return _to_fraction(self._p[i])

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return Polynomial(self._p / self._p.leading_coefficient())

    def derivative(self) -> "Polynomial":
        return Polynomial(self._p.derivative())

    def trailing_zeros(self) -> int:
        """Multiplicity of t as a factor (INF for zero)."""
        if self.is_zero():
            return INF
        return _trailing_zeros(self._p)

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, Polynomial):
            return other._p
        if _is_scalar(other):
            return flint.fmpq_poly([_fmpq(other)])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(self._p + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(self._p - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(o - self._p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(self._p * o)

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self._p)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        return Polynomial(self._p ** e)

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("polynomial division by zero")
        q, r = divmod(self._p, o)
        return Polynomial(q), Polynomial(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __truediv__(self, other):
        if _is_scalar(other) or isinstance(other, Polynomial):
            return RationalFunction(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return RationalFunction(other, self)
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._p == o

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((int(c.p), int(c.q)) for c in self._p.coeffs()))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __call__(self, x):
        """Evaluate at a scalar, compose with a polynomial or rational function."""
        if _is_scalar(x):
            return _to_fraction(self._p(_fmpq(x)))
        if isinstance(x, Polynomial):
            return Polynomial(self._p(x._p))
        if isinstance(x, RationalFunction):
            return substitute(RationalFunction(self), x)
        raise TypeError(f"cannot evaluate at {x!r}")

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd; ``gcd(p, 0) = monic(p)`` and ``gcd(0, 0) = 0``."""
    return Polynomial(_qgcd(p._p, q._p))


class RationalFunction:
    """Element of Q(t) stored as num/den, reduced, den monic."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1):
        if isinstance(num, RationalFunction):
            if den == 1:
                self.num, self.den, self._hash = num.num, num.den, num._hash
                return
            num = num / den
            self.num, self.den, self._hash = num.num, num.den, None
            return
        n = _as_fmpq_poly(num)
        d = _as_fmpq_poly(den)
        n, d = _reduce_pair(n, d)
        self.num = Polynomial(n)
        self.den = Polynomial(d)
        self._hash = None

    @classmethod
    def _raw(cls, n: flint.fmpq_poly, d: flint.fmpq_poly) -> "RationalFunction":
        # caller guarantees coprime and monic d
        obj = cls.__new__(cls)
        obj.num = Polynomial(n)
        obj.den = Polynomial(d)
        obj._hash = None
        return obj

    @classmethod
    def gen(cls) -> "RationalFunction":
        return cls(Polynomial.gen())

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0] if not self.num.is_zero() else Fraction(0)

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction._raw(other._p, flint.fmpq_poly([1]))
        if _is_scalar(other):
            return RationalFunction._raw(flint.fmpq_poly([_fmpq(other)]), flint.fmpq_poly([1]))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num._p, self.den._p, o.num._p, o.den._p
        if b == d:
            return RationalFunction(a + c, b)
        return RationalFunction(a * d + c * b, b * d)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num._p, self.den._p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num._p, self.den._p, o.num._p, o.den._p
        if a.is_zero() or c.is_zero():
            return RationalFunction._raw(flint.fmpq_poly([]), flint.fmpq_poly([1]))
        g1 = _qgcd(a, d)
        g2 = _qgcd(c, b)
        n = (a // g1) * (c // g2)
        m = (b // g2) * (d // g1)
        lc = m.leading_coefficient()
        return RationalFunction._raw(n / lc, m / lc)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DivisionByZero("inverse of zero rational function")
        n, d = self.den._p, self.num._p
        lc = d.leading_coefficient()
        return RationalFunction._raw(n / lc, d / lc)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction._raw(self.num._p ** e, self.den._p ** e)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num._p == o.num._p and self.den._p == o.den._p

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __call__(self, x):
        if _is_scalar(x):
            return self.evaluate(x)
        return substitute(self, as_rf(x))

    def evaluate(self, x: Scalar) -> Fraction:
        d = self.den(x)
        if d == 0:
            raise DivisionByZero(f"{self} has a pole at {x}")
        return self.num(x) / d

    def derivative(self) -> "RationalFunction":
        n, d = self.num._p, self.den._p
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    # valuations
    def ord_at_zero(self):
        return ord_at_zero(self)

    def ord_at_infinity(self):
        return ord_at_infinity(self)

    def __repr__(self):
        return f"RationalFunction({format_rational_function(self)!r})"

    def __str__(self):
        return format_rational_function(self)


def _as_fmpq_poly(x) -> flint.fmpq_poly:
    if isinstance(x, Polynomial):
        return x._p
    if isinstance(x, flint.fmpq_poly):
        return x
    if isinstance(x, flint.fmpz_poly):
        return flint.fmpq_poly(x)
    if _is_scalar(x):
        return flint.fmpq_poly([_fmpq(x)])
    if isinstance(x, RationalFunction):
        if x.den.degree() != 0:
            raise TypeError("expected a polynomial")
        return x.num._p
    raise TypeError(f"cannot interpret {x!r} as a polynomial")


def _reduce_pair(n: flint.fmpq_poly, d: flint.fmpq_poly):
    if d.is_zero():
        raise DivisionByZero("zero denominator")
    if n.is_zero():
        return flint.fmpq_poly([]), flint.fmpq_poly([1])
    if d.degree() > 0:
        g = _qgcd(n, d)
        if g.degree() > 0:
            n = n // g
            d = d // g
    lc = d.leading_coefficient()
    if lc != 1:
        n = n / lc
        d = d / lc
    return n, d


def as_rf(x) -> RationalFunction:
    """Coerce an int, Fraction, Polynomial or RationalFunction."""
    if isinstance(x, RationalFunction):
        return x
    r = RationalFunction._coerce(x)
    if r is None:
        raise TypeError(f"cannot interpret {x!r} as a rational function")
    return r


# -- valuations and the local ring at t = 0 ---------------------------------


def ord_at_zero(r) -> Union[int, _PlusInfinity]:
    """v_0(r): multiplicity of t in the numerator minus in the denominator."""
    r = as_rf(r)
    if r.is_zero():
        return INF
    return _trailing_zeros(r.num._p) - _trailing_zeros(r.den._p)


def ord_at_infinity(r) -> Union[int, _PlusInfinity]:
    """v_inf(r) = deg(den) - deg(num)."""
    r = as_rf(r)
    if r.is_zero():
        return INF
    return r.den.degree() - r.num.degree()


def ord_at(r, beta) -> Union[int, _PlusInfinity]:
    """Order at t = beta for beta rational, or at infinity for ``beta is None``."""
    r = as_rf(r)
    if beta is None or beta == "inf":
        return ord_at_infinity(r)
    if beta == 0:
        return ord_at_zero(r)
    shift = flint.fmpq_poly([_fmpq(beta), 1])
    return ord_at_zero(RationalFunction._raw(r.num._p(shift), r.den._p(shift)))


def reduce_mod_m(r) -> Fraction:
    """Image of r in O/m = Q, i.e. r(0); requires v_0(r) >= 0."""
    r = as_rf(r)
    v = ord_at_zero(r)
    if v < 0:
        raise NotInLocalRing(f"v_0({r}) = {v} < 0")
    if v > 0:
        return Fraction(0)
    return r.num[0] / r.den[0]


def in_local_ring(r) -> bool:
    return ord_at_zero(r) >= 0


def in_maximal_ideal(r) -> bool:
    return ord_at_zero(r) >= 1


def _homogenize(p: flint.fmpq_poly, G: flint.fmpq_poly, H: flint.fmpq_poly, d: int):
    """sum_i p_i G^i H^(d-i), i.e. H^d * p(G/H)."""
    coeffs = p.coeffs()
    acc = flint.fmpq_poly([])
    gpow = flint.fmpq_poly([1])
    hpows = [flint.fmpq_poly([1])]
    for _ in range(d):
        hpows.append(hpows[-1] * H)
    for i, c in enumerate(coeffs):
        if c != 0:
            acc += c * gpow * hpows[d - i]
        if i < len(coeffs) - 1:
            gpow = gpow * G
    return acc


def substitute(r, g) -> RationalFunction:
    """The composite r(g(t)), reduced."""
    r = as_rf(r)
    g = as_rf(g)
    if g.is_polynomial():
        G = g.num._p
        num = r.num._p(G)
        den = r.den._p(G)
        if den.is_zero():
            raise DivisionByZero(f"denominator of {r} vanishes at {g}")
        return RationalFunction(num, den)
    G, H = g.num._p, g.den._p
    dn, dd = max(r.num.degree(), 0), r.den.degree()
    num = _homogenize(r.num._p, G, H, dn)
    den = _homogenize(r.den._p, G, H, dd)
    if den.is_zero():
        raise DivisionByZero(f"denominator of {r} vanishes at {g}")
    # r(G/H) = num / H^dn  /  (den / H^dd)
    if dn >= dd:
        return RationalFunction(num, den * H ** (dn - dd))
    return RationalFunction(num * H ** (dd - dn), den)


def squarefree_decomposition(p: Polynomial) -> List[Tuple[Polynomial, int]]:
    """Yun's algorithm: monic squarefree factors with their multiplicities."""
    if p.degree() <= 0:
        return []
    f = p.monic()._p
    out = []
    a = _qgcd(f, f.derivative())
    b = f // a
    c = f.derivative() // a
    d = c - b.derivative()
    i = 1
    while b.degree() > 0:
        g = _qgcd(b, d)
        if g.degree() > 0:
            out.append((Polynomial(g), i))
        b = b // g
        c = d // g
        d = c - b.derivative()
        i += 1
    return out


def rational_roots(p: Polynomial) -> List[Fraction]:
    """Distinct rational roots, ascending."""
    if p.is_zero():
        raise ValueError("zero polynomial has every root")
    if p.degree() <= 0:
        return []
    return sorted(_to_fraction(r) for r, _ in p._p.roots())


# -- text format -------------------------------------------------------------


def _format_scalar(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial, var: str = "t") -> str:
    """Canonical text: ascending terms, e.g. ``1 - t^2 + 3/2*t^3``."""
    if p.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(p.coefficients):
        if c == 0:
            continue
        neg = c < 0
        a = -c if neg else c
        if i == 0:
            body = _format_scalar(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{_format_scalar(a)}*{mono}"
        parts.append((neg, body))
    first_neg, first = parts[0]
    out = ("-" if first_neg else "") + first
    for neg, body in parts[1:]:
        out += (" - " if neg else " + ") + body
    return out


def format_rational_function(r, var: str = "t") -> str:
    r = as_rf(r)
    if r.is_polynomial():
        return format_polynomial(r.num, var)
    return f"({format_polynomial(r.num, var)})/({format_polynomial(r.den, var)})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, var: str):
        self.var = var
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {pos} in {text!r}")
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", int(num)))
            elif name is not None:
                if name != var:
                    raise ParseError(f"unknown symbol {name!r} (variable is {var!r})")
                self.toks.append(("var", name))
            else:
                self.toks.append(("op", "^" if op == "**" else op))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            raise ParseError(f"expected {val or kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> RationalFunction:
        if not self.toks:
            raise ParseError("empty expression")
        r = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.peek()[1]!r}")
        return r

    def expr(self):
        r = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            r = r + rhs if op == "+" else r - rhs
        return r

    def term(self):
        r = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                r = r * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero in expression")
                r = r / rhs
        return r

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            e = self.take("num")[1] * sign
            if e < 0 and base.is_zero():
                raise ParseError("negative power of zero")
            base = base ** e
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return as_rf(val)
        if kind == "var":
            self.take()
            return RationalFunction.gen()
        if (kind, val) == ("op", "("):
            self.take()
            r = self.expr()
            self.take("op", ")")
            return r
        raise ParseError(f"unexpected token {val!r}")


def parse_rational_function(text: str, var: str = "t") -> RationalFunction:
    """Parse the text grammar (a superset: any +,-,*,/,^ expression in ``var``)."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text, var).parse()


def parse_polynomial(text: str, var: str = "t") -> Polynomial:
    r = parse_rational_function(text, var)
    if not r.is_polynomial():
        raise ParseError(f"{text!r} is not a polynomial")
    return r.num
