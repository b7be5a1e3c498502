"""Local analysis: p-adic valuations, Hilbert symbols, isotropy of diagonal
forms over Q_p, R and Q, Newton polygons, t-adic residue forms and real
positivity of rational functions via Sturm sequences.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import flint

from .errors import IndeterminateCoefficient, ParseError, ZeroCoefficient, ZeroPolynomial
from .exact import (
    INF,
    Polynomial,
    RationalFunction,
    _fmpq,
    _to_fraction,
    as_rf,
    format_rational_function,
    ord_at,
    parse_rational_function,
    squarefree_decomposition,
)

__all__ = [
    "Place",
    "DiagonalForm",
    "NewtonPolygon",
    "vp",
    "hilbert_symbol",
    "is_square_local",
    "hasse_invariant",
    "is_isotropic_local",
    "is_isotropic_Q",
    "relevant_primes",
    "newton_polygon",
    "residue_forms_at_t",
    "sturm_sequence",
    "count_real_roots",
    "is_psd_on_R",
    "parse_place",
]


# -- places -----------------------------------------------------------------


class Place:
    """A place of Q (a prime or the real place) or of Q(t) (t = beta, t = inf)."""

    __slots__ = ("kind", "value")

    def __init__(self, kind: str, value=None):
        if kind == "p":
            value = int(value)
            if value < 2 or not flint.fmpz(value).is_prime():
                raise ValueError(f"{value} is not prime")
        elif kind == "t":
            value = None if value in (None, "inf") else Fraction(value)
        elif kind == "real":
            value = None
        else:
            raise ValueError(f"unknown place kind {kind!r}")
        self.kind, self.value = kind, value

    @classmethod
    def prime(cls, p: int) -> "Place":
        return cls("p", p)

    @classmethod
    def real(cls) -> "Place":
        return cls("real")

    @classmethod
    def t_adic(cls, beta=0) -> "Place":
        return cls("t", beta)

    @property
    def is_real(self) -> bool:
        return self.kind == "real"

    def __eq__(self, other):
        if not isinstance(other, Place):
            return NotImplemented
        return (self.kind, self.value) == (other.kind, other.value)

    def __hash__(self):
        return hash((self.kind, self.value))

    def __str__(self):
        if self.kind == "p":
            return f"p:{self.value}"
        if self.kind == "real":
            return "real"
        return "t:inf" if self.value is None else f"t:{self.value}"

    __repr__ = __str__


def parse_place(text: str) -> Place:
    s = text.strip()
    try:
        if s == "real":
            return Place.real()
        kind, _, val = s.partition(":")
        if kind == "p":
            return Place.prime(int(val))
        if kind == "t":
            return Place.t_adic(None if val == "inf" else Fraction(val))
    except ValueError as exc:
        raise ParseError(f"bad place {text!r}: {exc}") from exc
    raise ParseError(f"bad place {text!r}")


def _as_place(place) -> Place:
    if isinstance(place, Place):
        return place
    if isinstance(place, int):
        return Place.prime(place)
    if isinstance(place, str):
        return parse_place(place)
    raise TypeError(f"not a place: {place!r}")


# -- valuations and the Hilbert symbol -----------------------------------


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x, p: int):
    """p-adic valuation of a rational, INF for 0."""
    x = Fraction(x)
    if x == 0:
        return INF
    return _vp_int(abs(x.numerator), p) - _vp_int(x.denominator, p)


def _split(x: Fraction, p: int) -> Tuple[int, int]:
    """x = p^v * u up to squares, with u an integer prime to p."""
    x = Fraction(x)
    n = x.numerator * x.denominator  # same square class as x
    v = _vp_int(abs(n), p)
    return v, n // p ** v


def _legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def hilbert_symbol(a, b, place) -> int:
    """(a, b) at the place: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroCoefficient("Hilbert symbol of zero")
    place = _as_place(place)
    if place.is_real:
        return -1 if (a < 0 and b < 0) else 1
    if place.kind != "p":
        raise ValueError("Hilbert symbols are only computed at places of Q")
    p = place.value
    alpha, u = _split(a, p)
    beta, v = _split(b, p)
    if p != 2:
        eps = ((p - 1) // 2) % 2
        s = -1 if (alpha * beta * eps) % 2 else 1
        if beta % 2:
            s *= _legendre(u, p)
        if alpha % 2:
            s *= _legendre(v, p)
        return s
    e = lambda z: ((z - 1) // 2) % 2
    w = lambda z: ((z * z - 1) // 8) % 2
    expo = e(u) * e(v) + alpha * w(v) + beta * w(u)
    return -1 if expo % 2 else 1


def is_square_local(x, place) -> bool:
    x = Fraction(x)
    if x == 0:
        return True
    place = _as_place(place)
    if place.is_real:
        return x > 0
    p = place.value
    v, u = _split(x, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return _legendre(u, p) == 1


# -- diagonal forms -------------------------------------------------------


class DiagonalForm:
    """<c1, ..., cn> over Q or Q(t)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        cs = []
        for c in coeffs:
            if isinstance(c, (RationalFunction, Polynomial)):
                c = as_rf(c)
                if c.is_constant():
                    c = c.constant_value()
            else:
                c = Fraction(c)
            if c == 0:
                raise ZeroCoefficient("diagonal forms have nonzero coefficients")
            cs.append(c)
        self.coeffs = tuple(cs)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def over_Q(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def determinant(self):
        d = Fraction(1)
        for c in self.coeffs:
            d = d * c
        return d

    def __mul__(self, other: "DiagonalForm") -> "DiagonalForm":
        """Tensor product <a_i> (x) <b_j>, ordered as in <a*b_1, ..., a*b_m> blocks by b."""
        return DiagonalForm([a * b for b in other.coeffs for a in self.coeffs])

    def __add__(self, other: "DiagonalForm") -> "DiagonalForm":
        return DiagonalForm(self.coeffs + other.coeffs)

    def __eq__(self, other):
        if not isinstance(other, DiagonalForm):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def evaluate(self, xs: Sequence):
        if len(xs) != self.dim:
            raise ValueError("wrong number of variables")
        return sum((c * x * x for c, x in zip(self.coeffs, xs)), Fraction(0))

    def serialize(self) -> List[str]:
        return [_fmt(c) for c in self.coeffs]

    def __repr__(self):
        return "DiagonalForm<" + ", ".join(self.serialize()) + ">"


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return format_rational_function(c)


def _form(form) -> DiagonalForm:
    return form if isinstance(form, DiagonalForm) else DiagonalForm(form)


def hasse_invariant(form, place) -> int:
    """prod_{i<j} (a_i, a_j) at the place."""
    cs = _form(form).coeffs
    s = 1
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            s *= hilbert_symbol(cs[i], cs[j], place)
    return s


def is_isotropic_local(form, place) -> bool:
    form = _form(form)
    if not form.over_Q():
        raise TypeError("local isotropy is decided for forms over Q only")
    place = _as_place(place)
    n = form.dim
    if n < 2:
        return False
    if place.is_real:
        return any(c > 0 for c in form) and any(c < 0 for c in form)
    if n >= 5:
        return True
    d = form.determinant()
    if n == 2:
        return is_square_local(-d, place)
    eps = hasse_invariant(form, place)
    if n == 3:
        return hilbert_symbol(-1, -d, place) == eps
    return (not is_square_local(d, place)) or eps == hilbert_symbol(-1, -1, place)


def relevant_primes(form) -> List[int]:
    """2 and the primes dividing some numerator or denominator."""
    ps = {2}
    for c in _form(form):
        for n in (c.numerator, c.denominator):
            for q, _ in flint.fmpz(abs(n)).factor():
                ps.add(int(q))
    return sorted(ps)


def is_isotropic_Q(form) -> bool:
    """Hasse-Minkowski: isotropic at the real place and at every relevant prime."""
    form = _form(form)
    if form.dim < 2:
        return False
    if not is_isotropic_local(form, Place.real()):
        return False
    return all(is_isotropic_local(form, Place.prime(p)) for p in relevant_primes(form))


# -- Newton polygons ------------------------------------------------------


class NewtonPolygon:
    """Lower convex hull of the points (i, v_p(c_i))."""

    __slots__ = ("vertices", "p")

    def __init__(self, vertices: Sequence[Tuple[int, Fraction]], p: int):
        self.vertices = [(int(i), Fraction(v)) for i, v in vertices]
        self.p = p

    @property
    def slopes(self) -> List[Fraction]:
        vs = self.vertices
        return [(vs[k + 1][1] - vs[k][1]) / (vs[k + 1][0] - vs[k][0]) for k in range(len(vs) - 1)]

    @property
    def segments(self) -> List[Tuple[Tuple[int, Fraction], Tuple[int, Fraction], Fraction]]:
        vs = self.vertices
        return [(vs[k], vs[k + 1], s) for k, s in enumerate(self.slopes)]

    def __eq__(self, other):
        if not isinstance(other, NewtonPolygon):
            return NotImplemented
        return self.vertices == other.vertices

    def __repr__(self):
        return f"NewtonPolygon({self.vertices})"


def newton_polygon(poly, p: int) -> NewtonPolygon:
    poly = poly if isinstance(poly, Polynomial) else as_rf(poly).num
    if poly.is_zero():
        raise ZeroPolynomial("the zero polynomial has no Newton polygon")
    pts = [(i, Fraction(vp(c, p))) for i, c in enumerate(poly.coefficients) if c != 0]
    hull: List[Tuple[int, Fraction]] = []
    for pt in pts:
        # pop while the last two points and pt do not make a strict left turn
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return NewtonPolygon(hull, p)


# -- t-adic residue forms ---------------------------------------------------


def _unit_value(c: RationalFunction, beta) -> Tuple[int, Fraction]:
    """(v, value at beta of c / pi^v) for the uniformizer pi at t = beta."""
    v = ord_at(c, beta)
    if v is INF:
        raise IndeterminateCoefficient("zero coefficient has no unit part")
    if beta is None:
        # c(1/s) = s^v * unit
        s = RationalFunction.gen()
        shifted = c(1 / s)
    else:
        shifted = c(RationalFunction(Polynomial([beta, 1]))) if beta != 0 else c
    num, den = shifted.num, shifted.den
    i = num.trailing_zeros()
    j = den.trailing_zeros()
    val = num[i] / den[j]
    if val == 0:
        raise IndeterminateCoefficient(f"unit part of {c} vanishes at {beta}")
    return v, val


def residue_forms_at_t(form, beta=0) -> Tuple[DiagonalForm, DiagonalForm]:
    """Split by parity of the order at t = beta (``None`` means infinity); unit parts evaluated there."""
    if isinstance(beta, Place):
        beta = beta.value
    elif beta == "inf":
        beta = None
    first, second = [], []
    for c in _form(form):
        v, val = _unit_value(as_rf(c), beta)
        (first if v % 2 == 0 else second).append(val)
    return _maybe_form(first), _maybe_form(second)


def _maybe_form(cs) -> DiagonalForm:
    f = DiagonalForm.__new__(DiagonalForm)
    f.coeffs = tuple(cs)
    return f


# -- real positivity --------------------------------------------------------


def _positive_primitive(q: flint.fmpq_poly) -> flint.fmpz_poly:
    """q scaled by a positive rational to a primitive integer polynomial."""
    z = q.numer()
    c = z.content()
    return z if c == 1 else z // c


def sturm_sequence(p: Polynomial) -> List[flint.fmpz_poly]:
    """Sturm sequence up to positive scalings (which keep every sign pattern)."""
    seq = [_positive_primitive(p.flint), _positive_primitive(p.flint.derivative())]
    while seq[-1].degree() > 0:
        r = flint.fmpq_poly(seq[-2]) % flint.fmpq_poly(seq[-1])
        if r.is_zero():
            break
        seq.append(_positive_primitive(-r))
    return seq


def _sign_changes(signs) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for k in range(len(signs) - 1) if signs[k] != signs[k + 1])


def count_real_roots(p: Polynomial, method: str = "isolate") -> int:
    """Distinct real roots.

    ``"isolate"`` uses flint's certified root isolation (real roots come back
    with imaginary part exactly zero); ``"sturm"`` counts sign changes of the
    Sturm sequence between -inf and +inf.
    """
    if p.degree() <= 0:
        return 0
    if method == "isolate":
        return sum(1 for r, _ in p.flint.numer().complex_roots() if r.imag.is_zero())
    if method != "sturm":
        raise ValueError(f"unknown method {method!r}")
    seq = sturm_sequence(p)
    at_pos = [1 if q.leading_coefficient() > 0 else -1 for q in seq]
    at_neg = [s if q.degree() % 2 == 0 else -s for s, q in zip(at_pos, seq)]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


_PSD_SAMPLES = [flint.fmpq(k, 16) for k in range(-32, 33)] + [flint.fmpq(k) for k in range(-20, 21) if abs(k) > 2]


def is_psd_on_R(r) -> bool:
    """r >= 0 wherever defined on R, i.e. num*den >= 0 everywhere."""
    r = as_rf(r)
    F = r.num * r.den
    if F.is_zero():
        return True
    if F.degree() == 0:
        return F[0] > 0
    if F.leading_coefficient() < 0:
        return False
    # a negative sample value settles it without root isolation
    Ff = F.flint
    for x in _PSD_SAMPLES:
        if Ff(x) < 0:
            return False
    for g, mult in squarefree_decomposition(F):
        if mult % 2 and count_real_roots(g) > 0:
            return False
    return True
