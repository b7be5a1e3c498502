"""The self-twist of a cubic over Q(t).

For E: Y^2 Z = P(X, Z) with P = X^3 + a X^2 Z + b X Z^2 + c Z^3 put
h = P(1, t) and rho = t/h.  The twisted curve is V^2 W = rho P(U, W), with
affine chart u = U/V, w = W/V (so w = rho P(u, w)) and canonical section
gamma = (1:1:t).

Group operations happen on y^2 = x^3 + a rho x^2 + b rho^2 x + c rho^3.
For speed, multiples of gamma are computed on the integral rescaling
X = h^2 x, Y = h^3 y, where gamma becomes (h, h^2) and every coordinate is
a polynomial in t.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import flint

from .elliptic import CubicCurve, ProjectivePoint, is_torsion_over_Q, two_torsion
from .errors import (
    ChartUndefined,
    ConstantMap,
    HypothesisNotVerified,
    NotInAffinePart,
    OffCurve,
    ParseError,
)
from .exact import (
    INF,
    Polynomial,
    RationalFunction,
    _fmpq,
    _qgcd,
    _to_fraction,
    _trailing_zeros,
    as_rf,
    format_polynomial,
    ord_at_zero,
    parse_rational_function,
    rational_roots,
)
from .jets import Jet

__all__ = [
    "SelfTwistModel",
    "TwistPoint",
    "AdmissibilityReport",
    "build_twist",
    "to_weierstrass",
    "from_weierstrass",
    "canonical_gamma",
    "gamma_multiple",
    "ev0",
    "chart_at_infinity",
    "ord_infinity_of_u",
    "in_connected_component",
    "in_affine_part",
    "twist_two_torsion",
    "is_admissible",
    "parse_twist_point",
]

_ONE = flint.fmpq_poly([1])
_T = flint.fmpq_poly([0, 1])


def _as_poly_triple(coords) -> List[flint.fmpq_poly]:
    rfs = [as_rf(c) for c in coords]
    dens = [r.den.flint for r in rfs]
    L = _ONE
    for d in dens:
        if d.degree() > 0:
            L = L * d // _qgcd(L, d)
    return [r.num.flint * (L // d) for r, d in zip(rfs, dens)]


class TwistPoint:
    """(U:V:W) with coprime polynomial coordinates; the last nonzero of W, V, U is monic."""

    __slots__ = ("U", "V", "W", "_uw")

    def __init__(self, U, V, W):
        polys = _as_poly_triple((U, V, W))
        self._set(*polys)

    @classmethod
    def _from_polys(cls, U: flint.fmpq_poly, V: flint.fmpq_poly, W: flint.fmpq_poly, coprime=False) -> "TwistPoint":
        obj = cls.__new__(cls)
        obj._set(U, V, W, coprime)
        return obj

    def negate(self) -> "TwistPoint":
        return TwistPoint._from_polys(self.U.flint, -self.V.flint, self.W.flint, coprime=True)

    def _set(self, U, V, W, coprime=False):
        if not coprime:
            g = _qgcd(_qgcd(U, V), W)
            if g.is_zero():
                raise ValueError("(0:0:0) is not a projective point")
            if g.degree() > 0:
                U, V, W = U // g, V // g, W // g
        for pivot in (W, V, U):
            if not pivot.is_zero():
                break
        lc = pivot.leading_coefficient()
        if lc != 1:
            U, V, W = U / lc, V / lc, W / lc
        self.U, self.V, self.W = Polynomial(U), Polynomial(V), Polynomial(W)
        self._uw = None

    def is_origin(self) -> bool:
        return self.U.is_zero() and self.W.is_zero()

    @property
    def u(self) -> RationalFunction:
        return self.uw[0]

    @property
    def w(self) -> RationalFunction:
        return self.uw[1]

    @property
    def uw(self) -> Tuple[RationalFunction, RationalFunction]:
        if self._uw is None:
            if self.V.is_zero():
                raise NotInAffinePart(f"{self} has V = 0")
            self._uw = (RationalFunction(self.U, self.V), RationalFunction(self.W, self.V))
        return self._uw

    def at_zero(self) -> Tuple[Fraction, Fraction, Fraction]:
        """The reduction (U(0):V(0):W(0)) of the coprime representative."""
        return (self.U(0), self.V(0), self.W(0))

    def __eq__(self, other):
        if not isinstance(other, TwistPoint):
            return NotImplemented
        return self.U == other.U and self.V == other.V and self.W == other.W

    def __hash__(self):
        return hash((self.U, self.V, self.W))

    def __str__(self):
        return f"({self.U}:{self.V}:{self.W})"

    def __repr__(self):
        return f"TwistPoint{self}"

    def serialize(self) -> str:
        return f"[{self.U}; {self.V}; {self.W}]"


def parse_twist_point(text: str) -> TwistPoint:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError(f"expected '[U; V; W]', got {text!r}")
    parts = s[1:-1].split(";")
    if len(parts) != 3:
        raise ParseError(f"expected three coordinates in {text!r}")
    try:
        return TwistPoint(*(parse_rational_function(p) for p in parts))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc


def _is_int(x: Fraction) -> bool:
    return Fraction(x).denominator == 1


class SelfTwistModel:
    """Self-twist of ``base`` together with its Weierstrass chart."""

    def __init__(self, base: CubicCurve):
        if not isinstance(base, CubicCurve):
            base = CubicCurve(*base)
        self.base = base
        self.a, self.b, self.c = (Fraction(v) for v in (base.a, base.b, base.c))
        a, b, c = self.a, self.b, self.c
        self.h = Polynomial([1, a, b, c])
        self.t = RationalFunction.gen()
        self.rho = RationalFunction(Polynomial.gen(), self.h)
        self.rho_infinity = RationalFunction(Polynomial([0, 0, 0, 1]), self.h)
        r = self.rho
        self.weierstrass = CubicCurve(a * r, b * r * r, c * r ** 3)
        self.infinity_is_elliptic = c != 0

        # integral model y^2 = x^3 + A2 x^2 + A4 x + A6 over Z[t] (or Q[t])
        self._integral = all(_is_int(v) for v in (a, b, c))
        if self._integral:
            Zp = flint.fmpz_poly
            hz = Zp([int(v) for v in (1, a, b, c)])
            tz = Zp([0, 1])
        else:
            Zp = flint.fmpq_poly
            hz = self.h.flint
            tz = _T
        self._hz = hz
        self._fq = tuple(_fmpq(v) for v in (a, b, c))
        ka, kb, kc = (int(v) for v in (a, b, c)) if self._integral else self._fq
        self._A = (ka * tz * hz, kb * tz ** 2 * hz ** 2, kc * tz ** 3 * hz ** 3)
        self._memo: Dict[int, tuple] = {1: (hz, hz * hz, Zp([1]))}  # Jacobian (X, Y, Z)
        self._points: Dict[int, TwistPoint] = {}
        self._jets: Dict[int, Dict[int, tuple]] = {}
        self._uw_jets: Dict[tuple, tuple] = {}
        self._lock = threading.RLock()
        self._fibre_torsion: Optional[bool] = None

    def __repr__(self):
        return f"SelfTwistModel({self.a}, {self.b}, {self.c})"

    def P(self, U, W):
        return U ** 3 + self.a * U * U * W + self.b * U * W * W + self.c * W ** 3

    def contains(self, p: TwistPoint) -> bool:
        # V^2 W h = t P(U, W) as polynomials
        U, V, W = p.U.flint, p.V.flint, p.W.flint
        lhs = V * V * W * self.h.flint
        a, b, c = self._fq
        rhs = _T * (U ** 3 + a * U * U * W + b * U * W * W + c * W ** 3)
        return lhs == rhs

    # -- integral-model chord/tangent, Jacobian coordinates ---------------
    # x = X/Z^2, y = Y/Z^3.  A common prime of X and Z always satisfies
    # pi^2 | X and pi^3 | Y (from the curve equation), so the weight-(2,3,1)
    # reduction below only needs gcd(X, Z), never a gcd involving Y.

    def _jreduce(self, X, Y, Z):
        while True:
            g = X.gcd(Z)
            if g.degree() <= 0:
                break
            if self._integral:
                g = g // g.content()
            r = g // g.gcd(g.derivative())
            X, Y, Z = X // (r * r), Y // (r * r * r), Z // r
        if self._integral:
            e = X.content().gcd(Z.content()).gcd(Y.content())
            while e > 1:
                cX, cY = X.content(), Y.content()
                f = e.gcd(cX // e).gcd(cY // (e * e)) if cX % (e * e) == 0 and cY % (e ** 3) == 0 else None
                if f is None:
                    e = e.gcd(cX // e) if cX % (e * e) else e.gcd(cY // (e * e))
                    continue
                X, Y, Z = X // (e * e), Y // (e ** 3), Z // e
                e = X.content().gcd(Z.content()).gcd(Y.content())
        return X, Y, Z

    def _dbl(self, P):
        X, Y, Z = P
        A2, A4, _ = self._A
        Z2 = Z * Z
        M = 3 * X * X + 2 * A2 * X * Z2 + A4 * Z2 * Z2
        Y2 = Y * Y
        X3 = M * M - 4 * Y2 * (A2 * Z2 + 2 * X)
        Y3 = M * (4 * X * Y2 - X3) - 8 * Y2 * Y2
        return self._jreduce(X3, Y3, 2 * Y * Z)

    def _add(self, P, Q):
        X1, Y1, Z1 = P
        X2, Y2, Z2 = Q
        A2 = self._A[0]
        Z1s, Z2s = Z1 * Z1, Z2 * Z2
        U1, U2 = X1 * Z2s, X2 * Z1s
        S1, S2 = Y1 * Z2s * Z2, Y2 * Z1s * Z1
        H, R = U2 - U1, S2 - S1
        if H.is_zero():
            raise ArithmeticError("chord between points with equal x")
        Z3 = Z1 * Z2 * H
        H2 = H * H
        X3 = R * R - A2 * Z3 * Z3 - (U1 + U2) * H2
        Y3 = R * (U1 * H2 - X3) - S1 * H2 * H
        return self._jreduce(X3, Y3, Z3)

    def _multiple(self, n: int):
        """Reduced Jacobian coordinates of n*gamma on the integral model, n >= 1."""
        hit = self._memo.get(n)
        if hit is not None:
            return hit
        if n % 2 == 0:
            res = self._dbl(self._multiple(n // 2))
        else:
            res = self._add(self._multiple(n // 2 + 1), self._multiple(n // 2))
        with self._lock:
            self._memo.setdefault(n, res)
        return res

    def gamma_multiple(self, n: int) -> TwistPoint:
        if n == 0:
            return TwistPoint._from_polys(flint.fmpq_poly([]), _ONE, flint.fmpq_poly([]))
        hit = self._points.get(n)
        if hit is not None:
            return hit
        if n < 0:
            p = self.gamma_multiple(-n).negate()
        else:
            X, Y, Z = self._multiple(n)
            h = self._hz
            # (U:V:W) = (h x : y : t h^2) = (h X Z : Y : t h^2 Z^3); with gcd(X, Z) = 1
            # any common factor divides t*h^2
            th2 = self._tz() * h * h
            g = Y.gcd(th2)
            if g.degree() > 0:
                g = g.gcd(h * X)
            coords = (h * X * Z, Y, th2 * Z ** 3)
            if g.degree() > 0:
                coords = tuple(q // g for q in coords)
            p = TwistPoint._from_polys(*(flint.fmpq_poly(q) for q in coords), coprime=True)
        with self._lock:
            self._points.setdefault(n, p)
        return p

    def _tz(self):
        return flint.fmpz_poly([0, 1]) if self._integral else _T

    def gamma_multiple_generic(self, n: int) -> TwistPoint:
        """Same as :meth:`gamma_multiple` but through the generic field law over Q(t)."""
        C = self.weierstrass
        g = to_weierstrass(self, canonical_gamma(self))
        return from_weierstrass(self, C.mul(n, g))

    # -- truncated multiples ----------------------------------------------

    def _jet_xy(self, n: int, k: int):
        memo = self._jets.get(k)
        if memo is None:
            with self._lock:
                memo = self._jets.setdefault(k, {})
        hit = memo.get(n)
        if hit is not None:
            return hit
        if n == 1:
            h = Jet(self.h, k)
            res = (h, h * h)
        else:
            A2, A4 = self._jet_coeffs(k)
            if n % 2 == 0:
                x, y = self._jet_xy(n // 2, k)
                m = (3 * x * x + 2 * A2 * x + A4) / (2 * y)
                x1 = x2 = x
                y1 = y
            else:
                x1, y1 = self._jet_xy(n // 2 + 1, k)
                x2, y2 = self._jet_xy(n // 2, k)
                m = (y2 - y1) / (x2 - x1)
            x3 = m * m - A2 - x1 - x2
            res = (x3, m * (x1 - x3) - y1)
        memo.setdefault(n, res)
        return res

    def _jet_coeffs(self, k: int):
        t = Jet(Polynomial.gen(), k)
        h = Jet(self.h, k)
        return (self.a * t * h, self.b * t * t * h * h)

    def integral_jet(self, n: int, k: int) -> Optional[Tuple[Jet, Jet]]:
        """(X, Y) of n*gamma on the integral model mod t^k; None for the origin."""
        if n == 0:
            return None
        x, y = self._jet_xy(abs(n), k)
        return (x, -y) if n < 0 else (x, y)

    def uw_jet(self, n: int, k: int) -> Tuple[Jet, Jet]:
        """(u, w) of n*gamma mod t^k, computed by the group law in Q[t]/(t^k)."""
        if n == 0:
            return (Jet(0, k), Jet(0, k))
        key = (n, k)
        hit = self._uw_jets.get(key)
        if hit is None:
            x, y = self.integral_jet(n, k)
            hit = self._uw_jets.setdefault(key, self.uw_from_integral(x, y))
        return hit

    def uw_from_integral(self, x: Jet, y: Jet) -> Tuple[Jet, Jet]:
        k = x.prec
        h = Jet(self.h, k)
        t = Jet(Polynomial.gen(), k)
        return (h * x / y, t * h * h / y)

    # -- the fibre at t = infinity ----------------------------------------

    def fibre_at_infinity(self) -> Tuple[CubicCurve, ProjectivePoint]:
        """The fibre c V^2 W = P(U, W) in Weierstrass form, and gamma's value there."""
        if self.c == 0:
            raise HypothesisNotVerified("c = 0: the fibre at infinity is not elliptic")
        a, b, c = self.a, self.b, self.c
        C = CubicCurve(a * c, b * c * c, c ** 4)
        return C, C.point(0, c * c)

    def gamma_nontorsion_at_infinity(self) -> bool:
        if self._fibre_torsion is None:
            C, g = self.fibre_at_infinity()
            self._fibre_torsion = is_torsion_over_Q(C, g)
        return not self._fibre_torsion


def build_twist(base) -> SelfTwistModel:
    return SelfTwistModel(base)


def to_weierstrass(model: SelfTwistModel, p: TwistPoint) -> ProjectivePoint:
    if not model.contains(p):
        raise OffCurve(f"{p} is not on the twisted curve")
    r = model.rho
    return ProjectivePoint(r * RationalFunction(p.U), r * RationalFunction(p.V), RationalFunction(p.W))


def from_weierstrass(model: SelfTwistModel, q: ProjectivePoint) -> TwistPoint:
    if not model.weierstrass.contains(q):
        raise OffCurve(f"{q} is not on the Weierstrass chart")
    return TwistPoint(q.X, q.Y, model.rho * q.Z)


def canonical_gamma(model: SelfTwistModel) -> TwistPoint:
    return TwistPoint._from_polys(_ONE, _ONE, _T)


def gamma_multiple(model: SelfTwistModel, n: int) -> TwistPoint:
    return model.gamma_multiple(n)


def ev0(model: SelfTwistModel, p: TwistPoint) -> Fraction:
    """u(p) mod t."""
    if not in_affine_part(model, p):
        raise NotInAffinePart(f"{p} is not in the affine part over the local ring at 0")
    k = _trailing_zeros(p.V.flint)
    return p.U[k] / p.V[k]


def chart_at_infinity(model: SelfTwistModel, p: TwistPoint):
    """(u/t, w/t)."""
    if p.V.is_zero():
        raise ChartUndefined(f"{p} has V = 0")
    u, w = p.uw
    t = model.t
    return u / t, w / t


def ord_infinity_of_u(model: SelfTwistModel, n: int):
    if not model.infinity_is_elliptic:
        raise HypothesisNotVerified("needs c != 0")
    if not model.gamma_nontorsion_at_infinity():
        raise HypothesisNotVerified("gamma is torsion on the fibre at infinity")
    if n == 0:
        return INF
    p = model.gamma_multiple(n)
    return p.V.degree() - p.U.degree()


def in_connected_component(model: SelfTwistModel, p: TwistPoint) -> bool:
    return p.V(0) != 0


def in_affine_part(model: SelfTwistModel, p: TwistPoint) -> bool:
    if p.V.is_zero():
        return False
    k = _trailing_zeros(p.V.flint)
    return p.U.trailing_zeros() >= k and p.W.trailing_zeros() >= k


def twist_two_torsion(model: SelfTwistModel) -> List[TwistPoint]:
    out = [model.gamma_multiple(0)]
    for pt in two_torsion(model.base)[1:]:
        out.append(TwistPoint(pt.X, 0, 1))
    return out


# -- admissibility of t = lambda f ------------------------------------------


@dataclass
class AdmissibilityReport:
    simple_ramification: bool
    etale_over_branch: bool
    q_simple_zeros: bool
    reasons: List[str] = field(default_factory=list)
    wronskian: Optional[Polynomial] = None
    Q: List[Fraction] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.simple_ramification and self.etale_over_branch and self.q_simple_zeros

    def __bool__(self):
        return self.admissible

    def lines(self) -> List[str]:
        out = [
            f"simple_ramification: {str(self.simple_ramification).lower()}",
            f"etale_over_branch: {str(self.etale_over_branch).lower()}",
            f"q_simple_zeros: {str(self.q_simple_zeros).lower()}",
            "Q: [" + ", ".join(str(q) for q in self.Q) + "]",
            f"admissible: {str(self.admissible).lower()}",
        ]
        out += [f"reason: {r}" for r in self.reasons]
        return out


def _is_squarefree(p: flint.fmpq_poly) -> bool:
    if p.degree() <= 0:
        return True
    return _qgcd(p, p.derivative()).degree() == 0


def is_admissible(f, lam, model: SelfTwistModel, Q: Optional[Sequence] = None) -> AdmissibilityReport:
    """Check the cover x -> lam*f(x) of P^1 against the branch locus of the twist.

    The branch values of t are 0 and the roots of h = P(1, t) (plus infinity
    when c = 0); the cover must be etale above them and above infinity, have
    only simple ramification, and vanish simply on Q.
    """
    f = as_rf(f)
    lam = Fraction(lam)
    if lam == 0 or f.is_constant():
        raise ConstantMap("lambda*f is constant")
    g = lam * f
    N, D = g.num.flint, g.den.flint
    W = N.derivative() * D - N * D.derivative()
    n, d = N.degree(), D.degree()
    reasons = []

    # ramification at x = infinity, and the value g(infinity)
    if n > d:
        e_inf, g_inf = n - d, None
    elif n < d:
        e_inf, g_inf = d - n, Fraction(0)
    else:
        lcN, lcD = N.leading_coefficient(), D.leading_coefficient()
        e_inf = d - (lcD * N - lcN * D).degree()
        g_inf = _to_fraction(lcN / lcD)

    simple = _is_squarefree(W) and e_inf <= 2
    if not _is_squarefree(W):
        reasons.append("ramification index >= 3 at a finite point")
    if e_inf > 2:
        reasons.append(f"ramification index {e_inf} >= 3 at x = infinity")

    a, b, c = model._fq
    H = D ** 3 + a * N * D * D + b * N * N * D + c * N ** 3
    etale = True
    if _qgcd(N, W).degree() > 0:
        etale = False
        reasons.append("non-étale above branch point 0")
    if _qgcd(H, W).degree() > 0:
        etale = False
        reasons.append("non-étale above a root of P(1,t)")
    if not _is_squarefree(D):
        etale = False
        reasons.append("non-étale above infinity")
    if e_inf > 1:
        if g_inf is None:
            etale = False
            reasons.append("non-étale above infinity at x = infinity")
        elif g_inf == 0:
            etale = False
            reasons.append("non-étale above branch point 0 at x = infinity")
        elif model.h(g_inf) == 0:  # g(inf) is a root of P(1,t)
            etale = False
            reasons.append("non-étale above a root of P(1,t) at x = infinity")

    zeros = rational_roots(g.num) if Q is None else [Fraction(q) for q in Q]
    qs = True
    for q in zeros:
        # simple zero of N, not a pole
        fq = _fmpq(q)
        if N(fq) != 0 or D(fq) == 0 or N.derivative()(fq) == 0:
            qs = False
            reasons.append(f"point {q} of Q is not a simple zero")
    return AdmissibilityReport(simple, etale, qs, reasons, Polynomial(W), zeros)
