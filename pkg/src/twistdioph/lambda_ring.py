"""The ring Lambda = Z*gamma with the ring structure transported from Z.

Elements carry their integer n and the point n*gamma.  Addition is the
group law of the curve; multiplication is encode(n1*n2) certified by the
congruence u(z3) = u(z1) u(z2) mod t.  Every operation produces its
congruence witness alpha and checks that alpha is regular at t = 0.

Arithmetic runs on truncated jets mod t^k so that products far beyond the
affordable range of full rational functions stay cheap; the exact rational
function witnesses are available through :func:`add_witness` and
:func:`mul_witness`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import NotAdmissible, NotInAffinePart, NotInLambda, NotInLocalRing, PrecisionError
from .exact import RationalFunction, as_rf, ord_at, ord_at_zero, substitute, format_rational_function
from .jets import Jet
from .selftwist import SelfTwistModel, TwistPoint, ev0, in_affine_part, is_admissible

__all__ = [
    "LambdaConfig",
    "LambdaElement",
    "encode",
    "decode",
    "lam_add",
    "lam_mul",
    "lam_neg",
    "add_witness",
    "mul_witness",
    "check_mult_relation",
    "mult_relation_valuation",
    "two_lambda_decompose",
    "JET_PRECISION",
]

JET_PRECISION = 4


class LambdaConfig:
    """Self-twist model, the scalar lambda and f in Q(x), with t identified with lambda*f."""

    def __init__(self, model: SelfTwistModel, lam=1, f=None, Q: Optional[Sequence] = None,
                 goodness_assumed: bool = True, check: bool = True):
        self.model = model
        self.lam = Fraction(lam)
        self.f = as_rf(f if f is not None else RationalFunction.gen())
        self.goodness_assumed = goodness_assumed
        self.report = is_admissible(self.f, self.lam, model, Q)
        self.Q: List[Fraction] = list(self.report.Q)
        if check and not self.report.admissible:
            raise NotAdmissible("; ".join(self.report.reasons))
        self.lam_f = self.lam * self.f

    def emit(self, r) -> RationalFunction:
        """Substitute t -> lambda*f."""
        return substitute(as_rf(r), self.lam_f)

    def in_semilocal_ring(self, r) -> bool:
        """Regular at every point of Q (membership in the semilocal ring A)."""
        r = as_rf(r)
        return all(ord_at(r, q) >= 0 for q in self.Q)

    def __repr__(self):
        return f"LambdaConfig({self.model!r}, lambda={self.lam}, f={self.f})"


def _uw_from_xy(cfg: LambdaConfig, xy):
    if xy is None:
        z = Jet(0, JET_PRECISION)
        return z, z
    return cfg.model.uw_from_integral(*xy)


def _xy_add(cfg: LambdaConfig, p, q):
    """Group law on the integral model, mod t^k.  None is the origin."""
    if p is None:
        return q
    if q is None:
        return p
    (x1, y1), (x2, y2) = p, q
    A2, A4 = cfg.model._jet_coeffs(x1.prec)
    if x1.constant() == x2.constant():
        if y1.constant() == -y2.constant():
            if not (x1 == x2 and y1 == -y2):
                raise PrecisionError("points agree to first order but are not opposite")
            return None
        m = (3 * x1 * x1 + 2 * A2 * x1 + A4) / (2 * y1)
    else:
        m = (y2 - y1) / (x2 - x1)
    x3 = m * m - A2 - x1 - x2
    return (x3, m * (x1 - x3) - y1)


def _check_regular(diff: Jet) -> Jet:
    # alpha = diff / t, regular at 0 iff diff vanishes at 0
    try:
        return diff.shift_down(1)
    except PrecisionError as exc:
        raise NotInLocalRing(f"congruence witness has a pole at 0 ({diff})") from exc


class LambdaElement:
    """n*gamma as an element of Lambda."""

    __slots__ = ("cfg", "n", "_xy", "_uwj", "alpha")

    def __init__(self, cfg: LambdaConfig, n: int, xy="compute", alpha: Optional[Jet] = None):
        self.cfg = cfg
        self.n = int(n)
        self.alpha = alpha
        self._uwj = None
        if isinstance(xy, str):
            self._xy = cfg.model.integral_jet(self.n, JET_PRECISION)
            self._uwj = cfg.model.uw_jet(self.n, JET_PRECISION)
        else:
            self._xy = xy

    @property
    def point(self) -> TwistPoint:
        return self.cfg.model.gamma_multiple(self.n)

    @property
    def uw(self) -> Tuple[RationalFunction, RationalFunction]:
        if self.n == 0:
            z = RationalFunction(0)
            return z, z
        return self.point.uw

    def uw_jet(self) -> Tuple[Jet, Jet]:
        if self._uwj is None:
            self._uwj = _uw_from_xy(self.cfg, self._xy)
        return self._uwj

    def __add__(self, other):
        return lam_add(self, other)

    def __mul__(self, other):
        return lam_mul(self, other)

    def __neg__(self):
        return lam_neg(self)

    def __sub__(self, other):
        return lam_add(self, lam_neg(other))

    def __eq__(self, other):
        if not isinstance(other, LambdaElement):
            return NotImplemented
        if self.n != other.n or self.cfg.model is not other.cfg.model:
            return False
        if self._xy is None or other._xy is None:
            return self._xy is None and other._xy is None
        return self._xy[0] == other._xy[0] and self._xy[1] == other._xy[1]

    def __hash__(self):
        return hash(self.n)

    def __repr__(self):
        return f"LambdaElement({self.n})"

    def to_dict(self) -> dict:
        u, w = self.uw
        return {"n": self.n, "u": format_rational_function(u), "w": format_rational_function(w)}


def encode(cfg: LambdaConfig, n: int) -> LambdaElement:
    return LambdaElement(cfg, n)


def decode(cfg: LambdaConfig, p: TwistPoint) -> int:
    if not in_affine_part(cfg.model, p):
        raise NotInLambda(f"{p} is not in the affine part")
    v = ev0(cfg.model, p)
    if v.denominator != 1:
        raise NotInLambda(f"ev0 = {v} is not an integer")
    n = int(v)
    # cheap truncated comparison first, then the exact one
    if n != 0 and p.U.degree() >= 0:
        ju, jw = cfg.model.uw_jet(n, JET_PRECISION)
        u, w = p.uw
        if Jet(u, JET_PRECISION) != ju or Jet(w, JET_PRECISION) != jw:
            raise NotInLambda(f"{p} differs from {n}*gamma")
    if cfg.model.gamma_multiple(n) != p:
        raise NotInLambda(f"{p} differs from {n}*gamma")
    return n


def lam_neg(e: LambdaElement) -> LambdaElement:
    xy = None if e._xy is None else (e._xy[0], -e._xy[1])
    return LambdaElement(e.cfg, -e.n, xy)


def lam_add(e1: LambdaElement, e2: LambdaElement) -> LambdaElement:
    """Point addition; the witness alpha = (u3 - u1 - u2)/t is checked regular at 0."""
    cfg = e1.cfg
    xy = _xy_add(cfg, e1._xy, e2._xy)
    n = e1.n + e2.n
    if (xy is None) != (n == 0):
        raise ArithmeticError("group law and integer sum disagree on the origin")
    u1, _ = e1.uw_jet()
    u2, _ = e2.uw_jet()
    e3 = LambdaElement(cfg, n, xy)
    u3, _ = e3.uw_jet()
    e3.alpha = _check_regular(u3 - u1 - u2)
    if u3.constant() != n:
        raise ArithmeticError(f"ev0 of the sum is {u3.constant()}, expected {n}")
    return e3


def lam_mul(e1: LambdaElement, e2: LambdaElement) -> LambdaElement:
    """encode(n1*n2); the witness alpha = (u3 - u1*u2)/t is checked regular at 0."""
    cfg = e1.cfg
    e3 = LambdaElement(cfg, e1.n * e2.n)
    u1, _ = e1.uw_jet()
    u2, _ = e2.uw_jet()
    u3, _ = e3.uw_jet()
    e3.alpha = _check_regular(u3 - u1 * u2)
    return e3


def _exact_witness(diff: RationalFunction) -> RationalFunction:
    alpha = diff / RationalFunction.gen()
    if ord_at_zero(alpha) < 0:
        raise NotInLocalRing(f"witness {alpha} is not regular at 0")
    return alpha


def add_witness(cfg: LambdaConfig, n1: int, n2: int) -> RationalFunction:
    """(u(n1+n2) - u(n1) - u(n2)) / t as an exact rational function in t."""
    u = lambda n: encode(cfg, n).uw[0]
    return _exact_witness(u(n1 + n2) - u(n1) - u(n2))


def mul_witness(cfg: LambdaConfig, n1: int, n2: int) -> RationalFunction:
    """(u(n1*n2) - u(n1) u(n2)) / t as an exact rational function in t."""
    u = lambda n: encode(cfg, n).uw[0]
    return _exact_witness(u(n1 * n2) - u(n1) * u(n2))


def check_mult_relation(cfg: LambdaConfig, z1: TwistPoint, z2: TwistPoint, z3: TwistPoint) -> bool:
    """v_0(u(z3) - u(z1) u(z2)) >= 1, via reduction mod t (a ring map on the local ring)."""
    m = cfg.model
    for z in (z1, z2, z3):
        if not in_affine_part(m, z):
            raise NotInAffinePart(f"{z} is not in the affine part")
    return ev0(m, z3) == ev0(m, z1) * ev0(m, z2)


def mult_relation_valuation(cfg: LambdaConfig, n1: int, n2: int, m: int, prec: int = 2) -> int:
    """v_0(u(m gamma) - u(n1 gamma) u(n2 gamma)) from jets mod t^prec.

    Exact when the result is below ``prec``; ``prec`` means "at least prec".
    """
    model = cfg.model
    u1 = model.uw_jet(n1, prec)[0]
    u2 = model.uw_jet(n2, prec)[0]
    u3 = model.uw_jet(m, prec)[0]
    return (u3 - u1 * u2).valuation()


def two_lambda_decompose(cfg: LambdaConfig, e: LambdaElement):
    """('even', e') with e = 2e', or ('odd', e') with e = gamma + 2e'."""
    half = e.n // 2
    ep = encode(cfg, half)
    twice = lam_add(ep, ep)
    if e.n % 2 == 0:
        tag, rebuilt = "even", twice
    else:
        tag, rebuilt = "odd", lam_add(encode(cfg, 1), twice)
    if rebuilt != e:
        raise ArithmeticError("parity decomposition does not rebuild the element")
    return tag, ep
