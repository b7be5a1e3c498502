"""Definability gadgets: divisibility by t, the real five-squares clause with
Con-sets, and the p-adic isotropy clauses with the Y-set reduction.

All clause builders return :mod:`twistdioph.formula` trees.  Variables that
cannot be produced constructively (the five squares, isotropic vectors) are
listed in the ``surrogate_vars`` meta entry of their quantifier, and the
equation they occur in carries a ``surrogate`` tag naming the semantic check
used in their place.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import flint

from .elliptic import CubicCurve, ProjectivePoint, is_torsion_over_Q
from .errors import PreconditionViolated, ZeroCoefficient
from .exact import RationalFunction, as_rf, ord_at, ord_at_infinity, ord_at_zero
from .formula import And, Const, Eq, Exists, Expr, Formula, Or, Var, expr
from .local import DiagonalForm, vp

__all__ = [
    "ConSetConfig",
    "PadicGadgetConfig",
    "con_clause",
    "con_witness",
    "con_density_demo",
    "padic_distance",
    "real_phi_clause",
    "real_phi_lhs",
    "padic_D_clause",
    "semilocal_divisibility_clause",
    "build_ue",
    "build_phie",
    "y_membership",
    "y_class",
    "varkr_reduce",
    "cubic_form",
]


def cubic_form(a, b, c, u: Expr, w: Expr) -> Expr:
    """u^3 + a u^2 w + b u w^2 + c w^3 as an expression."""
    terms = [u ** 3]
    for coeff, term in ((a, u ** 2 * w), (b, u * w ** 2), (c, w ** 3)):
        if coeff != 0:
            terms.append(term if coeff == 1 else Const(coeff) * term)
    return terms[0] if len(terms) == 1 else sum(terms[1:], terms[0])


# -- Con sets ---------------------------------------------------------------


class ConSetConfig:
    """Auxiliary curve y^2 = x^3 + a x^2 + b x + c over Q with a point of infinite order.

    Points are used in the chart u = x/y, w = 1/y, where the curve reads
    w = u^3 + a u^2 w + b u w^2 + c w^3 and the origin is (0, 0).
    """

    def __init__(self, e1: Optional[CubicCurve] = None, generator=(1, 5)):
        self.e1 = e1 if e1 is not None else CubicCurve(0, 0, 24)
        G = generator if isinstance(generator, ProjectivePoint) else self.e1.point(*generator)
        self.e1.check(G)
        if is_torsion_over_Q(self.e1, G):
            raise ValueError(f"generator {G} is a torsion point")
        self.G = G
        self._pts = {0: self.e1.O, 1: G}

    def point(self, n: int) -> ProjectivePoint:
        if n < 0:
            return self.e1.neg(self.point(-n))
        if n not in self._pts:
            k = max(k for k in self._pts if k <= n)
            P = self._pts[k]
            for j in range(k + 1, n + 1):
                P = self.e1.add(P, self.G)
                self._pts[j] = P
        return self._pts[n]

    def uw(self, n: int) -> Tuple[Fraction, Fraction]:
        P = self.point(n)
        if P.is_origin():
            return Fraction(0), Fraction(0)
        x, y = P.xy
        return x / y, 1 / y

    def con_u(self, n: int) -> Fraction:
        return self.uw(n)[0]

    def quotients(self, bound: int) -> Dict[Fraction, Tuple[int, int]]:
        """u(nG)/u(mG) for |n|, |m| <= bound, m != 0, keyed by value (first pair found)."""
        out: Dict[Fraction, Tuple[int, int]] = {}
        us = {n: self.con_u(n) for n in range(-bound, bound + 1)}
        for m in sorted(range(-bound, bound + 1), key=lambda k: (abs(k), k < 0)):
            if m == 0:
                continue
            for n in sorted(range(-bound, bound + 1), key=lambda k: (abs(k), k < 0)):
                out.setdefault(us[n] / us[m], (n, m))
        return out

    def snapshot(self) -> dict:
        x, y = self.G.xy
        return {"e1": [str(self.e1.a), str(self.e1.b), str(self.e1.c)], "generator": [str(x), str(y)]}

    @classmethod
    def from_snapshot(cls, d: dict) -> "ConSetConfig":
        a, b, c = (Fraction(s) for s in d["e1"])
        return cls(CubicCurve(a, b, c), tuple(Fraction(s) for s in d["generator"]))

    def __repr__(self):
        return f"ConSetConfig({self.e1!r}, {self.G})"


def con_clause(cfg: ConSetConfig, v, prefix: Optional[str] = None) -> Formula:
    """EXISTS P1, P2 on the auxiliary curve with v * u(P2) = u(P1) and u(P2) invertible."""
    name = v if isinstance(v, str) else str(v)
    prefix = prefix or f"con_{name}"
    u1, w1, u2, w2, z = (f"{prefix}_{s}" for s in ("u1", "w1", "u2", "w2", "z"))
    a, b, c = cfg.e1.a, cfg.e1.b, cfg.e1.c
    body = And([
        Eq(Var(w1), cubic_form(a, b, c, Var(u1), Var(w1)), label=f"{prefix}:curve1"),
        Eq(Var(w2), cubic_form(a, b, c, Var(u2), Var(w2)), label=f"{prefix}:curve2"),
        Eq(expr(v) * Var(u2), Var(u1), label=f"{prefix}:quotient"),
        Eq(Var(u2) * Var(z), 1, label=f"{prefix}:nonzero"),
    ])
    return Exists([u1, w1, u2, w2, z], body, label=f"con:{name}", meta={"con": name, "prefix": prefix})


def con_witness(cfg: ConSetConfig, n: int, m: int, prefix: str) -> Dict[str, Fraction]:
    """Binding for :func:`con_clause` exhibiting u(nG)/u(mG)."""
    u1, w1 = cfg.uw(n)
    u2, w2 = cfg.uw(m)
    if u2 == 0:
        raise ValueError("the denominator point must have nonzero u")
    return {f"{prefix}_u1": u1, f"{prefix}_w1": w1, f"{prefix}_u2": u2, f"{prefix}_w2": w2,
            f"{prefix}_z": 1 / u2}


def padic_distance(x, y, p: int):
    d = Fraction(x) - Fraction(y)
    if d == 0:
        return Fraction(0)
    return Fraction(p) ** (-vp(d, p))


def con_density_demo(cfg: Optional[ConSetConfig] = None, targets: Sequence = (0, 1, Fraction(1, 3)),
                     bound: int = 25, p: int = 3, p_radius=Fraction(1, 9), real_radius=Fraction(1, 10)):
    """For each target, the best simultaneous approximation among the quotients.

    Returns one dict per target with the pair (n, m), the value and both distances;
    ``hit`` is True when both distances are within the radii.
    """
    cfg = cfg or ConSetConfig()
    qs = cfg.quotients(bound)
    out = []
    for target in targets:
        target = Fraction(target)
        best = None
        for value, nm in qs.items():
            dp, dr = padic_distance(value, target, p), abs(value - target)
            ok = dp <= p_radius and dr <= real_radius
            key = (not ok, dr if ok else dp + dr)
            if best is None or key < best[0]:
                best = (key, value, nm, dp, dr, ok)
        _, value, nm, dp, dr, ok = best
        out.append({"target": target, "value": value, "pair": nm, "padic_distance": dp,
                    "real_distance": dr, "hit": ok})
    return out


# -- divisibility by t in the semilocal ring --------------------------------


def semilocal_divisibility_clause(x, t_const=None, prefix: Optional[str] = None) -> Formula:
    """EXISTS beta in A: x = t * beta."""
    name = x if isinstance(x, str) else str(x)
    beta = f"{prefix or 'div_' + name}_beta"
    T = as_rf(t_const if t_const is not None else RationalFunction.gen())
    return Exists([beta], Eq(expr(x), Const(T) * Var(beta), label=f"div:{name}"), domain="A",
                  label=f"semilocal:{name}")


# -- the real clause --------------------------------------------------------


def real_phi_lhs(x, alpha, beta, t_const=None):
    """(alpha - 1/t) x^2 + beta as a rational function."""
    T = as_rf(t_const if t_const is not None else RationalFunction.gen())
    x = as_rf(x)
    return (as_rf(alpha) - T.inverse()) * x * x + as_rf(beta)


def real_phi_clause(x, con_cfg: Optional[ConSetConfig] = None, t_const=None,
                    prefix: Optional[str] = None) -> Formula:
    """EXISTS alpha, beta in Con, x1..x5: (alpha - 1/t) x^2 + beta = x1^2 + ... + x5^2."""
    con_cfg = con_cfg or ConSetConfig()
    name = x if isinstance(x, str) else str(x)
    prefix = prefix or f"phi_{name}"
    T = as_rf(t_const if t_const is not None else RationalFunction.gen())
    alpha, beta = f"{prefix}_alpha", f"{prefix}_beta"
    squares = [f"{prefix}_x{i}" for i in range(1, 6)]
    xe = expr(x)
    lhs = (Var(alpha) - Const(T.inverse())) * xe ** 2 + Var(beta)
    rhs = sum((Var(s) ** 2 for s in squares[1:]), Var(squares[0]) ** 2)
    sos = Eq(lhs, rhs, label=f"{prefix}:squares",
             meta={"surrogate": "psd", "alpha": alpha, "beta": beta, "x": name})
    body = And([con_clause(con_cfg, alpha, f"{prefix}_ca"), con_clause(con_cfg, beta, f"{prefix}_cb"), sos])
    return Exists([alpha, beta] + squares, body, label=f"real:{name}",
                  meta={"surrogate_vars": squares})


# -- the p-adic clause ------------------------------------------------------


class PadicGadgetConfig:
    """p odd prime, a = +-1, varpi of odd p-adic valuation, c3 and c5 in Con."""

    def __init__(self, p: int = 3, a=1, varpi=None, c3=1, c5=1):
        p = int(p)
        if p < 3 or not flint.fmpz(p).is_prime():
            raise ValueError(f"p = {p} must be an odd prime")
        a = Fraction(a)
        if a not in (1, -1):
            raise ValueError("a must be 1 or -1")
        varpi = Fraction(p if varpi is None else varpi)
        if varpi == 0 or vp(varpi, p) % 2 == 0:
            raise ValueError(f"varpi = {varpi} must have odd {p}-adic valuation")
        self.p, self.a, self.varpi = p, a, varpi
        self.c3, self.c5 = Fraction(c3), Fraction(c5)

    def snapshot(self) -> dict:
        return {"p": self.p, "a": str(self.a), "varpi": str(self.varpi), "c3": str(self.c3), "c5": str(self.c5)}

    @classmethod
    def from_snapshot(cls, d: dict) -> "PadicGadgetConfig":
        return cls(int(d["p"]), Fraction(d["a"]), Fraction(d["varpi"]), Fraction(d["c3"]), Fraction(d["c5"]))

    def __repr__(self):
        return f"PadicGadgetConfig(p={self.p}, a={self.a}, varpi={self.varpi}, c3={self.c3}, c5={self.c5})"


def build_ue(r, cfg: PadicGadgetConfig, e: int, t_const=None) -> RationalFunction:
    """a^e ((1+t)^3 r + c3 t^3 + c5 t^5)."""
    if e not in (0, 1):
        raise ValueError("e is 0 or 1")
    T = as_rf(t_const if t_const is not None else RationalFunction.gen())
    val = (1 + T) ** 3 * as_rf(r) + cfg.c3 * T ** 3 + cfg.c5 * T ** 5
    return val * cfg.a if e else val


def build_phie(cfg: PadicGadgetConfig, u_e, t_const=None) -> DiagonalForm:
    """<t, a t, -1, -u_e> tensor <1, varpi>."""
    u_e = as_rf(u_e)
    if u_e.is_zero():
        raise ZeroCoefficient("u_e = 0")
    T = as_rf(t_const if t_const is not None else RationalFunction.gen())
    return DiagonalForm([T, cfg.a * T, -1, -u_e]) * DiagonalForm([1, cfg.varpi])


def _ue_expr(cfg, r: Expr, c3: Expr, c5: Expr, T: RationalFunction, e: int) -> Expr:
    val = Const((1 + T) ** 3) * r + c3 * Const(T ** 3) + c5 * Const(T ** 5)
    return Const(cfg.a) * val if e and cfg.a != 1 else val


def padic_D_clause(cfg: PadicGadgetConfig, r, con_cfg: Optional[ConSetConfig] = None, t_const=None,
                   prefix: Optional[str] = None) -> Formula:
    """EXISTS c3, c5 in Con such that both forms phi_0, phi_1 have a nonzero zero.

    Each isotropy condition is phi_e(x1..x8) = 0 together with a pivot
    disjunction OR_i (x_i * z = 1), which keeps the formula positive.
    """
    con_cfg = con_cfg or ConSetConfig()
    name = r if isinstance(r, str) else str(r)
    prefix = prefix or f"kr_{name}"
    T = as_rf(t_const if t_const is not None else RationalFunction.gen())
    c3, c5 = f"{prefix}_c3", f"{prefix}_c5"
    re = expr(r)
    vars_ = [c3, c5]
    surrogate_vars: List[str] = []
    clauses: List[Formula] = [con_clause(con_cfg, c3, f"{prefix}_c3con"), con_clause(con_cfg, c5, f"{prefix}_c5con")]
    for e in (0, 1):
        ue = _ue_expr(cfg, re, Var(c3), Var(c5), T, e)
        a, w = cfg.a, cfg.varpi
        coeffs = [Const(T), Const(a * T), Const(-1), -ue, Const(w * T), Const(a * w * T), Const(-w), Const(-w) * ue]
        xs = [f"{prefix}_e{e}_x{i}" for i in range(1, 9)]
        z = f"{prefix}_e{e}_z"
        quad = sum((c * Var(x) ** 2 for c, x in zip(coeffs[1:], xs[1:])), coeffs[0] * Var(xs[0]) ** 2)
        pivot = Or([Eq(Var(x) * Var(z), 1) for x in xs], label=f"{prefix}:e{e}:pivot")
        clauses.append(And([Eq(quad, 0, label=f"{prefix}:e{e}:form"), pivot], label=f"{prefix}:e{e}",
                           meta={"surrogate": "isotropy", "e": e, "r": name}))
        surrogate_vars += xs + [z]
    return Exists(vars_ + surrogate_vars, And(clauses), label=f"padic:{name}",
                  meta={"surrogate_vars": surrogate_vars, "r": name})


# -- Y sets and the reduction ------------------------------------------------


def y_class(r, zero=0, pole=None) -> str:
    """Y0 / Y1 / Neither from the orders of r at the zero and the pole of the uniformizer."""
    r = as_rf(r)
    if ord_at(r, pole) != -2:
        return "Neither"
    v = ord_at(r, zero)
    if v == 0:
        return "Y0"
    if v == 1:
        return "Y1"
    return "Neither"


def y_membership(r) -> str:
    """Y0 if v_inf(r) = -2 and v_0(r) = 0, Y1 if v_inf(r) = -2 and v_0(r) = 1."""
    return y_class(r, 0, None)


def varkr_reduce(r) -> RationalFunction:
    """t + t^2 + (r / (1 + t^2))^2 for r with v_inf(r) >= -2 and v_0(r) >= 0."""
    r = as_rf(r)
    vi, v0 = ord_at_infinity(r), ord_at_zero(r)
    if vi < -2 or v0 < 0:
        raise PreconditionViolated(f"varkr_reduce needs v_inf >= -2 and v_0 >= 0, got {vi} and {v0}")
    t = RationalFunction.gen()
    q = r / (1 + t * t)
    return t + t * t + q * q
