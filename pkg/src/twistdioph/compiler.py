"""Lowering integer polynomial systems to positive-existential formulas over Q(x).

Each integer n is represented by the point n*gamma of the self-twist, written
in the affine chart (u, w) after substituting t -> lambda*f.  A system is first
flattened to three-address gadgets, then every point symbol gets the curve
clause, every add/mul gadget the congruence clause

    u(result) - u(a) - u(b)  divisible by t     (add)
    u(result) - u(a) u(b)    divisible by t     (mul)

with "divisible by t" encoded by the chosen backend, and every gadget result
is tied to its destination by a point-equality clause.
"""

from __future__ import annotations

import ast
import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import NotASolution, NotInLocalRing, ParseError, UnsupportedBackend
from .exact import (
    RationalFunction,
    as_rf,
    format_rational_function,
    ord_at,
    ord_at_infinity,
    parse_rational_function,
    rational_roots,
)
from .formula import (
    Add, And, Const, Eq, Exists, Formula, MissingBinding, Mul, Neg, Or, Var, formula_from_json,
)
from .gadgets import (
    ConSetConfig,
    PadicGadgetConfig,
    con_witness,
    cubic_form,
    padic_D_clause,
    real_phi_clause,
    real_phi_lhs,
    semilocal_divisibility_clause,
    y_class,
)
from .lambda_ring import LambdaConfig, encode
from .local import is_psd_on_R
from .selftwist import SelfTwistModel

__all__ = [
    "IntPolySystem",
    "normalize_system",
    "CompiledArtifact",
    "Witness",
    "VerificationReport",
    "compile_system",
    "witness_lift",
    "verify_witness",
    "serialize",
    "parse",
    "BACKENDS",
    "FORMAT_VERSION",
]

FORMAT_VERSION = 1
BACKENDS = ("semilocal", "real", "padic")
VAR = "x"  # name of the generator of K = Q(x) in serialized rational functions


# -- integer systems ----------------------------------------------------------


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Pow)


def _parse_side(text: str) -> ast.expr:
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    for node in ast.walk(tree.body):
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, _ALLOWED_BINOPS):
                raise ParseError(f"operator {type(node.op).__name__} not allowed in {text!r}")
            if isinstance(node.op, ast.Pow):
                k = node.right
                if not (isinstance(k, ast.Constant) and type(k.value) is int and k.value >= 0):
                    raise ParseError(f"exponents must be nonnegative integer literals in {text!r}")
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.USub, ast.UAdd)):
                raise ParseError(f"unary operator not allowed in {text!r}")
        elif isinstance(node, ast.Constant):
            if type(node.value) is not int:
                raise ParseError(f"only integer literals are allowed, got {node.value!r}")
        elif not isinstance(node, (ast.Name, ast.Load, ast.operator, ast.unaryop)):
            raise ParseError(f"unsupported syntax {type(node).__name__} in {text!r}")
    return tree.body


def _eval_int(node: ast.expr, env: Dict[str, int]) -> int:
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.UnaryOp):
        v = _eval_int(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    a, b = _eval_int(node.left, env), _eval_int(node.right, env)
    if isinstance(node.op, ast.Add):
        return a + b
    if isinstance(node.op, ast.Sub):
        return a - b
    if isinstance(node.op, ast.Mult):
        return a * b
    return a ** b


def _names(node: ast.expr) -> List[str]:
    out = []
    for n in ast.walk(node):
        if isinstance(n, ast.Name) and n.id not in out:
            out.append(n.id)
    return out


class IntPolySystem:
    """Polynomial equations with integer coefficients in declared variables.

    Equations are strings ``"lhs = rhs"`` (or a bare polynomial, read as ``= 0``).
    Variables default to the order of first appearance.
    """

    def __init__(self, equations: Sequence[str], variables: Optional[Sequence[str]] = None):
        if isinstance(equations, str):
            equations = [e for e in equations.split(";") if e.strip()]
        self.equations: List[str] = []
        self._sides: List[Tuple[ast.expr, ast.expr]] = []
        seen: List[str] = []
        for eq in equations:
            parts = eq.split("=")
            if len(parts) == 1:
                parts = [parts[0], "0"]
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise ParseError(f"equation {eq!r} must have the form lhs = rhs")
            lhs, rhs = _parse_side(parts[0].strip()), _parse_side(parts[1].strip())
            self._sides.append((lhs, rhs))
            self.equations.append(f"{parts[0].strip()} = {parts[1].strip()}")
            for n in _names(lhs) + _names(rhs):
                if n not in seen:
                    seen.append(n)
        if variables is None:
            variables = seen
        self.variables = [str(v) for v in variables]
        for v in self.variables:
            if not v.isidentifier() or "$" in v:
                raise ParseError(f"bad variable name {v!r}")
        undeclared = [n for n in seen if n not in self.variables]
        if undeclared:
            raise ParseError(f"undeclared variables {undeclared}")

    def residuals(self, solution) -> List[int]:
        env = self._env(solution)
        return [_eval_int(l, env) - _eval_int(r, env) for l, r in self._sides]

    def is_solution(self, solution) -> bool:
        return all(r == 0 for r in self.residuals(solution))

    def _env(self, solution) -> Dict[str, int]:
        if isinstance(solution, dict):
            env = {k: int(v) for k, v in solution.items()}
        else:
            solution = list(solution)
            if len(solution) != len(self.variables):
                raise ValueError(f"expected {len(self.variables)} values, got {len(solution)}")
            env = dict(zip(self.variables, (int(v) for v in solution)))
        missing = [v for v in self.variables if v not in env]
        if missing:
            raise ValueError(f"no value for {missing}")
        return env

    def to_json(self):
        return {"variables": list(self.variables), "equations": list(self.equations)}

    @classmethod
    def from_json(cls, d) -> "IntPolySystem":
        try:
            return cls(list(d["equations"]), list(d["variables"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed system: {exc}") from exc

    def __eq__(self, other):
        return isinstance(other, IntPolySystem) and self.to_json() == other.to_json()

    def __repr__(self):
        return f"IntPolySystem({self.equations!r}, {self.variables!r})"


# -- three-address form -------------------------------------------------------


class _Lowering:
    def __init__(self, sys: IntPolySystem):
        self.sys = sys
        self.gadgets: List[tuple] = []
        self.temps: List[str] = []
        self.defs: Dict[str, tuple] = {}  # how each temporary is computed from earlier symbols
        self.consts: Dict[int, str] = {}
        self._k = 0

    def fresh(self) -> str:
        self._k += 1
        return f"t${self._k}"

    def const(self, n: int) -> str:
        if n not in self.consts:
            name = f"c${n}" if n >= 0 else f"c$m{-n}"
            self.consts[n] = name
            self.gadgets.append(("const", name, n))
        return self.consts[n]

    def temp(self, definition) -> str:
        t = self.fresh()
        self.temps.append(t)
        self.defs[t] = definition
        return t

    def value(self, node) -> str:
        """Symbol holding the value of ``node``."""
        if isinstance(node, ast.Name):
            return node.id
        if isinstance(node, ast.Constant):
            return self.const(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return self.value(node.operand)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow) and node.right.value == 1:
            return self.value(node.left)
        return self.into(node, None)

    def into(self, node, dst: Optional[str]) -> str:
        """Lower the operation ``node`` so that its value lands in ``dst`` (fresh if None)."""
        if isinstance(node, ast.UnaryOp):
            if isinstance(node.op, ast.UAdd):
                return self.into(node.operand, dst)
            a = self.value(node.operand)
            zero = self.const(0)
            dst = dst or self.temp(("neg", a))
            self.gadgets.append(("add", zero, dst, a))
            return dst
        if isinstance(node, (ast.Name, ast.Constant)):
            return self._copy(node, dst)
        op = node.op
        if isinstance(op, ast.Pow):
            k = node.right.value
            if k == 0:
                return self._copy(ast.Constant(1), dst)
            base = self.value(node.left)
            if k == 1:
                return self._copy(node.left, dst)
            acc = base
            for i in range(k - 1):
                last = i == k - 2
                tgt = dst if (last and dst) else self.temp(("mul", acc, base))
                self.gadgets.append(("mul", tgt, acc, base))
                acc = tgt
            return acc
        a, b = self.value(node.left), self.value(node.right)
        if isinstance(op, ast.Sub):
            dst = dst or self.temp(("sub", a, b))
            self.gadgets.append(("add", a, dst, b))
            return dst
        kind = "add" if isinstance(op, ast.Add) else "mul"
        dst = dst or self.temp((kind, a, b))
        self.gadgets.append((kind, dst, a, b))
        return dst

    def _copy(self, leaf, dst):
        s = self.value(leaf)
        if dst is None:
            return s
        if isinstance(leaf, ast.Constant):
            self.gadgets.append(("const", dst, leaf.value))
        else:
            self.gadgets.append(("eq", dst, s))
        return dst

    def equation(self, lhs, rhs):
        if isinstance(lhs, ast.Name) and not _is_leaf(rhs):
            self.into(rhs, lhs.id)
        elif isinstance(rhs, ast.Name) and not _is_leaf(lhs):
            self.into(lhs, rhs.id)
        elif isinstance(lhs, ast.Name) and isinstance(rhs, ast.Constant):
            self.gadgets.append(("const", lhs.id, rhs.value))
        elif isinstance(rhs, ast.Name) and isinstance(lhs, ast.Constant):
            self.gadgets.append(("const", rhs.id, lhs.value))
        else:
            a, b = self.value(lhs), self.value(rhs)
            self.gadgets.append(("eq", a, b))


def _is_leaf(node) -> bool:
    return isinstance(node, (ast.Name, ast.Constant))


class NormalForm:
    """Three-address gadgets plus the definitions of the temporaries.

    Gadgets are tuples ``("add", dst, a, b)`` (dst = a + b), ``("mul", dst, a, b)``,
    ``("const", dst, n)`` and ``("eq", a, b)``.
    """

    def __init__(self, gadgets, temps, defs, consts):
        self.gadgets = list(gadgets)
        self.temps = list(temps)
        self.defs = dict(defs)
        self.consts = dict(consts)

    def __iter__(self):
        return iter(self.gadgets)

    def __len__(self):
        return len(self.gadgets)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gadgets if g[0] == kind)

    def values(self, env: Dict[str, int]) -> Dict[str, int]:
        """Extend a source assignment to temporaries and constants."""
        out = dict(env)
        for n, name in self.consts.items():
            out[name] = n
        for t in self.temps:
            d = self.defs[t]
            if d[0] == "neg":
                out[t] = -out[d[1]]
            elif d[0] == "sub":
                out[t] = out[d[1]] - out[d[2]]
            elif d[0] == "add":
                out[t] = out[d[1]] + out[d[2]]
            else:
                out[t] = out[d[1]] * out[d[2]]
        return out


def normalize_system(sys: IntPolySystem) -> NormalForm:
    low = _Lowering(sys)
    for lhs, rhs in sys._sides:
        low.equation(lhs, rhs)
    return NormalForm(low.gadgets, low.temps, low.defs, low.consts)


# -- compiled artifacts -------------------------------------------------------


def _u(p: str) -> str:
    return f"u_{p}"


def _w(p: str) -> str:
    return f"w_{p}"


class CompiledArtifact:
    def __init__(self, formula: Formula, varmap: Dict[str, Tuple[str, str]], backend: str, config: dict,
                 system: IntPolySystem, normal: NormalForm):
        self.formula = formula
        self.varmap = varmap
        self.backend = backend
        self.config = config
        self.system = system
        self.normal = normal
        self._lcfg = None
        self._con = None
        self._padic = None

    @property
    def lambda_config(self) -> LambdaConfig:
        if self._lcfg is None:
            c = self.config
            model = SelfTwistModel(tuple(Fraction(v) for v in (c["curve"]["a"], c["curve"]["b"], c["curve"]["c"])))
            f = parse_rational_function(c["f"], VAR)
            self._lcfg = LambdaConfig(model, Fraction(c["lambda"]), f, [Fraction(q) for q in c["Q"]],
                                      goodness_assumed=c.get("goodness_assumed", True))
        return self._lcfg

    @property
    def con_config(self) -> ConSetConfig:
        if self._con is None:
            self._con = ConSetConfig.from_snapshot(self.config["con"])
        return self._con

    @property
    def padic_config(self) -> PadicGadgetConfig:
        if self._padic is None:
            self._padic = PadicGadgetConfig.from_snapshot(self.config["padic"])
        return self._padic

    @property
    def T(self) -> RationalFunction:
        return self.lambda_config.lam_f

    def to_json(self) -> dict:
        c = self.config
        return {
            "version": FORMAT_VERSION,
            "kind": "artifact",
            "backend": self.backend,
            "lambda": c["lambda"],
            "f": c["f"],
            "curve": c["curve"],
            "config": c,
            "system": self.system.to_json(),
            "gadgets": [list(g) for g in self.normal.gadgets],
            "temps": {t: list(self.normal.defs[t]) for t in self.normal.temps},
            "varmap": {k: list(v) for k, v in self.varmap.items()},
            "formula": self.formula.to_json(VAR),
        }

    @classmethod
    def from_json(cls, d: dict) -> "CompiledArtifact":
        try:
            system = IntPolySystem.from_json(d["system"])
            temps = d.get("temps", {})
            gadgets = [tuple(g) for g in d["gadgets"]]
            consts = {g[2]: g[1] for g in gadgets if g[0] == "const" and g[1].startswith("c$")}
            normal = NormalForm(gadgets, list(temps), {k: tuple(v) for k, v in temps.items()}, consts)
            backend = d["backend"]
            if backend not in BACKENDS:
                raise UnsupportedBackend(backend)
            return cls(formula_from_json(d["formula"], VAR), {k: tuple(v) for k, v in d["varmap"].items()},
                       backend, d["config"], system, normal)
        except (KeyError, TypeError, AttributeError, IndexError) as exc:
            raise ParseError(f"malformed artifact: {exc!r}", "E_ARTIFACT") from exc


class Witness:
    """Assignment from emitted symbols to rational functions in x."""

    def __init__(self, assignment: Dict[str, RationalFunction]):
        self.assignment = {k: as_rf(v) for k, v in assignment.items()}

    def __getitem__(self, k):
        return self.assignment[k]

    def __contains__(self, k):
        return k in self.assignment

    def __len__(self):
        return len(self.assignment)

    def perturbed(self, name: str, delta) -> "Witness":
        a = dict(self.assignment)
        a[name] = a[name] + as_rf(delta)
        return Witness(a)

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "kind": "witness",
            "assignment": {k: format_rational_function(v, VAR) for k, v in sorted(self.assignment.items())},
        }

    @classmethod
    def from_json(cls, d: dict) -> "Witness":
        try:
            return cls({k: parse_rational_function(v, VAR) for k, v in d["assignment"].items()})
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed witness: {exc!r}", "E_WITNESS") from exc

    def __eq__(self, other):
        return isinstance(other, Witness) and self.assignment == other.assignment


def serialize(obj) -> str:
    if isinstance(obj, (CompiledArtifact, Witness, VerificationReport)):
        obj = obj.to_json()
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def parse(text: str):
    """Inverse of :func:`serialize` for artifacts and witnesses."""
    try:
        d = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"not valid JSON: {exc}", "E_JSON") from None
    if not isinstance(d, dict):
        raise ParseError("expected a JSON object", "E_JSON")
    if d.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {d.get('version')!r}", "E_VERSION")
    kind = d.get("kind")
    if kind == "artifact":
        return CompiledArtifact.from_json(d)
    if kind == "witness":
        return Witness.from_json(d)
    raise ParseError(f"unknown document kind {kind!r}", "E_KIND")


# -- compile ------------------------------------------------------------------


def _config_snapshot(cfg: LambdaConfig, con: ConSetConfig, padic: PadicGadgetConfig, add_mode: str) -> dict:
    m = cfg.model
    return {
        "curve": {"a": str(m.a), "b": str(m.b), "c": str(m.c)},
        "lambda": str(cfg.lam),
        "f": format_rational_function(cfg.f, VAR),
        "Q": [str(q) for q in cfg.Q],
        "goodness_assumed": bool(cfg.goodness_assumed),
        "add_mode": add_mode,
        "con": con.snapshot(),
        "padic": padic.snapshot(),
    }


def _curve_clause(cfg: LambdaConfig, p: str) -> Formula:
    m = cfg.model
    rho = cfg.emit(m.rho)
    return Eq(Var(_w(p)), Const(rho) * cubic_form(m.a, m.b, m.c, Var(_u(p)), Var(_w(p))), label=f"curve:{p}")


def _divisibility(backend, d: str, k: int, T, con, padic) -> Tuple[List[str], Formula]:
    """Extra top-level symbols and the clause asserting "t divides d"."""
    if backend == "semilocal":
        return [], semilocal_divisibility_clause(d, T, prefix=f"k${k}")
    if backend == "real":
        return [], real_phi_clause(d, con, T, prefix=f"k${k}")
    s = f"s${k}"
    inv = (1 + T * T).inverse()
    red = Eq(Var(s), Const(T + T * T) + Const(inv * inv) * Var(d) ** 2, label=f"varkr:{k}")
    return [s], And([red, padic_D_clause(padic, s, con, T, prefix=f"k${k}")], label=f"padicdiv:{k}")


def _chord_clause(cfg: LambdaConfig, k: int, p1: str, p2: str, p3: str) -> Formula:
    """Chord or tangent construction of p3 = p1 + p2 in the (u, w) chart."""
    m = cfg.model
    a, b, c = m.a, m.b, m.c
    rho = Const(cfg.emit(m.rho))
    u1, w1, u2, w2, u3, w3 = (Var(s) for s in (_u(p1), _w(p1), _u(p2), _w(p2), _u(p3), _w(p3)))
    inv, sl, ic = Var(f"k${k}_inv"), Var(f"k${k}_m"), Var(f"k${k}_k")
    P1m = 1 + Const(a) * sl + Const(b) * sl ** 2 + Const(c) * sl ** 3
    dP = Const(a) + Const(2 * b) * sl + Const(3 * c) * sl ** 2

    def third(x1, x2):
        return [Eq(w3, sl * u3 - ic), Eq(P1m * (x1 + x2 - u3) + ic * dP, 0)]

    chord = Exists([inv.name, sl.name, ic.name], And([
        Eq((u1 - u2) * inv, 1),
        Eq(w1, sl * u1 + ic),
        Eq(w2, sl * u2 + ic),
    ] + third(u1, u2)), label=f"chord:{k}")
    Pu = Const(3) * u1 ** 2 + Const(2 * a) * u1 * w1 + Const(b) * w1 ** 2
    Pw = Const(a) * u1 ** 2 + Const(2 * b) * u1 * w1 + Const(3 * c) * w1 ** 2
    tangent = Exists([sl.name, ic.name], And([
        Eq(u1, u2),
        Eq(w1, w2),
        Eq(sl * (1 - rho * Pw), rho * Pu),
        Eq(w1, sl * u1 + ic),
    ] + third(u1, u1)), label=f"tangent:{k}")
    return Or([chord, tangent], label=f"chordtangent:{k}")


def compile_system(sys: IntPolySystem, backend: str = "semilocal", cfg: Optional[LambdaConfig] = None,
                   con: Optional[ConSetConfig] = None, padic: Optional[PadicGadgetConfig] = None,
                   add_mode: str = "congruence") -> CompiledArtifact:
    if backend not in BACKENDS:
        raise UnsupportedBackend(f"unknown backend {backend!r}; choose one of {', '.join(BACKENDS)}")
    if add_mode not in ("congruence", "chord"):
        raise ValueError(f"unknown add_mode {add_mode!r}")
    if cfg is None:
        cfg = LambdaConfig(SelfTwistModel((0, -1, 1)))
    elif not cfg.report.admissible:
        from .errors import NotAdmissible
        raise NotAdmissible("; ".join(cfg.report.reasons))
    con = con or ConSetConfig()
    padic = padic or PadicGadgetConfig()
    T = cfg.lam_f
    normal = normalize_system(sys)

    points = list(sys.variables) + list(normal.temps)
    consts = [g for g in normal.gadgets if g[0] == "const" and g[1].startswith("c$")]
    top: List[str] = []
    clauses: List[Formula] = []
    for p in points:
        top += [_u(p), _w(p)]
        clauses.append(_curve_clause(cfg, p))
    for _, name, n in consts:
        top += [_u(name), _w(name)]
        u, w = encode(cfg, n).uw
        clauses.append(And([Eq(Var(_u(name)), Const(cfg.emit(u))), Eq(Var(_w(name)), Const(cfg.emit(w)))],
                           label=f"const:{name}", meta={"n": n}))
    for k, g in enumerate(normal.gadgets):
        kind = g[0]
        if kind == "const":
            if g[1].startswith("c$"):
                continue
            u, w = encode(cfg, g[2]).uw
            dst = g[1]
            clauses.append(And([Eq(Var(_u(dst)), Const(cfg.emit(u))), Eq(Var(_w(dst)), Const(cfg.emit(w)))],
                               label=f"const:{k}", meta={"n": g[2]}))
        elif kind == "eq":
            _, a, b = g
            clauses.append(And([Eq(Var(_u(a)), Var(_u(b))), Eq(Var(_w(a)), Var(_w(b)))], label=f"eq:{k}"))
        else:
            _, dst, a, b = g
            aux = f"g${k}"
            top += [_u(aux), _w(aux)]
            if kind == "add" and add_mode == "chord":
                clauses.append(_chord_clause(cfg, k, a, b, aux))
            else:
                d = f"d${k}"
                rhs = Var(_u(a)) + Var(_u(b)) if kind == "add" else Var(_u(a)) * Var(_u(b))
                extra, div = _divisibility(backend, d, k, T, con, padic)
                top += [d] + extra
                clauses.append(And([Eq(Var(d), Var(_u(aux)) - rhs, label=f"diff:{k}"), div],
                                   label=f"{kind}:{k}"))
            clauses.append(And([Eq(Var(_u(aux)), Var(_u(dst))), Eq(Var(_w(aux)), Var(_w(dst)))],
                               label=f"pointeq:{k}"))
    formula = Exists(top, And(clauses), domain="A" if backend == "semilocal" else None, label="system",
                     meta={"goodness": "assumed" if cfg.goodness_assumed else "unspecified", "backend": backend})
    varmap = {v: (_u(v), _w(v)) for v in sys.variables}
    art = CompiledArtifact(formula, varmap, backend, _config_snapshot(cfg, con, padic, add_mode), sys, normal)
    art._lcfg, art._con, art._padic = cfg, con, padic
    return art


# -- witness lifting ----------------------------------------------------------


REAL_SEARCH_BOUND = 8


def _first_true(n, pred):
    """Least i in [0, n) with pred(i), for a monotone predicate known to hold at n - 1."""
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _real_pair(art: CompiledArtifact, d: RationalFunction, bound: int = REAL_SEARCH_BOUND):
    """(alpha, beta, pair for alpha, pair for beta) from the Con grid making the real clause psd.

    (alpha - 1/t) d^2 + beta grows pointwise with alpha and with beta, so
    psd-ness is monotone in both and a binary search over the sorted grid
    finds the least working alpha, then the least beta for it.
    """
    qs = art.con_config.quotients(bound)
    vals = sorted(v for v in qs if v > 0)
    T = art.T

    def ok(a, b):
        return is_psd_on_R(real_phi_lhs(d, a, b, T))

    top = vals[-1]
    if not ok(top, top):
        return None
    i = _first_true(len(vals), lambda k: ok(vals[k], top))
    j = _first_true(len(vals), lambda k: ok(vals[i], vals[k]))
    return vals[i], vals[j], qs[vals[i]], qs[vals[j]]


def _con_pair(con: ConSetConfig, value: Fraction, bound: int = 4):
    qs = con.quotients(bound)
    if value not in qs:
        raise ValueError(f"{value} was not found among the Con quotients with |n|, |m| <= {bound}")
    return qs[value]


def witness_lift(sys: IntPolySystem, int_solution, art: CompiledArtifact) -> Witness:
    """Exact witness for an integer solution; raises NotASolution if it is not one."""
    env = sys._env(int_solution)
    if not sys.is_solution(env):
        raise NotASolution(f"{env} does not solve {sys.equations}")
    cfg = art.lambda_config
    T = art.T
    vals = art.normal.values(env)
    asg: Dict[str, RationalFunction] = {}
    uw: Dict[str, Tuple[RationalFunction, RationalFunction]] = {}

    def point(name: str, n: int):
        u, w = encode(cfg, n).uw
        uw[name] = (cfg.emit(u), cfg.emit(w))
        asg[_u(name)], asg[_w(name)] = uw[name]

    for p, n in vals.items():
        point(p, n)
    add_mode = art.config.get("add_mode", "congruence")
    for k, g in enumerate(art.normal.gadgets):
        if g[0] not in ("add", "mul"):
            continue
        kind, dst, a, b = g
        aux = f"g${k}"
        n = vals[a] + vals[b] if kind == "add" else vals[a] * vals[b]
        point(aux, n)
        (u1, w1), (u2, w2), (u3, w3) = uw[a], uw[b], uw[aux]
        if kind == "add" and add_mode == "chord":
            asg.update(_chord_witness(cfg, k, (u1, w1), (u2, w2)))
            continue
        d = u3 - (u1 + u2 if kind == "add" else u1 * u2)
        asg[f"d${k}"] = d
        if art.backend == "semilocal":
            beta = d / T
            if not cfg.in_semilocal_ring(beta):
                raise NotInLocalRing(f"gadget {k}: {beta} is not regular at the points of Q")
            asg[f"k${k}_beta"] = beta
        elif art.backend == "real":
            found = _real_pair(art, d)
            if found is None:
                raise ValueError(f"gadget {k}: no (alpha, beta) on the searched Con grid makes the clause psd")
            alpha, beta, na, nb = found
            asg[f"k${k}_alpha"], asg[f"k${k}_beta"] = as_rf(alpha), as_rf(beta)
            asg.update(con_witness(art.con_config, *na, prefix=f"k${k}_ca"))
            asg.update(con_witness(art.con_config, *nb, prefix=f"k${k}_cb"))
        else:
            pc = art.padic_config
            inv = (1 + T * T).inverse()
            asg[f"s${k}"] = T + T * T + inv * inv * d * d
            asg[f"k${k}_c3"], asg[f"k${k}_c5"] = as_rf(pc.c3), as_rf(pc.c5)
            asg.update(con_witness(art.con_config, *_con_pair(art.con_config, pc.c3), prefix=f"k${k}_c3con"))
            asg.update(con_witness(art.con_config, *_con_pair(art.con_config, pc.c5), prefix=f"k${k}_c5con"))
    return Witness({k: as_rf(v) for k, v in asg.items()})


def _chord_witness(cfg: LambdaConfig, k: int, p1, p2) -> Dict[str, RationalFunction]:
    m = cfg.model
    (u1, w1), (u2, w2) = p1, p2
    if u1 != u2:
        sl = (w2 - w1) / (u2 - u1)
        return {f"k${k}_inv": (u1 - u2).inverse(), f"k${k}_m": sl, f"k${k}_k": w1 - sl * u1}
    rho = cfg.emit(m.rho)
    Pu = 3 * u1 * u1 + 2 * m.a * u1 * w1 + m.b * w1 * w1
    Pw = m.a * u1 * u1 + 2 * m.b * u1 * w1 + 3 * m.c * w1 * w1
    sl = rho * Pu / (1 - rho * Pw)
    return {f"k${k}_m": sl, f"k${k}_k": w1 - sl * u1}


# -- verification -------------------------------------------------------------


PASS, FAIL, SURROGATE, MISSING = "pass", "fail", "surrogate-verified", "MissingBinding"


class VerificationReport:
    def __init__(self, entries: List[Tuple[str, str, str]]):
        self.entries = entries

    @property
    def passed(self) -> bool:
        return all(s in (PASS, SURROGATE) for _, s, _ in self.entries) and bool(self.entries)

    def count(self, status: str) -> int:
        return sum(1 for _, s, _ in self.entries if s == status)

    @property
    def surrogate_count(self) -> int:
        return self.count(SURROGATE)

    def failures(self) -> List[Tuple[str, str, str]]:
        return [e for e in self.entries if e[1] not in (PASS, SURROGATE)]

    def lines(self) -> List[str]:
        out = [f"{label}: {status}" + (f" ({detail})" if detail else "") for label, status, detail in self.entries]
        out.append(f"result: {'PASS' if self.passed else 'FAIL'} "
                   f"({self.count(PASS)} exact, {self.surrogate_count} surrogate, {len(self.failures())} failed)")
        return out

    def to_json(self) -> dict:
        return {"version": FORMAT_VERSION, "kind": "report", "passed": self.passed,
                "entries": [list(e) for e in self.entries]}

    def __bool__(self):
        return self.passed


class _Verifier:
    def __init__(self, art: CompiledArtifact, w: Witness):
        self.art = art
        self.env = w.assignment
        self.cfg = art.lambda_config
        self.entries: List[Tuple[str, str, str]] = []
        self._pole = None

    def pole(self):
        """A place where the uniformizer has a simple pole, used by the Y-set surrogate."""
        if self._pole is None:
            T = self.art.T
            if ord_at_infinity(T) == -1:
                self._pole = ("ok", None)
            else:
                simple = [r for r in rational_roots(T.den) if ord_at(T, r) == -1]
                self._pole = ("ok", simple[0]) if simple else ("none", None)
        return self._pole

    def check(self, node: Formula, path: str, out: List) -> bool:
        label = node.label or path
        kind = node.meta.get("surrogate") if node.meta else None
        if isinstance(node, Eq):
            if kind == "psd" and not node.symbols() <= self.env.keys():
                return self._psd(node, label, out)
            return self._eq(node, label, out)
        if isinstance(node, And):
            if kind == "isotropy" and not _symbols(node) <= self.env.keys():
                return self._isotropy(node, label, out)
            ok = True
            for i, c in enumerate(node.items):
                ok = self.check(c, f"{label}.{i}", out) and ok
            return ok
        if isinstance(node, Or):
            trial = []
            for i, c in enumerate(node.items):
                sub: List = []
                if self.check(c, f"{label}|{i}", sub):
                    out.extend(sub)
                    return True
                trial.extend(sub)
            out.extend(trial)
            out.append((label, FAIL, "no branch holds"))
            return False
        if isinstance(node, Exists):
            ok = True
            skip = set(node.meta.get("surrogate_vars", ())) if node.meta else set()
            for v in node.vars:
                if v not in self.env:
                    if v not in skip:
                        out.append((label, MISSING, v))
                        ok = False
                elif node.domain == "A" and not self.cfg.in_semilocal_ring(self.env[v]):
                    out.append((label, FAIL, f"{v} is not in the semilocal ring"))
                    ok = False
            return self.check(node.body, f"{label}/", out) and ok
        raise TypeError(f"unknown node {node!r}")

    def _eq(self, node: Eq, label: str, out) -> bool:
        try:
            ln, ld = _eval_pair(node.lhs, self.env)
            rn, rd = _eval_pair(node.rhs, self.env)
        except MissingBinding as exc:
            out.append((label, MISSING, str(exc.args[0])))
            return False
        if ln * rd == rn * ld:
            out.append((label, PASS, ""))
            return True
        out.append((label, FAIL, "sides differ"))
        return False

    def _psd(self, node: Eq, label: str, out) -> bool:
        try:
            value = node.lhs.evaluate(self.env)
        except MissingBinding as exc:
            out.append((label, MISSING, str(exc.args[0])))
            return False
        if is_psd_on_R(value):
            out.append((label, SURROGATE, "left side is psd on R, hence a sum of five squares"))
            return True
        out.append((label, FAIL, "left side is negative somewhere on R"))
        return False

    def _isotropy(self, node: And, label: str, out) -> bool:
        name = node.meta["r"]
        if name not in self.env:
            out.append((label, MISSING, name))
            return False
        status, pole = self.pole()
        if status != "ok":
            out.append((label, FAIL, "the uniformizer has no rational simple pole; Y-set test unavailable"))
            return False
        r = self.env[name]
        classes = {y_class(r, q, pole) for q in self.cfg.Q}
        if classes == {"Y1"}:
            out.append((label, SURROGATE, f"{name} lies in Y1 at every point of Q"))
            return True
        out.append((label, FAIL, f"{name} has Y-class {'/'.join(sorted(classes))}"))
        return False


def _eval_pair(e, env):
    """Unreduced (numerator, denominator) of an expression; exact, no gcds."""
    if isinstance(e, Var):
        v = e.evaluate(env)
        return v.num.flint, v.den.flint
    if isinstance(e, Const):
        return e.value.num.flint, e.value.den.flint
    if isinstance(e, Add):
        n, d = _eval_pair(e.terms[0], env)
        for t in e.terms[1:]:
            tn, td = _eval_pair(t, env)
            n, d = (n * td + tn * d, d * td) if td != d else (n + tn, d)
        return n, d
    if isinstance(e, Mul):
        n, d = _eval_pair(e.factors[0], env)
        for f in e.factors[1:]:
            fn, fd = _eval_pair(f, env)
            n, d = n * fn, d * fd
        return n, d
    if isinstance(e, Neg):
        n, d = _eval_pair(e.arg, env)
        return -n, d
    n, d = _eval_pair(e.base, env)
    return n ** e.k, d ** e.k


def _symbols(node: Formula) -> set:
    out = set()
    for n in node.walk():
        if isinstance(n, Eq):
            out |= n.symbols()
        elif isinstance(n, Exists):
            out |= set(n.vars)
    return out


def verify_witness(art: CompiledArtifact, w: Witness) -> VerificationReport:
    v = _Verifier(art, w)
    out: List[Tuple[str, str, str]] = []
    v.check(art.formula, "root", out)
    return VerificationReport(out)
