"""Positive-existential formulas over a ring with constants from Q(x).

Expressions are polynomial terms in named symbols; formulas are built from
``Eq``, ``And``, ``Or`` and ``Exists`` only, so negation cannot be written.
Every formula node may carry a ``label`` and a JSON-able ``meta`` dict,
used by the compiler to name clauses and by the verifier to recognise
sub-formulas that are checked through a semantic surrogate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence

from .errors import ParseError
from .exact import Polynomial, RationalFunction, as_rf, format_rational_function, parse_rational_function

__all__ = [
    "Expr", "Var", "Const", "Add", "Mul", "Neg", "Pow",
    "Formula", "Eq", "And", "Or", "Exists",
    "expr", "expr_from_json", "formula_from_json", "MissingBinding",
]


class MissingBinding(KeyError):
    pass


def expr(x) -> "Expr":
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return Var(x)
    return Const(x)


class Expr:
    __slots__ = ()

    def __add__(self, o):
        return Add([self, expr(o)])

    def __radd__(self, o):
        return Add([expr(o), self])

    def __sub__(self, o):
        return Add([self, Neg(expr(o))])

    def __rsub__(self, o):
        return Add([expr(o), Neg(self)])

    def __mul__(self, o):
        return Mul([self, expr(o)])

    def __rmul__(self, o):
        return Mul([expr(o), self])

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k: int):
        return Pow(self, k)

    def symbols(self) -> set:
        out = set()
        self._symbols(out)
        return out

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash(str(self))


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def _symbols(self, out):
        out.add(self.name)

    def evaluate(self, env: Dict[str, RationalFunction]) -> RationalFunction:
        try:
            return env[self.name]
        except KeyError:
            raise MissingBinding(self.name) from None

    def to_json(self, var="x"):
        return {"op": "var", "name": self.name}

    def __str__(self):
        return self.name


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = as_rf(value if not isinstance(value, Fraction) else value)

    def _symbols(self, out):
        pass

    def evaluate(self, env) -> RationalFunction:
        return self.value

    def to_json(self, var="x"):
        return {"op": "const", "value": format_rational_function(self.value, var)}

    def __str__(self):
        v = format_rational_function(self.value, "x")
        return v if self.value.is_constant() and self.value.constant_value() >= 0 else f"[{v}]"


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[Expr]):
        flat = []
        for t in terms:
            flat.extend(t.terms if isinstance(t, Add) else [t])
        self.terms = flat

    def _symbols(self, out):
        for t in self.terms:
            t._symbols(out)

    def evaluate(self, env):
        acc = RationalFunction(0)
        for t in self.terms:
            acc = acc + t.evaluate(env)
        return acc

    def to_json(self, var="x"):
        return {"op": "add", "args": [t.to_json(var) for t in self.terms]}

    def __str__(self):
        return "(" + " + ".join(str(t) for t in self.terms) + ")"


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[Expr]):
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Mul) else [f])
        self.factors = flat

    def _symbols(self, out):
        for f in self.factors:
            f._symbols(out)

    def evaluate(self, env):
        acc = RationalFunction(1)
        for f in self.factors:
            acc = acc * f.evaluate(env)
        return acc

    def to_json(self, var="x"):
        return {"op": "mul", "args": [f.to_json(var) for f in self.factors]}

    def __str__(self):
        return "*".join(str(f) for f in self.factors)


class Neg(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        self.arg = arg

    def _symbols(self, out):
        self.arg._symbols(out)

    def evaluate(self, env):
        return -self.arg.evaluate(env)

    def to_json(self, var="x"):
        return {"op": "neg", "arg": self.arg.to_json(var)}

    def __str__(self):
        return f"-{self.arg}"


class Pow(Expr):
    __slots__ = ("base", "k")

    def __init__(self, base: Expr, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponents are nonnegative integers")
        self.base, self.k = base, k

    def _symbols(self, out):
        self.base._symbols(out)

    def evaluate(self, env):
        return self.base.evaluate(env) ** self.k

    def to_json(self, var="x"):
        return {"op": "pow", "base": self.base.to_json(var), "k": self.k}

    def __str__(self):
        return f"{self.base}^{self.k}"


def expr_from_json(d, var="x") -> Expr:
    try:
        op = d["op"]
        if op == "var":
            return Var(str(d["name"]))
        if op == "const":
            return Const(parse_rational_function(d["value"], var))
        if op == "add":
            return Add([expr_from_json(a, var) for a in d["args"]])
        if op == "mul":
            return Mul([expr_from_json(a, var) for a in d["args"]])
        if op == "neg":
            return Neg(expr_from_json(d["arg"], var))
        if op == "pow":
            return Pow(expr_from_json(d["base"], var), int(d["k"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed expression {d!r}") from exc
    raise ParseError(f"unknown expression op {d.get('op')!r}")


# -- formulas ---------------------------------------------------------------


class Formula:
    __slots__ = ("label", "meta")

    def children(self) -> List["Formula"]:
        return []

    def walk(self) -> Iterator["Formula"]:
        yield self
        for c in self.children():
            yield from c.walk()

    def count(self, kind) -> int:
        return sum(1 for n in self.walk() if isinstance(n, kind))

    def labelled(self, prefix: str) -> List["Formula"]:
        return [n for n in self.walk() if n.label and n.label.startswith(prefix)]

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def _base_json(self, d):
        if self.label:
            d["label"] = self.label
        if self.meta:
            d["meta"] = self.meta
        return d

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self.to_json() == other.to_json()

    __hash__ = None


class Eq(Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs, label: Optional[str] = None, meta: Optional[dict] = None):
        self.lhs, self.rhs = expr(lhs), expr(rhs)
        self.label, self.meta = label, meta or {}

    def symbols(self):
        return self.lhs.symbols() | self.rhs.symbols()

    def to_json(self, var="x"):
        return self._base_json({"op": "eq", "lhs": self.lhs.to_json(var), "rhs": self.rhs.to_json(var)})

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


class And(Formula):
    __slots__ = ("items",)

    def __init__(self, items: Sequence[Formula], label: Optional[str] = None, meta: Optional[dict] = None):
        self.items = list(items)
        self.label, self.meta = label, meta or {}

    def children(self):
        return self.items

    def to_json(self, var="x"):
        return self._base_json({"op": "and", "args": [i.to_json(var) for i in self.items]})

    def __str__(self):
        return "(" + " AND ".join(str(i) for i in self.items) + ")"


class Or(Formula):
    __slots__ = ("items",)

    def __init__(self, items: Sequence[Formula], label: Optional[str] = None, meta: Optional[dict] = None):
        self.items = list(items)
        self.label, self.meta = label, meta or {}

    def children(self):
        return self.items

    def to_json(self, var="x"):
        return self._base_json({"op": "or", "args": [i.to_json(var) for i in self.items]})

    def __str__(self):
        return "(" + " OR ".join(str(i) for i in self.items) + ")"


class Exists(Formula):
    """``domain`` is None for the whole field, or ``"A"`` for the semilocal ring."""

    __slots__ = ("vars", "body", "domain")

    def __init__(self, vars: Sequence[str], body: Formula, domain: Optional[str] = None,
                 label: Optional[str] = None, meta: Optional[dict] = None):
        self.vars = list(vars)
        self.body = body
        self.domain = domain
        self.label, self.meta = label, meta or {}

    def children(self):
        return [self.body]

    def to_json(self, var="x"):
        d = {"op": "exists", "vars": list(self.vars), "body": self.body.to_json(var)}
        if self.domain:
            d["domain"] = self.domain
        return self._base_json(d)

    def __str__(self):
        return f"EXISTS {', '.join(self.vars)}. {self.body}"


def formula_from_json(d, var="x") -> Formula:
    try:
        op = d["op"]
        label, meta = d.get("label"), d.get("meta")
        if op == "eq":
            return Eq(expr_from_json(d["lhs"], var), expr_from_json(d["rhs"], var), label, meta)
        if op == "and":
            return And([formula_from_json(a, var) for a in d["args"]], label, meta)
        if op == "or":
            return Or([formula_from_json(a, var) for a in d["args"]], label, meta)
        if op == "exists":
            return Exists([str(v) for v in d["vars"]], formula_from_json(d["body"], var),
                          d.get("domain"), label, meta)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed formula node: {exc}") from exc
    raise ParseError(f"unknown formula op {d.get('op')!r}")
