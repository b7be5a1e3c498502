"""Command-line front end.

Exit codes: 0 success / pass, 1 semantic failure, 2 usage or parse error.
All numbers are printed in exact rational form.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from typing import List, Optional

from .compiler import (
    BACKENDS,
    CompiledArtifact,
    IntPolySystem,
    Witness,
    compile_system,
    parse,
    serialize,
    verify_witness,
    witness_lift,
)
from .errors import (
    ConstantMap,
    HypothesisNotVerified,
    NotAdmissible,
    NotASolution,
    ParseError,
    SingularCurve,
    TwistDiophError,
    ZeroCoefficient,
    ZeroPolynomial,
)
from .exact import INF, format_rational_function, ord_at_infinity, ord_at_zero, parse_polynomial, parse_rational_function
from .gadgets import ConSetConfig, PadicGadgetConfig, varkr_reduce, y_membership
from .lambda_ring import LambdaConfig, encode
from .local import (
    DiagonalForm,
    hasse_invariant,
    is_isotropic_local,
    is_isotropic_Q,
    newton_polygon,
    parse_place,
)
from .selftwist import SelfTwistModel, ev0, is_admissible, ord_infinity_of_u

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _fmt(r, var="t") -> str:
    return format_rational_function(r, var)


def _curve(text: str):
    try:
        parts = [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise _UsageError(f"--curve expects a,b,c with rational entries, got {text!r}") from None
    if len(parts) != 3:
        raise _UsageError(f"--curve expects three coefficients, got {len(parts)}")
    return SelfTwistModel(tuple(parts))


def _model_cfg(args, check=True):
    model = _curve(args.curve)
    f = parse_rational_function(args.f, "x")
    return LambdaConfig(model, Fraction(args.lam), f, check=check)


def _write(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from None


def _lines(args, lines: List[str]):
    _write(args, "".join(line + "\n" for line in lines))


# -- commands -------------------------------------------------------------------


def cmd_twist_info(args) -> int:
    model = _curve(args.curve)
    W = model.weierstrass
    rep = is_admissible(parse_rational_function(args.f, "x"), Fraction(args.lam), model)
    lines = [
        f"curve: y^2 = x^3 + ({model.a})x^2 + ({model.b})x + ({model.c})",
        f"h = P(1,t): {model.h}",
        f"rho: {_fmt(model.rho)}",
        f"weierstrass a2: {_fmt(W.a)}",
        f"weierstrass a4: {_fmt(W.b)}",
        f"weierstrass a6: {_fmt(W.c)}",
        f"fibre at infinity elliptic: {str(model.infinity_is_elliptic).lower()}",
        f"lambda: {Fraction(args.lam)}",
        f"f: {args.f}",
    ]
    lines += rep.lines()
    _lines(args, lines)
    return EXIT_OK


def cmd_gamma(args) -> int:
    model = _curve(args.curve)
    p = model.gamma_multiple(args.n)
    try:
        vinf = ord_infinity_of_u(model, args.n)
        vinf = "+inf" if vinf is INF else str(vinf)
    except HypothesisNotVerified as exc:
        vinf = f"unavailable ({exc})"
    _lines(args, [f"n: {args.n}", f"point: {p}", f"ev0: {ev0(model, p)}", f"v_inf(u): {vinf}"])
    return EXIT_OK


def cmd_encode(args) -> int:
    cfg = _model_cfg(args)
    e = encode(cfg, args.n)
    u, w = e.uw
    _lines(args, [f"n: {args.n}", f"u: {_fmt(cfg.emit(u), 'x')}", f"w: {_fmt(cfg.emit(w), 'x')}"])
    return EXIT_OK


def _system(args) -> IntPolySystem:
    if args.system_file:
        text = _read(args.system_file)
        if text.lstrip().startswith("{"):
            import json
            try:
                return IntPolySystem.from_json(json.loads(text))
            except json.JSONDecodeError as exc:
                raise ParseError(f"system file is not valid JSON: {exc}") from None
        return IntPolySystem([ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")])
    if not args.system:
        raise _UsageError("give --system or --system-file")
    variables = args.variables.split(",") if args.variables else None
    return IntPolySystem(args.system, variables)


def cmd_compile(args) -> int:
    sys_ = _system(args)
    cfg = _model_cfg(args, check=False)
    if not cfg.report.admissible:
        sys.stderr.write("not admissible: " + "; ".join(cfg.report.reasons) + "\n")
        return EXIT_FAIL
    padic = PadicGadgetConfig(args.p, 1, None, Fraction(args.c3), Fraction(args.c5))
    art = compile_system(sys_, args.backend, cfg, ConSetConfig(), padic, add_mode=args.add_mode)
    _write(args, serialize(art))
    return EXIT_OK


def _load_artifact(path: str) -> CompiledArtifact:
    art = parse(_read(path))
    if not isinstance(art, CompiledArtifact):
        raise ParseError(f"{path} is not a compiled artifact", "E_KIND")
    return art


def _solution(text: str, variables: List[str]):
    text = text.strip()
    if "=" in text:
        out = {}
        for part in text.split(","):
            k, _, v = part.partition("=")
            out[k.strip()] = int(v)
        return out
    vals = [int(v) for v in text.split(",")]
    if len(vals) != len(variables):
        raise _UsageError(f"expected {len(variables)} values for {', '.join(variables)}")
    return vals


def cmd_lift(args) -> int:
    art = _load_artifact(args.artifact)
    try:
        sol = _solution(args.solution, art.system.variables)
    except ValueError:
        raise _UsageError(f"cannot read solution {args.solution!r}") from None
    try:
        w = witness_lift(art.system, sol, art)
    except NotASolution as exc:
        sys.stderr.write(f"not a solution: {exc}\n")
        return EXIT_FAIL
    _write(args, serialize(w))
    return EXIT_OK


def cmd_verify(args) -> int:
    art = _load_artifact(args.artifact)
    w = parse(_read(args.witness))
    if not isinstance(w, Witness):
        raise ParseError(f"{args.witness} is not a witness", "E_KIND")
    rep = verify_witness(art, w)
    lines = rep.lines() if args.verbose else [ln for ln in rep.lines() if not ln.endswith(": pass")]
    _lines(args, lines)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_qform(args) -> int:
    try:
        coeffs = [Fraction(c.strip()) for c in args.coeffs.split(",")]
    except (ValueError, ZeroDivisionError):
        raise _UsageError(f"cannot read coefficients {args.coeffs!r}") from None
    form = DiagonalForm(coeffs)
    lines = [f"form: <{', '.join(str(c) for c in form)}>", f"dim: {form.dim}", f"determinant: {form.determinant()}"]
    if args.place.strip().lower() == "q":
        iso = is_isotropic_Q(form)
        lines.append("place: Q")
    else:
        place = parse_place(args.place)
        iso = is_isotropic_local(form, place)
        lines += [f"place: {place}", f"hasse invariant: {hasse_invariant(form, place)}"]
    lines.append("isotropic" if iso else "anisotropic")
    _lines(args, lines)
    return EXIT_OK


def cmd_newton(args) -> int:
    text = re.sub(r"\bp\b", f"({args.p})", args.poly)
    poly = parse_polynomial(text, "t")
    np_ = newton_polygon(poly, args.p)
    lines = [f"polynomial: {poly}", f"p: {args.p}",
             "vertices: " + " ".join(f"({i}, {v})" for i, v in np_.vertices)]
    lines += [f"segment {a[0]}..{b[0]}: slope {s}" for a, b, s in np_.segments]
    _lines(args, lines)
    return EXIT_OK


def cmd_varkr(args) -> int:
    r = parse_rational_function(args.r, "t")
    s = varkr_reduce(r)
    _lines(args, [
        f"r: {_fmt(r)}",
        f"s: {_fmt(s)}",
        f"v0(r): {ord_at_zero(r)}",
        f"v0(s): {ord_at_zero(s)}",
        f"v_inf(s): {ord_at_infinity(s)}",
        f"class: {y_membership(s)}",
    ])
    return EXIT_OK


def cmd_admissible(args) -> int:
    model = _curve(args.curve)
    rep = is_admissible(parse_rational_function(args.f, "x"), Fraction(args.lam), model)
    _lines(args, [f"f: {args.f}", f"lambda: {Fraction(args.lam)}"] + rep.lines())
    return EXIT_OK if rep.admissible else EXIT_FAIL


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--curve", default="0,-1,1", help="base curve coefficients a,b,c (default 0,-1,1)")
    common.add_argument("--lambda", dest="lam", default="1", help="the scalar lambda (default 1)")
    common.add_argument("--f", default="x", help="f as a rational function in x (default x)")
    common.add_argument("--backend", default="semilocal", choices=BACKENDS)
    common.add_argument("--out", default=None, help="write output to this path instead of stdout")

    ap = argparse.ArgumentParser(prog="twistdioph", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("twist-info", parents=[common], help="self-twist data and admissibility")
    s.set_defaults(func=cmd_twist_info)

    s = sub.add_parser("gamma", parents=[common], help="n*gamma with ev0 and the order of u at infinity")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_gamma)

    s = sub.add_parser("encode", parents=[common], help="(u, w) of n*gamma after t -> lambda*f")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("compile", parents=[common], help="compile an integer system to a formula artifact")
    s.add_argument("--system", help="equations separated by ';', e.g. 'x*y=z'")
    s.add_argument("--system-file", help="file with one equation per line, or the JSON system object")
    s.add_argument("--variables", help="comma-separated variable order")
    s.add_argument("--add-mode", default="congruence", choices=("congruence", "chord"))
    s.add_argument("--p", type=int, default=3, help="prime for the padic backend")
    s.add_argument("--c3", default="1")
    s.add_argument("--c5", default="1")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("lift", parents=[common], help="lift an integer solution to a witness")
    s.add_argument("artifact")
    s.add_argument("solution", help="values in variable order (3,4,12) or named (x=3,y=4,z=12)")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("verify", parents=[common], help="check a witness against an artifact")
    s.add_argument("artifact")
    s.add_argument("witness")
    s.add_argument("-v", "--verbose", action="store_true", help="also list passing clauses")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("qform", parents=[common], help="isotropy of a diagonal form")
    s.add_argument("coeffs", help="comma-separated rational coefficients")
    s.add_argument("--place", default="Q", help="real, p:<prime>, or Q for the global question")
    s.set_defaults(func=cmd_qform)

    s = sub.add_parser("newton", parents=[common], help="Newton polygon of a polynomial in t")
    s.add_argument("poly", help="polynomial in t; a bare 'p' stands for the prime")
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_newton)

    s = sub.add_parser("varkr", parents=[common], help="the Y-set reduction of r(t)")
    s.add_argument("r")
    s.set_defaults(func=cmd_varkr)

    s = sub.add_parser("admissible", parents=[common], help="admissibility report for t = lambda*f")
    s.set_defaults(func=cmd_admissible)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (_UsageError, ParseError, SingularCurve, ConstantMap, ZeroCoefficient, ZeroPolynomial) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NotAdmissible, TwistDiophError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
