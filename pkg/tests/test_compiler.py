import itertools
import json

import pytest

from twistdioph import (
    Const,
    IntPolySystem,
    LambdaConfig,
    NotAdmissible,
    NotASolution,
    ParseError,
    RationalFunction,
    UnsupportedBackend,
    Witness,
    compile_system,
    encode,
    parse,
    parse_rational_function,
    serialize,
    verify_witness,
    witness_lift,
)
from twistdioph.compiler import normalize_system

x = RationalFunction.gen()

CORPUS = ["x + y = z", "x*y = z", "x - y = z", "2*x + 3 = y", "x^2 + y^2 = z^2", "x*y + 3 = z"]
MAX_ENTRY, MAX_INTERMEDIATE = 12, 30


def small_solutions(system, limit):
    """Integer solutions with entries and intermediates in range, by exhaustive search."""
    normal = normalize_system(system)
    out = []
    rng = range(-MAX_ENTRY, MAX_ENTRY + 1)
    for vals in itertools.product(rng, repeat=len(system.variables)):
        env = dict(zip(system.variables, vals))
        if not system.is_solution(env):
            continue
        if max(abs(v) for v in normal.values(env).values()) > MAX_INTERMEDIATE:
            continue
        out.append(vals)
    # spread the sample over the whole range
    step = max(1, len(out) // limit)
    return out[::step][:limit]


class TestSystem:
    def test_variables_detected(self):
        assert IntPolySystem("x*y = z").variables == ["x", "y", "z"]
        assert IntPolySystem(["b = a"], ["a", "b"]).variables == ["a", "b"]

    def test_parse_errors(self):
        for bad in ("x = y = z", "x / y = z", "x^y = z", "x = 1.5", "f(x) = 1"):
            with pytest.raises(ParseError):
                IntPolySystem(bad)
        with pytest.raises(ParseError):
            IntPolySystem("x = y", ["x"])

    def test_residuals(self):
        s = IntPolySystem("x*y = z")
        assert s.residuals((3, 4, 12)) == [0]
        assert IntPolySystem("x - 2").is_solution((2,))
        assert not s.is_solution((3, 4, 11))

    def test_json_roundtrip(self):
        s = IntPolySystem("x^2 + y^2 = z^2; x = 3")
        assert IntPolySystem.from_json(json.loads(json.dumps(s.to_json()))) == s


class TestNormalForm:
    def test_counts(self):
        assert [g[0] for g in normalize_system(IntPolySystem("x + y = z"))] == ["add"]
        assert [g[0] for g in normalize_system(IntPolySystem("x*y = z"))] == ["mul"]
        n = normalize_system(IntPolySystem("x^2 + y^2 = z^2"))
        assert (n.count("mul"), n.count("add"), n.count("eq")) == (3, 1, 1)

    def test_subtraction_becomes_addition(self):
        assert normalize_system(IntPolySystem("x - y = z")).gadgets == [("add", "x", "z", "y")]

    def test_constant(self):
        assert normalize_system(IntPolySystem("x = 5")).gadgets == [("const", "x", 5)]

    def test_values_extend_assignment(self):
        n = normalize_system(IntPolySystem("x^2 + y^2 = z^2"))
        vals = n.values({"x": 3, "y": 4, "z": 5})
        assert sorted(vals[t] for t in n.temps) == [9, 16, 25, 25]


class TestStructure:
    def test_mul_clauses(self):
        art = compile_system(IntPolySystem("x*y = z"))
        labels = [c.label for c in art.formula.body.items]
        assert [lab.split(":")[0] for lab in labels] == ["curve", "curve", "curve", "mul", "pointeq"]
        assert art.formula.domain == "A"
        assert art.varmap["x"] == ("u_x", "w_x")

    def test_constant_coordinates(self, cfg):
        art = compile_system(IntPolySystem("x*y + 7 = z"))
        const = [c for c in art.formula.body.items if c.label.startswith("const:")]
        assert len(const) == 1
        (eu, ew) = const[0].items
        u, w = encode(cfg, 7).uw
        assert isinstance(eu.rhs, Const) and eu.rhs.value == cfg.emit(u)
        assert ew.rhs.value == cfg.emit(w)

    def test_size_linear_in_gadgets(self):
        sizes = []
        for n in (1, 2, 4, 8, 16):
            s = IntPolySystem(";".join(f"x{i}*x{i + 1} = x{i + 2}" for i in range(n)))
            sizes.append(compile_system(s).formula.size())
        diffs = {(b - a) // (m - n) for (a, n), (b, m) in zip(zip(sizes, (1, 2, 4, 8)), zip(sizes[1:], (2, 4, 8, 16)))}
        assert len(diffs) == 1

    def test_unsupported_backend(self):
        with pytest.raises(UnsupportedBackend):
            compile_system(IntPolySystem("x = y"), backend="adelic")
        with pytest.raises(ValueError):
            compile_system(IntPolySystem("x = y"), add_mode="tangent")

    def test_not_admissible(self, model):
        cfg = LambdaConfig(model, f=parse_rational_function("x^2", "x"), check=False)
        with pytest.raises(NotAdmissible):
            compile_system(IntPolySystem("x = y"), cfg=cfg)


class TestSoundness:
    @pytest.mark.parametrize("text", CORPUS)
    def test_corpus_semilocal(self, text):
        system = IntPolySystem(text)
        art = compile_system(system)
        sols = small_solutions(system, 12)
        assert sols
        for sol in sols:
            rep = verify_witness(art, witness_lift(system, sol, art))
            assert rep.passed and rep.surrogate_count == 0, (sol, rep.lines()[-1])

    def test_not_a_solution(self):
        system = IntPolySystem("x*y = z")
        art = compile_system(system)
        with pytest.raises(NotASolution):
            witness_lift(system, (3, 4, 11), art)

    def test_wrong_point_rejected(self):
        system = IntPolySystem("x*y = z")
        art = compile_system(system)
        w = witness_lift(system, (3, 4, 12), art)
        bad = dict(w.assignment)
        other = witness_lift(system, (2, 5, 10), art)
        bad["u_z"], bad["w_z"] = other["u_z"], other["w_z"]
        assert not verify_witness(art, Witness(bad)).passed

    def test_missing_bindings(self):
        art = compile_system(IntPolySystem("x + y = z"))
        rep = verify_witness(art, Witness({}))
        assert not rep.passed
        assert rep.count("MissingBinding") >= 6

    def test_chord_mode(self):
        system = IntPolySystem("x + y = z")
        art = compile_system(system, add_mode="chord")
        assert any(c.label.startswith("chordtangent:") for c in art.formula.body.items)
        w = witness_lift(system, (2, 3, 5), art)
        rep = verify_witness(art, w)
        assert rep.passed and rep.surrogate_count == 0
        assert not verify_witness(art, w.perturbed("u_z", x)).passed

    @pytest.mark.parametrize("backend,surrogates", [("real", 1), ("padic", 2)])
    @pytest.mark.parametrize("text,sol", [("x + y = z", (1, 1, 2)), ("x*y = z", (2, 2, 4))])
    def test_other_backends(self, backend, surrogates, text, sol):
        system = IntPolySystem(text)
        art = compile_system(system, backend=backend)
        assert art.formula.domain is None
        w = witness_lift(system, sol, art)
        rep = verify_witness(art, w)
        assert rep.passed and rep.surrogate_count == surrogates
        for name in ("u_x", "w_z"):
            assert not verify_witness(art, w.perturbed(name, x)).passed


class TestSerialization:
    def test_deterministic(self):
        a = serialize(compile_system(IntPolySystem("x^2 + y^2 = z^2")))
        b = serialize(compile_system(IntPolySystem("x^2 + y^2 = z^2")))
        assert a == b

    @pytest.mark.parametrize("backend", ["semilocal", "real", "padic"])
    def test_roundtrip(self, backend):
        system = IntPolySystem("x*y + 3 = z")
        art = compile_system(system, backend=backend)
        text = serialize(art)
        again = parse(text)
        assert serialize(again) == text
        w = witness_lift(again.system, (1, 1, 4), again)
        assert parse(serialize(w)) == w
        assert verify_witness(again, parse(serialize(w))).passed

    def test_error_codes(self):
        art = json.loads(serialize(compile_system(IntPolySystem("x = y"))))
        cases = {
            "E_JSON": "{not json",
            "E_VERSION": json.dumps(dict(art, version=999)),
            "E_KIND": json.dumps(dict(art, kind="poem")),
            "E_ARTIFACT": json.dumps({k: v for k, v in art.items() if k != "formula"}),
            "E_WITNESS": json.dumps({"version": art["version"], "kind": "witness"}),
        }
        for code, text in cases.items():
            with pytest.raises(ParseError) as exc:
                parse(text)
            assert exc.value.code == code
        with pytest.raises(ParseError):
            parse("[1, 2]")

    def test_unknown_backend_in_artifact(self):
        art = json.loads(serialize(compile_system(IntPolySystem("x = y"))))
        with pytest.raises(UnsupportedBackend):
            parse(json.dumps(dict(art, backend="adelic")))
