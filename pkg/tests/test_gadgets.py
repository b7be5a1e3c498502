import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import padic_isotropic_brute
from twistdioph import (
    And,
    ConSetConfig,
    CubicCurve,
    Eq,
    Exists,
    Or,
    PadicGadgetConfig,
    Polynomial,
    PreconditionViolated,
    RationalFunction,
    Var,
    ZeroCoefficient,
    as_rf,
    build_phie,
    build_ue,
    con_clause,
    con_density_demo,
    con_witness,
    cubic_form,
    is_isotropic_local,
    is_psd_on_R,
    ord_at_infinity,
    ord_at_zero,
    padic_D_clause,
    padic_distance,
    real_phi_clause,
    real_phi_lhs,
    residue_forms_at_t,
    semilocal_divisibility_clause,
    varkr_reduce,
    y_class,
    y_membership,
)

t = RationalFunction.gen()


def holds(node, env):
    """Plain recursive truth evaluation for fully bound formulas."""
    if isinstance(node, Eq):
        return node.lhs.evaluate(env) == node.rhs.evaluate(env)
    if isinstance(node, And):
        return all(holds(c, env) for c in node.items)
    if isinstance(node, Or):
        return any(holds(c, env) for c in node.items)
    if isinstance(node, Exists):
        return holds(node.body, env)
    raise TypeError(node)


def env_of(d):
    return {k: as_rf(v) for k, v in d.items()}


class TestConSet:
    def test_default_curve(self):
        cfg = ConSetConfig()
        assert cfg.e1 == CubicCurve(0, 0, 24)
        assert cfg.uw(1) == (Fraction(1, 5), Fraction(1, 5))

    def test_torsion_generator_rejected(self):
        with pytest.raises(ValueError):
            ConSetConfig(CubicCurve(0, 0, 1), (2, 3))

    def test_clause_shape(self):
        cfg = ConSetConfig()
        f = con_clause(cfg, "v", "p")
        assert isinstance(f, Exists) and len(f.vars) == 5
        curves = [n for n in f.walk() if isinstance(n, Eq) and n.label and n.label.startswith("p:curve")]
        assert len(curves) == 2

    @pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (-3, 2), (0, 4)])
    def test_witness_satisfies_clause(self, n, m):
        cfg = ConSetConfig()
        w = con_witness(cfg, n, m, "p")
        v = cfg.con_u(n) / cfg.con_u(m)
        env = env_of(w)
        env["v"] = as_rf(v)
        assert holds(con_clause(cfg, "v", "p"), env)
        env["v"] = as_rf(v + 1)
        assert not holds(con_clause(cfg, "v", "p"), env)

    def test_chart_points_on_curve(self):
        cfg = ConSetConfig()
        for n in range(-6, 7):
            u, w = cfg.uw(n)
            assert w == u ** 3 + 24 * w ** 3

    def test_quotients(self):
        qs = ConSetConfig().quotients(3)
        assert qs[Fraction(1)] == (1, 1)
        assert qs[Fraction(0)] == (0, 1)
        assert all(abs(n) <= 3 and 0 < abs(m) <= 3 for n, m in qs.values())

    def test_density_demo(self):
        cfg = ConSetConfig()
        rows = con_density_demo(cfg, targets=(0, 1, Fraction(1, 3), Fraction(-2, 5)), bound=25)
        for row in rows[:3]:
            assert row["hit"]
            assert row["padic_distance"] <= Fraction(1, 9)
            assert row["real_distance"] <= Fraction(1, 10)
        assert rows[2]["pair"] == (25, 21)

    def test_padic_distance(self):
        assert padic_distance(Fraction(1, 3), Fraction(1, 3), 3) == 0
        assert padic_distance(10, 1, 3) == Fraction(1, 9)
        assert padic_distance(Fraction(1, 3), 0, 3) == 3

    def test_snapshot_roundtrip(self):
        cfg = ConSetConfig()
        again = ConSetConfig.from_snapshot(cfg.snapshot())
        assert again.e1 == cfg.e1 and again.G == cfg.G


class TestSemilocal:
    @pytest.mark.parametrize("x,beta", [(t, RationalFunction(1)), (t * t, t), (t / (1 - t), 1 / (1 - t))])
    def test_witness(self, x, beta):
        f = semilocal_divisibility_clause("x")
        assert f.domain == "A"
        assert holds(f, {"x": x, "div_x_beta": beta})

    def test_no_witness_for_unit(self):
        # the only candidate 1/t is not in the local ring at 0
        assert ord_at_zero(RationalFunction(1) / t) < 0

    def test_custom_t(self):
        T = 2 * t / (1 + t)
        f = semilocal_divisibility_clause("x", T, "k")
        assert holds(f, {"x": T * T, "k_beta": T})


class TestReal:
    def test_existentials(self):
        f = real_phi_clause("x")
        assert len(f.vars) == 7
        assert len(f.meta["surrogate_vars"]) == 5
        assert sum(1 for n in f.walk() if n.label and n.label.startswith("con:")) == 2

    def test_two_cases(self):
        assert is_psd_on_R(real_phi_lhs(t, 2, 2))
        for x in (RationalFunction(1), 1 + t, 3 - 2 * t):
            # near 0 the term -x^2/t changes sign
            lhs = real_phi_lhs(x, 2, 2)
            assert lhs.evaluate(Fraction(1, 1000)) < 0 or lhs.evaluate(Fraction(-1, 1000)) < 0
            assert not is_psd_on_R(lhs)

    @given(st.integers(1, 3), st.fractions(min_value=-3, max_value=3, max_denominator=4))
    @settings(max_examples=30, deadline=None)
    def test_positive_valuation_admits_pair(self, k, c):
        x = t ** k * (1 + c * t)
        assert any(is_psd_on_R(real_phi_lhs(x, a, b)) for a in (1, 10, 100) for b in (1, 10, 100, 10 ** 4))


class TestPadic:
    def test_config_validation(self):
        PadicGadgetConfig(p=5, a=-1, varpi=Fraction(5, 2))
        with pytest.raises(ValueError):
            PadicGadgetConfig(p=4)
        with pytest.raises(ValueError):
            PadicGadgetConfig(p=2)
        with pytest.raises(ValueError):
            PadicGadgetConfig(a=2)
        with pytest.raises(ValueError):
            PadicGadgetConfig(p=3, varpi=9)

    def test_build_ue(self):
        cfg = PadicGadgetConfig(c3=2, c5=5)
        assert build_ue(0, cfg, 0) == 2 * t ** 3 + 5 * t ** 5
        zero = PadicGadgetConfig(c3=0, c5=0)
        assert build_ue(t / (1 + t) ** 3, zero, 0) == t
        neg = PadicGadgetConfig(a=-1, c3=2, c5=5)
        assert build_ue(1 + t, neg, 1) == -build_ue(1 + t, neg, 0)

    def test_build_phie(self):
        cfg = PadicGadgetConfig(p=3)
        u = 1 + t
        phi = build_phie(cfg, u)
        assert phi.dim == 8
        assert list(phi.coeffs) == [as_rf(c) if not isinstance(c, Fraction) else c for c in
                                    (t, t, Fraction(-1), -u, 3 * t, 3 * t, Fraction(-3), -3 * u)]
        with pytest.raises(ZeroCoefficient):
            build_phie(cfg, RationalFunction(0))

    @given(st.integers(0, 2), st.integers(1, 5))
    @settings(max_examples=20, deadline=None)
    def test_ue_valuation_dichotomy(self, v, k):
        r = t ** v * (k + t)
        ue = build_ue(r, PadicGadgetConfig(), 0)
        if v == 0:
            assert ord_at_zero(ue) == 0
        else:
            assert ord_at_zero(ue) >= 1

    def test_ue_forced_by_cube(self):
        cfg = PadicGadgetConfig(c3=1, c5=1)
        assert ord_at_zero(build_ue(t ** 3 * (2 + t), cfg, 0)) >= 3

    def test_clause_shape(self):
        f = padic_D_clause(PadicGadgetConfig(), "r")
        forms = [n for n in f.walk() if isinstance(n, Eq) and n.label and n.label.endswith(":form")]
        assert len(forms) == 2
        for eq in forms:
            assert len({s for s in eq.symbols() if "_x" in s}) == 8
        blocks = [n for n in f.walk() if n.meta.get("surrogate") == "isotropy"]
        assert [b.meta["e"] for b in blocks] == [0, 1]
        pivots = [n for n in f.walk() if isinstance(n, Or)]
        assert len(pivots) == 2 and all(len(p.items) == 8 for p in pivots)

    def test_first_residue_on_unit_side(self):
        cfg = PadicGadgetConfig(p=3)
        u0 = build_ue(1 + t, cfg, 0)
        assert ord_at_zero(u0) == 0
        first, second = residue_forms_at_t(build_phie(cfg, u0), 0)
        assert first.coeffs == (-1, -1, -3, -3)
        assert second.coeffs == (1, 1, 3, 3)
        # -<1, 1> <1, 3> is anisotropic at 3 since -1 is not a square mod 3
        assert not is_isotropic_local(first, 3)
        assert not padic_isotropic_brute(first.coeffs, 3)
        # with u0(0) = 2 the residue form splits
        first2, _ = residue_forms_at_t(build_phie(cfg, build_ue(2 + t, cfg, 0)), 0)
        assert is_isotropic_local(first2, 3) and padic_isotropic_brute(first2.coeffs, 3)


class TestYSets:
    def test_examples(self):
        assert y_membership(t * t) == "Neither"
        assert y_membership(1 + t * t) == "Y0"
        assert y_membership(t + t * t) == "Y1"
        assert y_membership(t) == "Neither"

    def test_shifted_places(self):
        # uniformizer with zero at 1 and pole at 2
        assert y_class((t - 1) / (t - 2) ** 2, 1, 2) == "Y1"
        assert y_class(1 / (t - 2) ** 2, 1, 2) == "Y0"

    def test_varkr_examples(self):
        assert varkr_reduce(0) == t + t * t
        s = varkr_reduce(1)
        assert s == t + t * t + 1 / (1 + t * t) ** 2
        assert ord_at_zero(s) == 0
        assert ord_at_zero(varkr_reduce(t)) == 1

    def test_varkr_precondition(self):
        with pytest.raises(PreconditionViolated):
            varkr_reduce(t ** 3)
        with pytest.raises(PreconditionViolated):
            varkr_reduce(1 / t)

    def test_varkr_membership(self):
        rnd = random.Random(3)
        for _ in range(100):
            v0 = rnd.randint(0, 2)
            num = [rnd.randint(-5, 5) or 1 for _ in range(rnd.randint(1, 2))]
            den = [rnd.randint(1, 5), rnd.randint(-3, 3)]
            r = t ** v0 * RationalFunction(Polynomial(num), Polynomial(den))
            if ord_at_infinity(r) < -2 or ord_at_zero(r) < 0:
                continue
            want = "Y1" if ord_at_zero(r) > 0 else "Y0"
            assert y_membership(varkr_reduce(r)) == want


def test_cubic_form():
    e = cubic_form(1, 2, 3, Var("u"), Var("w"))
    u, w = Fraction(2), Fraction(3)
    assert e.evaluate({"u": as_rf(u), "w": as_rf(w)}) == as_rf(u ** 3 + u * u * w + 2 * u * w * w + 3 * w ** 3)
