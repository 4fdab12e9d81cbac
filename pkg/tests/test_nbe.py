import pytest

from stagec import core as C
from stagec import objlang as O
from stagec.errors import FuelExhausted, InternalError
from stagec.nbe import (
    EApp, VLam, VNe, VQuote, VSuc, VTrue, VZero, Closure, apply, conv, eval_term, fuel,
    fuel_from_env, nf, readback, var,
)
from stagec.testkit import GenConfig, gen_staged_term, neutral_env

import conv_cases
from helpers import elab, values


def test_beta() -> None:
    t = C.App(1, C.Lam(1, "x", C.Var(0)), C.Zero(1, 0))
    assert eval_term((), t) == VZero(1, 0)


def test_natelim_beta_on_suc_zero() -> None:
    # the step receives the predecessor and the result for it
    m = C.Nat(1, 0)
    s = C.Suc(1, 0, C.Suc(1, 0, C.Var(0)))
    t = C.NatElim(1, m, C.numeral(3, 1), s, C.numeral(1, 1))
    assert readback(0, eval_term((), t)) == C.numeral(5, 1)


def test_splice_of_quote_evaluates_to_the_body() -> None:
    assert eval_term((), C.Splice(C.Quote(C.Zero(0, 0)))) == VZero(0, 0)


def test_apply() -> None:
    ident = VLam(1, "x", Closure((), C.Var(0)))
    assert apply(ident, VTrue(1, 0)) == VTrue(1, 0)
    assert apply(var(0), VZero(0, 0), 0) == VNe(0, (EApp(0, VZero(0, 0)),))
    with pytest.raises(InternalError):
        apply(VZero(0, 0), VZero(0, 0), 0)


def test_readback_examples() -> None:
    assert readback(0, VLam(1, "x", Closure((), C.Var(0)))) == C.Lam(1, "x", C.Var(0))
    assert readback(0, VQuote(VZero(0, 0))) == C.Quote(C.Zero(0, 0))
    ne = VNe(0, (EApp(0, VZero(0, 0)),))
    assert readback(1, ne) == C.App(0, C.Var(0), C.Zero(0, 0))


def test_readback_collapses_quote_of_splice() -> None:
    assert readback(1, VQuote(eval_term((var(0),), C.Splice(C.Var(0))))) == C.Var(0)


def test_readback_level_index_arithmetic() -> None:
    assert readback(3, var(0)) == C.Var(2)
    assert readback(3, var(2)) == C.Var(0)


def test_nf_of_id1_on_quoted_true() -> None:
    prog = elab(r"""
        def id1 : (A : U1) -> A -> A = \A x. x;
        def main : Bool0 = ~(id1 (^Bool0) <true0>);""")
    from stagec.elaborator import program_env, CoreProgram
    env = program_env(CoreProgram(prog.decls[:1]))
    assert nf(1, env, prog.decls[1].body) == C.BTrue(0, 0)


def test_nf_of_zero() -> None:
    assert nf(0, (), C.Zero(0, 0)) == C.Zero(0, 0)


def test_long_numerals_do_not_recurse() -> None:
    big = C.numeral(50_000, 1)
    v = eval_term((), big)
    assert isinstance(v, VSuc)
    assert C.as_numeral(readback(0, v)) == 50_000


def test_fuel_bounds_evaluation() -> None:
    t = C.numeral(3, 0)
    with fuel(1):
        with pytest.raises(FuelExhausted):
            eval_term((), C.App(1, C.Lam(1, "x", C.Var(0)), t))
    with fuel(None):
        eval_term((), t)


def test_fuel_from_env(monkeypatch) -> None:
    monkeypatch.delenv("STAGEC_FUEL", raising=False)
    assert fuel_from_env(7) == 7
    monkeypatch.setenv("STAGEC_FUEL", "12")
    assert fuel_from_env(None) == 12
    monkeypatch.setenv("STAGEC_FUEL", "0")
    assert fuel_from_env(5) is None


@pytest.mark.parametrize("name", sorted(conv_cases.POSITIVE))
def test_conversion_accepts(name) -> None:
    assert conv_cases.decide(conv_cases.POSITIVE[name])


@pytest.mark.parametrize("name", sorted(conv_cases.NEGATIVE))
def test_conversion_rejects(name) -> None:
    assert not conv_cases.decide(conv_cases.NEGATIVE[name])


def test_conv_is_symmetric_on_the_suite() -> None:
    from stagec.nbe import conv as cv
    for src in list(conv_cases.POSITIVE.values()) + list(conv_cases.NEGATIVE.values()):
        vals, d = values(src)
        assert cv(d, vals["lhs"], vals["rhs"]) == cv(d, vals["rhs"], vals["lhs"])


def test_nf_is_idempotent_on_generated_terms(seed) -> None:
    for i in range(200):
        ctx, t, _ = gen_staged_term(GenConfig(30, seed + i))
        env = neutral_env(ctx)
        once = nf(len(ctx), env, t)
        twice = nf(len(ctx), env, once)
        assert C.term_eq(once, twice), C.pretty(t, ctx.names)


def test_conv_agrees_with_normal_forms(seed) -> None:
    # conv(a, b) iff the normal forms coincide; pairs are drawn from one seed
    # with two budgets so that some pairs agree and some do not
    agree = disagree = 0
    for i in range(100):
        ctx, t, ty = gen_staged_term(GenConfig(20, seed + i))
        _, u, ty2 = gen_staged_term(GenConfig(19, seed + i))
        if not O.obj_eq(ty, ty2):
            continue
        env, d = neutral_env(ctx), len(ctx)
        a, b = eval_term(env, t), eval_term(env, u)
        same = C.term_eq(readback(d, a), readback(d, b))
        assert conv(d, a, b) == same, C.pretty(t, ctx.names)
        agree += same
        disagree += not same
    assert agree > 0 and disagree > 0


def test_readback_of_eval_is_identity_on_normal_forms(seed) -> None:
    for i in range(100):
        ctx, t, _ = gen_staged_term(GenConfig(25, seed + i))
        env = neutral_env(ctx)
        n = nf(len(ctx), env, t)
        assert C.term_eq(readback(len(ctx), eval_term(env, n)), n)
