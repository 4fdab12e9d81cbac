import time

import pytest

from stagec import core as C
from stagec import objlang as O
from stagec.deep import run_deep
from stagec.errors import InternalError
from stagec.objlang import ObjCtx
from stagec.stager import (
    META_TYPE, Obj, ObjVar, Sem, generic_env, seval, stage_program, stage_term, stage_type,
)
from stagec.testkit import GenConfig, gen_obj_term, strictness_sides

import strict_cases
from helpers import CORPUS, corpus_source, elab, staged, staged_main

NAT = O.ONat(0)


def test_generic_env() -> None:
    assert generic_env(ObjCtx()) == ()
    assert generic_env(ObjCtx.of(("n", NAT))) == (ObjVar(0),)
    three = ObjCtx.of(("a", NAT), ("b", NAT), ("c", NAT))
    assert generic_env(three) == (ObjVar(0), ObjVar(1), ObjVar(2))


def test_seval_splice_of_quote() -> None:
    assert seval((), 0, C.Splice(C.Quote(C.Zero(0, 0)))) == Obj(O.OZero(0))


def test_seval_of_meta_term_is_semantic() -> None:
    out = seval((), 0, C.numeral(2, 1))
    assert isinstance(out, Sem)
    assert seval((), 0, C.Nat(1, 0)) == Sem(META_TYPE)


def test_stage_examples_from_corpus() -> None:
    assert staged_main(corpus_source("exp")) == "mul n (mul n (mul n 1))"
    assert staged_main(corpus_source("vec")) == "Nat0 * (Nat0 * (Nat0 * Top0))"
    assert staged_main(corpus_source("map")) == "(f (fst ns), (f (fst (snd ns)), tt0))"


def test_id1_on_a_variable_stages_to_the_variable() -> None:
    out, sp = staged(corpus_source("id"))
    # b is declared three entries before onVar
    assert sp.ctx.names[:5] == ("id0", "b", "viaId1", "viaIdUp", "onVar")
    assert out["onVar"][1] == O.OVar(2)
    assert out["viaId1"][1] == O.OTrue(0)


def test_stage_term_examples() -> None:
    assert stage_term(ObjCtx(), C.Zero(0, 0)) == O.OZero(0)
    assert stage_type(ObjCtx(), C.Nat(0, 0)) == NAT
    pi = C.Pi(0, "x", C.Nat(0, 0), C.Nat(0, 0))
    assert stage_type(ObjCtx(), pi) == O.OPi("x", NAT, NAT)


def test_iteration_stages_to_unary_numeral() -> None:
    for k in range(8):
        step = C.Quote(C.Suc(0, 0, C.Splice(C.Var(0))))
        t = C.Splice(C.NatElim(1, C.Lift(C.Nat(0, 0)), C.Quote(C.Zero(0, 0)), step,
                               C.numeral(k, 1)))
        expected = O.OZero(0)
        for _ in range(k):
            expected = O.OSuc(0, expected)
        assert stage_term(ObjCtx(), t) == expected


def test_code_with_binders_spliced_under_a_binder() -> None:
    # let c : ^(Top0 -> Top0) = <\r. r> in \x. ~c tt0
    top = C.Unit(0, 0)
    t = C.Let(1, "c", C.Lift(C.Pi(0, "_", top, top)), C.Quote(C.Lam(0, "r", C.Var(0))),
              C.Lam(0, "x", C.App(0, C.Splice(C.Var(1)), C.TT(0, 0))))
    assert stage_term(ObjCtx(), t) == O.OLam(
        "x", O.OApp(O.OLam("r", O.OVar(0)), O.OTT(0)))


def test_code_with_free_variable_spliced_under_a_binder() -> None:
    # in [a : Nat0]: let c : ^Nat0 = <a> in \x. ~c
    t = C.Let(1, "c", C.Lift(C.Nat(0, 0)), C.Quote(C.Var(0)), C.Lam(0, "x", C.Splice(C.Var(1))))
    assert stage_term(ObjCtx.of(("a", NAT)), t) == O.OLam("x", O.OVar(1))


def test_no_beta_at_stage_zero() -> None:
    t = C.App(0, C.Lam(0, "x", C.Var(0)), C.Zero(0, 0))
    assert stage_term(ObjCtx(), t) == O.OApp(O.OLam("x", O.OVar(0)), O.OZero(0))


def test_stuck_meta_computation_is_internal() -> None:
    # a splice of a stage-1 variable bound to a number, not to code
    t = C.Let(1, "k", C.Nat(1, 0), C.Zero(1, 0), C.Splice(C.Var(0)))
    with pytest.raises(InternalError):
        stage_term(ObjCtx(), t)


@pytest.mark.parametrize("case", strict_cases.CASES, ids=lambda c: c[0])
def test_strictness(case) -> None:
    _, n, t, expected = case
    lhs, rhs = strictness_sides(n, t)
    assert O.obj_eq(lhs, rhs)
    assert O.obj_eq(lhs, expected)


def test_strictness_cases_cover_every_former() -> None:
    names = {c[0].split("-")[0] for c in strict_cases.CASES}
    assert strict_cases.FORMERS <= names
    binding = {"Pi", "Lam", "Sigma", "NatElim", "BoolElim", "Let"}
    for b in binding:
        assert any(c[0].split("-")[0] == b and c[2].__class__.BINDS for c in strict_cases.CASES)


def test_stability_on_generated_terms(seed, cases, max_nodes) -> None:
    for i in range(cases):
        ctx, t, _ = gen_obj_term(GenConfig(max_nodes, seed + i))
        assert O.obj_eq(stage_term(ctx, O.embed(t)), t)


def test_stage_program_keeps_only_object_declarations() -> None:
    _, sp = staged(corpus_source("exp"))
    assert [e.name for e in sp.decls] == ["mul", "n", "main"]
    assert [s.name for s in sp.skipped] == ["iter1", "exp"]


def test_all_meta_program_stages_to_nothing() -> None:
    _, sp = staged(corpus_source("meta_only"))
    assert sp.decls == ()
    assert len(sp.skipped) == 3


def test_object_only_program_is_unchanged() -> None:
    src = corpus_source("object_only")
    prog = elab(src)
    _, sp = staged(src)
    for d, e in zip(prog.decls, sp.decls, strict=True):
        assert O.obj_eq(O.strip(d.type), e.type)
        assert O.obj_eq(O.strip(d.body), e.value)


def test_staging_a_long_iteration_is_fast() -> None:
    src = """assume f : Nat0 -> Nat0;
def main : Nat0 = ~(NatElim1 (\\_. ^Nat0) <zero0> (\\_ b. <f ~b>) 2000);"""
    start = time.perf_counter()
    out, _ = staged(src)
    elapsed = time.perf_counter() - start
    t, k = out["main"][1], 0
    while isinstance(t, O.OApp):
        t, k = t.arg, k + 1
    assert k == 2000 and t == O.OZero(0)
    assert elapsed < 2.0
