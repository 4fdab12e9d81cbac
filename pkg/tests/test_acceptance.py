"""The acceptance criteria, each reported as one PASS/FAIL line."""

import time

from stagec import core as C
from stagec import objlang as O
from stagec._tree import size
from stagec.cli import Command, run
from stagec.deep import run_deep
from stagec.testkit import GenConfig, gen_obj_term, gen_staged_term, oracle_soundness
from stagec.stager import stage_term
from stagec.testkit import strictness_sides

import conv_cases
import strict_cases
from helpers import CORPUS, staged

GOLDEN = CORPUS.parent / "tests" / "golden"


def staged_main(name: str) -> tuple[str, float]:
    start = time.perf_counter()
    r = run(Command("stage", str(CORPUS / f"{name}.2ltt"), main="main", verify=True))
    elapsed = time.perf_counter() - start
    assert r.code == 0, r.stderr
    body, verified = r.stdout.splitlines()
    assert verified == "verified"
    return body, elapsed


def golden(name: str) -> str:
    return (GOLDEN / f"{name}.main").read_text(encoding="utf-8").strip()


def test_criterion_1_golden_exp(criterion) -> None:
    out, secs = staged_main("exp")
    expected = "mul n (mul n (mul n 1))"
    ok = out == expected == golden("exp") and secs < 1.0
    criterion(1, "exp 3 stages to mul n (mul n (mul n 1))", ok, f"{out!r}, {secs:.3f}s")


def test_criterion_2_golden_vec(criterion) -> None:
    out, secs = staged_main("vec")
    expected = "Nat0 * (Nat0 * (Nat0 * Top0))"
    ok = out == expected == golden("vec") and secs < 1.0
    criterion(2, "Vec 3 Nat0 stages to a right-nested product", ok, f"{out!r}, {secs:.3f}s")


def test_criterion_3_golden_map(criterion) -> None:
    out, secs = staged_main("map")
    expected = "(f (fst ns), (f (fst (snd ns)), tt0))"
    ok = out == expected == golden("map") and secs < 1.0
    criterion(3, "map over a 2-vector unrolls", ok, f"{out!r}, {secs:.3f}s")


def test_criterion_4_stability(criterion, seed) -> None:
    bad = []
    start = time.perf_counter()
    for i in range(500):
        ctx, t, _ = gen_obj_term(GenConfig(30, seed + i))
        assert size(t) <= 30
        core = O.embed(t)
        if not C.term_eq(O.embed(stage_term(ctx, core)), core):
            bad.append(seed + i)
    secs = time.perf_counter() - start
    ok = not bad and secs < 30.0
    criterion(4, "stage_term . embed is the identity on 500 terms <= 30 nodes", ok,
              f"{500 - len(bad)}/500, {secs:.2f}s, failing seeds {bad[:5]}")


def test_criterion_5_soundness(criterion, seed) -> None:
    bad = []
    start = time.perf_counter()
    for i in range(500):
        ctx, t, ty = gen_staged_term(GenConfig(40, seed + i))
        assert size(t) <= 40
        try:
            out = stage_term(ctx, t)
            O.strip(O.embed(out))
            O.obj_check(ctx, out, ty)
            if not oracle_soundness(ctx, t):
                bad.append((seed + i, "not convertible"))
        except Exception as e:  # any failure counts against the criterion
            bad.append((seed + i, f"{type(e).__name__}: {e}"))
    secs = time.perf_counter() - start
    ok = not bad and secs < 60.0
    criterion(5, "500 staged terms <= 40 nodes are splice-free, well-typed and sound", ok,
              f"{500 - len(bad)}/500, {secs:.2f}s, failures {bad[:3]}")


def test_criterion_6_strictness(criterion) -> None:
    bad = []
    for name, n, t, expected in strict_cases.CASES:
        lhs, rhs = strictness_sides(n, t)
        if not (O.obj_eq(lhs, rhs) and O.obj_eq(lhs, expected)):
            bad.append(name)
    covered = {c[0].split("-")[0] for c in strict_cases.CASES}
    missing = strict_cases.FORMERS - covered
    ok = not bad and not missing
    criterion(6, "staging commutes with every stage-0 former", ok,
              f"{len(strict_cases.CASES) - len(bad)}/{len(strict_cases.CASES)} cases, "
              f"failing {bad}, uncovered {sorted(missing)}")


def test_criterion_7_conversion(criterion) -> None:
    rejected = [k for k, src in conv_cases.POSITIVE.items() if not conv_cases.decide(src)]
    accepted = [k for k, src in conv_cases.NEGATIVE.items() if conv_cases.decide(src)]
    ok = not rejected and not accepted
    criterion(7, "conversion laws accepted and negative controls rejected", ok,
              f"{len(conv_cases.POSITIVE)} laws, {len(conv_cases.NEGATIVE)} controls, "
              f"wrongly rejected {rejected}, wrongly accepted {accepted}")


PERF = r"""
assume f : Nat0 -> Nat0;
def main : Nat0 = ~(NatElim1 (\_. ^Nat0) <zero0> (\_ b. <f ~b>) 2000);
"""


def test_criterion_8_performance(criterion) -> None:
    start = time.perf_counter()
    out, _ = staged(PERF)
    secs = time.perf_counter() - start
    term = out["main"][1]
    nodes = run_deep(size, term)
    # each step emits one application of f: two nodes, plus the final zero
    ok = nodes == 2 * 2000 + 1 and secs < 2.0
    criterion(8, "a 2000-step meta iteration stages quickly", ok,
              f"{nodes} output nodes, {secs:.3f}s")
