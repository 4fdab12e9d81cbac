"""Random well-typed programs and the oracles used by the property suites.

Generation is type-directed: pick a simple type, then build a term of that
type, so every sample is well-typed by construction.  Simple types are
``"Nat" | "Bool" | "Top" | "U" | ("->", A, B) | ("*", A, B)``, where terms of
``"U"`` are closed codes for object types.

Run ``python -m stagec.testkit --help`` for a command-line property runner.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass, field

from . import core as C
from . import objlang as O
from ._tree import children, size
from .nbe import conv, eval_term, var
from .stager import ObjVar, generic_env, seval, stage_term

BASE_TYPES = ("Nat", "Bool", "Top")
ALL_FORMERS = frozenset({
    "var", "lam", "app", "pair", "fst", "snd", "zero", "suc", "natelim", "bool",
    "boolelim", "tt", "let", "redex", "univ",
})
DEFAULT_SCHEMA = ("Nat", "Bool", ("->", "Nat", "Nat"), ("*", "Nat", "Bool"),
                  ("->", "Nat", ("->", "Bool", "Nat")), ("*", "Nat", ("*", "Nat", "Top")))


@dataclass(frozen=True)
class GenConfig:
    max_nodes: int = 30
    seed: int = 0
    schema: tuple = DEFAULT_SCHEMA
    formers: frozenset = ALL_FORMERS
    max_ctx: int = 3

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")


@dataclass
class PropertyReport:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    counterexamples: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.failures)} FAILED"
        return f"{self.name}: {self.cases} cases, {status}, {self.elapsed:.2f}s"


# ---------------------------------------------------------------------------
# Simple types


def type_size(ty) -> int:
    if isinstance(ty, tuple):
        return 1 + type_size(ty[1]) + type_size(ty[2])
    return 1


def core_type(ty) -> C.Term:
    """Closed stage-0 core type for a simple type."""
    match ty:
        case "Nat":
            return C.Nat(0, 0)
        case "Bool":
            return C.Bool(0, 0)
        case "Top":
            return C.Unit(0, 0)
        case "U":
            return C.U(0, 0)
        case ("->", a, b):
            return C.Pi(0, "_", core_type(a), core_type(b))
        case ("*", a, b):
            return C.Sigma(0, "_", core_type(a), core_type(b))
    raise ValueError(f"not a simple type: {ty!r}")


def obj_type(ty) -> O.ObjTerm:
    return O.strip(core_type(ty))


def _min_size(ty) -> int:
    match ty:
        case ("->", _, b):
            return 1 + _min_size(b)
        case ("*", a, b):
            return 1 + _min_size(a) + _min_size(b)
    return 1


def _random_type(rng: random.Random, depth: int = 2):
    if depth <= 0 or rng.random() < 0.5:
        return rng.choice(BASE_TYPES)
    former = rng.choice(("->", "*"))
    return (former, _random_type(rng, depth - 1), _random_type(rng, depth - 1))


# ---------------------------------------------------------------------------
# The generator


_HOLE = C.Zero(0, 0)


class _Gen:
    """Type-directed generator of stage-0 core terms within a node budget."""

    def __init__(self, rng: random.Random, formers, meta: bool):
        self.rng = rng
        self.formers = formers
        self.meta = meta

    def on(self, former: str) -> bool:
        return former in self.formers

    def form(self, build, specs, budget):
        """Fill the holes of `build` with terms of the given (type, scope) specs.

        Returns None when even minimal children would exceed the budget.
        """
        k = len(specs)
        fixed = size(build(*[_HOLE] * k)) - k
        mins = [_min_size(t) for t, _ in specs]
        spare = budget - fixed - sum(mins)
        if spare < 0:
            return None
        kids = []
        for i, (t, sc) in enumerate(specs):
            share = spare if i == k - 1 else self.rng.randint(0, spare)
            c = self.term(t, sc, mins[i] + share)
            spare -= size(c) - mins[i]
            kids.append(c)
        return build(*kids)

    # scope: simple types of the variables in scope, by de Bruijn level
    def term(self, ty, scope: list, budget: int) -> C.Term:
        """A stage-0 term of type `ty` with at most `budget` nodes (budget >= min size)."""
        rng = self.rng
        depth = len(scope)
        vars_here = [lvl for lvl, t in enumerate(scope) if t == ty]
        small = budget < 4
        options = []
        if vars_here and self.on("var"):
            options.append(("var", 3 if small else 1))
        base = not isinstance(ty, tuple) and ty != "Nat"
        options.append(("intro", 1 if base and not small else 4))
        if not small:
            options += [("elim", 3), ("let", 1), ("redex", 1), ("natelim", 1), ("boolelim", 1)]
            if self.meta:
                options.append(("meta", 5))
        options = [(o, w) for o, w in options if o in ("var", "intro", "elim", "meta") or self.on(o)]
        while options:
            kind = rng.choices([o for o, _ in options], [w for _, w in options])[0]
            options = [(o, w) for o, w in options if o != kind]
            if kind == "var":
                return C.Var(depth - rng.choice(vars_here) - 1)
            t = getattr(self, "_" + kind)(ty, scope, budget)
            if t is not None:
                return t
        raise AssertionError("intro always fits")  # pragma: no cover

    def _intro(self, ty, scope, budget):
        rng = self.rng
        depth = len(scope)
        match ty:
            case "Nat":
                if budget >= 2 and self.on("suc") and rng.random() < 0.6:
                    return self.form(lambda a: C.Suc(0, 0, a), [("Nat", scope)], budget)
                return C.Zero(0, 0)
            case "Bool":
                return C.BTrue(0, 0) if rng.random() < 0.5 else C.BFalse(0, 0)
            case "Top":
                return C.TT(0, 0)
            case "U":
                code = _random_type(rng, 2)
                while type_size(code) > budget:
                    code = rng.choice(BASE_TYPES)
                return core_type(code)
            case ("->", a, b):
                return self.form(lambda body: C.Lam(0, f"x{depth}", body),
                                 [(b, scope + [a])], budget)
            case ("*", a, b):
                return self.form(lambda x, y: C.Pair(0, x, y), [(a, scope), (b, scope)], budget)
        raise ValueError(f"bad type {ty!r}")

    def _elim(self, ty, scope, budget):
        """Eliminate a variable whose type has `ty` as its result or a component."""
        depth = len(scope)
        cands = []
        for lvl, t in enumerate(scope):
            if isinstance(t, tuple):
                if t[0] == "->" and t[2] == ty and self.on("app"):
                    cands.append(("app", lvl, t))
                if t[0] == "*" and t[1] == ty and self.on("fst"):
                    cands.append(("fst", lvl, t))
                if t[0] == "*" and t[2] == ty and self.on("snd"):
                    cands.append(("snd", lvl, t))
        if not cands:
            return None
        kind, lvl, t = self.rng.choice(cands)
        v = C.Var(depth - lvl - 1)
        if kind == "fst":
            return C.Fst(0, v)
        if kind == "snd":
            return C.Snd(0, v)
        return self.form(lambda a: C.App(0, v, a), [(t[1], scope)], budget)

    def _let(self, ty, scope, budget):
        a = _random_type(self.rng, 1)
        name = f"l{len(scope)}"
        return self.form(lambda b, body: C.Let(0, name, core_type(a), b, body),
                         [(a, scope), (ty, scope + [a])], budget)

    def _redex(self, ty, scope, budget):
        a = self.rng.choice(BASE_TYPES)
        name = f"r{len(scope)}"
        return self.form(lambda body, arg: C.App(0, C.Lam(0, name, body), arg),
                         [(ty, scope + [a]), (a, scope)], budget)

    def _natelim(self, ty, scope, budget):
        d = len(scope)
        names = ("_", f"k{d}", f"p{d}")
        return self.form(lambda n, z, s: C.NatElim(0, core_type(ty), z, s, n, names),
                         [("Nat", scope), (ty, scope), (ty, scope + ["Nat", ty])], budget)

    def _boolelim(self, ty, scope, budget):
        return self.form(lambda b, x, y: C.BoolElim(0, core_type(ty), x, y, b, ("_",)),
                         [("Bool", scope), (ty, scope), (ty, scope)], budget)

    # -- meta-level templates ------------------------------------------------

    def _meta(self, ty, scope, budget):
        rng = self.rng
        lift = C.Lift(core_type(ty))
        inner = scope + ["meta"]  # under one stage-1 binder
        kinds = ["splice-quote", "let-fn", "meta-pair", "meta-bool"]
        if ty == "Nat":
            kinds.append("iterate")
        if isinstance(ty, tuple) and ty[0] == "->":
            kinds.append("under-binder")
        rng.shuffle(kinds)
        for kind in kinds:
            if kind == "splice-quote":
                # ~<t>
                t = self.form(lambda a: C.Splice(C.Quote(a)), [(ty, scope)], budget)
            elif kind == "let-fn":
                # let g : ^T -> ^T = \q. q  (or \q. <~q>)  in ~(g <t>)
                body = C.Var(0) if rng.random() < 0.5 else C.Quote(C.Splice(C.Var(0)))
                fn_ty = C.Pi(1, "_", lift, C.shift(lift, 0, 1))
                t = self.form(lambda a: C.Let(1, "g", fn_ty, C.Lam(1, "q", body),
                                              C.Splice(C.App(1, C.Var(0), C.Quote(a)))),
                              [(ty, inner)], budget)
            elif kind == "iterate":
                # ~(NatElim1 (\_. ^Nat0) <base> (\_ b. <suc0 ~b>) k)
                k = rng.randint(0, 4)
                step = C.Quote(C.Suc(0, 0, C.Splice(C.Var(0))))
                t = self.form(lambda a: C.Splice(C.NatElim(
                    1, C.Lift(C.Nat(0, 0)), C.Quote(a), step, C.numeral(k, 1), ("_", "_", "b"))),
                    [("Nat", scope)], budget)
            elif kind == "meta-pair":
                # let p : ^T * ^Nat0 = (<t>, <0>) in ~(fst p)
                sig = C.Sigma(1, "_", lift, C.Lift(C.Nat(0, 0)))
                t = self.form(lambda a: C.Let(1, "p", sig,
                                              C.Pair(1, C.Quote(a), C.Quote(C.Zero(0, 0))),
                                              C.Splice(C.Fst(1, C.Var(0)))),
                              [(ty, scope)], budget)
            elif kind == "meta-bool":
                # ~(BoolElim1 (\_. ^T) <t> <u> b)
                pick = C.BTrue(1, 0) if rng.random() < 0.5 else C.BFalse(1, 0)
                t = self.form(lambda a, b: C.Splice(C.BoolElim(
                    1, C.shift(lift, 0, 1), C.Quote(a), C.Quote(b), pick, ("_",))),
                    [(ty, scope), (ty, scope)], budget)
            else:
                # let g : ^B -> ^(A -> B) = \q. <\x. ~q> in ~(g <b>)
                _, _, b = ty
                fn_ty = C.Pi(1, "_", C.Lift(core_type(b)), C.shift(lift, 0, 1))
                g = C.Lam(1, "q", C.Quote(C.Lam(0, "x", C.Splice(C.Var(1)))))
                t = self.form(lambda a: C.Let(1, "g", fn_ty, g,
                                              C.Splice(C.App(1, C.Var(0), C.Quote(a)))),
                              [(b, inner)], budget)
            if t is not None:
                return t
        return None


def _context(rng: random.Random, cfg: GenConfig) -> tuple[list, O.ObjCtx]:
    scope = [rng.choice(cfg.schema) for _ in range(rng.randint(0, cfg.max_ctx))]
    ctx = O.ObjCtx()
    for i, ty in enumerate(scope):
        ctx = ctx.extend(f"v{i}", obj_type(ty))
    return scope, ctx


def _target(rng: random.Random, cfg: GenConfig):
    pool = list(BASE_TYPES) + [_random_type(rng, 2) for _ in range(3)]
    if "univ" in cfg.formers:
        pool.append("U")
    pool = [t for t in pool if _min_size(t) <= cfg.max_nodes]
    return rng.choice(pool) if pool else "Nat"


def _generate(cfg: GenConfig, meta: bool):
    rng = random.Random(cfg.seed)
    scope, ctx = _context(rng, cfg)
    ty = _target(rng, cfg)
    gen = _Gen(rng, cfg.formers, meta)
    t = gen.term(ty, list(scope), cfg.max_nodes)
    return ctx, t, obj_type(ty) if ty != "U" else O.OU(0)


def gen_obj_term(cfg: GenConfig) -> tuple[O.ObjCtx, O.ObjTerm, O.ObjTerm]:
    """A well-typed object term: (context, term, type)."""
    ctx, t, ty = _generate(cfg, meta=False)
    return ctx, O.strip(t), ty


def gen_staged_term(cfg: GenConfig) -> tuple[O.ObjCtx, C.Term, O.ObjTerm]:
    """A stage-0 core term containing meta-level fragments: (context, term, type)."""
    ctx, t, ty = _generate(cfg, meta=True)
    return ctx, t, ty


# ---------------------------------------------------------------------------
# Oracles


def neutral_env(ctx: O.ObjCtx) -> tuple:
    """NbE environment for an object context: variables are neutral, definitions unfold."""
    env: tuple = ()
    for i, e in enumerate(ctx.entries):
        env += ((var(i) if e.value is None else eval_term(env, O.embed(e.value))),)
    return env


def oracle_soundness(ctx: O.ObjCtx, t: C.Term) -> bool:
    """Staging `t` yields code definitionally equal to `t`."""
    staged = stage_term(ctx, t)
    env = neutral_env(ctx)
    return conv(len(ctx), eval_term(env, O.embed(staged)), eval_term(env, t))


def strictness_sides(n: int, t: C.Term) -> tuple[O.ObjTerm, O.ObjTerm]:
    """(stage(F(args)), F(stage(args))) for a stage-0 former `t` in a context of length n."""
    lhs = seval(generic_env(O.ObjCtx((None,) * n)), n, t).term
    binds = type(t).BINDS
    kids = {}
    for name, child in children(t):
        k = n + binds.get(name, 0)
        kids[name] = seval(tuple(ObjVar(i) for i in range(k)), k, child).term
    cls = O._STRIP[type(t)]
    args = {f: (kids[f] if f in kids else getattr(t, f)) for f in cls.__dataclass_fields__}
    return lhs, cls(**args)


# ---------------------------------------------------------------------------
# Property runner


def _describe(inst) -> str:
    ctx, t, ty = inst
    names = ctx.names
    term = C.pretty(t, names) if isinstance(t, C.Term) else O.obj_pretty(t, names)
    binds = ", ".join(f"{e.name} : {O.obj_pretty(e.type, ctx.names[:i])}"
                      for i, e in enumerate(ctx.entries))
    return f"[{binds}] |- {term} : {O.obj_pretty(ty, names)}"


def _holds(prop, inst) -> str | None:
    try:
        r = prop(inst)
    except Exception as e:  # a crash is a counterexample too
        return f"{type(e).__name__}: {e}"
    if r is False:
        return "property returned False"
    return r if isinstance(r, str) else None


def run_property(name: str, prop, gen, cfg: GenConfig, cases: int) -> PropertyReport:
    """Check `prop` on `cases` samples; case i uses seed cfg.seed + i.

    A failing case is shrunk by regenerating from the same seed with smaller
    node budgets, which keeps every candidate well-typed.
    """
    report = PropertyReport(name)
    start = time.perf_counter()
    for i in range(cases):
        case_cfg = GenConfig(cfg.max_nodes, cfg.seed + i, cfg.schema, cfg.formers, cfg.max_ctx)
        inst = gen(case_cfg)
        report.cases += 1
        why = _holds(prop, inst)
        if why is None:
            continue
        best, best_why, budget = inst, why, case_cfg.max_nodes
        for smaller in range(budget - 1, 0, -1):
            cand = gen(GenConfig(smaller, case_cfg.seed, cfg.schema, cfg.formers, cfg.max_ctx))
            w = _holds(prop, cand)
            if w is not None:
                best, best_why, budget = cand, w, smaller
        report.failures.append(
            f"seed={case_cfg.seed} max_nodes={budget}: {best_why}\n    {_describe(best)}")
        report.counterexamples.append(best)
    report.elapsed = time.perf_counter() - start
    return report


# -- standard properties ------------------------------------------------------


def prop_generator_sound(inst) -> None:
    ctx, t, ty = inst
    O.obj_check(ctx, t if isinstance(t, O.ObjTerm) else O.strip(t), ty)


def prop_stable(inst):
    ctx, t, _ = inst
    out = stage_term(ctx, O.embed(t))
    return None if O.obj_eq(out, t) else f"staged to {O.obj_pretty(out, ctx.names)}"


def prop_staged_sound(inst):
    ctx, t, ty = inst
    out = stage_term(ctx, t)
    O.strip(O.embed(out))
    O.obj_check(ctx, out, ty)
    if not oracle_soundness(ctx, t):
        return f"not convertible with its staging {O.obj_pretty(out, ctx.names)}"
    return None


def prop_staged_generator_sound(inst) -> None:
    from .corecheck import recheck_term
    from .nbe import eval_term as ev

    ctx, t, ty = inst
    env = neutral_env(ctx)
    types = []
    for i, e in enumerate(ctx.entries):
        types.append(ev(env[:i], O.embed(e.type)))
    recheck_term(types, [0] * len(ctx), env, t, ev(env, O.embed(ty)), 0)


PROPERTIES = {
    "generator": (prop_generator_sound, gen_obj_term),
    "stability": (prop_stable, gen_obj_term),
    "staged-generator": (prop_staged_generator_sound, gen_staged_term),
    "soundness": (prop_staged_sound, gen_staged_term),
}


def hypothesis_strategy(max_nodes: int = 30, staged: bool = False):
    """Adapter for hypothesis: a strategy of generated instances (seed-driven)."""
    from hypothesis import strategies as st

    gen = gen_staged_term if staged else gen_obj_term
    return st.integers(0, 2**32 - 1).map(lambda s: gen(GenConfig(max_nodes, s)))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m stagec.testkit",
                                 description="Run the generator-backed properties.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--max-nodes", type=int, default=30)
    ap.add_argument("--property", choices=sorted(PROPERTIES), action="append")
    ns = ap.parse_args(argv)
    ok = True
    for name in ns.property or sorted(PROPERTIES):
        prop, gen = PROPERTIES[name]
        rep = run_property(name, prop, gen, GenConfig(ns.max_nodes, ns.seed), ns.cases)
        print(rep.summary())
        for f in rep.failures:
            print("  " + f)
        ok = ok and rep.ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
