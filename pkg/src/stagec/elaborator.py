"""Bidirectional elaboration of surface terms into the core calculus.

Stages of Pi, Sigma, lambda, pairs and application are inferred from their
components; base types and universes carry explicit stages in the source.
Lambdas, pairs and numeral literals only check, never infer.  The one
exception is a lambda applied directly to an argument, which is typed like
a let so that staged output (which may contain such redexes) reads back in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import core as C
from . import surface as S
from .core import INF, pretty
from .errors import SourceSpan, UserError
from .nbe import (
    VU, VBool, VFalse, VLift, VNat, VPi, VSigma, VSuc, VTrue, VUnit, VZero, Value, conv,
    eval_term, readback, var, vfst,
)


class ElabError(UserError):
    KINDS = ("mismatch", "stage-mismatch", "unbound", "not-a-function", "not-inferable",
             "universe-error", "duplicate", "bad-syntax")

    def __init__(self, kind: str, message: str, span: SourceSpan | None = None,
                 expected: str | None = None, actual: str | None = None):
        assert kind in self.KINDS, kind
        self.kind = kind
        self.expected = expected
        self.actual = actual
        full = message
        if expected is not None:
            full += f"\n  expected: {expected}"
        if actual is not None:
            full += f"\n  actual:   {actual}"
        super().__init__(full, span)


@dataclass(frozen=True)
class ElabCtx:
    names: tuple = ()
    types: tuple = ()
    stages: tuple = ()
    env: tuple = ()
    span: SourceSpan | None = field(default=None, compare=False)

    @property
    def depth(self) -> int:
        return len(self.names)

    def bind(self, name: str, ty: Value, stage: int) -> "ElabCtx":
        return self._extend(name, ty, stage, var(self.depth))

    def define(self, name: str, ty: Value, stage: int, value: Value) -> "ElabCtx":
        return self._extend(name, ty, stage, value)

    def _extend(self, name, ty, stage, value) -> "ElabCtx":
        return ElabCtx(self.names + (name,), self.types + (ty,), self.stages + (stage,),
                       self.env + (value,), self.span)

    def lookup(self, name: str):
        for lvl in range(self.depth - 1, -1, -1):
            if self.names[lvl] == name:
                return self.depth - lvl - 1, self.types[lvl], self.stages[lvl]
        return None

    def eval(self, t: C.Term) -> Value:
        return eval_term(self.env, t)

    def show(self, v: Value) -> str:
        return pretty(readback(self.depth, v), self.names, INF)


@dataclass(frozen=True)
class CoreDecl:
    name: str
    type: C.Term
    body: C.Term | None  # None for an assumption
    stage: int
    level: int = 0


@dataclass
class CoreProgram:
    decls: list[CoreDecl] = field(default_factory=list)

    def names(self) -> list[str]:
        return [d.name for d in self.decls]

    def __iter__(self):
        return iter(self.decls)

    def __len__(self):
        return len(self.decls)


def _span(ctx: ElabCtx, t) -> SourceSpan | None:
    return getattr(t, "span", None) or ctx.span


def _inferable(t: C.Term) -> bool:
    while isinstance(t, (C.Quote, C.Splice, C.Let)):
        t = t.body if isinstance(t, C.Let) else t.tm
    return not isinstance(t, (C.Lam, C.Pair))


# ---------------------------------------------------------------------------


def check_type(ctx: ElabCtx, t: S.Term) -> tuple[C.Term, int, int]:
    """Elaborate `t` as a type; returns (core, stage, level)."""
    c, ty, _ = infer(ctx, t)
    if not isinstance(ty, VU):
        raise ElabError("universe-error", "expected a type", _span(ctx, t),
                        actual=f"a term of type {ctx.show(ty)}")
    return c, ty.stage, ty.level


def infer(ctx: ElabCtx, t: S.Term) -> tuple[C.Term, Value, int]:
    """Elaborate `t` in synthesis mode; returns (core, type, stage)."""
    match t:
        case S.Var(x):
            found = ctx.lookup(x)
            if found is None:
                raise ElabError("unbound", f"unbound variable {x}", _span(ctx, t))
            ix, ty, s = found
            return C.Var(ix), ty, s

        case S.Univ(s, j):
            return C.U(s, j), VU(s, j + 1), s
        case S.Nat(s, j):
            return C.Nat(s, j), VU(s, j), s
        case S.Bool(s, j):
            return C.Bool(s, j), VU(s, j), s
        case S.Unit(s, j):
            return C.Unit(s, j), VU(s, j), s
        case S.Zero(s):
            return C.Zero(s, 0), VNat(s, 0), s
        case S.BoolLit(s, b):
            return (C.BTrue(s, 0) if b else C.BFalse(s, 0)), VBool(s, 0), s
        case S.TT(s):
            return C.TT(s, 0), VUnit(s, 0), s
        case S.NatLit(n, s):
            if s is None:
                raise ElabError("not-inferable",
                                "cannot infer the stage of a numeral literal; annotate it",
                                _span(ctx, t))
            return C.numeral(n, s), VNat(s, 0), s

        case S.Suc(s, arg):
            if isinstance(arg, S.NatLit):
                j = 0
                ac = check(ctx, arg, VNat(s, 0), s)
            else:
                ac, aty, _ = infer(ctx, arg)
                if not (isinstance(aty, VNat) and aty.stage == s):
                    raise ElabError("mismatch", f"suc{s} expects a Nat{s} argument",
                                    _span(ctx, arg), expected=f"Nat{s}", actual=ctx.show(aty))
                j = aty.level
            return C.Suc(s, j, ac), VNat(s, j), s

        case S.Pi(x, a, b) | S.Sigma(x, a, b):
            ac, sa, ja = check_type(ctx, a)
            bc, sb, jb = check_type(ctx.bind(x, ctx.eval(ac), sa), b)
            if sa != sb:
                what = "function" if isinstance(t, S.Pi) else "pair"
                raise ElabError("stage-mismatch",
                                f"{what} type components must be at the same stage",
                                _span(ctx, t), expected=f"stage {sa}", actual=f"stage {sb}")
            former = C.Pi if isinstance(t, S.Pi) else C.Sigma
            return former(sa, x, ac, bc), VU(sa, max(ja, jb)), sa

        case S.App(S.Lam(x, body), a):
            # a redex is typed like a let, so staged output reads back in
            ac, inner, sa = _redex_binding(ctx, x, a)
            bc, bty, sb = infer(inner, body)
            if sb != sa:
                raise ElabError("stage-mismatch", "a redex must stay at one stage",
                                _span(ctx, t), expected=f"stage {sa}", actual=f"stage {sb}")
            return C.App(sa, C.Lam(sa, x, bc), ac), bty, sa

        case S.App(f, a):
            fc, fty, _ = infer(ctx, f)
            if not isinstance(fty, VPi):
                raise ElabError("not-a-function", "applying a term that is not a function",
                                _span(ctx, f), actual=ctx.show(fty))
            ac = check(ctx, a, fty.dom, fty.stage)
            return C.App(fty.stage, fc, ac), fty.cl(ctx.eval(ac)), fty.stage

        case S.Fst(p) | S.Snd(p):
            pc, pty, _ = infer(ctx, p)
            if not isinstance(pty, VSigma):
                raise ElabError("mismatch", "projection from a term that is not a pair",
                                _span(ctx, p), actual=ctx.show(pty))
            s = pty.stage
            if isinstance(t, S.Fst):
                return C.Fst(s, pc), pty.dom, s
            return C.Snd(s, pc), pty.cl(vfst(ctx.eval(pc), s)), s

        case S.NatElim(s, motive, z, sc, n):
            return _infer_nat_elim(ctx, t, s, motive, z, sc, n)
        case S.BoolElim(s, motive, on_t, on_f, b):
            return _infer_bool_elim(ctx, t, s, motive, on_t, on_f, b)

        case S.Lift(a):
            ac, sa, j = check_type(ctx, a)
            if sa != 0:
                raise ElabError("stage-mismatch", "only object-level types can be lifted",
                                _span(ctx, a), expected="stage 0", actual=f"stage {sa}")
            return C.Lift(ac), VU(1, j), 1
        case S.Quote(a):
            ac, aty, sa = infer(ctx, a)
            if sa != 0:
                raise ElabError("stage-mismatch", "only object-level terms can be quoted",
                                _span(ctx, a), expected="stage 0", actual=f"stage {sa}")
            return C.Quote(ac), VLift(aty), 1
        case S.Splice(a):
            ac, aty, _ = infer(ctx, a)
            if not isinstance(aty, VLift):
                raise ElabError("mismatch", "only lifted terms can be spliced", _span(ctx, a),
                                expected="^A for some A", actual=ctx.show(aty))
            return C.Splice(ac), aty.ty, 0

        case S.Let(x, ann, bound, body):
            ac, bc, aty, sa = _elab_let_binding(ctx, x, ann, bound)
            inner = ctx.define(x, aty, sa, ctx.eval(bc))
            uc, uty, su = infer(inner, body)
            _let_body_stage(ctx, t, sa, su)
            return C.Let(sa, x, ac, bc, uc), uty, su

        case S.Ann(tm, ty):
            ac, sa, _ = check_type(ctx, ty)
            aty = ctx.eval(ac)
            tc = check(ctx, tm, aty, sa)
            if not _inferable(tc):
                tc = C.Let(sa, "x", ac, tc, C.Var(0))
            return tc, aty, sa

        case S.Lam() | S.Pair():
            what = "lambda" if isinstance(t, S.Lam) else "pair"
            raise ElabError("not-inferable",
                            f"cannot infer the type of a {what}; add a type annotation",
                            _span(ctx, t))
    raise ElabError("bad-syntax", f"unsupported term {type(t).__name__}", _span(ctx, t))


def check(ctx: ElabCtx, t: S.Term, expected: Value, stage: int) -> C.Term:
    """Elaborate `t` against `expected`, a type at the given stage."""
    match t:
        case S.Lam(x, body):
            if not isinstance(expected, VPi):
                raise ElabError("mismatch", "lambda checked against a non-function type",
                                _span(ctx, t), expected=ctx.show(expected))
            inner = ctx.bind(x, expected.dom, expected.stage)
            bc = check(inner, body, expected.cl(var(ctx.depth)), expected.stage)
            return C.Lam(expected.stage, x, bc)

        case S.Pair(a, b):
            if not isinstance(expected, VSigma):
                raise ElabError("mismatch", "pair checked against a non-pair type",
                                _span(ctx, t), expected=ctx.show(expected))
            s = expected.stage
            ac = check(ctx, a, expected.dom, s)
            bc = check(ctx, b, expected.cl(ctx.eval(ac)), s)
            return C.Pair(s, ac, bc)

        case S.NatLit(n, lit_stage):
            if isinstance(expected, VNat) and lit_stage in (None, expected.stage):
                return C.numeral(n, expected.stage, expected.level)
            raise ElabError("mismatch", "numeral literal checked against a non-Nat type",
                            _span(ctx, t), expected=ctx.show(expected), actual="Nat")

        case S.Zero(s) | S.Suc(s, _) if isinstance(expected, VNat):
            _same_stage(ctx, t, s, expected)
            j = expected.level
            if isinstance(t, S.Zero):
                return C.Zero(s, j)
            return C.Suc(s, j, check(ctx, t.arg, expected, s))
        case S.BoolLit(s, b) if isinstance(expected, VBool):
            _same_stage(ctx, t, s, expected)
            j = expected.level
            return C.BTrue(s, j) if b else C.BFalse(s, j)
        case S.TT(s) if isinstance(expected, VUnit):
            _same_stage(ctx, t, s, expected)
            return C.TT(s, expected.level)

        case S.Quote(a) if isinstance(expected, VLift):
            return C.Quote(check(ctx, a, expected.ty, 0))
        case S.Splice(a) if stage == 0:
            return C.Splice(check(ctx, a, VLift(expected), 1))

        case S.App(S.Lam(x, body), a):
            ac, inner, sa = _redex_binding(ctx, x, a)
            if sa != stage:
                raise ElabError("mismatch", f"type mismatch (stage {sa} redex)", _span(ctx, t),
                                expected=ctx.show(expected), actual=f"a stage-{sa} term")
            return C.App(sa, C.Lam(sa, x, check(inner, body, expected, stage)), ac)

        case S.Let(x, ann, bound, body):
            ac, bc, aty, sa = _elab_let_binding(ctx, x, ann, bound)
            _let_body_stage(ctx, t, sa, stage)
            inner = ctx.define(x, aty, sa, ctx.eval(bc))
            uc = check(inner, body, expected, stage)
            return C.Let(sa, x, ac, bc, uc)

    tc, ty, st = infer(ctx, t)
    if st != stage or not conv(ctx.depth, ty, expected):
        note = "" if st == stage else f" (stage {st} term where stage {stage} is expected)"
        raise ElabError("mismatch", "type mismatch" + note, _span(ctx, t),
                        expected=ctx.show(expected), actual=ctx.show(ty))
    return tc


def _same_stage(ctx, t, s, expected):
    if s != expected.stage:
        raise ElabError("mismatch", f"type mismatch (stage {s} constant)", _span(ctx, t),
                        expected=ctx.show(expected), actual=f"a stage-{s} term")


def _elab_let_binding(ctx, x, ann, bound):
    if ann is not None:
        ac, sa, _ = check_type(ctx, ann)
        aty = ctx.eval(ac)
        bc = check(ctx, bound, aty, sa)
    else:
        bc, aty, sa = infer(ctx, bound)
        ac = readback(ctx.depth, aty)
    return ac, bc, aty, sa


def _redex_binding(ctx, x, arg):
    ac, aty, sa = infer(ctx, arg)
    return ac, ctx.define(x, aty, sa, ctx.eval(ac)), sa


def _let_body_stage(ctx, t, bound_stage, body_stage):
    if bound_stage == 0 and body_stage != 0:
        raise ElabError("stage-mismatch", "an object-level let must have an object-level body",
                        _span(ctx, t), expected="stage 0", actual=f"stage {body_stage}")


def _lambda_parts(ctx, t, arity: int, what: str):
    names = []
    for _ in range(arity):
        if not isinstance(t, S.Lam):
            raise ElabError("bad-syntax", f"{what} must be written as a {arity}-argument lambda",
                            _span(ctx, t))
        names.append(t.name)
        t = t.body
    return names, t


def _infer_nat_elim(ctx, t, s, motive, z, sc, n):
    if isinstance(n, S.NatLit):
        j = 0
        nc = check(ctx, n, VNat(s, 0), s)
    else:
        nc, nty, _ = infer(ctx, n)
        if not (isinstance(nty, VNat) and nty.stage == s):
            raise ElabError("mismatch", f"NatElim{s} scrutinee must be a Nat{s}", _span(ctx, n),
                            expected=f"Nat{s}", actual=ctx.show(nty))
        j = nty.level
    nat = VNat(s, j)
    (mx,), mbody = _lambda_parts(ctx, motive, 1, "the motive")
    mc, ms, _ = check_type(ctx.bind(mx, nat, s), mbody)
    if ms != s:
        raise ElabError("stage-mismatch", f"NatElim{s} motive must be a stage-{s} type",
                        _span(ctx, motive), expected=f"stage {s}", actual=f"stage {ms}")
    env, d = ctx.env, ctx.depth
    zc = check(ctx, z, eval_term(env + (VZero(s, j),), mc), s)
    (sx, px), sbody = _lambda_parts(ctx, sc, 2, "the successor case")
    sctx = ctx.bind(sx, nat, s)
    sctx = sctx.bind(px, eval_term(sctx.env, mc), s)
    scc = check(sctx, sbody, eval_term(env + (VSuc(s, j, var(d)),), mc), s)
    result = eval_term(env + (ctx.eval(nc),), mc)
    return C.NatElim(s, mc, zc, scc, nc, (mx, sx, px)), result, s


def _infer_bool_elim(ctx, t, s, motive, on_t, on_f, b):
    if isinstance(b, S.BoolLit) and b.stage == s:
        j = 0
        bc = C.BTrue(s, 0) if b.value else C.BFalse(s, 0)
    else:
        bc, bty, _ = infer(ctx, b)
        if not (isinstance(bty, VBool) and bty.stage == s):
            raise ElabError("mismatch", f"BoolElim{s} scrutinee must be a Bool{s}", _span(ctx, b),
                            expected=f"Bool{s}", actual=ctx.show(bty))
        j = bty.level
    (bx,), mbody = _lambda_parts(ctx, motive, 1, "the motive")
    mc, ms, _ = check_type(ctx.bind(bx, VBool(s, j), s), mbody)
    if ms != s:
        raise ElabError("stage-mismatch", f"BoolElim{s} motive must be a stage-{s} type",
                        _span(ctx, motive), expected=f"stage {s}", actual=f"stage {ms}")
    env = ctx.env
    tc = check(ctx, on_t, eval_term(env + (VTrue(s, j),), mc), s)
    fc = check(ctx, on_f, eval_term(env + (VFalse(s, j),), mc), s)
    result = eval_term(env + (ctx.eval(bc),), mc)
    return C.BoolElim(s, mc, tc, fc, bc, (bx,)), result, s


# ---------------------------------------------------------------------------


def elab_program(decls: list[S.Decl], file: str = "<input>") -> CoreProgram:
    ctx = ElabCtx(span=None)
    out = CoreProgram()
    seen: set[str] = set()
    for d in decls:
        ctx = ElabCtx(ctx.names, ctx.types, ctx.stages, ctx.env, d.span)
        if d.name in seen:
            raise ElabError("duplicate", f"duplicate declaration {d.name}", d.span)
        seen.add(d.name)
        tc, s, j = check_type(ctx, d.type)
        ty = ctx.eval(tc)
        if d.body is None:
            if s != 0:
                raise ElabError("stage-mismatch", "only object-level declarations can be assumed",
                                _span(ctx, d.type), expected="stage 0", actual=f"stage {s}")
            out.decls.append(CoreDecl(d.name, tc, None, s, j))
            ctx = ctx.bind(d.name, ty, s)
        else:
            bc = check(ctx, d.body, ty, s)
            out.decls.append(CoreDecl(d.name, tc, bc, s, j))
            ctx = ctx.define(d.name, ty, s, ctx.eval(bc))
    return out


def program_env(prog: CoreProgram) -> tuple:
    """Evaluation environment after all declarations (definitions unfold)."""
    env: tuple = ()
    for i, d in enumerate(prog.decls):
        env = env + ((var(i) if d.body is None else eval_term(env, d.body)),)
    return env


def elaborate_source(source: str, file: str = "<input>") -> CoreProgram:
    return elab_program(S.parse_program(source, file), file)
