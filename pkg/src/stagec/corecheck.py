"""A standalone type checker for elaborated core terms.

Every core node carries its stage and level, so checking needs no surface
information.  Used to validate elaborator output; a failure here is a bug.
"""

from __future__ import annotations

from . import core as C
from .errors import InternalError
from .nbe import (
    VU, VBool, VFalse, VLift, VNat, VPi, VSigma, VSuc, VTrue, VUnit, VZero, Value, conv,
    eval_term, readback, var, vfst,
)


class CoreCheckError(InternalError):
    pass


class _Ctx:
    __slots__ = ("types", "stages", "env")

    def __init__(self, types=(), stages=(), env=()):
        self.types, self.stages, self.env = types, stages, env

    @property
    def depth(self):
        return len(self.env)

    def bind(self, ty, stage, value=None):
        v = var(self.depth) if value is None else value
        return _Ctx(self.types + (ty,), self.stages + (stage,), self.env + (v,))


def _fail(ctx, what, ty=None):
    extra = "" if ty is None else f": {C.sexp(readback(ctx.depth, ty))}"
    raise CoreCheckError(f"core check failed: {what}{extra}")


def _type_of_type(ctx, t):
    ty, s = infer(ctx, t)
    if not isinstance(ty, VU):
        _fail(ctx, "expected a type", ty)
    return ty.stage, ty.level


def infer(ctx: _Ctx, t: C.Term) -> tuple[Value, int]:
    match t:
        case C.Var(ix):
            if ix >= ctx.depth:
                _fail(ctx, f"index {ix} out of scope")
            lvl = ctx.depth - ix - 1
            return ctx.types[lvl], ctx.stages[lvl]
        case C.U(s, j):
            return VU(s, j + 1), s
        case C.Nat(s, j):
            return VU(s, j), s
        case C.Bool(s, j):
            return VU(s, j), s
        case C.Unit(s, j):
            return VU(s, j), s
        case C.Zero(s, j):
            return VNat(s, j), s
        case C.Suc(s, j, _):
            # iterative over numeral chains
            while isinstance(t, C.Suc):
                if (t.stage, t.level) != (s, j):
                    _fail(ctx, "inconsistent numeral")
                t = t.arg
            check(ctx, t, VNat(s, j), s)
            return VNat(s, j), s
        case C.BTrue(s, j) | C.BFalse(s, j):
            return VBool(s, j), s
        case C.TT(s, j):
            return VUnit(s, j), s
        case C.Pi(s, _, a, b) | C.Sigma(s, _, a, b):
            sa, ja = _type_of_type(ctx, a)
            sb, jb = _type_of_type(ctx.bind(eval_term(ctx.env, a), sa), b)
            if not sa == sb == s:
                _fail(ctx, "stage mismatch in type former")
            return VU(s, max(ja, jb)), s
        case C.App(s, C.Lam(_, _, body), a):
            aty, sa = infer(ctx, a)
            if sa != s:
                _fail(ctx, "redex stage")
            return infer(ctx.bind(aty, s, eval_term(ctx.env, a)), body)
        case C.App(s, f, a):
            fty, fs = infer(ctx, f)
            if not isinstance(fty, VPi) or fty.stage != s or fs != s:
                _fail(ctx, "bad application", fty)
            check(ctx, a, fty.dom, s)
            return fty.cl(eval_term(ctx.env, a)), s
        case C.Fst(s, p) | C.Snd(s, p):
            pty, ps = infer(ctx, p)
            if not isinstance(pty, VSigma) or pty.stage != s:
                _fail(ctx, "bad projection", pty)
            if isinstance(t, C.Fst):
                return pty.dom, s
            return pty.cl(vfst(eval_term(ctx.env, p), s)), s
        case C.NatElim(s, m, z, sc, n):
            nty, _ = infer(ctx, n)
            if not isinstance(nty, VNat) or nty.stage != s:
                _fail(ctx, "NatElim scrutinee", nty)
            j = nty.level
            ms, _ = _type_of_type(ctx.bind(nty, s), m)
            if ms != s:
                _fail(ctx, "NatElim motive stage")
            env, d = ctx.env, ctx.depth
            check(ctx, z, eval_term(env + (VZero(s, j),), m), s)
            c1 = ctx.bind(nty, s)
            c2 = c1.bind(eval_term(c1.env, m), s)
            check(c2, sc, eval_term(env + (VSuc(s, j, var(d)),), m), s)
            return eval_term(env + (eval_term(env, n),), m), s
        case C.BoolElim(s, m, a, b, n):
            nty, _ = infer(ctx, n)
            if not isinstance(nty, VBool) or nty.stage != s:
                _fail(ctx, "BoolElim scrutinee", nty)
            j = nty.level
            ms, _ = _type_of_type(ctx.bind(nty, s), m)
            if ms != s:
                _fail(ctx, "BoolElim motive stage")
            env = ctx.env
            check(ctx, a, eval_term(env + (VTrue(s, j),), m), s)
            check(ctx, b, eval_term(env + (VFalse(s, j),), m), s)
            return eval_term(env + (eval_term(env, n),), m), s
        case C.Lift(a):
            sa, j = _type_of_type(ctx, a)
            if sa != 0:
                _fail(ctx, "lift of a non-object type")
            return VU(1, j), 1
        case C.Quote(a):
            aty, sa = infer(ctx, a)
            if sa != 0:
                _fail(ctx, "quote of a non-object term")
            return VLift(aty), 1
        case C.Splice(a):
            aty, sa = infer(ctx, a)
            if not isinstance(aty, VLift) or sa != 1:
                _fail(ctx, "splice of a non-lifted term", aty)
            return aty.ty, 0
        case C.Let(s, _, a, b, body):
            sa, _ = _type_of_type(ctx, a)
            if sa != s:
                _fail(ctx, "let annotation stage")
            aty = eval_term(ctx.env, a)
            check(ctx, b, aty, s)
            rty, rs = infer(ctx.bind(aty, s, eval_term(ctx.env, b)), body)
            if s == 0 and rs != 0:
                _fail(ctx, "object let with meta body")
            return rty, rs
    _fail(ctx, f"cannot infer {type(t).__name__}")


def check(ctx: _Ctx, t: C.Term, ty: Value, stage: int) -> None:
    match t:
        case C.Lam(s, _, body):
            if not isinstance(ty, VPi) or ty.stage != s:
                _fail(ctx, "lambda against non-function type", ty)
            check(ctx.bind(ty.dom, s), body, ty.cl(var(ctx.depth)), s)
            return
        case C.Pair(s, a, b):
            if not isinstance(ty, VSigma) or ty.stage != s:
                _fail(ctx, "pair against non-pair type", ty)
            check(ctx, a, ty.dom, s)
            check(ctx, b, ty.cl(eval_term(ctx.env, a)), s)
            return
        case C.Quote(a) if isinstance(ty, VLift):
            check(ctx, a, ty.ty, 0)
            return
        case C.Splice(a) if stage == 0:
            check(ctx, a, VLift(ty), 1)
            return
        case C.Let(s, _, a, b, body):
            sa, _ = _type_of_type(ctx, a)
            aty = eval_term(ctx.env, a)
            if sa != s or (s == 0 and stage != 0):
                _fail(ctx, "let stage")
            check(ctx, b, aty, s)
            check(ctx.bind(aty, s, eval_term(ctx.env, b)), body, ty, stage)
            return
        case C.App(s, C.Lam(_, _, body), a):
            # a redex, as produced by staging: typed like a let
            aty, sa = infer(ctx, a)
            if sa != s:
                _fail(ctx, "redex stage")
            check(ctx.bind(aty, s, eval_term(ctx.env, a)), body, ty, stage)
            return
    got, s = infer(ctx, t)
    if s != stage or not conv(ctx.depth, got, ty):
        _fail(ctx, f"type mismatch at {type(t).__name__}", got)


def recheck_program(prog) -> None:
    """Re-check every declaration of an elaborated program."""
    ctx = _Ctx()
    for d in prog.decls:
        s, _ = _type_of_type(ctx, d.type)
        if s != d.stage:
            _fail(ctx, f"declaration {d.name}: stage")
        ty = eval_term(ctx.env, d.type)
        if d.body is None:
            ctx = ctx.bind(ty, s)
        else:
            check(ctx, d.body, ty, s)
            ctx = ctx.bind(ty, s, eval_term(ctx.env, d.body))


def recheck_term(types, stages, env, t: C.Term, ty: Value, stage: int) -> None:
    check(_Ctx(tuple(types), tuple(stages), tuple(env)), t, ty, stage)
