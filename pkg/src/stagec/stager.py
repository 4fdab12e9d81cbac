"""Staging by evaluation.

Stage-1 code is run in an environment machine; stage-0 formers are rebuilt
one-for-one as object syntax.  While staging, object variables are numbered
by de Bruijn *levels*, so environments are never weakened and free variables
of quoted code stay valid under further object binders.  Quoted code records
the depth it was built at; only when it is spliced deeper are its own
binders renumbered.  A final pass turns levels into indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import core as C
from . import objlang as O
from .errors import InternalError
from .nbe import VLam, VPair, VQuote, VSuc, VTT, VFalse, VTrue, VZero, tick


@dataclass(frozen=True, slots=True)
class ObjVar:
    """Environment entry for a stage-0 variable: its object-level de Bruijn level."""
    level: int


@dataclass(frozen=True, slots=True)
class Sem:
    value: object


@dataclass(frozen=True, slots=True)
class Obj:
    term: O.ObjTerm


StagedOut = Obj | Sem


@dataclass(frozen=True, slots=True)
class _Lvl(O.ObjTerm):
    # object variable by level; only lives between evaluation and emission
    level: int


@dataclass(frozen=True, slots=True)
class _Code:
    # Object code and the depth it was built at.  Levels >= depth inside it
    # belong to binders within the code itself.
    term: O.ObjTerm
    depth: int


@dataclass(frozen=True, slots=True)
class _Closure:
    env: tuple
    body: C.Term


class _MetaType:
    """Value of every stage-1 type; types are never inspected while staging."""

    __slots__ = ()

    def __repr__(self):
        return "<meta type>"


META_TYPE = _MetaType()


def generic_env(ctx: O.ObjCtx) -> tuple:
    return tuple(ObjVar(k) for k in range(len(ctx)))


# ---------------------------------------------------------------------------


def _stuck(what: str, v) -> InternalError:
    return InternalError(f"staging got stuck at {what} on {type(v).__name__}; "
                         "meta-level computation did not reach a canonical form")


def _call(cl: _Closure, depth: int, *args):
    return _ev(cl.env + args, depth, cl.body)


def _ev(env: tuple, depth: int, t: C.Term):
    tick()
    match t:
        case C.Var(ix):
            e = env[len(env) - 1 - ix]
            return _Lvl(e.level) if isinstance(e, ObjVar) else e
        case C.Let(s, x, a, b, body):
            if s == 1:
                return _ev(env + (_ev(env, depth, b),), depth, body)
            return O.OLet(x, _ev(env, depth, a), _ev(env, depth, b),
                          _ev(env + (ObjVar(depth),), depth + 1, body))
        case C.Quote(a):
            return VQuote(_Code(_ev(env, depth, a), depth))
        case C.Splice(a):
            v = _ev(env, depth, a)
            if not isinstance(v, VQuote):
                raise _stuck("a splice", v)
            return _place(v.val, depth)
        case C.Lift(_):
            return META_TYPE
    if t.stage == 0:
        return _ev0(env, depth, t)
    return _ev1(env, depth, t)


def _ev0(env: tuple, depth: int, t: C.Term) -> O.ObjTerm:
    """Rebuild a stage-0 former node-for-node."""
    under = env + (ObjVar(depth),)
    match t:
        case C.U(_, j):
            return O.OU(j)
        case C.Nat(_, j):
            return O.ONat(j)
        case C.Bool(_, j):
            return O.OBool(j)
        case C.Unit(_, j):
            return O.OUnit(j)
        case C.Zero(_, j):
            return O.OZero(j)
        case C.BTrue(_, j):
            return O.OTrue(j)
        case C.BFalse(_, j):
            return O.OFalse(j)
        case C.TT(_, j):
            return O.OTT(j)
        case C.Suc():
            levels = []
            while isinstance(t, C.Suc) and t.stage == 0:
                levels.append(t.level)
                t = t.arg
            out = _ev(env, depth, t)
            for j in reversed(levels):
                out = O.OSuc(j, out)
            return out
        case C.Pi(_, x, a, b):
            return O.OPi(x, _ev(env, depth, a), _ev(under, depth + 1, b))
        case C.Sigma(_, x, a, b):
            return O.OSigma(x, _ev(env, depth, a), _ev(under, depth + 1, b))
        case C.Lam(_, x, b):
            return O.OLam(x, _ev(under, depth + 1, b))
        case C.App(_, f, a):
            return O.OApp(_ev(env, depth, f), _ev(env, depth, a))
        case C.Pair(_, a, b):
            return O.OPair(_ev(env, depth, a), _ev(env, depth, b))
        case C.Fst(_, p):
            return O.OFst(_ev(env, depth, p))
        case C.Snd(_, p):
            return O.OSnd(_ev(env, depth, p))
        case C.NatElim(_, m, z, s, n):
            under2 = under + (ObjVar(depth + 1),)
            return O.ONatElim(_ev(under, depth + 1, m), _ev(env, depth, z),
                              _ev(under2, depth + 2, s), _ev(env, depth, n), t.names)
        case C.BoolElim(_, m, a, b, n):
            return O.OBoolElim(_ev(under, depth + 1, m), _ev(env, depth, a),
                               _ev(env, depth, b), _ev(env, depth, n), t.names)
    raise InternalError(f"staging: unexpected stage-0 node {type(t).__name__}")


def _ev1(env: tuple, depth: int, t: C.Term):
    """Run a stage-1 former."""
    match t:
        case C.U() | C.Nat() | C.Bool() | C.Unit() | C.Pi() | C.Sigma():
            return META_TYPE
        case C.Lam(s, x, b):
            return VLam(s, x, _Closure(env, b))
        case C.App(_, f, a):
            fv = _ev(env, depth, f)
            if not isinstance(fv, VLam):
                raise _stuck("an application", fv)
            return _call(fv.cl, depth, _ev(env, depth, a))
        case C.Pair(s, a, b):
            return VPair(s, _ev(env, depth, a), _ev(env, depth, b))
        case C.Fst(_, p) | C.Snd(_, p):
            pv = _ev(env, depth, p)
            if not isinstance(pv, VPair):
                raise _stuck("a projection", pv)
            return pv.fst if isinstance(t, C.Fst) else pv.snd
        case C.Zero(s, j):
            return VZero(s, j)
        case C.Suc(s, j, _):
            k = 0
            while isinstance(t, C.Suc):
                k += 1
                t = t.arg
            v = _ev(env, depth, t)
            for _ in range(k):
                v = VSuc(s, j, v)
            return v
        case C.BTrue(s, j):
            return VTrue(s, j)
        case C.BFalse(s, j):
            return VFalse(s, j)
        case C.TT(s, j):
            return VTT(s, j)
        case C.NatElim(_, _, z, s, n):
            nv = _ev(env, depth, n)
            preds = []
            while isinstance(nv, VSuc):
                nv = nv.pred
                preds.append(nv)
            if not isinstance(nv, VZero):
                raise _stuck("NatElim", nv)
            acc = _ev(env, depth, z)
            step = _Closure(env, s)
            for p in reversed(preds):
                acc = _call(step, depth, p, acc)
            return acc
        case C.BoolElim(_, _, a, b, n):
            bv = _ev(env, depth, n)
            if isinstance(bv, VTrue):
                return _ev(env, depth, a)
            if isinstance(bv, VFalse):
                return _ev(env, depth, b)
            raise _stuck("BoolElim", bv)
    raise InternalError(f"staging: unexpected stage-1 node {type(t).__name__}")


def _place(code: _Code, depth: int) -> O.ObjTerm:
    """Move code built at `code.depth` under the binders up to `depth`."""
    if code.depth == depth:
        return code.term
    if code.depth > depth:
        raise InternalError("object code used outside the scope it was built in")
    base, k = code.depth, depth - code.depth
    return _map_obj(code.term, lambda lv: _Lvl(lv.level + k) if lv.level >= base else lv)


def _map_obj(t: O.ObjTerm, on_var) -> O.ObjTerm:
    """Rebuild `t` bottom-up, replacing each level variable by `on_var(var)`."""
    out: list = []
    stack = [(t, False)]
    while stack:
        x, done = stack.pop()
        if isinstance(x, _Lvl):
            out.append(on_var(x))
            continue
        if not isinstance(x, O.ObjTerm):
            out.append(x)
            continue
        names = list(type(x).__dataclass_fields__)
        if done:
            vals = out[len(out) - len(names):]
            del out[len(out) - len(names):]
            out.append(type(x)(*vals))
            continue
        stack.append((x, True))
        for n in reversed(names):
            stack.append((getattr(x, n), False))
    return out[0]


def _to_indices(t: O.ObjTerm, depth: int) -> O.ObjTerm:
    """Replace level variables by indices, given the depth `t` lives at."""
    out: list = []
    stack = [(t, depth, False)]
    while stack:
        x, d, done = stack.pop()
        if isinstance(x, _Lvl):
            if not 0 <= x.level < d:
                raise InternalError(f"object variable level {x.level} escapes depth {d}")
            out.append(O.OVar(d - x.level - 1))
            continue
        if not isinstance(x, O.ObjTerm):
            out.append(x)
            continue
        names = list(type(x).__dataclass_fields__)
        if done:
            vals = out[len(out) - len(names):]
            del out[len(out) - len(names):]
            out.append(type(x)(*vals))
            continue
        stack.append((x, d, True))
        binds = type(x).BINDS
        for n in reversed(names):
            stack.append((getattr(x, n), d + binds.get(n, 0), False))
    return out[0]


def _emit(v, depth: int) -> O.ObjTerm:
    if not isinstance(v, O.ObjTerm):
        raise InternalError(f"staging produced a meta-level value ({type(v).__name__}) "
                            "where object code was expected")
    return _to_indices(v, depth)


def seval(env: tuple, depth: int, t: C.Term) -> StagedOut:
    v = _ev(tuple(env), depth, t)
    if isinstance(v, O.ObjTerm):
        return Obj(_to_indices(v, depth))
    return Sem(v)


def stage_term(ctx: O.ObjCtx, t: C.Term) -> O.ObjTerm:
    """Stage a stage-0 term over a purely object-level context."""
    return _emit(_ev(generic_env(ctx), len(ctx), t), len(ctx))


stage_type = stage_term


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageSkip:
    name: str
    reason: str = "meta-level declaration computed away"


@dataclass
class StagedProgram:
    ctx: O.ObjCtx = field(default_factory=O.ObjCtx)
    skipped: list[StageSkip] = field(default_factory=list)

    @property
    def decls(self) -> tuple:
        return self.ctx.entries

    def lookup(self, name: str):
        for i, e in enumerate(self.ctx.entries):
            if e.name == name:
                return i, e
        return None


def stage_program(prog) -> StagedProgram:
    env: tuple = ()
    depth = 0
    out = StagedProgram()
    for d in prog.decls:
        if d.stage == 1:
            if d.body is None:
                raise InternalError(f"meta-level assumption {d.name} cannot be staged")
            env += (_ev(env, depth, d.body),)
            out.skipped.append(StageSkip(d.name))
            continue
        ty = _emit(_ev(env, depth, d.type), depth)
        body = None if d.body is None else _emit(_ev(env, depth, d.body), depth)
        out.ctx = out.ctx.extend(d.name, ty, body)
        env += (ObjVar(depth),)
        depth += 1
    return out
