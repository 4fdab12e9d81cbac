"""The object theory: syntax, the embedding into the core, and its own checker.

The checker here deliberately shares nothing with the core's evaluator: values
are higher-order (Python closures), numerals are machine integers on top of a
neutral or zero base, and conversion is implemented separately.  It is used as
an independent judge of staging output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

from . import core as C
from ._tree import Node, children, struct_eq
from .errors import SourceSpan, UserError

node = partial(dataclass, frozen=True, eq=False, slots=True)


class ObjTerm(Node):
    __slots__ = ()


@node
class OVar(ObjTerm):
    ix: int


@node
class OU(ObjTerm):
    level: int


@node
class OPi(ObjTerm):
    name: str = field(compare=False)
    dom: ObjTerm
    cod: ObjTerm
    BINDS = {"cod": 1}


@node
class OLam(ObjTerm):
    name: str = field(compare=False)
    body: ObjTerm
    BINDS = {"body": 1}


@node
class OApp(ObjTerm):
    fn: ObjTerm
    arg: ObjTerm


@node
class OSigma(ObjTerm):
    name: str = field(compare=False)
    fst_ty: ObjTerm
    snd_ty: ObjTerm
    BINDS = {"snd_ty": 1}


@node
class OPair(ObjTerm):
    fst: ObjTerm
    snd: ObjTerm


@node
class OFst(ObjTerm):
    arg: ObjTerm


@node
class OSnd(ObjTerm):
    arg: ObjTerm


@node
class ONat(ObjTerm):
    level: int


@node
class OZero(ObjTerm):
    level: int


@node
class OSuc(ObjTerm):
    level: int
    arg: ObjTerm


@node
class ONatElim(ObjTerm):
    motive: ObjTerm
    zero: ObjTerm
    suc: ObjTerm
    scrut: ObjTerm
    names: tuple = field(default=("n", "n", "pn"), compare=False)
    BINDS = {"motive": 1, "suc": 2}


@node
class OBool(ObjTerm):
    level: int


@node
class OTrue(ObjTerm):
    level: int


@node
class OFalse(ObjTerm):
    level: int


@node
class OBoolElim(ObjTerm):
    motive: ObjTerm
    on_true: ObjTerm
    on_false: ObjTerm
    scrut: ObjTerm
    names: tuple = field(default=("b",), compare=False)
    BINDS = {"motive": 1}


@node
class OUnit(ObjTerm):
    level: int


@node
class OTT(ObjTerm):
    level: int


@node
class OLet(ObjTerm):
    name: str = field(compare=False)
    ann: ObjTerm
    bound: ObjTerm
    body: ObjTerm
    BINDS = {"body": 1}


def obj_eq(a: ObjTerm, b: ObjTerm) -> bool:
    return struct_eq(a, b)


# ---------------------------------------------------------------------------
# Embedding and its partial inverse

# object class -> core class; the core constructors take the stage first
_EMBED = {
    OVar: C.Var, OU: C.U, OPi: C.Pi, OLam: C.Lam, OApp: C.App, OSigma: C.Sigma,
    OPair: C.Pair, OFst: C.Fst, OSnd: C.Snd, ONat: C.Nat, OZero: C.Zero, OSuc: C.Suc,
    ONatElim: C.NatElim, OBool: C.Bool, OTrue: C.BTrue, OFalse: C.BFalse,
    OBoolElim: C.BoolElim, OUnit: C.Unit, OTT: C.TT, OLet: C.Let,
}
_STRIP = {v: k for k, v in _EMBED.items()}


class NotObjectLevel(Exception):
    def __init__(self, what: str):
        super().__init__(what)
        self.what = what


def _fields(cls):
    return [f.name for f in cls.__dataclass_fields__.values()]


def _map_tree(t, convert_node):
    """Post-order rebuild with an explicit stack (numeral chains can be long)."""
    out: list = []
    stack = [(t, False)]
    while stack:
        x, done = stack.pop()
        if not isinstance(x, Node):
            out.append(x)
            continue
        fields = _fields(type(x))
        if done:
            vals = out[len(out) - len(fields):]
            del out[len(out) - len(fields):]
            out.append(convert_node(x, dict(zip(fields, vals))))
        else:
            stack.append((x, True))
            for f in reversed(fields):
                stack.append((getattr(x, f), False))
    return out[0]


def _embed_node(x, args):
    cls = _EMBED[type(x)]
    if cls is C.Var:
        return C.Var(args["ix"])
    return cls(0, *args.values())


def embed(t: ObjTerm) -> C.Term:
    """Structural injection into the core at stage 0."""
    return _map_tree(t, _embed_node)


def _strip_node(x, args):
    cls = _STRIP.get(type(x))
    if cls is None:
        raise NotObjectLevel(type(x).__name__)
    if cls is OVar:
        return OVar(args["ix"])
    if args.pop("stage") != 0:
        raise NotObjectLevel(f"stage-1 {type(x).__name__}")
    return cls(*args.values())


def strip(t: C.Term) -> ObjTerm:
    """Inverse of `embed` on its image; raises NotObjectLevel elsewhere."""
    return _map_tree(t, _strip_node)


def is_object_level(t: C.Term) -> bool:
    try:
        strip(t)
    except NotObjectLevel:
        return False
    return True


def obj_pretty(t: ObjTerm, names=()) -> str:
    return C.pretty(embed(t), names)


def obj_sexp(t: ObjTerm) -> str:
    return C.sexp(t)


def obj_numeral(n: int, level: int = 0) -> ObjTerm:
    t: ObjTerm = OZero(level)
    for _ in range(n):
        t = OSuc(level, t)
    return t


# ---------------------------------------------------------------------------
# Values for the object checker


class OVal:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class VFun(OVal):
    """Lambda: fn is a Python function on values."""
    fn: object


@dataclass(frozen=True, slots=True)
class VPiT(OVal):
    name: str
    dom: OVal
    fn: object
    const: OVal | None = None  # the codomain, when it ignores the bound variable


@dataclass(frozen=True, slots=True)
class VSigmaT(OVal):
    name: str
    dom: OVal
    fn: object
    const: OVal | None = None


@dataclass(frozen=True, slots=True)
class VTuple(OVal):
    fst: OVal
    snd: OVal


@dataclass(frozen=True, slots=True)
class VConst(OVal):
    """Nullary formers: kind in {U, Nat, Bool, Unit, true, false, tt}."""
    kind: str
    level: int


@dataclass(frozen=True, slots=True)
class VNum(OVal):
    """`count` successors on top of `base` (None for zero, else a neutral)."""
    level: int
    count: int
    base: "VStuck | None" = None


@dataclass(frozen=True, slots=True)
class VStuck(OVal):
    head: int  # de Bruijn level
    spine: tuple = ()


def _vvar(level: int) -> VStuck:
    return VStuck(level, ())


def _push(n: VStuck, frame) -> VStuck:
    return VStuck(n.head, n.spine + (frame,))


def _app(f: OVal, a: OVal) -> OVal:
    if isinstance(f, VFun):
        return f.fn(a)
    if isinstance(f, VStuck):
        return _push(f, ("app", a))
    raise ObjTypeError("mismatch", "application of a non-function value")


def _fst(p: OVal) -> OVal:
    if isinstance(p, VTuple):
        return p.fst
    if isinstance(p, VStuck):
        return _push(p, ("fst",))
    raise ObjTypeError("mismatch", "projection from a non-pair value")


def _snd(p: OVal) -> OVal:
    if isinstance(p, VTuple):
        return p.snd
    if isinstance(p, VStuck):
        return _push(p, ("snd",))
    raise ObjTypeError("mismatch", "projection from a non-pair value")


def _natelim(motive, z, s, n: OVal) -> OVal:
    if not isinstance(n, VNum):
        if isinstance(n, VStuck):
            return _push(n, ("natelim", motive, z, s))
        raise ObjTypeError("mismatch", "NatElim on a non-numeral value")
    acc = z if n.base is None else _push(n.base, ("natelim", motive, z, s))
    for i in range(n.count):
        acc = s(VNum(n.level, i, n.base), acc)
    return acc


def _boolelim(motive, t, f, b: OVal) -> OVal:
    if isinstance(b, VConst) and b.kind in ("true", "false"):
        return t if b.kind == "true" else f
    if isinstance(b, VStuck):
        return _push(b, ("boolelim", motive, t, f))
    raise ObjTypeError("mismatch", "BoolElim on a non-boolean value")


def _mentions(t: ObjTerm, ix: int) -> bool:
    stack = [(t, ix)]
    while stack:
        x, i = stack.pop()
        if isinstance(x, OVar):
            if x.ix == i:
                return True
            continue
        binds = type(x).BINDS
        for k, c in children(x):
            stack.append((c, i + binds.get(k, 0)))
    return False


def obj_eval(env: tuple, t: ObjTerm) -> OVal:
    match t:
        case OVar(ix):
            return env[len(env) - 1 - ix]
        case OU(j):
            return VConst("U", j)
        case ONat(j):
            return VConst("Nat", j)
        case OBool(j):
            return VConst("Bool", j)
        case OUnit(j):
            return VConst("Unit", j)
        case OTrue(j):
            return VConst("true", j)
        case OFalse(j):
            return VConst("false", j)
        case OTT(j):
            return VConst("tt", j)
        case OZero(j):
            return VNum(j, 0)
        case OSuc(j, _):
            k = 0
            while isinstance(t, OSuc):
                k += 1
                t = t.arg
            base = obj_eval(env, t)
            if isinstance(base, VNum):
                return VNum(j, base.count + k, base.base)
            if isinstance(base, VStuck):
                return VNum(j, k, base)
            raise ObjTypeError("mismatch", "successor of a non-numeral value")
        case OPi(x, a, b) | OSigma(x, a, b):
            former = VPiT if isinstance(t, OPi) else VSigmaT
            if _mentions(b, 0):
                return former(x, obj_eval(env, a), lambda v: obj_eval(env + (v,), b))
            # evaluate the codomain once, against a dummy for the unused variable
            cod = obj_eval(env + (None,), b)
            return former(x, obj_eval(env, a), lambda _: cod, cod)
        case OLam(_, b):
            return VFun(lambda v: obj_eval(env + (v,), b))
        case OApp(f, a):
            return _app(obj_eval(env, f), obj_eval(env, a))
        case OPair(a, b):
            return VTuple(obj_eval(env, a), obj_eval(env, b))
        case OFst(p):
            return _fst(obj_eval(env, p))
        case OSnd(p):
            return _snd(obj_eval(env, p))
        case ONatElim(m, z, s, n):
            return _natelim(lambda v: obj_eval(env + (v,), m), obj_eval(env, z),
                            lambda p, r: obj_eval(env + (p, r), s), obj_eval(env, n))
        case OBoolElim(m, a, b, n):
            return _boolelim(lambda v: obj_eval(env + (v,), m), obj_eval(env, a),
                             obj_eval(env, b), obj_eval(env, n))
        case OLet(_, _, b, body):
            return obj_eval(env + (obj_eval(env, b),), body)
    raise TypeError(f"not an object term: {t!r}")


_CONST_TERMS = {"U": OU, "Nat": ONat, "Bool": OBool, "Unit": OUnit,
                "true": OTrue, "false": OFalse, "tt": OTT}


def obj_readback(depth: int, v: OVal) -> ObjTerm:
    match v:
        case VConst(kind, j):
            return _CONST_TERMS[kind](j)
        case VNum(j, k, base):
            t = OZero(j) if base is None else obj_readback(depth, base)
            for _ in range(k):
                t = OSuc(j, t)
            return t
        case VFun(fn):
            return OLam("x", obj_readback(depth + 1, fn(_vvar(depth))))
        case VPiT(x, a, fn):
            return OPi(x, obj_readback(depth, a), obj_readback(depth + 1, fn(_vvar(depth))))
        case VSigmaT(x, a, fn):
            return OSigma(x, obj_readback(depth, a), obj_readback(depth + 1, fn(_vvar(depth))))
        case VTuple(a, b):
            return OPair(obj_readback(depth, a), obj_readback(depth, b))
        case VStuck(head, spine):
            t = OVar(depth - head - 1)
            for fr in spine:
                match fr:
                    case ("app", a):
                        t = OApp(t, obj_readback(depth, a))
                    case ("fst",):
                        t = OFst(t)
                    case ("snd",):
                        t = OSnd(t)
                    case ("natelim", m, z, s):
                        x, y = _vvar(depth), _vvar(depth + 1)
                        t = ONatElim(obj_readback(depth + 1, m(x)), obj_readback(depth, z),
                                     obj_readback(depth + 2, s(x, y)), t)
                    case ("boolelim", m, a, b):
                        t = OBoolElim(obj_readback(depth + 1, m(_vvar(depth))),
                                      obj_readback(depth, a), obj_readback(depth, b), t)
            return t
    raise TypeError(f"not an object value: {v!r}")


def obj_conv(depth: int, a: OVal, b: OVal) -> bool:
    """Beta-eta conversion; eta for functions and pairs only."""
    if isinstance(a, VFun) or isinstance(b, VFun):
        x = _vvar(depth)
        return obj_conv(depth + 1, _app(a, x), _app(b, x)) if _funlike(a) and _funlike(b) else False
    if isinstance(a, VTuple) or isinstance(b, VTuple):
        if not (_pairlike(a) and _pairlike(b)):
            return False
        return obj_conv(depth, _fst(a), _fst(b)) and obj_conv(depth, _snd(a), _snd(b))
    match a, b:
        case VConst(k1, j1), VConst(k2, j2):
            return k1 == k2 and j1 == j2
        case VNum(j1, c1, b1), VNum(j2, c2, b2):
            if j1 != j2 or c1 != c2:
                return False
            if b1 is None or b2 is None:
                return b1 is None and b2 is None
            return obj_conv(depth, b1, b2)
        case (VPiT(_, d1, f1), VPiT(_, d2, f2)) | (VSigmaT(_, d1, f1), VSigmaT(_, d2, f2)):
            if type(a) is not type(b) or not obj_conv(depth, d1, d2):
                return False
            x = _vvar(depth)
            return obj_conv(depth + 1, f1(x), f2(x))
        case VStuck(h1, s1), VStuck(h2, s2):
            return h1 == h2 and len(s1) == len(s2) and all(
                _conv_frame(depth, f1, f2) for f1, f2 in zip(s1, s2))
    return False


def _funlike(v):
    return isinstance(v, (VFun, VStuck))


def _pairlike(v):
    return isinstance(v, (VTuple, VStuck))


def _conv_frame(depth, f1, f2) -> bool:
    if f1[0] != f2[0]:
        return False
    match f1[0]:
        case "app":
            return obj_conv(depth, f1[1], f2[1])
        case "fst" | "snd":
            return True
        case "natelim":
            x, y = _vvar(depth), _vvar(depth + 1)
            return (obj_conv(depth + 1, f1[1](x), f2[1](x))
                    and obj_conv(depth, f1[2], f2[2])
                    and obj_conv(depth + 2, f1[3](x, y), f2[3](x, y)))
        case "boolelim":
            x = _vvar(depth)
            return (obj_conv(depth + 1, f1[1](x), f2[1](x))
                    and obj_conv(depth, f1[2], f2[2])
                    and obj_conv(depth, f1[3], f2[3]))
    return False


# ---------------------------------------------------------------------------
# Contexts and the checker


class ObjTypeError(UserError):
    def __init__(self, kind: str, message: str, span: SourceSpan | None = None,
                 expected: str | None = None, actual: str | None = None):
        self.kind, self.expected, self.actual = kind, expected, actual
        if expected is not None:
            message += f"\n  expected: {expected}"
        if actual is not None:
            message += f"\n  actual:   {actual}"
        super().__init__(message, span)


@dataclass(frozen=True)
class ObjEntry:
    name: str
    type: ObjTerm
    value: ObjTerm | None = None  # a definition, or None for a variable


@dataclass(frozen=True)
class ObjCtx:
    entries: tuple = ()

    def __len__(self):
        return len(self.entries)

    def extend(self, name: str, ty: ObjTerm, value: ObjTerm | None = None) -> "ObjCtx":
        return ObjCtx(self.entries + (ObjEntry(name, ty, value),))

    @property
    def names(self) -> tuple:
        return tuple(e.name for e in self.entries)

    @staticmethod
    def of(*pairs) -> "ObjCtx":
        return ObjCtx(tuple(ObjEntry(*p) for p in pairs))


class _Cx:
    """Checker state: names, type values and environment, all by level."""

    __slots__ = ("names", "types", "env")

    def __init__(self, names=(), types=(), env=()):
        self.names, self.types, self.env = names, types, env

    @property
    def depth(self):
        return len(self.env)

    def bind(self, name, ty, value=None):
        v = _vvar(self.depth) if value is None else value
        return _Cx(self.names + (name,), self.types + (ty,), self.env + (v,))

    def show(self, v: OVal) -> str:
        return obj_pretty(obj_readback(self.depth, v), self.names)


def _load(ctx: ObjCtx) -> _Cx:
    cx = _Cx()
    for e in ctx.entries:
        _check_type(cx, e.type)
        ty = obj_eval(cx.env, e.type)
        if e.value is None:
            cx = cx.bind(e.name, ty)
        else:
            _check(cx, e.value, ty)
            cx = cx.bind(e.name, ty, obj_eval(cx.env, e.value))
    return cx


def _check_type(cx: _Cx, t: ObjTerm) -> int:
    ty = _infer(cx, t)
    if not (isinstance(ty, VConst) and ty.kind == "U"):
        raise ObjTypeError("universe-error", "expected a type", actual=cx.show(ty))
    return ty.level


def _want(cx, got: OVal, kind: type, what: str) -> None:
    if not isinstance(got, kind):
        raise ObjTypeError("mismatch", what, actual=cx.show(got))


def _infer(cx: _Cx, t: ObjTerm) -> OVal:
    match t:
        case OVar(ix):
            if not 0 <= ix < cx.depth:
                raise ObjTypeError("unbound", f"unbound variable #{ix}")
            return cx.types[cx.depth - ix - 1]
        case OU(j):
            return VConst("U", j + 1)
        case ONat(j) | OBool(j) | OUnit(j):
            return VConst("U", j)
        case OZero(j):
            return VConst("Nat", j)
        case OSuc(j, _):
            while isinstance(t, OSuc):
                if t.level != j:
                    raise ObjTypeError("mismatch", "successor chain mixes levels")
                t = t.arg
            _check(cx, t, VConst("Nat", j))
            return VConst("Nat", j)
        case OTrue(j) | OFalse(j):
            return VConst("Bool", j)
        case OTT(j):
            return VConst("Unit", j)
        case OPi(x, a, b) | OSigma(x, a, b):
            ja = _check_type(cx, a)
            jb = _check_type(cx.bind(x, obj_eval(cx.env, a)), b)
            return VConst("U", max(ja, jb))
        case OApp(OLam(x, body), a):
            # redexes appear in staged code; typed like `let x = a in body`
            aty = _infer(cx, a)
            return _infer(cx.bind(x, aty, obj_eval(cx.env, a)), body)
        case OPair(a, b):
            aty, bty = _infer(cx, a), _infer(cx, b)
            return VSigmaT("_", aty, lambda _: bty, bty)
        case OApp(f, a):
            fty = _infer(cx, f)
            _want(cx, fty, VPiT, "applying a term that is not a function")
            _check(cx, a, fty.dom)
            if fty.const is not None:
                return fty.const
            return fty.fn(obj_eval(cx.env, a))
        case OFst(p) | OSnd(p):
            pty = _infer(cx, p)
            _want(cx, pty, VSigmaT, "projection from a term that is not a pair")
            if isinstance(t, OFst):
                return pty.dom
            if pty.const is not None:
                return pty.const
            return pty.fn(_fst(obj_eval(cx.env, p)))
        case ONatElim(m, z, s, n):
            nty = _infer(cx, n)
            if not (isinstance(nty, VConst) and nty.kind == "Nat"):
                raise ObjTypeError("mismatch", "NatElim scrutinee must be a Nat",
                                   actual=cx.show(nty))
            j = nty.level
            _check_type(cx.bind("n", nty), m)
            env, d = cx.env, cx.depth
            motive = lambda v: obj_eval(env + (v,), m)  # noqa: E731
            _check(cx, z, motive(VNum(j, 0)))
            c2 = cx.bind("n", nty).bind("pn", motive(_vvar(d)))
            _check(c2, s, motive(VNum(j, 1, _vvar(d))))
            return motive(obj_eval(env, n))
        case OBoolElim(m, a, b, n):
            nty = _infer(cx, n)
            if not (isinstance(nty, VConst) and nty.kind == "Bool"):
                raise ObjTypeError("mismatch", "BoolElim scrutinee must be a Bool",
                                   actual=cx.show(nty))
            j = nty.level
            _check_type(cx.bind("b", nty), m)
            env = cx.env
            motive = lambda v: obj_eval(env + (v,), m)  # noqa: E731
            _check(cx, a, motive(VConst("true", j)))
            _check(cx, b, motive(VConst("false", j)))
            return motive(obj_eval(env, n))
        case OLet(x, a, b, body):
            _check_type(cx, a)
            aty = obj_eval(cx.env, a)
            _check(cx, b, aty)
            return _infer(cx.bind(x, aty, obj_eval(cx.env, b)), body)
        case OLam():
            raise ObjTypeError("not-inferable", "cannot infer the type of a lambda")
    raise ObjTypeError("mismatch", f"not an object term: {type(t).__name__}")


def _check(cx: _Cx, t: ObjTerm, ty: OVal) -> None:
    match t:
        case OLam(x, body):
            _want(cx, ty, VPiT, "lambda checked against a non-function type")
            _check(cx.bind(x, ty.dom), body, ty.fn(_vvar(cx.depth)))
            return
        case OPair(a, b):
            _want(cx, ty, VSigmaT, "pair checked against a non-pair type")
            _check(cx, a, ty.dom)
            _check(cx, b, ty.fn(obj_eval(cx.env, a)))
            return
        case OLet(x, a, b, body):
            _check_type(cx, a)
            aty = obj_eval(cx.env, a)
            _check(cx, b, aty)
            _check(cx.bind(x, aty, obj_eval(cx.env, b)), body, ty)
            return
        case OApp(OLam(x, body), a):
            aty = _infer(cx, a)
            _check(cx.bind(x, aty, obj_eval(cx.env, a)), body, ty)
            return
    got = _infer(cx, t)
    if not obj_conv(cx.depth, got, ty):
        raise ObjTypeError("mismatch", "type mismatch", expected=cx.show(ty), actual=cx.show(got))


def obj_infer(ctx: ObjCtx, t: ObjTerm) -> ObjTerm:
    cx = _load(ctx)
    return obj_readback(cx.depth, _infer(cx, t))


def obj_check(ctx: ObjCtx, t: ObjTerm, ty: ObjTerm) -> None:
    cx = _load(ctx)
    _check_type(cx, ty)
    _check(cx, t, obj_eval(cx.env, ty))


def obj_check_type(ctx: ObjCtx, ty: ObjTerm) -> int:
    """Check that `ty` is a type; returns its universe level."""
    return _check_type(_load(ctx), ty)


def obj_check_program(ctx: ObjCtx) -> None:
    """Check every entry of a context (declared types and definitions)."""
    _load(ctx)
