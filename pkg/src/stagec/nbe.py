"""Normalization by evaluation for the full two-level core.

Values use de Bruijn *levels* for variables, so moving a value under a binder
costs nothing.  Closures are defunctionalized (environment + body).  Numerals
are unary ``VSuc`` chains; every pass over them is iterative.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass

from .core import (
    TT, App, BFalse, Bool, BoolElim, BTrue, Fst, Lam, Let, Lift, Nat, NatElim, Pair, Pi,
    Quote, Sigma, Snd, Splice, Suc, Term, U, Unit, Var, Zero,
)
from .errors import FuelExhausted, InternalError

val = dataclass(frozen=True, slots=True)

Env = tuple  # of Value, outermost first


# -- fuel -------------------------------------------------------------------

_fuel: ContextVar[list | None] = ContextVar("stagec_fuel", default=None)


@contextmanager
def fuel(steps: int | None):
    """Bound the number of evaluation steps in this context (None = unlimited)."""
    token = _fuel.set(None if steps is None else [steps])
    try:
        yield
    finally:
        _fuel.reset(token)


def fuel_from_env(default: int | None) -> int | None:
    raw = os.environ.get("STAGEC_FUEL")
    if raw is None or raw.strip() == "":
        return default
    n = int(raw)
    return None if n <= 0 else n


def tick() -> None:
    f = _fuel.get()
    if f is not None:
        f[0] -= 1
        if f[0] < 0:
            raise FuelExhausted("evaluation fuel exhausted")


# -- values -----------------------------------------------------------------


class Value:
    __slots__ = ()


@val
class Closure:
    env: Env
    body: Term

    def __call__(self, *args: Value) -> Value:
        return eval_term(self.env + args, self.body)


@val
class VLam(Value):
    stage: int
    name: str
    cl: Closure


@val
class VPi(Value):
    stage: int
    name: str
    dom: Value
    cl: Closure


@val
class VSigma(Value):
    stage: int
    name: str
    dom: Value
    cl: Closure


@val
class VPair(Value):
    stage: int
    fst: Value
    snd: Value


@val
class VU(Value):
    stage: int
    level: int


@val
class VNat(Value):
    stage: int
    level: int


@val
class VZero(Value):
    stage: int
    level: int


@val
class VSuc(Value):
    stage: int
    level: int
    pred: Value


@val
class VBool(Value):
    stage: int
    level: int


@val
class VTrue(Value):
    stage: int
    level: int


@val
class VFalse(Value):
    stage: int
    level: int


@val
class VUnit(Value):
    stage: int
    level: int


@val
class VTT(Value):
    stage: int
    level: int


@val
class VLift(Value):
    ty: Value


@val
class VQuote(Value):
    val: Value


@val
class VNe(Value):
    head: int  # de Bruijn level
    spine: tuple = ()


# spine entries


@val
class EApp:
    stage: int
    arg: Value


@val
class EFst:
    stage: int


@val
class ESnd:
    stage: int


@val
class ENatElim:
    stage: int
    motive: Closure
    zero: Value
    suc: Closure
    names: tuple = ("n", "n", "pn")


@val
class EBoolElim:
    stage: int
    motive: Closure
    on_true: Value
    on_false: Value
    names: tuple = ("b",)


@val
class ESplice:
    pass


def var(level: int) -> VNe:
    return VNe(level, ())


# -- evaluation -------------------------------------------------------------


def eval_term(env: Env, t: Term) -> Value:
    tick()
    match t:
        case Var(ix):
            return env[len(env) - 1 - ix]
        case App(s, f, a):
            return apply(eval_term(env, f), eval_term(env, a), s)
        case Lam(s, x, b):
            return VLam(s, x, Closure(env, b))
        case Pi(s, x, a, b):
            return VPi(s, x, eval_term(env, a), Closure(env, b))
        case Sigma(s, x, a, b):
            return VSigma(s, x, eval_term(env, a), Closure(env, b))
        case Pair(s, a, b):
            return VPair(s, eval_term(env, a), eval_term(env, b))
        case Fst(s, a):
            return vfst(eval_term(env, a), s)
        case Snd(s, a):
            return vsnd(eval_term(env, a), s)
        case U(s, j):
            return VU(s, j)
        case Nat(s, j):
            return VNat(s, j)
        case Zero(s, j):
            return VZero(s, j)
        case Suc(s, j, _):
            k = 0
            while isinstance(t, Suc):
                k += 1
                t = t.arg
            v = eval_term(env, t)
            for _ in range(k):
                v = VSuc(s, j, v)
            return v
        case NatElim(s, m, z, sc, n):
            return nat_elim(s, Closure(env, m), eval_term(env, z), Closure(env, sc),
                            eval_term(env, n), t.names)
        case Bool(s, j):
            return VBool(s, j)
        case BTrue(s, j):
            return VTrue(s, j)
        case BFalse(s, j):
            return VFalse(s, j)
        case BoolElim(s, m, a, b, n):
            return bool_elim(s, Closure(env, m), eval_term(env, a), eval_term(env, b),
                             eval_term(env, n), t.names)
        case Unit(s, j):
            return VUnit(s, j)
        case TT(s, j):
            return VTT(s, j)
        case Lift(a):
            return VLift(eval_term(env, a))
        case Quote(a):
            return vquote(eval_term(env, a))
        case Splice(a):
            return vsplice(eval_term(env, a))
        case Let(_, _, _, b, body):
            return eval_term(env + (eval_term(env, b),), body)
    raise InternalError(f"eval: not a core term: {t!r}")


def apply(f: Value, a: Value, stage: int | None = None) -> Value:
    if isinstance(f, VLam):
        return f.cl(a)
    if isinstance(f, VNe):
        if stage is None:
            raise InternalError("application of a neutral with unknown stage")
        return VNe(f.head, f.spine + (EApp(stage, a),))
    raise InternalError(f"apply: not a function: {type(f).__name__}")


def vfst(v: Value, stage: int) -> Value:
    if isinstance(v, VPair):
        return v.fst
    if isinstance(v, VNe):
        return VNe(v.head, v.spine + (EFst(stage),))
    raise InternalError(f"fst: not a pair: {type(v).__name__}")


def vsnd(v: Value, stage: int) -> Value:
    if isinstance(v, VPair):
        return v.snd
    if isinstance(v, VNe):
        return VNe(v.head, v.spine + (ESnd(stage),))
    raise InternalError(f"snd: not a pair: {type(v).__name__}")


def nat_elim(stage, motive, zero, suc, n, names=("n", "n", "pn")) -> Value:
    preds = []
    while isinstance(n, VSuc):
        n = n.pred
        preds.append(n)
    if isinstance(n, VZero):
        acc = zero
    elif isinstance(n, VNe):
        acc = VNe(n.head, n.spine + (ENatElim(stage, motive, zero, suc, names),))
    else:
        raise InternalError(f"NatElim on {type(n).__name__}")
    for p in reversed(preds):
        acc = suc(p, acc)
    return acc


def bool_elim(stage, motive, on_true, on_false, b, names=("b",)) -> Value:
    if isinstance(b, VTrue):
        return on_true
    if isinstance(b, VFalse):
        return on_false
    if isinstance(b, VNe):
        return VNe(b.head, b.spine + (EBoolElim(stage, motive, on_true, on_false, names),))
    raise InternalError(f"BoolElim on {type(b).__name__}")


def vquote(v: Value) -> Value:
    # <~x> = x
    if isinstance(v, VNe) and v.spine and isinstance(v.spine[-1], ESplice):
        return VNe(v.head, v.spine[:-1])
    return VQuote(v)


def vsplice(v: Value) -> Value:
    # ~<t> = t
    if isinstance(v, VQuote):
        return v.val
    if isinstance(v, VNe):
        return VNe(v.head, v.spine + (ESplice(),))
    raise InternalError(f"splice of {type(v).__name__}")


# -- readback ---------------------------------------------------------------


def readback(depth: int, v: Value) -> Term:
    match v:
        case VNe(head, spine):
            return _readback_spine(depth, Var(depth - head - 1), spine)
        case VLam(s, x, cl):
            return Lam(s, x, readback(depth + 1, cl(var(depth))))
        case VPi(s, x, a, cl):
            return Pi(s, x, readback(depth, a), readback(depth + 1, cl(var(depth))))
        case VSigma(s, x, a, cl):
            return Sigma(s, x, readback(depth, a), readback(depth + 1, cl(var(depth))))
        case VPair(s, a, b):
            return Pair(s, readback(depth, a), readback(depth, b))
        case VU(s, j):
            return U(s, j)
        case VNat(s, j):
            return Nat(s, j)
        case VZero(s, j):
            return Zero(s, j)
        case VSuc():
            layers = []
            while isinstance(v, VSuc):
                layers.append((v.stage, v.level))
                v = v.pred
            t = readback(depth, v)
            for s, j in reversed(layers):
                t = Suc(s, j, t)
            return t
        case VBool(s, j):
            return Bool(s, j)
        case VTrue(s, j):
            return BTrue(s, j)
        case VFalse(s, j):
            return BFalse(s, j)
        case VUnit(s, j):
            return Unit(s, j)
        case VTT(s, j):
            return TT(s, j)
        case VLift(a):
            return Lift(readback(depth, a))
        case VQuote(a):
            t = readback(depth, a)
            return t.tm if isinstance(t, Splice) else Quote(t)
    raise InternalError(f"readback: not a value: {v!r}")


def _readback_spine(depth: int, t: Term, spine: tuple) -> Term:
    for e in spine:
        match e:
            case EApp(s, a):
                t = App(s, t, readback(depth, a))
            case EFst(s):
                t = Fst(s, t)
            case ESnd(s):
                t = Snd(s, t)
            case ENatElim(s, m, z, sc, names):
                n, pn = var(depth), var(depth + 1)
                t = NatElim(s, readback(depth + 1, m(n)), readback(depth, z),
                            readback(depth + 2, sc(n, pn)), t, names)
            case EBoolElim(s, m, a, b, names):
                t = BoolElim(s, readback(depth + 1, m(var(depth))), readback(depth, a),
                             readback(depth, b), t, names)
            case ESplice():
                t = Splice(t)
            case _:
                raise InternalError(f"readback: bad spine entry {e!r}")
    return t


def nf(depth: int, env: Env, t: Term) -> Term:
    return readback(depth, eval_term(tuple(env), t))


# -- conversion -------------------------------------------------------------


def conv(depth: int, a: Value, b: Value) -> bool:
    """Definitional equality: beta, eta for functions and pairs, quote/splice."""
    if a is b:
        return True
    # eta for functions
    if isinstance(a, VLam) or isinstance(b, VLam):
        if not isinstance(a, VLam):
            a, b = b, a
        x = var(depth)
        if isinstance(b, VLam):
            return conv(depth + 1, a.cl(x), b.cl(x))
        if isinstance(b, VNe):
            return conv(depth + 1, a.cl(x), apply(b, x, a.stage))
        return False
    # eta for pairs
    if isinstance(a, VPair) or isinstance(b, VPair):
        if not isinstance(a, VPair):
            a, b = b, a
        if not isinstance(b, (VPair, VNe)):
            return False
        return (conv(depth, a.fst, vfst(b, a.stage))
                and conv(depth, a.snd, vsnd(b, a.stage)))
    # <t> = u  iff  t = ~u
    if isinstance(a, VQuote) or isinstance(b, VQuote):
        if not isinstance(a, VQuote):
            a, b = b, a
        if isinstance(b, VQuote):
            return conv(depth, a.val, b.val)
        if isinstance(b, VNe):
            return conv(depth, a.val, vsplice(b))
        return False
    if type(a) is not type(b):
        return False
    match a:
        case VNe(head, spine):
            return head == b.head and len(spine) == len(b.spine) and all(
                _conv_elim(depth, e1, e2) for e1, e2 in zip(spine, b.spine))
        case VSuc():
            while isinstance(a, VSuc) and isinstance(b, VSuc):
                if (a.stage, a.level) != (b.stage, b.level):
                    return False
                a, b = a.pred, b.pred
            return conv(depth, a, b)
        case VPi() | VSigma():
            x = var(depth)
            return (a.stage == b.stage and conv(depth, a.dom, b.dom)
                    and conv(depth + 1, a.cl(x), b.cl(x)))
        case VLift(t):
            return conv(depth, t, b.ty)
        case VU() | VNat() | VZero() | VBool() | VTrue() | VFalse() | VUnit() | VTT():
            return a.stage == b.stage and a.level == b.level
    raise InternalError(f"conv: unexpected value {a!r}")


def _conv_elim(depth: int, e1, e2) -> bool:
    if type(e1) is not type(e2):
        return False
    match e1:
        case EApp(s, a):
            return s == e2.stage and conv(depth, a, e2.arg)
        case EFst(s) | ESnd(s):
            return s == e2.stage
        case ESplice():
            return True
        case ENatElim(s, m, z, sc, _):
            n, pn = var(depth), var(depth + 1)
            return (s == e2.stage
                    and conv(depth + 1, m(n), e2.motive(n))
                    and conv(depth, z, e2.zero)
                    and conv(depth + 2, sc(n, pn), e2.suc(n, pn)))
        case EBoolElim(s, m, a, b, _):
            return (s == e2.stage
                    and conv(depth + 1, m(var(depth)), e2.motive(var(depth)))
                    and conv(depth, a, e2.on_true)
                    and conv(depth, b, e2.on_false))
    return False
