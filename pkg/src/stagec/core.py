"""The elaborated core calculus.

Terms use de Bruijn indices (``Var(0)`` is the innermost binder) and carry
their stage (0 = object, 1 = meta) on every former, so later passes can
dispatch without recomputing it.  Universes are Russell-style and not
cumulative.  Binder names are kept only for printing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

from ._tree import Node, children, shape, struct_eq

node = partial(dataclass, frozen=True, eq=False, slots=True)


class Term(Node):
    __slots__ = ()


@node
class Var(Term):
    ix: int


@node
class U(Term):
    stage: int
    level: int


@node
class Pi(Term):
    stage: int
    name: str = field(compare=False)
    dom: Term
    cod: Term
    BINDS = {"cod": 1}


@node
class Lam(Term):
    stage: int
    name: str = field(compare=False)
    body: Term
    BINDS = {"body": 1}


@node
class App(Term):
    stage: int
    fn: Term
    arg: Term


@node
class Sigma(Term):
    stage: int
    name: str = field(compare=False)
    fst_ty: Term
    snd_ty: Term
    BINDS = {"snd_ty": 1}


@node
class Pair(Term):
    stage: int
    fst: Term
    snd: Term


@node
class Fst(Term):
    stage: int
    arg: Term


@node
class Snd(Term):
    stage: int
    arg: Term


@node
class Nat(Term):
    stage: int
    level: int


@node
class Zero(Term):
    stage: int
    level: int


@node
class Suc(Term):
    stage: int
    level: int
    arg: Term


@node
class NatElim(Term):
    """Motive binds n; the successor case binds n then the induction hypothesis."""

    stage: int
    motive: Term
    zero: Term
    suc: Term
    scrut: Term
    names: tuple = field(default=("n", "n", "pn"), compare=False)
    BINDS = {"motive": 1, "suc": 2}


@node
class Bool(Term):
    stage: int
    level: int


@node
class BTrue(Term):
    stage: int
    level: int


@node
class BFalse(Term):
    stage: int
    level: int


@node
class BoolElim(Term):
    stage: int
    motive: Term
    on_true: Term
    on_false: Term
    scrut: Term
    names: tuple = field(default=("b",), compare=False)
    BINDS = {"motive": 1}


@node
class Unit(Term):
    stage: int
    level: int


@node
class TT(Term):
    stage: int
    level: int


@node
class Lift(Term):
    ty: Term


@node
class Quote(Term):
    tm: Term


@node
class Splice(Term):
    tm: Term


@node
class Let(Term):
    """`stage` is the stage of the bound variable.  A stage-0 let has a stage-0 body."""

    stage: int
    name: str = field(compare=False)
    ann: Term
    bound: Term
    body: Term
    BINDS = {"body": 1}


def term_eq(a: Term, b: Term) -> bool:
    """Node-for-node equality; with de Bruijn indices this is alpha-equivalence."""
    return struct_eq(a, b)


def numeral(n: int, stage: int, level: int = 0) -> Term:
    t: Term = Zero(stage, level)
    for _ in range(n):
        t = Suc(stage, level, t)
    return t


def as_numeral(t: Term) -> int | None:
    k = 0
    while isinstance(t, Suc):
        k += 1
        t = t.arg
    return k if isinstance(t, Zero) else None


def rebuild(t: Term, f, depth: int = 0) -> Term:
    """Apply `f(child, depth)` to every child, with depth counting binders crossed."""
    kids = children(t)
    if not kids:
        return t
    binds = type(t).BINDS
    updates = {k: f(c, depth + binds.get(k, 0)) for k, c in kids}
    return _replace(t, updates)


def _replace(t, updates):
    cls = type(t)
    args = {n: getattr(t, n) for n in cls.__dataclass_fields__}
    args.update(updates)
    return cls(**args)


def shift(t: Term, cutoff: int, amount: int) -> Term:
    """Add `amount` to every free index >= `cutoff`."""
    if isinstance(t, Var):
        return Var(t.ix + amount) if t.ix >= cutoff else t
    if isinstance(t, Suc):  # long numerals
        k = 0
        while isinstance(t, Suc):
            k += 1
            top_stage, top_level = t.stage, t.level
            t = t.arg
        base = shift(t, cutoff, amount)
        return _wrap_suc(base, k, top_stage, top_level)
    return rebuild(t, lambda c, d: shift(c, cutoff + d, amount))


def _wrap_suc(base: Term, k: int, stage: int, level: int) -> Term:
    for _ in range(k):
        base = Suc(stage, level, base)
    return base


def occurs(t: Term, ix: int) -> bool:
    stack = [(t, ix)]
    while stack:
        x, i = stack.pop()
        if isinstance(x, Var):
            if x.ix == i:
                return True
            continue
        binds = type(x).BINDS
        for k, c in children(x):
            stack.append((c, i + binds.get(k, 0)))
    return False


def free_vars_below(t: Term, n: int) -> bool:
    """True iff every free index of `t` is < n (well-scoped under n binders)."""
    stack = [(t, 0)]
    while stack:
        x, d = stack.pop()
        if isinstance(x, Var):
            if x.ix < 0 or x.ix >= d + n:
                return False
            continue
        binds = type(x).BINDS
        for k, c in children(x):
            stack.append((c, d + binds.get(k, 0)))
    return True


# ---------------------------------------------------------------------------
# Stage discipline


def stage_scan(t: Term, var_stages: list[int]) -> int:
    """Return the stage of `t`, raising ValueError where a former mixes stages."""

    def want(sub, stages, s, what):
        got = stage_scan(sub, stages)
        if got != s:
            raise ValueError(f"{what}: expected stage {s}, found {got}")

    match t:
        case Var(ix):
            return var_stages[len(var_stages) - 1 - ix]
        case U(s, _) | Nat(s, _) | Bool(s, _) | Unit(s, _) | Zero(s, _) | BTrue(s, _) | BFalse(s, _) | TT(s, _):
            return s
        case Suc(s, _, _):
            while isinstance(t, Suc):
                if t.stage != s:
                    raise ValueError("suc chain mixes stages")
                t = t.arg
            want(t, var_stages, s, "suc")
            return s
        case Pi(s, _, a, b) | Sigma(s, _, a, b):
            want(a, var_stages, s, "domain")
            want(b, var_stages + [s], s, "codomain")
            return s
        case Lam(s, _, b):
            want(b, var_stages + [s], s, "lambda body")
            return s
        case App(s, f, a) | Pair(s, f, a):
            want(f, var_stages, s, type(t).__name__)
            want(a, var_stages, s, type(t).__name__)
            return s
        case Fst(s, a) | Snd(s, a):
            want(a, var_stages, s, "projection")
            return s
        case NatElim(s, m, z, sc, n):
            want(m, var_stages + [s], s, "motive")
            want(z, var_stages, s, "zero case")
            want(sc, var_stages + [s, s], s, "suc case")
            want(n, var_stages, s, "scrutinee")
            return s
        case BoolElim(s, m, a, b, n):
            want(m, var_stages + [s], s, "motive")
            for sub in (a, b, n):
                want(sub, var_stages, s, "bool eliminator")
            return s
        case Lift(a):
            want(a, var_stages, 0, "lift")
            return 1
        case Quote(a):
            want(a, var_stages, 0, "quote")
            return 1
        case Splice(a):
            want(a, var_stages, 1, "splice")
            return 0
        case Let(s, _, a, b, body):
            want(a, var_stages, s, "let annotation")
            want(b, var_stages, s, "let bound")
            out = stage_scan(body, var_stages + [s])
            if s == 0 and out != 0:
                raise ValueError("object-level let with a meta-level body")
            return out
    raise TypeError(f"not a core term: {t!r}")


# ---------------------------------------------------------------------------
# Pretty printing.  Output is surface syntax that re-elaborates to the same
# core term; the printer therefore tracks whether each position is checked
# against a known type (numeral literals are only legal there).

P_TERM, P_ARROW, P_SIGMA, P_APP, P_PREFIX, P_ATOM = range(6)
INF, CHK, LIT0 = 0, 1, 2  # infer position / check position / literal only at level 0


def fresh_name(name: str, names) -> str:
    if name == "_":
        name = "x"
    if name not in names:
        return name
    base = name.rstrip("'0123456789") or "x"
    i = 1
    while f"{base}{i}" in names:
        i += 1
    return f"{base}{i}"


class _Printer:
    def go(self, t: Term, names: list[str], prec: int, mode: int) -> str:
        text, p = self.show(t, names, mode)
        return f"({text})" if p < prec else text

    def binder(self, name: str, body: Term, names: list[str], used_ix: int = 0) -> str:
        if not occurs(body, used_ix) and name == "_":
            return "_"
        return fresh_name(name, names)

    def show(self, t: Term, names: list[str], mode: int) -> tuple[str, int]:
        go = self.go
        match t:
            case Var(ix):
                if 0 <= ix < len(names):
                    return names[len(names) - 1 - ix], P_ATOM
                return f"#{ix}", P_ATOM
            case U(s, j) | Nat(s, j) | Bool(s, j) | Unit(s, j):
                word = {U: "U", Nat: "Nat", Bool: "Bool", Unit: "Top"}[type(t)]
                return (f"{word}{s}", P_ATOM) if j == 0 else (f"{word}{s} {j}", P_APP)
            case Zero(s, j) | Suc(s, j, _):
                k = as_numeral(t)
                if k is not None and (mode == CHK or mode == LIT0 and j == 0):
                    return str(k), P_ATOM
                if isinstance(t, Zero):
                    return self.constant(f"zero{s}", f"Nat{s}", j)
                arg_mode = CHK if mode == CHK else LIT0 if j == 0 else INF
                return f"suc{s} {go(t.arg, names, P_PREFIX, arg_mode)}", P_APP
            case BTrue(s, j) | BFalse(s, j):
                word = "true" if isinstance(t, BTrue) else "false"
                if mode == CHK:
                    return f"{word}{s}", P_ATOM
                return self.constant(f"{word}{s}", f"Bool{s}", j)
            case TT(s, j):
                if mode == CHK:
                    return f"tt{s}", P_ATOM
                return self.constant(f"tt{s}", f"Top{s}", j)
            case Pi(_, x, a, b):
                if not occurs(b, 0):
                    dom = go(a, names, P_SIGMA, INF)
                    return f"{dom} -> {go(b, names + ['_'], P_ARROW, INF)}", P_ARROW
                x = fresh_name(x, names)
                dom = go(a, names, P_TERM, INF)
                return f"({x} : {dom}) -> {go(b, names + [x], P_ARROW, INF)}", P_ARROW
            case Sigma(_, x, a, b):
                if not occurs(b, 0):
                    left = go(a, names, P_APP, INF)
                    return f"{left} * {go(b, names + ['_'], P_APP, INF)}", P_SIGMA
                x = fresh_name(x, names)
                dom = go(a, names, P_TERM, INF)
                return f"({x} : {dom}) * {go(b, names + [x], P_APP, INF)}", P_SIGMA
            case Lam():
                binders = []
                inner = names
                while isinstance(t, Lam):
                    x = self.binder(t.name, t.body, inner)
                    binders.append(x)
                    inner = inner + [x]
                    t = t.body
                return f"\\{' '.join(binders)}. {go(t, inner, P_TERM, mode)}", P_TERM
            case App():
                spine = []
                while isinstance(t, App):
                    spine.append(t.arg)
                    t = t.fn
                head = go(t, names, P_APP, INF)
                args = " ".join(go(a, names, P_PREFIX, CHK) for a in reversed(spine))
                return f"{head} {args}", P_APP
            case Pair(_, a, b):
                return f"({go(a, names, P_TERM, CHK)}, {go(b, names, P_TERM, CHK)})", P_ATOM
            case Fst(_, a):
                return f"fst {go(a, names, P_PREFIX, INF)}", P_APP
            case Snd(_, a):
                return f"snd {go(a, names, P_PREFIX, INF)}", P_APP
            case NatElim(s, m, z, sc, n):
                mx, sx, px = t.names
                mx = self.binder(mx, m, names)
                motive = f"(\\{mx}. {go(m, names + [mx], P_TERM, INF)})"
                sx = self.binder(sx, sc, names, 1)
                px = self.binder(px, sc, names + [sx])
                step = f"(\\{sx} {px}. {go(sc, names + [sx, px], P_TERM, CHK)})"
                zero = go(z, names, P_PREFIX, CHK)
                return f"NatElim{s} {motive} {zero} {step} {go(n, names, P_PREFIX, LIT0)}", P_APP
            case BoolElim(s, m, a, b, n):
                (bx,) = t.names
                bx = self.binder(bx, m, names)
                motive = f"(\\{bx}. {go(m, names + [bx], P_TERM, INF)})"
                on_t = go(a, names, P_PREFIX, CHK)
                on_f = go(b, names, P_PREFIX, CHK)
                return f"BoolElim{s} {motive} {on_t} {on_f} {go(n, names, P_PREFIX, INF)}", P_APP
            case Lift(a):
                return f"^{go(a, names, P_PREFIX, INF)}", P_PREFIX
            case Quote(a):
                return f"<{go(a, names, P_TERM, CHK if mode == CHK else INF)}>", P_ATOM
            case Splice(a):
                return f"~{go(a, names, P_PREFIX, INF)}", P_PREFIX
            case Let(_, x, a, b, body):
                x = fresh_name(x, names)
                ann = go(a, names, P_TERM, INF)
                bound = go(b, names, P_TERM, CHK)
                return f"let {x} : {ann} = {bound} in {go(body, names + [x], P_TERM, mode)}", P_TERM
        raise TypeError(f"not a core term: {t!r}")

    def constant(self, word: str, ty: str, level: int) -> tuple[str, int]:
        if level == 0:
            return word, P_ATOM
        return f"({word} : {ty} {level})", P_ATOM


def pretty(t: Term, names=(), mode: int = CHK) -> str:
    """Render `t` as surface syntax; `names` has one entry per enclosing binder."""
    return _Printer().go(t, list(names), P_TERM, mode)


# ---------------------------------------------------------------------------
# S-expressions for golden dumps


def sexp(t) -> str:
    parts = [type(t).__name__]
    for f in t.__dataclass_fields__.values():
        v = getattr(t, f.name)
        parts.append(_atom(v))
    return f"({' '.join(parts)})"


def _atom(v) -> str:
    if isinstance(v, Node):
        return sexp(v)
    if isinstance(v, tuple):
        return f"({' '.join(_atom(x) for x in v)})"
    if isinstance(v, bool):
        return "#t" if v else "#f"
    return str(v)


__all__ = [
    "Term", "Var", "U", "Pi", "Lam", "App", "Sigma", "Pair", "Fst", "Snd", "Nat", "Zero",
    "Suc", "NatElim", "Bool", "BTrue", "BFalse", "BoolElim", "Unit", "TT", "Lift", "Quote",
    "Splice", "Let", "term_eq", "numeral", "as_numeral", "shift", "occurs", "stage_scan",
    "pretty", "sexp", "fresh_name", "shape",
]
