"""Lexer, surface AST and parser for `.2ltt` source files.

The grammar, from loosest to tightest binding::

    term   ::= '\\' binder+ '.' term
             | 'let' ident [':' term] '=' term 'in' term
             | arrow
    arrow  ::= sigma ['->' arrow]          -- (x : A) -> B when sigma is a telescope
    sigma  ::= app ['*' sigma]             -- (x : A) * B likewise
    app    ::= head prefix*
    prefix ::= '~' prefix | '^' prefix | atom

so ``~f x`` reads as ``(~f) x`` and both arrows and products nest to the right.
See docs/grammar.md for the full token list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import LexError, ParseError, SourceSpan

KEYWORDS = frozenset(
    """def assume let in fst snd
    U0 U1 Nat0 Nat1 zero0 zero1 suc0 suc1 NatElim0 NatElim1
    Bool0 Bool1 true0 true1 false0 false1 BoolElim0 BoolElim1
    Top0 Top1 tt0 tt1""".split()
)

SYMBOLS = ("->", "(", ")", ":", "=", ";", ",", ".", "\\", "*", "^", "~", "<", ">")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | integer-literal | symbol (the parser adds eof)
    lexeme: str
    span: SourceSpan


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split `source` into tokens; spans are UTF-8 byte offsets."""
    toks: list[Token] = []
    i = 0
    b = 0  # byte offset of source[i]
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, b
        b += len(source[i:i + k].encode("utf-8"))
        i += k

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if source.startswith("--", i):
            j = source.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if source.startswith("{-", i):
            start_b = b
            depth = 0
            while True:
                if i >= n:
                    raise LexError("unterminated block comment", SourceSpan(start_b, b, file))
                if source.startswith("{-", i):
                    depth += 1
                    advance(2)
                elif source.startswith("-}", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            continue
        start_b = b
        m = _IDENT.match(source, i)
        if m:
            text = m.group()
            advance(len(text))
            kind = "keyword" if text in KEYWORDS else "identifier"
            toks.append(Token(kind, text, SourceSpan(start_b, b, file)))
            continue
        m = _INT.match(source, i)
        if m:
            text = m.group()
            advance(len(text))
            toks.append(Token("integer-literal", text, SourceSpan(start_b, b, file)))
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                advance(len(sym))
                toks.append(Token("symbol", sym, SourceSpan(start_b, b, file)))
                break
        else:
            width = len(c.encode("utf-8"))
            raise LexError(f"illegal character {c!r}", SourceSpan(start_b, start_b + width, file))
    return toks


# ---------------------------------------------------------------------------
# Surface syntax.  Spans never take part in equality.


@dataclass(frozen=True)
class Term:
    span: SourceSpan | None = field(default=None, kw_only=True, compare=False, repr=False)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Univ(Term):
    stage: int
    level: int = 0


@dataclass(frozen=True)
class Pi(Term):
    name: str
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Lam(Term):
    name: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Sigma(Term):
    name: str
    fst_ty: Term
    snd_ty: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    arg: Term


@dataclass(frozen=True)
class Snd(Term):
    arg: Term


@dataclass(frozen=True)
class Nat(Term):
    stage: int
    level: int = 0


@dataclass(frozen=True)
class Zero(Term):
    stage: int


@dataclass(frozen=True)
class Suc(Term):
    stage: int
    arg: Term


@dataclass(frozen=True)
class NatLit(Term):
    value: int
    stage: int | None = None


@dataclass(frozen=True)
class NatElim(Term):
    stage: int
    motive: Term
    zero: Term
    suc: Term
    scrut: Term


@dataclass(frozen=True)
class Bool(Term):
    stage: int
    level: int = 0


@dataclass(frozen=True)
class BoolLit(Term):
    stage: int
    value: bool


@dataclass(frozen=True)
class BoolElim(Term):
    stage: int
    motive: Term
    on_true: Term
    on_false: Term
    scrut: Term


@dataclass(frozen=True)
class Unit(Term):
    stage: int
    level: int = 0


@dataclass(frozen=True)
class TT(Term):
    stage: int


@dataclass(frozen=True)
class Lift(Term):
    ty: Term


@dataclass(frozen=True)
class Quote(Term):
    tm: Term


@dataclass(frozen=True)
class Splice(Term):
    tm: Term


@dataclass(frozen=True)
class Let(Term):
    name: str
    ann: Term | None
    bound: Term
    body: Term


@dataclass(frozen=True)
class Ann(Term):
    tm: Term
    ty: Term


@dataclass(frozen=True)
class Decl:
    name: str
    type: Term
    body: Term | None  # None for `assume`
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Parser

_TYPE_CONSTS = {"U": Univ, "Nat": Nat, "Bool": Bool, "Top": Unit}
_ELIM_ARITY = {"NatElim": 4, "BoolElim": 4}


def _split_stage(word: str) -> tuple[str, int]:
    return word[:-1], int(word[-1])


def _cover(a: SourceSpan | None, b: SourceSpan | None) -> SourceSpan | None:
    if a is None or b is None:
        return a or b
    return SourceSpan(a.start, b.end, a.file)


class _Parser:
    def __init__(self, toks: list[Token]):
        end = toks[-1].span if toks else SourceSpan(0, 0)
        self.toks = [*toks, Token("eof", "", SourceSpan(end.end, end.end, end.file))]
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def at(self, lexeme: str) -> bool:
        t = self.tok
        return t.kind in ("symbol", "keyword") and t.lexeme == lexeme

    def bump(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, expected) -> ParseError:
        t = self.tok
        shown = "end of input" if t.kind == "eof" else repr(t.lexeme)
        return ParseError(f"unexpected {shown}", t.span, expected)

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            raise self.fail([repr(lexeme)])
        return self.bump()

    def ident(self) -> Token:
        if self.tok.kind != "identifier":
            raise self.fail(["identifier"])
        return self.bump()

    # -- declarations

    def program(self) -> list[Decl]:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.decl())
        return decls

    def decl(self) -> Decl:
        if self.at("def"):
            start = self.bump().span
            name = self.ident().lexeme
            self.expect(":")
            ty = self.term()
            self.expect("=")
            body = self.term()
            end = self.expect(";").span
            return Decl(name, ty, body, _cover(start, end))
        if self.at("assume"):
            start = self.bump().span
            name = self.ident().lexeme
            self.expect(":")
            ty = self.term()
            end = self.expect(";").span
            return Decl(name, ty, None, _cover(start, end))
        raise self.fail(["'def'", "'assume'"])

    # -- terms

    def term(self) -> Term:
        if self.at("\\"):
            start = self.bump().span
            names = []
            while self.tok.kind == "identifier":
                names.append(self.bump().lexeme)
            if not names:
                raise self.fail(["identifier"])
            self.expect(".")
            body = self.term()
            span = _cover(start, body.span)
            for x in reversed(names):
                body = Lam(x, body, span=span)
            return body
        if self.at("let"):
            start = self.bump().span
            name = self.ident().lexeme
            ann = None
            if self.at(":"):
                self.bump()
                ann = self.term()
            self.expect("=")
            bound = self.term()
            self.expect("in")
            body = self.term()
            return Let(name, ann, bound, body, span=_cover(start, body.span))
        return self.arrow()

    def arrow(self) -> Term:
        left = self.sigma()
        if not self.at("->"):
            return left
        self.bump()
        right = self.arrow()
        span = _cover(left.span, right.span)
        tele = _telescope(left)
        if tele is None:
            return Pi("_", left, right, span=span)
        for x, a in reversed(tele):
            right = Pi(x, a, right, span=span)
        return right

    def sigma(self) -> Term:
        left = self.app()
        if not self.at("*"):
            return left
        self.bump()
        right = self.sigma()
        span = _cover(left.span, right.span)
        tele = _telescope(left)
        if tele is None:
            return Sigma("_", left, right, span=span)
        for x, a in reversed(tele):
            right = Sigma(x, a, right, span=span)
        return right

    def app(self) -> Term:
        head = self.head()
        while self._starts_prefix():
            arg = self.prefix()
            head = App(head, arg, span=_cover(head.span, arg.span))
        return head

    def _starts_prefix(self) -> bool:
        t = self.tok
        if t.kind in ("identifier", "integer-literal"):
            return True
        if t.kind == "keyword":
            return _is_atom_keyword(t.lexeme)
        return t.kind == "symbol" and t.lexeme in ("(", "<", "~", "^")

    def head(self) -> Term:
        t = self.tok
        if t.kind != "keyword":
            return self.prefix()
        word = t.lexeme
        if _is_atom_keyword(word) and word[:-1] not in _TYPE_CONSTS:
            return self.prefix()
        start = self.bump().span
        if word in ("fst", "snd"):
            arg = self.prefix()
            cls = Fst if word == "fst" else Snd
            return cls(arg, span=_cover(start, arg.span))
        base, stage = _split_stage(word)
        if base in _TYPE_CONSTS:
            level = 0
            end = start
            if self.tok.kind == "integer-literal":
                tok = self.bump()
                level, end = int(tok.lexeme), tok.span
            return _TYPE_CONSTS[base](stage, level, span=_cover(start, end))
        if base == "suc":
            arg = self.prefix()
            return Suc(stage, arg, span=_cover(start, arg.span))
        if base in _ELIM_ARITY:
            args = [self.prefix() for _ in range(_ELIM_ARITY[base])]
            cls = NatElim if base == "NatElim" else BoolElim
            return cls(stage, *args, span=_cover(start, args[-1].span))
        raise ParseError(f"keyword {word!r} cannot start a term", start)

    def prefix(self) -> Term:
        if self.at("~"):
            start = self.bump().span
            inner = self.prefix()
            return Splice(inner, span=_cover(start, inner.span))
        if self.at("^"):
            start = self.bump().span
            inner = self.prefix()
            return Lift(inner, span=_cover(start, inner.span))
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "identifier":
            self.bump()
            return Var(t.lexeme, span=t.span)
        if t.kind == "integer-literal":
            self.bump()
            return NatLit(int(t.lexeme), span=t.span)
        if t.kind == "keyword" and _is_atom_keyword(t.lexeme):
            self.bump()
            base, stage = _split_stage(t.lexeme)
            if base in _TYPE_CONSTS:
                return _TYPE_CONSTS[base](stage, 0, span=t.span)
            if base == "zero":
                return Zero(stage, span=t.span)
            if base in ("true", "false"):
                return BoolLit(stage, base == "true", span=t.span)
            return TT(stage, span=t.span)
        if self.at("<"):
            start = self.bump().span
            inner = self.term()
            end = self.expect(">").span
            return Quote(inner, span=_cover(start, end))
        if self.at("("):
            start = self.bump().span
            first = self.term()
            if self.at(":"):
                self.bump()
                ty = self.term()
                end = self.expect(")").span
                return Ann(first, ty, span=_cover(start, end))
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.bump()
                    items.append(self.term())
                end = self.expect(")").span
                span = _cover(start, end)
                out = items[-1]
                for item in reversed(items[:-1]):
                    out = Pair(item, out, span=span)
                return out
            self.expect(")")
            return first
        raise self.fail(["term"])


def _is_atom_keyword(word: str) -> bool:
    if word in ("fst", "snd") or word[-1] not in "01":
        return False
    base = word[:-1]
    return base in _TYPE_CONSTS or base in ("zero", "true", "false", "tt")


def _binder_names(t: Term) -> list[str] | None:
    if isinstance(t, Var):
        return [t.name]
    if isinstance(t, App):
        left = _binder_names(t.fn)
        right = _binder_names(t.arg)
        if left is not None and right is not None and len(right) == 1:
            return left + right
    return None


def _telescope(t: Term) -> list[tuple[str, Term]] | None:
    """Read `(x y : A) (z : B)` back as binder groups, or None."""
    if isinstance(t, Ann):
        names = _binder_names(t.tm)
        if names is None:
            return None
        return [(x, t.ty) for x in names]
    if isinstance(t, App) and isinstance(t.arg, Ann):
        left = _telescope(t.fn)
        right = _telescope(t.arg)
        if left is not None and right is not None:
            return left + right
    return None


def parse(tokens: list[Token]) -> list[Decl]:
    # Duplicate names are left to the elaborator, which reports them with a span.
    return _Parser(tokens).program()


def parse_term(source: str, file: str = "<input>") -> Term:
    p = _Parser(tokenize(source, file))
    t = p.term()
    if p.tok.kind != "eof":
        raise p.fail(["end of input"])
    return t


def parse_program(source: str, file: str = "<input>") -> list[Decl]:
    return parse(tokenize(source, file))
