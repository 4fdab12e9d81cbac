from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    file: str = "<input>"

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"bad span {self.start}..{self.end}")


class StagecError(Exception):
    """Base class of everything the compiler raises on purpose."""


class UserError(StagecError):
    """An error in the input program. Carries a span when one is known."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self, source: bytes | None = None) -> str:
        if self.span is None:
            return self.message
        loc = self.span.file
        if source is not None:
            line, col = line_col(source, self.span.start)
            loc = f"{loc}:{line}:{col}"
        else:
            loc = f"{loc}:@{self.span.start}"
        return f"{loc}: {self.message}"


class LexError(UserError):
    pass


class ParseError(UserError):
    def __init__(self, message: str, span: SourceSpan | None = None, expected=()):
        self.expected = frozenset(expected)
        if self.expected:
            message = f"{message} (expected {', '.join(sorted(self.expected))})"
        super().__init__(message, span)


class InternalError(StagecError):
    """A broken invariant; never caused by a well-typed input."""


class FuelExhausted(StagecError):
    pass


def line_col(source: bytes, offset: int) -> tuple[int, int]:
    before = source[:offset]
    line = before.count(b"\n") + 1
    last_nl = before.rfind(b"\n")
    col = len(before[last_nl + 1:].decode("utf-8", errors="replace")) + 1
    return line, col
