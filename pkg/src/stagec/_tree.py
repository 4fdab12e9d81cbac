"""Field bookkeeping shared by the core and object term types.

Term classes are frozen dataclasses.  Fields declared with ``compare=False``
(binder names, spans) are ignored by equality; fields whose values are terms
are walked as children.  Equality is iterative so that long numeral or
application chains do not hit the recursion limit.
"""

from __future__ import annotations

import dataclasses
from functools import lru_cache


class Node:
    """Base for term trees.  Subclasses set ``BINDS`` to {child field: binder count}."""

    BINDS: dict[str, int] = {}
    __slots__ = ()

    def __eq__(self, other):
        return struct_eq(self, other)

    __hash__ = None  # type: ignore[assignment]


@lru_cache(maxsize=None)
def shape(cls) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(data fields, child fields) of a node class, in declaration order."""
    data, kids = [], []
    for f in dataclasses.fields(cls):
        if not f.compare:
            continue
        (kids if _is_node_type(f.type) else data).append(f.name)
    return tuple(data), tuple(kids)


def _is_node_type(annotation) -> bool:
    # annotations are strings under `from __future__ import annotations`
    return isinstance(annotation, str) and annotation in ("Term", "ObjTerm")


def children(t: Node):
    _, kids = shape(type(t))
    return [(k, getattr(t, k)) for k in kids]


def struct_eq(a, b) -> bool:
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y):
            return False
        if not isinstance(x, Node):
            if x != y:
                return False
            continue
        data, kids = shape(type(x))
        for f in data:
            if getattr(x, f) != getattr(y, f):
                return False
        for f in kids:
            stack.append((getattr(x, f), getattr(y, f)))
    return True


def size(t: Node) -> int:
    n = 0
    stack = [t]
    while stack:
        x = stack.pop()
        n += 1
        for _, c in children(x):
            stack.append(c)
    return n
