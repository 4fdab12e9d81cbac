"""Small builders shared by the test modules."""

from pathlib import Path

from stagec import core as C
from stagec import objlang as O
from stagec.deep import run_deep
from stagec.elaborator import elaborate_source, program_env
from stagec.nbe import eval_term
from stagec.stager import stage_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.2ltt").read_text(encoding="utf-8")


def elab(src: str):
    return run_deep(elaborate_source, src)


def values(src: str) -> tuple[dict, int]:
    """Elaborate `src` and return each declaration's value by name, plus the depth."""
    prog = elab(src)
    env = program_env(prog)
    return {d.name: env[i] for i, d in enumerate(prog.decls)}, len(env)


def staged(src: str):
    """Stage a source program and return {name: (type, body)} of its object output."""
    sp = run_deep(lambda: stage_program(elaborate_source(src)))
    return {e.name: (e.type, e.value) for e in sp.decls}, sp


def staged_main(src: str) -> str:
    out, sp = staged(src)
    for i, e in enumerate(sp.decls):
        if e.name == "main":
            return O.obj_pretty(e.value, sp.ctx.names[:i])
    raise KeyError("main")


# core builders at stage 0
def nat0():
    return C.Nat(0, 0)


def bool0():
    return C.Bool(0, 0)


def arrow(a, b, stage=0):
    return C.Pi(stage, "_", a, b)


def v(ix):
    return C.Var(ix)


def ev(t, env=()):
    return eval_term(tuple(env), t)
