"""Command-line driver: parse, elaborate, stage, verify.

Exit codes: 0 on success, 1 for errors in the input program, 2 for internal
errors (including evaluation fuel running out).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import core as C
from .corecheck import recheck_program
from .deep import run_deep
from .elaborator import CoreProgram, elab_program, program_env
from .errors import FuelExhausted, StagecError, UserError
from .nbe import fuel, fuel_from_env, nf
from .objlang import ObjTypeError, obj_check_program, obj_pretty, obj_sexp
from .stager import StagedProgram, stage_program
from .surface import parse_program

VERBS = ("check", "stage", "nf", "dump-core", "dump-obj")


@dataclass(frozen=True)
class Command:
    verb: str
    path: str
    verify: bool = False
    main: str | None = None
    out: str | None = None


@dataclass
class Result:
    code: int
    stdout: str = ""
    stderr: str = ""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stagec", description="Two-level type theory staging compiler.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("path", metavar="FILE")
    p.add_argument("--verify", action="store_true",
                   help="re-check the staged program with the object-level checker")
    p.add_argument("--main", metavar="NAME", help="only emit the named declaration")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    return p


def _print_program(sp: StagedProgram, main: str | None) -> list[str]:
    lines = []
    names: tuple = ()
    for e in sp.decls:
        if main is None:
            ty = obj_pretty(e.type, names)
            if e.value is None:
                lines.append(f"assume {e.name} : {ty};")
            else:
                lines.append(f"def {e.name} : {ty} = {obj_pretty(e.value, names)};")
        elif e.name == main:
            lines.append(obj_pretty(e.value if e.value is not None else e.type, names))
        names += (e.name,)
    return lines


def _find(prog: CoreProgram, name: str):
    for i, d in enumerate(prog.decls):
        if d.name == name:
            return i, d
    raise UserError(f"no declaration named {name}")


def _pipeline(cmd: Command, source: str, err: list[str]) -> list[str]:
    prog = elab_program(parse_program(source, cmd.path), cmd.path)
    recheck_program(prog)
    if cmd.verb == "check":
        return []
    if cmd.verb == "dump-core":
        out = []
        for d in prog.decls:
            body = "" if d.body is None else " " + C.sexp(d.body)
            kind = "assume" if d.body is None else "def"
            out.append(f"({kind} {d.name} {d.stage} {C.sexp(d.type)}{body})")
        return out
    if cmd.verb == "nf":
        if cmd.main is None:
            raise UserError("nf needs --main NAME")
        i, d = _find(prog, cmd.main)
        names = tuple(x.name for x in prog.decls[:i])
        env = program_env(CoreProgram(prog.decls[:i]))
        if d.body is None:
            return [C.pretty(nf(i, env, d.type), names)]
        return [C.pretty(nf(i, env, d.body), names)]

    sp = stage_program(prog)
    for skip in sp.skipped:
        err.append(f"note: {skip.name}: {skip.reason}")
    if cmd.main is not None and sp.lookup(cmd.main) is None:
        _find(prog, cmd.main)  # unknown name is a user error
        raise UserError(f"{cmd.main} is a meta-level declaration and has no staged form")
    if cmd.verb == "dump-obj":
        out = []
        for e in sp.decls:
            if cmd.main is not None and e.name != cmd.main:
                continue
            body = "" if e.value is None else " " + obj_sexp(e.value)
            kind = "assume" if e.value is None else "def"
            out.append(f"({kind} {e.name} {obj_sexp(e.type)}{body})")
        lines = out
    else:
        lines = _print_program(sp, cmd.main)
    if cmd.verify:
        try:
            obj_check_program(sp.ctx)
        except ObjTypeError as e:
            # staged output of a well-typed program must check: this is a bug
            raise StagecError(f"staged output failed verification: {e.message}") from e
        lines.append("verified")
    return lines


def run(cmd: Command) -> Result:
    try:
        with open(cmd.path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        return Result(1, stderr=f"{cmd.path}: cannot read file: {e.strerror}\n")
    try:
        source = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        return Result(1, stderr=f"{cmd.path}: not valid UTF-8 (byte {e.start})\n")

    err: list[str] = []

    def work():
        with fuel(fuel_from_env(None)):
            return _pipeline(cmd, source, err)

    try:
        lines = run_deep(work)
    except UserError as e:
        return Result(1, stderr=_join(err + [e.render(raw)]))
    except FuelExhausted as e:
        return Result(2, stderr=_join(err + [f"error: {e} (raise STAGEC_FUEL or unset it)"]))
    except (StagecError, RecursionError) as e:
        banner = "internal error (this is a bug in stagec, not in your program)"
        return Result(2, stderr=_join(err + [f"{banner}: {type(e).__name__}: {e}"]))
    return Result(0, stdout=_join(lines), stderr=_join(err))


def _join(lines: list[str]) -> str:
    return "".join(line + "\n" for line in lines)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cmd = Command(ns.verb, ns.path, ns.verify, ns.main, ns.out)
    res = run(cmd)
    if res.stderr:
        sys.stderr.write(res.stderr)
    if res.code == 0 and cmd.out is not None:
        try:
            with open(cmd.out, "w", encoding="utf-8") as fh:
                fh.write(res.stdout)
        except OSError as e:
            sys.stderr.write(f"{cmd.out}: cannot write file: {e.strerror}\n")
            return 1
    else:
        sys.stdout.write(res.stdout)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
