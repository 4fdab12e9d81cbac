"""stagec: a staging compiler for a two-level dependent type theory."""

from .corecheck import recheck_program
from .elaborator import CoreProgram, ElabError, elab_program, elaborate_source
from .errors import FuelExhausted, InternalError, LexError, ParseError, StagecError, UserError
from .objlang import ObjCtx, embed, obj_check, obj_infer, strip
from .stager import stage_program, stage_term, stage_type
from .surface import parse_program, parse_term

__version__ = "0.1.0"

__all__ = [
    "CoreProgram", "ElabError", "FuelExhausted", "InternalError", "LexError", "ObjCtx",
    "ParseError", "StagecError", "UserError", "elab_program", "elaborate_source", "embed",
    "obj_check", "obj_infer", "parse_program", "parse_term", "recheck_program",
    "stage_program", "stage_term", "stage_type", "strip",
]
