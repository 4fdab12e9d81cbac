"""Hand-built stage-0 formers whose children contain meta-level fragments.

Each case is (former, context length, core term, expected object term).  The
expected term is written out by hand, so it checks the staged output
independently of the homomorphism equation.
"""

from stagec import core as C
from stagec import objlang as O

NAT, BOOL, TOP, U = C.Nat(0, 0), C.Bool(0, 0), C.Unit(0, 0), C.U(0, 0)
ZERO, TT = C.Zero(0, 0), C.TT(0, 0)


def sq(t):
    """~<t>"""
    return C.Splice(C.Quote(t))


def idm(t):
    """~((\\q. q) <t>), a meta-level redex producing t"""
    return C.Splice(C.App(1, C.Lam(1, "q", C.Var(0)), C.Quote(t)))


def twice_suc(t):
    """~(NatElim1 (\\_. ^Nat0) <t> (\\_ b. <suc0 ~b>) 2)"""
    step = C.Quote(C.Suc(0, 0, C.Splice(C.Var(0))))
    return C.Splice(C.NatElim(1, C.Lift(NAT), C.Quote(t), step, C.numeral(2, 1)))


ONAT, OZERO = O.ONat(0), O.OZero(0)

CASES = [
    ("Var", 2, C.Var(1), O.OVar(1)),
    ("U", 0, C.U(0, 1), O.OU(1)),
    ("Pi", 0, C.Pi(0, "A", sq(U), idm(C.Var(0))), O.OPi("A", O.OU(0), O.OVar(0))),
    ("Pi-nondependent", 1, C.Pi(0, "_", idm(C.Var(0)), sq(NAT)),
     O.OPi("_", O.OVar(0), ONAT)),
    ("Lam", 0, C.Lam(0, "x", idm(C.Suc(0, 0, C.Var(0)))), O.OLam("x", O.OSuc(0, O.OVar(0)))),
    ("Lam-outer-variable", 1, C.Lam(0, "x", sq(C.Var(1))), O.OLam("x", O.OVar(1))),
    ("App", 2, C.App(0, sq(C.Var(1)), idm(C.Var(0))), O.OApp(O.OVar(1), O.OVar(0))),
    ("Sigma", 0, C.Sigma(0, "A", idm(U), sq(C.Var(0))), O.OSigma("A", O.OU(0), O.OVar(0))),
    ("Pair", 0, C.Pair(0, idm(ZERO), sq(TT)), O.OPair(OZERO, O.OTT(0))),
    ("Fst", 1, C.Fst(0, idm(C.Var(0))), O.OFst(O.OVar(0))),
    ("Snd", 1, C.Snd(0, sq(C.Var(0))), O.OSnd(O.OVar(0))),
    ("Nat", 0, C.Nat(0, 2), O.ONat(2)),
    ("Zero", 0, ZERO, OZERO),
    ("Suc", 0, C.Suc(0, 0, twice_suc(ZERO)), O.OSuc(0, O.OSuc(0, O.OSuc(0, OZERO)))),
    ("NatElim", 1,
     C.NatElim(0, idm(NAT), idm(ZERO), C.Suc(0, 0, sq(C.Var(0))), sq(C.Var(0))),
     O.ONatElim(ONAT, OZERO, O.OSuc(0, O.OVar(0)), O.OVar(0))),
    ("NatElim-binders", 1,
     C.NatElim(0, sq(C.Var(0)), sq(C.Var(0)), idm(C.Var(2)), C.Var(0)),
     O.ONatElim(O.OVar(0), O.OVar(0), O.OVar(2), O.OVar(0))),
    ("Bool", 0, BOOL, O.OBool(0)),
    ("True", 0, C.BTrue(0, 0), O.OTrue(0)),
    ("False", 0, C.BFalse(0, 0), O.OFalse(0)),
    ("BoolElim", 1,
     C.BoolElim(0, sq(C.Var(0)), idm(C.BFalse(0, 0)), sq(C.BTrue(0, 0)), idm(C.Var(0))),
     O.OBoolElim(O.OVar(0), O.OFalse(0), O.OTrue(0), O.OVar(0))),
    ("Unit", 0, TOP, O.OUnit(0)),
    ("TT", 0, TT, O.OTT(0)),
    ("Let", 0, C.Let(0, "y", sq(NAT), idm(ZERO), C.Suc(0, 0, sq(C.Var(0)))),
     O.OLet("y", ONAT, OZERO, O.OSuc(0, O.OVar(0)))),
]

FORMERS = {"Var", "U", "Pi", "Lam", "App", "Sigma", "Pair", "Fst", "Snd", "Nat", "Zero",
           "Suc", "NatElim", "Bool", "True", "False", "BoolElim", "Unit", "TT", "Let"}
