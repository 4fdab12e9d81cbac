"""Conversion facts: each source defines `lhs` and `rhs` of one type."""

PRES = r"""
def pres : (A : ^U0) -> (B : ^U0) -> ^(~A -> ~B) -> ^~A -> ^~B = \A B f a. <~f ~a>;
def presInv : (A : ^U0) -> (B : ^U0) -> (^~A -> ^~B) -> ^(~A -> ~B) = \A B f. <\x. ~(f <x>)>;
"""

POSITIVE = {
    "splice-of-quote": r"""
        assume a : Nat0;
        def lhs : Nat0 = ~<a>;
        def rhs : Nat0 = a;""",
    "quote-of-splice": r"""
        def lhs : ^Nat0 -> ^Nat0 = \u. <~u>;
        def rhs : ^Nat0 -> ^Nat0 = \u. u;""",
    "quote-of-splice-under-object-binder": r"""
        def lhs : ^(Nat0 -> Nat0) -> ^(Nat0 -> Nat0) = \u. <\x. ~u x>;
        def rhs : ^(Nat0 -> Nat0) -> ^(Nat0 -> Nat0) = \u. u;""",
    "pi-eta-stage0": r"""
        assume f : Nat0 -> Nat0;
        def lhs : Nat0 -> Nat0 = \x. f x;
        def rhs : Nat0 -> Nat0 = f;""",
    "pi-eta-stage1": r"""
        def lhs : (Nat1 -> Bool1) -> Nat1 -> Bool1 = \f x. f x;
        def rhs : (Nat1 -> Bool1) -> Nat1 -> Bool1 = \f. f;""",
    "sigma-eta-stage0": r"""
        assume p : Nat0 * Bool0;
        def lhs : Nat0 * Bool0 = (fst p, snd p);
        def rhs : Nat0 * Bool0 = p;""",
    "sigma-eta-stage1": r"""
        def lhs : Nat1 * Bool1 -> Nat1 * Bool1 = \p. (fst p, snd p);
        def rhs : Nat1 * Bool1 -> Nat1 * Bool1 = \p. p;""",
    "natelim-beta-zero": r"""
        def lhs : Nat1 = NatElim1 (\_. Nat1) 5 (\_ r. suc1 r) zero1;
        def rhs : Nat1 = 5;""",
    "natelim-beta-suc-stage1": r"""
        def lhs : Nat1 = NatElim1 (\_. Nat1) 5 (\_ r. suc1 r) 2;
        def rhs : Nat1 = 7;""",
    "natelim-beta-suc-stage0": r"""
        assume z : Nat0;
        assume s : Nat0 -> Nat0 -> Nat0;
        def lhs : Nat0 = NatElim0 (\_. Nat0) z (\k r. s k r) 2;
        def rhs : Nat0 = s 1 (s 0 z);""",
    "natelim-beta-open-suc": r"""
        def lhs : Nat1 -> Nat1 = \n. NatElim1 (\_. Nat1) 0 (\k r. suc1 r) (suc1 n);
        def rhs : Nat1 -> Nat1 = \n. suc1 (NatElim1 (\_. Nat1) 0 (\k r. suc1 r) n);""",
    "boolelim-beta-true": r"""
        def lhs : Nat1 = BoolElim1 (\_. Nat1) 1 2 true1;
        def rhs : Nat1 = 1;""",
    "boolelim-beta-false": r"""
        assume x : Nat0;
        assume y : Nat0;
        def lhs : Nat0 = BoolElim0 (\_. Nat0) x y false0;
        def rhs : Nat0 = y;""",
    "pres-after-pres-inverse": PRES + r"""
        def lhs : (^Nat0 -> ^Bool0) -> ^Nat0 -> ^Bool0
          = \g. pres <Nat0> <Bool0> (presInv <Nat0> <Bool0> g);
        def rhs : (^Nat0 -> ^Bool0) -> ^Nat0 -> ^Bool0 = \g. g;""",
    "pres-inverse-after-pres": PRES + r"""
        def lhs : ^(Nat0 -> Bool0) -> ^(Nat0 -> Bool0)
          = \h. presInv <Nat0> <Bool0> (pres <Nat0> <Bool0> h);
        def rhs : ^(Nat0 -> Bool0) -> ^(Nat0 -> Bool0) = \h. h;""",
}

NEGATIVE = {
    "zero-vs-suc-zero": r"""
        def lhs : Nat0 = zero0;
        def rhs : Nat0 = suc0 zero0;""",
    "true-vs-false": r"""
        def lhs : Bool0 = true0;
        def rhs : Bool0 = false0;""",
    "zero-vs-suc-zero-stage1": r"""
        def lhs : Nat1 = zero1;
        def rhs : Nat1 = suc1 zero1;""",
    "true-vs-false-stage1": r"""
        def lhs : Bool1 = true1;
        def rhs : Bool1 = false1;""",
    "distinct-variables": r"""
        assume a : Nat0;
        assume b : Nat0;
        def lhs : Nat0 = a;
        def rhs : Nat0 = b;""",
    "eta-does-not-identify-different-functions": r"""
        assume f : Nat0 -> Nat0;
        def lhs : Nat0 -> Nat0 = \x. f (f x);
        def rhs : Nat0 -> Nat0 = f;""",
}


def decide(src: str) -> bool:
    from stagec.nbe import conv

    from helpers import values

    vals, depth = values(src)
    return conv(depth, vals["lhs"], vals["rhs"])
