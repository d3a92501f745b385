"""Reference decision procedures written independently of the package.

Interval terms are the package's syntax trees (``Zero``, ``One``, ``IVar``,
``Neg``, ``Meet``, ``Join``); everything else here is local.

* ``dm4_key``: truth table over the four-element De Morgan algebra, packed
  as two bitsets (one per coordinate of the pair encoding).
* ``nnf`` / ``lattice_key``: push negations to the leaves with the De Morgan
  laws, then read the result as a monotone Boolean function in which ``x``
  and ``~x`` are unrelated variables.  Two terms are equal in the free De
  Morgan algebra exactly when these functions agree.
* ``face_sat``: the set of partial 0/1 assignments (each variable 0, 1 or
  unset) under which a face holds, evaluated in Kleene's three-valued
  logic.  Entailment is inclusion of these sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from cmtt.interval_face import (
    Eq0, Eq1, FBot, FJoin, FMeet, FTop, IVar, Join, Meet, Neg, One, Zero,
)

# ---------------------------------------------------------------- DM4 tables

# element encoding: 0=(0,0) a=(1,0) b=(0,1) 1=(1,1); ~(x,y) = (1-y, 1-x)
DM4_ELEMS = ((0, 0), (1, 0), (0, 1), (1, 1))


def _dm4_var_tables(nvars: int):
    rows = list(product(DM4_ELEMS, repeat=nvars))
    out = []
    for v in range(nvars):
        lo = sum(1 << n for n, row in enumerate(rows) if row[v][0])
        hi = sum(1 << n for n, row in enumerate(rows) if row[v][1])
        out.append((lo, hi))
    return out, (1 << len(rows)) - 1


class DM4Oracle:
    def __init__(self, nvars: int):
        self.vars, self.mask = _dm4_var_tables(nvars)

    def zero(self):
        return (0, 0)

    def one(self):
        return (self.mask, self.mask)

    def var(self, v):
        return self.vars[v]

    def neg(self, x):
        return (~x[1] & self.mask, ~x[0] & self.mask)

    def meet(self, x, y):
        return (x[0] & y[0], x[1] & y[1])

    def join(self, x, y):
        return (x[0] | y[0], x[1] | y[1])

    def key(self, r):
        match r:
            case Zero():
                return self.zero()
            case One():
                return self.one()
            case IVar(index):
                return self.var(index)
            case Neg(a):
                return self.neg(self.key(a))
            case Meet(a, b):
                return self.meet(self.key(a), self.key(b))
            case Join(a, b):
                return self.join(self.key(a), self.key(b))
        raise TypeError(r)


# ------------------------------------------------------- negation normal form


@dataclass(frozen=True)
class Lit:
    var: int
    neg: bool


@dataclass(frozen=True)
class And:
    a: object
    b: object


@dataclass(frozen=True)
class Or:
    a: object
    b: object


@dataclass(frozen=True)
class Const:
    value: bool


def nnf(r, negate: bool = False):
    """Rewrite with ~~x = x, ~(a∧b) = ~a∨~b, ~(a∨b) = ~a∧~b, ~0 = 1."""
    match r:
        case Zero():
            return Const(negate)
        case One():
            return Const(not negate)
        case IVar(index):
            return Lit(index, negate)
        case Neg(a):
            return nnf(a, not negate)
        case Meet(a, b):
            return (Or if negate else And)(nnf(a, negate), nnf(b, negate))
        case Join(a, b):
            return (And if negate else Or)(nnf(a, negate), nnf(b, negate))
    raise TypeError(r)


def _lit_tables(nvars: int):
    """Bitsets over all 2^(2n) assignments of the literals x_v, ~x_v."""
    n = 2 * nvars
    rows = 1 << n
    tabs = {}
    for v in range(nvars):
        for neg in (False, True):
            bit = 2 * v + neg
            tabs[(v, neg)] = sum(1 << a for a in range(rows) if a >> bit & 1)
    return tabs, (1 << rows) - 1


class LatticeOracle:
    """Monotone functions of 2n independent literals, as bitsets."""

    def __init__(self, nvars: int):
        self.lits, self.mask = _lit_tables(nvars)

    def table(self, t) -> int:
        match t:
            case Const(v):
                return self.mask if v else 0
            case Lit(var, neg):
                return self.lits[(var, neg)]
            case And(a, b):
                return self.table(a) & self.table(b)
            case Or(a, b):
                return self.table(a) | self.table(b)
        raise TypeError(t)

    def key(self, r) -> int:
        return self.table(nnf(r))

    # compositional form used by the exhaustive enumeration: a term is
    # represented by the pair (table of its NNF, table of the NNF of its negation)
    def pair_var(self, v):
        return (self.lits[(v, False)], self.lits[(v, True)])

    def pair_const(self, value: bool):
        return (self.mask, 0) if value else (0, self.mask)

    @staticmethod
    def pair_neg(x):
        return (x[1], x[0])

    @staticmethod
    def pair_meet(x, y):
        return (x[0] & y[0], x[1] | y[1])

    @staticmethod
    def pair_join(x, y):
        return (x[0] | y[0], x[1] & y[1])


# --------------------------------------------------------------------- faces

UNSET = None


def partial_assignments(nvars: int):
    return list(product((0, 1, UNSET), repeat=nvars))


def kleene(r, rho):
    """Three-valued value of an interval term: 0, 1 or None (unknown)."""
    match r:
        case Zero():
            return 0
        case One():
            return 1
        case IVar(index):
            return rho[index]
        case Neg(a):
            x = kleene(a, rho)
            return None if x is None else 1 - x
        case Meet(a, b):
            x, y = kleene(a, rho), kleene(b, rho)
            if x == 0 or y == 0:
                return 0
            return 1 if x == 1 and y == 1 else None
        case Join(a, b):
            x, y = kleene(a, rho), kleene(b, rho)
            if x == 1 or y == 1:
                return 1
            return 0 if x == 0 and y == 0 else None
    raise TypeError(r)


def face_holds(phi, rho) -> bool:
    match phi:
        case FTop():
            return True
        case FBot():
            return False
        case Eq0(r):
            return kleene(r, rho) == 0
        case Eq1(r):
            return kleene(r, rho) == 1
        case FMeet(a, b):
            return face_holds(a, rho) and face_holds(b, rho)
        case FJoin(a, b):
            return face_holds(a, rho) or face_holds(b, rho)
    raise TypeError(phi)


def face_sat(phi, nvars: int = 3) -> int:
    """Bitset over ``partial_assignments(nvars)``."""
    return sum(1 << n for n, rho in enumerate(partial_assignments(nvars)) if face_holds(phi, rho))


def sat_leq(a: int, b: int) -> bool:
    return a & ~b == 0


# -------------------------------------------------------------- guarded modes
#
# Words are in composition order: the last letter is applied first, so
# ("ℓ", "δ") is ℓ∘δ : s → t.

L, G, D = "ℓ", "γ", "δ"
GEN_TYPES = {L: ("t", "t"), G: ("t", "s"), D: ("s", "t")}


def composable_words(max_len: int):
    """All composable words up to ``max_len`` as (dom, cod, word)."""
    out = [("t", "t", ()), ("s", "s", ())]
    layer = [((g,), *GEN_TYPES[g]) for g in GEN_TYPES]
    for _ in range(max_len):
        out += [(d, c, w) for w, d, c in layer]
        nxt = []
        for w, d, c in layer:
            for g, (gd, gc) in GEN_TYPES.items():
                if gd == c:
                    nxt.append(((g,) + w, d, gc))
        layer = nxt
    return out


def guarded_reduce(word: tuple) -> tuple:
    """γ∘δ = 1 and γ∘ℓ = γ, applied until neither fits."""
    w = list(word)
    n = 0
    while n < len(w) - 1:
        if w[n] == G and w[n + 1] == D:
            del w[n:n + 2]
            n = max(n - 1, 0)
        elif w[n] == G and w[n + 1] == L:
            del w[n + 1]
        else:
            n += 1
    return tuple(w)


def guarded_nf_shape(dom: str, cod: str, word: tuple):
    """Split ℓ^a ∘ rest; None if ``word`` is not one of the expected forms."""
    a = 0
    while a < len(word) and word[a] == L:
        a += 1
    rest = word[a:]
    allowed = {
        ("t", "t"): [(), (D, G)],
        ("s", "t"): [(D,)],
        ("t", "s"): [(G,)],
        ("s", "s"): [()],
    }[(dom, cod)]
    if rest not in allowed:
        return None
    if cod == "s" and a:
        return None
    return a, rest


def guarded_leq(dom: str, cod: str, src: tuple, dst: tuple) -> bool:
    """The 2-cell preorder on normal forms, derived by hand from
    δ∘γ ≤ 1 and 1 ≤ ℓ: cells only add ℓ's or drop a δ∘γ."""
    a, rs = guarded_nf_shape(dom, cod, src)
    b, rd = guarded_nf_shape(dom, cod, dst)
    if cod == "s":
        return True
    if a > b:
        return False
    return not (rs == () and rd == (D, G))
