"""The interval De Morgan algebra, the face lattice and modal exchange.

Two layers live here:

* syntax trees for interval terms and faces, annotated with exchange
  modalities on variables;
* canonical disjunctive normal forms over an arbitrary hashable atom type,
  shared by the syntax layer (atoms are ``(index, exc)``) and the semantic
  domain (atoms are interval variable levels).

An interval DNF is an antichain of clauses, each a set of literals
``(atom, negated)``; because the free De Morgan algebra is the free
distributive lattice on the literals, the antichain is canonical.  A face
DNF is an antichain of consistent clauses of endpoint atoms ``(atom, bit)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Hashable, Iterable, Union

from .errors import ConfigError, UnboundVariable
from .mode_theory import Modality, ModeTheory

# Marker for an exchange annotation the elaborator still has to fill in.
AUTO = "auto"


# --------------------------------------------------------------------------
# Interval syntax


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class IVar:
    """Interval variable by de Bruijn index over interval binders only.

    ``exc`` is the accumulated exchange modality, ``None`` for a plain
    variable and ``AUTO`` before elaboration.
    """

    index: int
    exc: Union[Modality, None, str] = None


@dataclass(frozen=True)
class Neg:
    r: "IntervalExpr"


@dataclass(frozen=True)
class Meet:
    r: "IntervalExpr"
    s: "IntervalExpr"


@dataclass(frozen=True)
class Join:
    r: "IntervalExpr"
    s: "IntervalExpr"


@dataclass(frozen=True)
class IExc:
    """Exchange ``⇑^mu r``: ``r`` lives outside the trailing lock ``mu``."""

    mu: Modality
    r: "IntervalExpr"


IntervalExpr = Union[Zero, One, IVar, Neg, Meet, Join, IExc]


# --------------------------------------------------------------------------
# Face syntax


@dataclass(frozen=True)
class FBot:
    pass


@dataclass(frozen=True)
class FTop:
    pass


@dataclass(frozen=True)
class Eq0:
    r: IntervalExpr


@dataclass(frozen=True)
class Eq1:
    r: IntervalExpr


@dataclass(frozen=True)
class FMeet:
    phi: "FaceExpr"
    psi: "FaceExpr"


@dataclass(frozen=True)
class FJoin:
    phi: "FaceExpr"
    psi: "FaceExpr"


@dataclass(frozen=True)
class FExc:
    mu: Modality
    phi: "FaceExpr"


FaceExpr = Union[FBot, FTop, Eq0, Eq1, FMeet, FJoin, FExc]


def meet_all(rs: Iterable[IntervalExpr]) -> IntervalExpr:
    out: IntervalExpr | None = None
    for r in rs:
        out = r if out is None else Meet(out, r)
    return One() if out is None else out


def join_all(rs: Iterable[IntervalExpr]) -> IntervalExpr:
    out: IntervalExpr | None = None
    for r in rs:
        out = r if out is None else Join(out, r)
    return Zero() if out is None else out


def fmeet_all(phis: Iterable[FaceExpr]) -> FaceExpr:
    out: FaceExpr | None = None
    for p in phis:
        out = p if out is None else FMeet(out, p)
    return FTop() if out is None else out


def fjoin_all(phis: Iterable[FaceExpr]) -> FaceExpr:
    out: FaceExpr | None = None
    for p in phis:
        out = p if out is None else FJoin(out, p)
    return FBot() if out is None else out


# --------------------------------------------------------------------------
# Generic DNFs

Lit = tuple[Hashable, bool]
IDnf = frozenset  # frozenset[frozenset[Lit]]
FAtom = tuple[Hashable, int]
FDnf = frozenset  # frozenset[frozenset[FAtom]]

I_ZERO: IDnf = frozenset()
I_ONE: IDnf = frozenset([frozenset()])
F_BOT: FDnf = frozenset()
F_TOP: FDnf = frozenset([frozenset()])


def absorb(clauses: Iterable[frozenset]) -> frozenset:
    """Keep only inclusion-minimal clauses."""
    cs = sorted(set(clauses), key=len)
    kept: list[frozenset] = []
    for c in cs:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def i_atom(atom: Hashable, negated: bool = False) -> IDnf:
    return frozenset([frozenset([(atom, negated)])])


def i_join(x: IDnf, y: IDnf) -> IDnf:
    return absorb(x | y)


def i_meet(x: IDnf, y: IDnf) -> IDnf:
    return absorb(c | d for c in x for d in y)


def i_neg(x: IDnf) -> IDnf:
    out = I_ONE
    for clause in x:
        out = i_meet(out, absorb(frozenset([(a, not n)]) for a, n in clause))
    return out


def i_subst(x: IDnf, assignment: dict) -> IDnf:
    """Substitute endpoints (0/1) for atoms."""
    if not assignment:
        return x
    out = []
    for clause in x:
        kept = []
        dead = False
        for a, n in clause:
            if a in assignment:
                if bool(assignment[a]) == n:  # literal evaluates to 0
                    dead = True
                    break
            else:
                kept.append((a, n))
        if not dead:
            out.append(frozenset(kept))
    return absorb(out)


def i_atoms(x: IDnf) -> set:
    return {a for c in x for a, _ in c}


def f_atom(atom: Hashable, bit: int) -> FDnf:
    return frozenset([frozenset([(atom, bit)])])


def _consistent(clause: frozenset) -> bool:
    seen: dict = {}
    for a, b in clause:
        if seen.setdefault(a, b) != b:
            return False
    return True


def f_join(x: FDnf, y: FDnf) -> FDnf:
    return absorb(x | y)


def f_meet(x: FDnf, y: FDnf) -> FDnf:
    return absorb(u for c in x for d in y if _consistent(u := c | d))


def f_subst(x: FDnf, assignment: dict) -> FDnf:
    if not assignment:
        return x
    out = []
    for clause in x:
        kept = []
        dead = False
        for a, b in clause:
            if a in assignment:
                if assignment[a] != b:
                    dead = True
                    break
            else:
                kept.append((a, b))
        if not dead:
            out.append(frozenset(kept))
    return absorb(out)


def f_atoms(x: FDnf) -> set:
    return {a for c in x for a, _ in c}


def eq0_dnf(x: IDnf) -> FDnf:
    """``(r = 0)`` by the lattice-homomorphism laws into endpoint atoms."""
    out = F_TOP
    for clause in x:  # r = ⋁ clauses, so r=0 iff every clause is 0
        out = f_meet(out, absorb(frozenset([(a, 1 if n else 0)]) for a, n in clause))
    return out


def eq1_dnf(x: IDnf) -> FDnf:
    out = F_BOT
    for clause in x:  # some clause is 1, i.e. all its literals are 1
        c = frozenset((a, 0 if n else 1) for a, n in clause)
        if _consistent(c):
            out = f_join(out, frozenset([c]))
    return out


def f_entails(ctx: FDnf, phi: FDnf) -> bool:
    return all(any(d <= c for d in phi) for c in ctx)


def clause_assignment(clause: frozenset) -> dict:
    return dict(clause)


# --------------------------------------------------------------------------
# The four-element De Morgan algebra
#
# Elements are pairs of bits with componentwise lattice order and
# ¬(x, y) = (1-y, 1-x); a = (1,0) and b = (0,1) are the fixed points.

DM4_ZERO = (0, 0)
DM4_A = (1, 0)
DM4_B = (0, 1)
DM4_ONE = (1, 1)
DM4 = (DM4_ZERO, DM4_A, DM4_B, DM4_ONE)


def dm4_neg(x):
    return (1 - x[1], 1 - x[0])


def dm4_meet(x, y):
    return (x[0] & y[0], x[1] & y[1])


def dm4_join(x, y):
    return (x[0] | y[0], x[1] | y[1])


# --------------------------------------------------------------------------
# Syntax-level operations


def _atom(v: IVar):
    if v.exc == AUTO:
        raise ConfigError("interval variable with unfilled exchange annotation")
    return (v.index, v.exc)


def exc_int(theory: ModeTheory, mu: Modality, r: IntervalExpr) -> IntervalExpr:
    """Push ``⇑^mu`` through the connectives onto variable annotations."""
    match r:
        case Zero() | One():
            return r
        case IVar(index, exc):
            if exc == AUTO:
                raise ConfigError("cannot exchange an unelaborated variable")
            new = mu if exc is None else theory.compose(exc, mu)
            return IVar(index, None if new.is_identity else new)
        case Neg(a):
            return Neg(exc_int(theory, mu, a))
        case Meet(a, b):
            return Meet(exc_int(theory, mu, a), exc_int(theory, mu, b))
        case Join(a, b):
            return Join(exc_int(theory, mu, a), exc_int(theory, mu, b))
        case IExc(nu, a):
            return exc_int(theory, mu, exc_int(theory, nu, a))
    raise TypeError(f"not an interval term: {r!r}")


def exc_face(theory: ModeTheory, mu: Modality, phi: FaceExpr) -> FaceExpr:
    match phi:
        case FBot() | FTop():
            return phi
        case Eq0(r):
            return Eq0(exc_int(theory, mu, r))
        case Eq1(r):
            return Eq1(exc_int(theory, mu, r))
        case FMeet(a, b):
            return FMeet(exc_face(theory, mu, a), exc_face(theory, mu, b))
        case FJoin(a, b):
            return FJoin(exc_face(theory, mu, a), exc_face(theory, mu, b))
        case FExc(nu, a):
            return exc_face(theory, mu, exc_face(theory, nu, a))
    raise TypeError(f"not a face: {phi!r}")


def expand_exc(theory: ModeTheory, r: IntervalExpr) -> IntervalExpr:
    """Eliminate ``IExc`` nodes so only variables carry annotations."""
    match r:
        case Zero() | One() | IVar():
            return r
        case Neg(a):
            return Neg(expand_exc(theory, a))
        case Meet(a, b):
            return Meet(expand_exc(theory, a), expand_exc(theory, b))
        case Join(a, b):
            return Join(expand_exc(theory, a), expand_exc(theory, b))
        case IExc(mu, a):
            return exc_int(theory, mu, expand_exc(theory, a))
    raise TypeError(f"not an interval term: {r!r}")


def int_dnf(r: IntervalExpr, theory: ModeTheory | None = None) -> IDnf:
    match r:
        case Zero():
            return I_ZERO
        case One():
            return I_ONE
        case IVar():
            return i_atom(_atom(r))
        case Neg(a):
            return i_neg(int_dnf(a, theory))
        case Meet(a, b):
            return i_meet(int_dnf(a, theory), int_dnf(b, theory))
        case Join(a, b):
            return i_join(int_dnf(a, theory), int_dnf(b, theory))
        case IExc(mu, a):
            if theory is None:
                raise ConfigError("exchange needs a mode theory")
            return int_dnf(exc_int(theory, mu, a), theory)
    raise TypeError(f"not an interval term: {r!r}")


def int_vars(r: IntervalExpr, theory: ModeTheory | None = None) -> set:
    out: set = set()
    stack = [r]
    while stack:
        t = stack.pop()
        k = type(t)
        if k is IVar:
            out.add((t.index, None) if t.exc is None else _atom(t))
        elif k is Meet or k is Join:
            stack.append(t.r)
            stack.append(t.s)
        elif k is Neg:
            stack.append(t.r)
        elif k is IExc:
            stack.append(expand_exc(theory, t))
        elif k is not Zero and k is not One:
            raise TypeError(f"not an interval term: {t!r}")
    return out


def int_eval_dm4(r: IntervalExpr, env: dict, theory: ModeTheory | None = None):
    """Homomorphic evaluation into DM4; ``env`` maps ``(index, exc)`` atoms."""
    match r:
        case Zero():
            return DM4_ZERO
        case One():
            return DM4_ONE
        case IVar():
            key = _atom(r)
            if key not in env:
                raise UnboundVariable(f"no DM4 value for interval variable {key}")
            return env[key]
        case Neg(a):
            return dm4_neg(int_eval_dm4(a, env, theory))
        case Meet(a, b):
            return dm4_meet(int_eval_dm4(a, env, theory), int_eval_dm4(b, env, theory))
        case Join(a, b):
            return dm4_join(int_eval_dm4(a, env, theory), int_eval_dm4(b, env, theory))
        case IExc():
            return int_eval_dm4(expand_exc(theory, r), env, theory)
    raise TypeError(f"not an interval term: {r!r}")


def dm4_table(r: IntervalExpr, atoms: list, theory: ModeTheory | None = None) -> tuple:
    """Truth table of ``r`` over every DM4 assignment of ``atoms``."""
    return tuple(
        int_eval_dm4(r, dict(zip(atoms, vals)), theory) for vals in product(DM4, repeat=len(atoms))
    )


@lru_cache(maxsize=None)
def _dm4_columns(n: int) -> tuple:
    """Bit masks of each atom's two coordinates over all ``4**n`` rows,
    rows ordered as in ``product(DM4, repeat=n)``."""
    rows = 4**n
    cols = []
    for p in range(n):
        block = 4 ** (n - 1 - p)
        lo = hi = 0
        for row in range(rows):
            x = DM4[(row // block) % 4]
            if x[0]:
                lo |= 1 << row
            if x[1]:
                hi |= 1 << row
        cols.append((lo, hi))
    return tuple(cols), (1 << rows) - 1


def dm4_columns(r: IntervalExpr, index: dict, theory: ModeTheory | None = None) -> tuple:
    """Evaluate ``r`` at every DM4 assignment of ``index``'s atoms at once;
    the result packs the two coordinates as bit masks over the rows."""
    cols, full = _dm4_columns(len(index))

    def go(t):
        k = type(t)
        if k is IVar:
            return cols[index[(t.index, None) if t.exc is None else _atom(t)]]
        if k is Meet:
            x, y = go(t.r), go(t.s)
            return (x[0] & y[0], x[1] & y[1])
        if k is Join:
            x, y = go(t.r), go(t.s)
            return (x[0] | y[0], x[1] | y[1])
        if k is Neg:
            lo, hi = go(t.r)
            return (~hi & full, ~lo & full)
        if k is Zero:
            return (0, 0)
        if k is One:
            return (full, full)
        if k is IExc:
            return go(expand_exc(theory, t))
        raise TypeError(f"not an interval term: {t!r}")

    return go(r)


def int_equal(r: IntervalExpr, s: IntervalExpr, theory: ModeTheory | None = None) -> bool:
    """Free De Morgan algebra equality, decided by DM4 valuation (all
    assignments evaluated together, one bit per assignment)."""
    atoms = sorted(int_vars(r, theory) | int_vars(s, theory), key=repr)
    index = {a: n for n, a in enumerate(atoms)}
    return dm4_columns(r, index, theory) == dm4_columns(s, index, theory)


def _pin(r: IntervalExpr, pins: dict) -> IntervalExpr:
    match r:
        case IVar():
            key = _atom(r)
            if key in pins:
                return One() if pins[key] else Zero()
            return r
        case Neg(a):
            return Neg(_pin(a, pins))
        case Meet(a, b):
            return Meet(_pin(a, pins), _pin(b, pins))
        case Join(a, b):
            return Join(_pin(a, pins), _pin(b, pins))
    return r


def face_dnf(phi: FaceExpr, theory: ModeTheory | None = None) -> FDnf:
    match phi:
        case FBot():
            return F_BOT
        case FTop():
            return F_TOP
        case Eq0(r):
            return eq0_dnf(int_dnf(r, theory))
        case Eq1(r):
            return eq1_dnf(int_dnf(r, theory))
        case FMeet(a, b):
            return f_meet(face_dnf(a, theory), face_dnf(b, theory))
        case FJoin(a, b):
            return f_join(face_dnf(a, theory), face_dnf(b, theory))
        case FExc(mu, a):
            if theory is None:
                raise ConfigError("exchange needs a mode theory")
            return face_dnf(exc_face(theory, mu, a), theory)
    raise TypeError(f"not a face: {phi!r}")


def face_canon(phi: FaceExpr, theory: ModeTheory | None = None) -> FDnf:
    """Canonical DNF of a face: consistent clauses, absorption applied."""
    return face_dnf(phi, theory)


def dnf_to_face(dnf: FDnf) -> FaceExpr:
    """Rebuild a face term from a canonical DNF (deterministic order)."""
    clauses = sorted((sorted(c, key=repr) for c in dnf), key=repr)
    out = []
    for c in clauses:
        atoms = [Eq1(IVar(a[0], a[1])) if b else Eq0(IVar(a[0], a[1])) for a, b in c]
        out.append(fmeet_all(atoms))
    return fjoin_all(out)


@dataclass(frozen=True)
class FaceContext:
    """Conjunction of the restrictions in scope, as one canonical DNF."""

    dnf: FDnf = F_TOP

    @staticmethod
    def of(*phis: FaceExpr, theory: ModeTheory | None = None) -> "FaceContext":
        out = F_TOP
        for p in phis:
            out = f_meet(out, face_canon(p, theory))
        return FaceContext(out)

    def assume(self, phi: FaceExpr, theory: ModeTheory | None = None) -> "FaceContext":
        return FaceContext(f_meet(self.dnf, face_canon(phi, theory)))

    @property
    def collapsed(self) -> bool:
        return not self.dnf


def face_entails(ctx: FaceContext, phi: FaceExpr, theory: ModeTheory | None = None) -> bool:
    return f_entails(ctx.dnf, face_canon(phi, theory))


def int_equal_under(ctx: FaceContext, r: IntervalExpr, s: IntervalExpr, theory: ModeTheory | None = None) -> bool:
    """Equality modulo the context: one DM4 check per clause with pins."""
    r, s = expand_exc(theory, r) if theory else r, expand_exc(theory, s) if theory else s
    for clause in ctx.dnf:
        pins = clause_assignment(clause)
        if not int_equal(_pin(r, pins), _pin(s, pins), theory):
            return False
    return True
