"""Readable rendering of core terms and values through the surface printer."""

from __future__ import annotations

from dataclasses import dataclass

from . import core_syntax as S
from .frontend import ast as A
from .frontend import printer
from .interval_face import Eq0, Eq1, FBot, FExc, FJoin, FMeet, FTop, IExc, IVar, Join, Meet, Neg, One, Zero
from .mode_theory import Modality


@dataclass
class Names:
    tms: list[str]
    ints: list[str]
    avoid: frozenset = frozenset()

    def fresh(self, base: str | None, default: str) -> str:
        base = base if base and base.isidentifier() and base != "_" else default
        taken = set(self.tms) | set(self.ints) | self.avoid
        if base not in taken:
            return base
        k = 1
        while f"{base}{k}" in taken:
            k += 1
        return f"{base}{k}"

    def tm(self, name: str) -> "Names":
        return Names(self.tms + [name], self.ints, self.avoid)

    def int(self, name: str) -> "Names":
        return Names(self.tms, self.ints + [name], self.avoid)


def _mod(mu: Modality | None) -> str | None:
    return None if mu is None else str(mu)


def _mod_opt(mu: Modality | None) -> str | None:
    return None if mu is None or mu.is_identity else str(mu)


def _uses_tm(e, index: int, theory=None) -> bool:
    found = False

    class Occ(S._Traversal):
        def tvar(self, v, pos):
            nonlocal found
            if v.index - pos.tcut == index:
                found = True
            return v

    try:
        Occ(theory).run(e)
    except Exception:  # exchanges need a theory to expand; assume a use
        return True
    return found


def _uses_int(e, index: int, theory=None) -> bool:
    found = False

    class Occ(S._Traversal):
        def ivar(self, v, pos):
            nonlocal found
            if v.index - pos.icut == index:
                found = True
            return v

    try:
        Occ(theory).run(e)
    except Exception:  # exchanges need a theory to expand; assume a use
        return True
    return found


class Delab:
    """Core expression to surface tree, choosing fresh binder names."""

    def __init__(self, theory=None):
        self.theory = theory

    def expr(self, e, nm: Names) -> A.Term:
        match e:
            case S.Var(index):
                if index < len(nm.tms):
                    return A.Name(nm.tms[len(nm.tms) - 1 - index])
                return A.Name(f"#{index}")
            case S.Const(name):
                return A.Name(name)
            case S.Univ(level):
                return A.Universe(level)
            case S.Bool():
                return A.BoolTy()
            case S.TrueE():
                return A.Lit(True)
            case S.FalseE():
                return A.Lit(False)
            case S.Pi(mu, dom, cod, name):
                if not _uses_tm(cod, 0, self.theory) and (mu is None or mu.is_identity):
                    return A.PiTy(None, None, self.expr(dom, nm), self.expr(cod, nm.tm("_")))
                x = nm.fresh(name, "x")
                return A.PiTy(x, _mod_opt(mu), self.expr(dom, nm), self.expr(cod, nm.tm(x)))
            case S.Sigma(dom, cod, name):
                if not _uses_tm(cod, 0, self.theory):
                    return A.SigmaTy(None, self.expr(dom, nm), self.expr(cod, nm.tm("_")))
                x = nm.fresh(name, "x")
                return A.SigmaTy(x, self.expr(dom, nm), self.expr(cod, nm.tm(x)))
            case S.Lam(mu, body, name):
                x = nm.fresh(name, "x")
                return A.Lambda(x, _mod_opt(mu), self.expr(body, nm.tm(x)))
            case S.App(fn, arg):
                return A.Apply(self.expr(fn, nm), self.expr(arg, nm))
            case S.Zapp(fn, arg):
                return A.ZApp(self.expr(fn, nm), self.expr(arg, nm))
            case S.Pair(a, b):
                return A.PairTm(self.expr(a, nm), self.expr(b, nm))
            case S.Fst(a):
                return A.Proj(1, self.expr(a, nm))
            case S.Snd(a):
                return A.Proj(2, self.expr(a, nm))
            case S.Path(line, a0, a1, name):
                if not _uses_int(line, 0, self.theory):
                    return A.PathTy(self.expr(line, nm.int("_")), self.expr(a0, nm), self.expr(a1, nm))
                i = nm.fresh(name, "i")
                return A.PathPTy(i, self.expr(line, nm.int(i)), self.expr(a0, nm), self.expr(a1, nm))
            case S.PathAbs(body, name):
                i = nm.fresh(name, "i")
                return A.PLam(i, self.expr(body, nm.int(i)))
            case S.PathApp(p, r):
                return A.PApp(self.expr(p, nm), self.interval(r, nm))
            case S.Modal(mu, ty):
                return A.ModalTy(str(mu), self.expr(ty, nm))
            case S.MkBox(mu, a):
                return A.Box(_mod(mu), self.expr(a, nm))
            case S.LetMod(nu, mu, motive, scrut, branch, xname, yname):
                y = nm.fresh(yname, "y")
                z = nm.fresh(xname, "z")
                mot = None if motive is None else self.expr(motive, nm.tm(z))
                return A.LetBox(
                    _mod_opt(nu), _mod(mu), y, self.expr(scrut, nm), None if mot is None else z, mot,
                    self.expr(branch, nm.tm(y)),
                )
            case S.If(motive, scrut, tt, ff, name):
                z = nm.fresh(name, "z")
                mot = None if motive is None else self.expr(motive, nm.tm(z))
                return A.IfThen(self.expr(scrut, nm), None if mot is None else z, mot, self.expr(tt, nm), self.expr(ff, nm))
            case S.SysTm(branches) | S.SysTy(branches):
                return A.System(tuple((self.face(f, nm), self.expr(b, nm)) for f, b in branches))
            case S.Comp(line, phi, tube, cap, name):
                i = nm.fresh(name, "i")
                inner = nm.int(i)
                if isinstance(phi, FBot):
                    branches = ()
                elif isinstance(tube, S.SysTm):
                    branches = tuple((self.face(f, inner), self.expr(b, inner)) for f, b in tube.branches)
                else:
                    branches = ((self.face(phi, nm), self.expr(tube, inner)),)
                return A.CompTm(i, self.expr(line, inner), branches, self.expr(cap, nm))
            case S.Ann(a, ty):
                return A.Annot(self.expr(a, nm), self.expr(ty, nm))
            case S.SubT(ty, sigma) | S.SubTm(ty, sigma):
                if self.theory is not None:
                    return self.expr(S.apply_subst(self.theory, sigma, ty), nm)
                return A.Name("<subst>")
        raise TypeError(f"cannot render {e!r}")

    def interval(self, r, nm: Names) -> A.Interval:
        match r:
            case Zero():
                return A.IZero()
            case One():
                return A.IOne()
            case IVar(index):
                if index < len(nm.ints):
                    return A.IName(nm.ints[len(nm.ints) - 1 - index])
                return A.IName(f"#i{index}")
            case Neg(a):
                return A.INeg(self.interval(a, nm))
            case Meet(a, b):
                return A.IMeet(self.interval(a, nm), self.interval(b, nm))
            case Join(a, b):
                return A.IJoin(self.interval(a, nm), self.interval(b, nm))
            case IExc(mu, a):
                return A.IExch(self.interval(a, nm), str(mu))
        raise TypeError(r)

    def face(self, phi, nm: Names) -> A.Face:
        match phi:
            case FTop():
                return A.FaceTop()
            case FBot():
                return A.FaceBot()
            case Eq0(r):
                return A.FaceEq(self.interval(r, nm), 0)
            case Eq1(r):
                return A.FaceEq(self.interval(r, nm), 1)
            case FMeet(a, b):
                return A.FaceMeet(self.face(a, nm), self.face(b, nm))
            case FJoin(a, b):
                return A.FaceJoin(self.face(a, nm), self.face(b, nm))
            case FExc(mu, a):
                return A.FaceExch(self.face(a, nm), str(mu))
        raise TypeError(phi)


def frame_names(fr) -> Names:
    tms, ints = [], []
    for e in fr.entries:
        if isinstance(e, S.TmVar):
            tms.append(e.name)
        elif isinstance(e, S.IntVar):
            ints.append(e.name)
    return Names(tms, ints)


def delab(e, tms=(), ints=(), theory=None, avoid=frozenset()) -> A.Term:
    return Delab(theory).expr(e, Names(list(tms), list(ints), frozenset(avoid)))


def show_core(e, tms=(), ints=(), theory=None, avoid=frozenset()) -> str:
    try:
        return printer.term(delab(e, tms, ints, theory, avoid))
    except TypeError:
        return S.dump(e)


def show_expr(fr, e) -> str:
    nm = frame_names(fr)
    try:
        return printer.term(Delab(getattr(fr, "theory", None)).expr(e, nm))
    except TypeError:
        return S.dump(e)


def show_value(fr, v) -> str:
    from .semantics import quote

    try:
        e = quote(fr.names, v)
    except Exception:  # values that do not read back (e.g. ill-typed probes)
        return type(v).__name__
    return show_expr(fr, e)
