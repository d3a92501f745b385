"""Scope resolution: surface trees to core terms with holes.

Names become de Bruijn indices (term and interval variables live in
separate spaces), modality text becomes ``Modality`` values, and the
sugar ``▷``, ``next``, ``Path`` and multi-branch ``comp`` is expanded.
Everything the user may omit (application modalities, box modalities,
motives, key flags, exchange annotations) is left as a hole for the
elaborating checker.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import core_syntax as S
from ..errors import CmttError, ScopeError, Span
from ..interval_face import (
    AUTO,
    Eq0,
    Eq1,
    FBot,
    FExc,
    FJoin,
    FMeet,
    FTop,
    IExc,
    IVar,
    Join,
    Meet,
    Neg,
    One,
    Zero,
    fjoin_all,
)
from ..mode_theory import Modality, ModeTheory
from ..typechecker import Declaration
from . import ast as A

LATER = "ℓ"
_HIDDEN = ""  # a binder name no source text can refer to


@dataclass(frozen=True)
class Scope:
    tms: tuple[str, ...] = ()
    ints: tuple[str, ...] = ()
    mode: str | None = None

    def bind_tm(self, name: str | None) -> "Scope":
        return Scope(self.tms + (name or _HIDDEN,), self.ints, self.mode)

    def bind_int(self, name: str | None) -> "Scope":
        return Scope(self.tms, self.ints + (name or _HIDDEN,), self.mode)

    def at(self, mode: str | None) -> "Scope":
        return Scope(self.tms, self.ints, mode)


class Resolver:
    def __init__(self, theory: ModeTheory, globals_: set[str], decl: str | None = None, span: Span | None = None):
        self.theory = theory
        self.globals = globals_
        self.decl = decl
        self.span = span

    def fail(self, msg: str, rule: str = "scope") -> ScopeError:
        return ScopeError(msg, rule=rule, decl=self.decl, span=self.span)

    def mod(self, text: str | None, sc: Scope) -> Modality | None:
        if text is None:
            return None
        try:
            mu = self.theory.parse_word(text, sc.mode)
        except CmttError as err:
            raise self.fail(f"bad modality {text!r}: {err.message}", rule="modality") from None
        # whether mu fits the current mode is the checker's business
        return mu

    def later(self, sc: Scope) -> Modality:
        if LATER not in self.theory.generators:
            raise self.fail("▷ needs a mode theory with the generator ℓ", rule="modality")
        return self.mod(LATER, sc)

    # -- terms -----------------------------------------------------------------

    def term(self, e: A.Term, sc: Scope) -> S.Expr:
        match e:
            case A.Name(name):
                if name in sc.tms:
                    return S.Var(len(sc.tms) - 1 - _rindex(sc.tms, name))
                if name in sc.ints:
                    raise self.fail(f"interval variable {name} used as a term")
                if name in self.globals:
                    return S.Const(name)
                raise self.fail(f"unknown identifier {name}")
            case A.Universe(level):
                return S.Univ(level)
            case A.BoolTy():
                return S.Bool()
            case A.Lit(value):
                return S.TrueE() if value else S.FalseE()
            case A.PiTy(name, mod, dom, cod):
                mu = self.mod(mod, sc)
                dsc = sc.at(mu.dom) if mu is not None else sc
                return S.Pi(mu, self.term(dom, dsc), self.term(cod, sc.bind_tm(name)), name or "_")
            case A.SigmaTy(name, dom, cod):
                return S.Sigma(self.term(dom, sc), self.term(cod, sc.bind_tm(name)), name or "_")
            case A.Lambda(name, mod, body):
                return S.Lam(self.mod(mod, sc), self.term(body, sc.bind_tm(name)), name)
            case A.Apply(fn, arg):
                return S.App(self.term(fn, sc), self.term(arg, sc.at(None)), None)
            case A.PLam(name, body):
                return S.PathAbs(self.term(body, sc.bind_int(name)), name)
            case A.PApp(p, r):
                return S.PathApp(self.term(p, sc), self.interval(r, sc))
            case A.PathTy(ty, a0, a1):
                return S.Path(self.term(ty, sc.bind_int(None)), self.term(a0, sc), self.term(a1, sc), "_")
            case A.PathPTy(name, line, a0, a1):
                return S.Path(self.term(line, sc.bind_int(name)), self.term(a0, sc), self.term(a1, sc), name)
            case A.ModalTy(mod, ty):
                mu = self.mod(mod, sc)
                return S.Modal(mu, self.term(ty, sc.at(mu.dom)))
            case A.LaterTy(ty):
                mu = self.later(sc)
                return S.Modal(mu, self.term(ty, sc.at(mu.dom)))
            case A.Box(mod, body):
                mu = self.mod(mod, sc)
                return S.MkBox(mu, self.term(body, sc.at(mu.dom if mu else None)))
            case A.Next(body):
                mu = self.later(sc)
                return S.MkBox(mu, self.term(body, sc.at(mu.dom)))
            case A.LetBox(nu, mu, var, scrut, zname, motive, body):
                nu1 = self.mod(nu, sc)
                nsc = sc.at(nu1.dom if nu1 else sc.mode)
                mu1 = self.mod(mu, nsc) if mu is not None else None
                scrut1 = self.term(scrut, nsc)
                motive1 = None if motive is None else self.term(motive, sc.bind_tm(zname))
                body1 = self.term(body, sc.bind_tm(var))
                return S.LetMod(nu1, mu1, motive1, scrut1, body1, zname or "z", var)
            case A.IfThen(scrut, zname, motive, tt, ff):
                motive1 = None if motive is None else self.term(motive, sc.bind_tm(zname))
                return S.If(motive1, self.term(scrut, sc), self.term(tt, sc), self.term(ff, sc), zname or "z")
            case A.System(branches):
                return S.SysTm(tuple((self.face(phi, sc), self.term(b, sc)) for phi, b in branches))
            case A.CompTm(name, line, branches, cap):
                isc = sc.bind_int(name)
                line1 = self.term(line, isc)
                cap1 = self.term(cap, sc)
                if not branches:
                    return S.Comp(line1, FBot(), S.SysTm(()), cap1, name)
                phi = fjoin_all(self.face(f, sc) for f, _ in branches)
                if len(branches) == 1:
                    tube = self.term(branches[0][1], isc)
                else:
                    tube = S.SysTm(tuple((self.face(f, isc), self.term(b, isc)) for f, b in branches))
                return S.Comp(line1, phi, tube, cap1, name)
            case A.PairTm(a, b):
                return S.Pair(self.term(a, sc), self.term(b, sc))
            case A.Proj(which, body):
                inner = self.term(body, sc)
                return S.Fst(inner) if which == 1 else S.Snd(inner)
            case A.Annot(body, ty):
                return S.Ann(self.term(body, sc), self.term(ty, sc))
            case A.ZApp(fn, arg):
                return S.Zapp(self.term(fn, sc), self.term(arg, sc), None)
        raise self.fail(f"unsupported surface form {type(e).__name__}")

    # -- intervals and faces -------------------------------------------------------

    def interval(self, r: A.Interval, sc: Scope):
        match r:
            case A.IZero():
                return Zero()
            case A.IOne():
                return One()
            case A.IName(name):
                if name in sc.ints:
                    return IVar(len(sc.ints) - 1 - _rindex(sc.ints, name), AUTO)
                if name in sc.tms or name in self.globals:
                    raise self.fail(f"{name} is a term, not an interval variable")
                raise self.fail(f"unknown interval variable {name}")
            case A.INeg(a):
                return Neg(self.interval(a, sc))
            case A.IMeet(a, b):
                return Meet(self.interval(a, sc), self.interval(b, sc))
            case A.IJoin(a, b):
                return Join(self.interval(a, sc), self.interval(b, sc))
            case A.IExch(a, mod):
                return IExc(self.mod(mod, Scope()), self.interval(a, sc))
        raise self.fail(f"not an interval: {r!r}")

    def face(self, phi: A.Face, sc: Scope):
        match phi:
            case A.FaceTop():
                return FTop()
            case A.FaceBot():
                return FBot()
            case A.FaceEq(r, bit):
                r1 = self.interval(r, sc)
                return Eq1(r1) if bit else Eq0(r1)
            case A.FaceMeet(a, b):
                return FMeet(self.face(a, sc), self.face(b, sc))
            case A.FaceJoin(a, b):
                return FJoin(self.face(a, sc), self.face(b, sc))
            case A.FaceExch(a, mod):
                return FExc(self.mod(mod, Scope()), self.face(a, sc))
        raise self.fail(f"not a face: {phi!r}")


def _rindex(names: tuple[str, ...], name: str) -> int:
    return len(names) - 1 - names[::-1].index(name)


def default_mode(theory: ModeTheory) -> str:
    return theory.modes[0]


def resolve_decl(theory: ModeTheory, globals_: set[str], d: A.DeclS) -> Declaration:
    """Resolve a surface declaration against the names defined so far."""
    mode = d.mode or default_mode(theory)
    if mode not in theory.modes:
        raise ScopeError(f"unknown mode {mode!r}", rule="modality", decl=d.name, span=d.span)
    r = Resolver(theory, globals_, d.name, d.span)
    sc = Scope(mode=mode)
    params = []
    for p in d.params:
        mu = r.mod(p.mod, sc)
        psc = sc.at(mu.dom) if mu is not None else sc
        params.append((p.name, mu, r.term(p.ty, psc)))
        sc = sc.bind_tm(p.name)
    ty = r.term(d.ty, sc)
    body = None if d.body is None else r.term(d.body, sc)
    rewrite = None
    if d.rewrite is not None:
        # the rewrite may mention the axiom itself
        r.globals = set(globals_) | {d.name}
        rewrite = r.term(d.rewrite, sc)
    return Declaration(d.name, d.kind, mode, tuple(params), ty, body, rewrite, d.span)


def resolve_term(theory: ModeTheory, globals_: set[str], e: A.Term, mode: str | None = None,
                 tms: tuple[str, ...] = (), ints: tuple[str, ...] = ()) -> S.Expr:
    return Resolver(theory, globals_).term(e, Scope(tms, ints, mode or default_mode(theory)))


__all__ = ["Resolver", "Scope", "resolve_decl", "resolve_term", "default_mode"]
