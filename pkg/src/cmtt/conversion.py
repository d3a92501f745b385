"""Type-directed definitional equality on values.

Functions, paths and pairs are compared through η.  Stuck systems are
compared clause by clause.  Neutral applications of axioms that carry a
rewrite are unfolded, a bounded number of times, when the spines differ.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import core_syntax as S
from .errors import ResourceError
from .interval_face import I_ONE, I_ZERO
from .semantics import (
    Closure,
    Env,
    Names,
    NApp,
    NComp,
    NConst,
    NFst,
    NIf,
    NLetMod,
    NPApp,
    NSnd,
    NVar,
    Signature,
    Value,
    VBool,
    VBox,
    VFalse,
    VLam,
    VModal,
    VNeu,
    VPair,
    VPath,
    VPi,
    VPLam,
    VSigma,
    VSys,
    VTrue,
    VUniv,
    act,
    app,
    eval_expr,
    fst,
    if_,
    ivar,
    letmod,
    papp,
    quote,
    snd,
    var_value,
)

MAX_CLAUSES = 64


@dataclass
class Conv:
    sig: Signature
    fuel: int = 8
    max_clauses: int = MAX_CLAUSES

    # -- entry points ------------------------------------------------------

    def eq(self, names: Names, ty: Value | None, a: Value, b: Value) -> bool:
        if isinstance(a, VSys):
            return self._split(names, a.face, ty, a, b)
        if isinstance(b, VSys):
            return self._split(names, b.face, ty, a, b)
        if isinstance(ty, VSys):
            return self._split(names, ty.face, ty, a, b)
        match ty:
            case VPi():
                x = var_value(names.tdepth, ty.dom)
                return self.eq(names.bind_tm(), ty.cod(x), app(a, x), app(b, x))
            case VPath():
                k = ivar(names.idepth)
                return self.eq(names.bind_int(), ty.line(k), papp(a, k), papp(b, k))
            case VSigma():
                a1, b1 = fst(a), fst(b)
                if not self.eq(names, ty.dom, a1, b1):
                    return False
                return self.eq(names, ty.cod(a1), snd(a), snd(b))
            case VModal():
                if isinstance(a, VBox) and isinstance(b, VBox):
                    return self.eq(names, ty.ty, a.v, b.v)
            case VUniv():
                return self.eq_ty(names, a, b)
        return self.eq_struct(names, a, b)

    def eq_ty(self, names: Names, a: Value, b: Value) -> bool:
        if isinstance(a, VSys):
            return self._split(names, a.face, None, a, b, types=True)
        if isinstance(b, VSys):
            return self._split(names, b.face, None, a, b, types=True)
        match a, b:
            case VUniv(), VUniv():
                return a.level == b.level
            case VBool(), VBool():
                return True
            case VPi(), VPi():
                if a.mu != b.mu or not self.eq_ty(names, a.dom, b.dom):
                    return False
                x = var_value(names.tdepth, a.dom)
                return self.eq_ty(names.bind_tm(), a.cod(x), b.cod(x))
            case VSigma(), VSigma():
                if not self.eq_ty(names, a.dom, b.dom):
                    return False
                x = var_value(names.tdepth, a.dom)
                return self.eq_ty(names.bind_tm(), a.cod(x), b.cod(x))
            case VPath(), VPath():
                k = ivar(names.idepth)
                if not self.eq_ty(names.bind_int(), a.line(k), b.line(k)):
                    return False
                return self.eq(names, a.line(I_ZERO), a.a0, b.a0) and self.eq(names, a.line(I_ONE), a.a1, b.a1)
            case VModal(), VModal():
                return a.mu == b.mu and self.eq_ty(names, a.ty, b.ty)
        return self.eq_struct(names, a, b)

    # -- helpers -----------------------------------------------------------

    def _split(self, names, face, ty, a, b, types: bool = False) -> bool:
        if len(face) > self.max_clauses:
            raise ResourceError(
                f"system splits into {len(face)} clauses (limit {self.max_clauses})", rule="conv/split"
            )
        for clause in sorted(face, key=lambda c: sorted(c)):
            alpha = dict(clause)
            ta = None if ty is None else act(ty, alpha)
            a1, b1 = act(a, alpha), act(b, alpha)
            if isinstance(a1, VSys) and isinstance(b1, VSys) and not alpha:
                return self.eq_struct(names, a1, b1)
            ok = self.eq_ty(names, a1, b1) if types else self.eq(names, ta, a1, b1)
            if not ok:
                return False
        return True

    def eq_struct(self, names: Names, a: Value, b: Value) -> bool:
        match a, b:
            case VTrue(), VTrue():
                return True
            case VFalse(), VFalse():
                return True
            case VUniv(), VUniv():
                return a.level == b.level
            case VBox(), VBox():
                return a.mu == b.mu and self.eq(names, None, a.v, b.v)
            case VPair(), VPair():
                return self.eq(names, None, a.fst, b.fst) and self.eq(names, None, a.snd, b.snd)
            case VLam(), VLam():
                x = var_value(names.tdepth, None)
                return self.eq(names.bind_tm(), None, a.clo(x), b.clo(x))
            case VPLam(), VPLam():
                k = ivar(names.idepth)
                return self.eq(names.bind_int(), None, a.clo(k), b.clo(k))
            case (VPi() | VSigma() | VPath() | VModal() | VBool()), _:
                if type(a) is type(b):
                    return self.eq_ty(names, a, b)
            case VNeu(), VNeu():
                if self.eq_neu(names, a, b):
                    return True
        if isinstance(a, VSys) or isinstance(b, VSys):
            return quote(names, a) == quote(names, b)
        return self._unfold_retry(names, a, b)

    def _unfold_retry(self, names, a, b) -> bool:
        if self.fuel <= 0:
            return False
        ua = unfold(self.sig, a) if isinstance(a, VNeu) else None
        ub = unfold(self.sig, b) if isinstance(b, VNeu) else None
        if ua is None and ub is None:
            return False
        self.fuel -= 1
        try:
            ty = a.ty if isinstance(a, VNeu) else (b.ty if isinstance(b, VNeu) else None)
            return self.eq(names, ty, ua if ua is not None else a, ub if ub is not None else b)
        finally:
            self.fuel += 1

    def eq_neu(self, names: Names, a: VNeu, b: VNeu) -> bool:
        x, y = a.ne, b.ne
        match x, y:
            case NVar(), NVar():
                return x.level == y.level
            case NConst(), NConst():
                return x.name == y.name
            case NApp(), NApp():
                if not self.eq_neu(names, x.fn, y.fn):
                    return False
                fty = x.fn.ty
                return self.eq(names, fty.dom if isinstance(fty, VPi) else None, x.arg, y.arg)
            case NPApp(), NPApp():
                return x.r == y.r and self.eq_neu(names, x.p, y.p)
            case NFst(), NFst():
                return self.eq_neu(names, x.e, y.e)
            case NSnd(), NSnd():
                return self.eq_neu(names, x.e, y.e)
            case NLetMod(), NLetMod():
                if x.nu != y.nu or x.mu != y.mu or not self.eq_neu(names, x.scrut, y.scrut):
                    return False
                sty = x.scrut.ty
                inner = sty.ty if isinstance(sty, VModal) else None
                v = var_value(names.tdepth, inner)
                bty = x.motive(VBox(x.nu, v)) if x.motive is not None else None
                return self.eq(names.bind_tm(), bty, x.branch(v), y.branch(v))
            case NIf(), NIf():
                if not self.eq_neu(names, x.scrut, y.scrut):
                    return False
                tty = x.motive(VTrue()) if x.motive is not None else None
                fty = x.motive(VFalse()) if x.motive is not None else None
                return self.eq(names, tty, x.tt, y.tt) and self.eq(names, fty, x.ff, y.ff)
            case NComp(), NComp():
                if x.phi != y.phi:
                    return False
                k = ivar(names.idepth)
                inner = names.bind_int()
                line_k = x.line(k)
                if not self.eq_ty(inner, line_k, y.line(k)):
                    return False
                if x.phi and not self._split(inner, x.phi, line_k, x.tube(k), y.tube(k)):
                    return False
                return self.eq(names, x.line(I_ZERO), x.cap, y.cap)
        return False


# --------------------------------------------------------------------------
# Rewrite unfolding


def spine(v: VNeu):
    """Head neutral and the eliminations applied to it, innermost first."""
    elims = []
    cur = v
    while True:
        ne = cur.ne
        match ne:
            case NApp():
                elims.append(ne)
                cur = ne.fn
            case NPApp():
                elims.append(ne)
                cur = ne.p
            case NFst() | NSnd():
                elims.append(ne)
                cur = ne.e
            case NLetMod():
                elims.append(ne)
                cur = ne.scrut
            case NIf():
                elims.append(ne)
                cur = ne.scrut
            case _:
                elims.reverse()
                return cur, elims


def replay(v: Value, elim, sig: Signature) -> Value:
    match elim:
        case NApp():
            return app(v, elim.arg)
        case NPApp():
            return papp(v, elim.r)
        case NFst():
            return fst(v)
        case NSnd():
            return snd(v)
        case NLetMod():
            return letmod(elim.nu, elim.mu, elim.motive, v, elim.branch, sig)
        case NIf():
            return if_(elim.motive, v, elim.tt, elim.ff)
    raise TypeError(elim)


def unfold(sig: Signature, v: VNeu) -> Value | None:
    """One rewrite step at the head of a neutral, if a rewrite applies."""
    head, elims = spine(v)
    if not isinstance(head.ne, NConst):
        return None
    decl = sig.decls.get(head.ne.name)
    if decl is None or decl.rewrite is None:
        return None
    n = decl.rewrite.arity
    if len(elims) < n or not all(isinstance(e, NApp) for e in elims[:n]):
        return None
    env = Env(sig, tuple(e.arg for e in elims[:n]))
    out = eval_expr(env, decl.rewrite.rhs)
    for e in elims[n:]:
        out = replay(out, e, sig)
    return out


def conv(sig: Signature, names: Names, ty: Value | None, a: Value, b: Value) -> bool:
    return Conv(sig, fuel=sig.unfold_fuel).eq(names, ty, a, b)


def conv_ty(sig: Signature, names: Names, a: Value, b: Value) -> bool:
    return Conv(sig, fuel=sig.unfold_fuel).eq_ty(names, a, b)


def equal_terms(sig: Signature, ctx_env: Env, names: Names, ty: Value | None, e1: S.Expr, e2: S.Expr) -> bool:
    return conv(sig, names, ty, eval_expr(ctx_env, e1), eval_expr(ctx_env, e2))


__all__ = ["Conv", "conv", "conv_ty", "unfold", "equal_terms", "MAX_CLAUSES", "Closure"]
