"""Semantic domain for normalization by evaluation.

Values erase locks, keys and exchange annotations: a variable's lock trail
is determined by its position, 2-cells are proof irrelevant, and keys act
silently on exchanged intervals, so none of them affect computation.

Interval values are DNFs over interval variable *levels*; a restriction to
a face clause is a substitution of endpoints for levels, applied lazily
through ``Env.alpha`` and ``act``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import core_syntax as S
from .errors import EvalError, TypeCheckError
from .interval_face import (
    F_BOT,
    F_TOP,
    FDnf,
    I_ONE,
    I_ZERO,
    IDnf,
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
    eq0_dnf,
    eq1_dnf,
    f_atoms,
    f_join,
    f_meet,
    f_subst,
    fjoin_all,
    fmeet_all,
    i_atom,
    i_atoms,
    i_join,
    i_meet,
    i_neg,
    i_subst,
    join_all,
    meet_all,
)
from .mode_theory import Modality, ModeTheory

Alpha = dict  # interval level -> 0/1

_fresh = itertools.count(10**9)


def fresh_name() -> int:
    """Interval or term level that never clashes with a context level."""
    return next(_fresh)


def compose_alpha(first: Alpha, then: Alpha) -> Alpha:
    if not first:
        return then
    if not then:
        return first
    out = dict(then)
    out.update(first)
    return out


def ivar(level: int) -> IDnf:
    return i_atom(level)


# --------------------------------------------------------------------------
# Signature


@dataclass
class Rewrite:
    """Unfolding ``c x1 .. xn = rhs`` with ``rhs`` in the parameter context."""

    arity: int
    rhs: S.Expr


@dataclass
class Decl:
    name: str
    mode: str
    kind: str  # def | theorem | axiom
    ty: S.Expr
    ty_val: "Value"
    body: Optional[S.Expr] = None
    body_val: Optional["Value"] = None
    rewrite: Optional[Rewrite] = None
    params: tuple = ()


@dataclass
class Signature:
    theory: ModeTheory
    decls: dict[str, Decl] = field(default_factory=dict)
    strict_mod_eq: bool = False
    unfold_fuel: int = 8

    def get(self, name: str) -> Decl:
        if name not in self.decls:
            raise TypeCheckError(f"unknown constant {name}", rule="term/var")
        return self.decls[name]


# --------------------------------------------------------------------------
# Environments and closures


class Env:
    __slots__ = ("tms", "ints", "alpha", "sig")

    def __init__(self, sig: Signature, tms=(), ints=(), alpha: Alpha | None = None):
        self.sig = sig
        self.tms = tms
        self.ints = ints
        self.alpha = alpha or {}

    def tm(self, index: int) -> "Value":
        try:
            v = self.tms[len(self.tms) - 1 - index]
        except IndexError:
            raise EvalError(f"term variable {index} unbound") from None
        if index >= len(self.tms):
            raise EvalError(f"term variable {index} unbound")
        return act(v, self.alpha) if self.alpha else v

    def int(self, index: int) -> IDnf:
        if index >= len(self.ints):
            raise EvalError(f"interval variable {index} unbound")
        r = self.ints[len(self.ints) - 1 - index]
        return i_subst(r, self.alpha) if self.alpha else r

    def ext_tm(self, v: "Value") -> "Env":
        return Env(self.sig, self.tms + (v,), self.ints, self.alpha)

    def ext_int(self, r: IDnf) -> "Env":
        return Env(self.sig, self.tms, self.ints + (r,), self.alpha)

    def act(self, alpha: Alpha) -> "Env":
        if not alpha:
            return self
        return Env(self.sig, self.tms, self.ints, compose_alpha(self.alpha, alpha))

    def pop_tm(self) -> "Env":
        return Env(self.sig, self.tms[:-1], self.ints, self.alpha)

    def pop_int(self) -> "Env":
        return Env(self.sig, self.tms, self.ints[:-1], self.alpha)


class Closure:
    """Binds one term variable."""

    __slots__ = ("env", "body", "fn", "alpha")

    def __init__(self, env: Env | None, body=None, fn: Callable | None = None, alpha: Alpha | None = None):
        self.env, self.body, self.fn, self.alpha = env, body, fn, alpha or {}

    def __call__(self, v: "Value") -> "Value":
        if self.fn is not None:
            out = self.fn(v)
            return act(out, self.alpha) if self.alpha else out
        return eval_expr(self.env.ext_tm(v), self.body)

    def act(self, alpha: Alpha) -> "Closure":
        if not alpha:
            return self
        if self.fn is not None:
            return Closure(None, fn=self.fn, alpha=compose_alpha(self.alpha, alpha))
        return Closure(self.env.act(alpha), self.body)


class IClosure:
    """Binds one interval variable."""

    __slots__ = ("env", "body", "fn", "alpha")

    def __init__(self, env: Env | None, body=None, fn: Callable | None = None, alpha: Alpha | None = None):
        self.env, self.body, self.fn, self.alpha = env, body, fn, alpha or {}

    def __call__(self, r: IDnf) -> "Value":
        if self.fn is not None:
            out = self.fn(r)
            return act(out, self.alpha) if self.alpha else out
        return eval_expr(self.env.ext_int(r), self.body)

    def act(self, alpha: Alpha) -> "IClosure":
        if not alpha:
            return self
        if self.fn is not None:
            return IClosure(None, fn=self.fn, alpha=compose_alpha(self.alpha, alpha))
        return IClosure(self.env.act(alpha), self.body)


def const_closure(v: "Value") -> Closure:
    return Closure(None, fn=lambda _x: v)


def const_iclosure(v: "Value") -> IClosure:
    return IClosure(None, fn=lambda _r: v)


class Thunk:
    """A system branch, forced only under a clause of its face."""

    __slots__ = ("fn", "alpha")

    def __init__(self, fn: Callable[[Alpha], "Value"], alpha: Alpha | None = None):
        self.fn, self.alpha = fn, alpha or {}

    def force(self, alpha: Alpha) -> "Value":
        return self.fn(compose_alpha(self.alpha, alpha))

    def act(self, alpha: Alpha) -> "Thunk":
        return Thunk(self.fn, compose_alpha(self.alpha, alpha))


def syntax_thunk(env: Env, body) -> Thunk:
    return Thunk(lambda a: eval_expr(env.act(a), body))


def value_thunk(v: "Value") -> Thunk:
    return Thunk(lambda a: act(v, a))


# --------------------------------------------------------------------------
# Values


class Value:
    __slots__ = ()


class VUniv(Value):
    __slots__ = ("level",)

    def __init__(self, level: int):
        self.level = level


class VPi(Value):
    __slots__ = ("mu", "dom", "cod", "name")

    def __init__(self, mu, dom, cod: Closure, name="x"):
        self.mu, self.dom, self.cod, self.name = mu, dom, cod, name


class VSigma(Value):
    __slots__ = ("dom", "cod", "name")

    def __init__(self, dom, cod: Closure, name="x"):
        self.dom, self.cod, self.name = dom, cod, name


class VPath(Value):
    __slots__ = ("line", "a0", "a1", "name")

    def __init__(self, line: IClosure, a0, a1, name="i"):
        self.line, self.a0, self.a1, self.name = line, a0, a1, name


class VModal(Value):
    __slots__ = ("mu", "ty")

    def __init__(self, mu: Modality, ty):
        self.mu, self.ty = mu, ty


class VBool(Value):
    __slots__ = ()


class VTrue(Value):
    __slots__ = ()


class VFalse(Value):
    __slots__ = ()


class VLam(Value):
    __slots__ = ("mu", "clo", "name")

    def __init__(self, mu, clo: Closure, name="x"):
        self.mu, self.clo, self.name = mu, clo, name


class VPLam(Value):
    __slots__ = ("clo", "name")

    def __init__(self, clo: IClosure, name="i"):
        self.clo, self.name = clo, name


class VPair(Value):
    __slots__ = ("fst", "snd")

    def __init__(self, a, b):
        self.fst, self.snd = a, b


class VBox(Value):
    __slots__ = ("mu", "v")

    def __init__(self, mu: Modality, v):
        self.mu, self.v = mu, v


class VSys(Value):
    """A system none of whose faces holds yet; type- or term-level."""

    __slots__ = ("branches",)

    def __init__(self, branches: tuple[tuple[FDnf, Thunk], ...]):
        self.branches = branches

    @property
    def face(self) -> FDnf:
        out = F_BOT
        for f, _ in self.branches:
            out = f_join(out, f)
        return out


class VNeu(Value):
    __slots__ = ("ne", "ty")

    def __init__(self, ne, ty: Optional[Value]):
        self.ne, self.ty = ne, ty


# neutral heads and eliminations


class NVar:
    __slots__ = ("level",)

    def __init__(self, level: int):
        self.level = level


class NConst:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class NApp:
    __slots__ = ("fn", "arg", "mu")

    def __init__(self, fn: VNeu, arg: Value, mu=None):
        self.fn, self.arg, self.mu = fn, arg, mu


class NPApp:
    __slots__ = ("p", "r")

    def __init__(self, p: VNeu, r: IDnf):
        self.p, self.r = p, r


class NFst:
    __slots__ = ("e",)

    def __init__(self, e: VNeu):
        self.e = e


class NSnd:
    __slots__ = ("e",)

    def __init__(self, e: VNeu):
        self.e = e


class NLetMod:
    __slots__ = ("nu", "mu", "motive", "scrut", "branch")

    def __init__(self, nu, mu, motive: Optional[Closure], scrut: VNeu, branch: Closure):
        self.nu, self.mu, self.motive, self.scrut, self.branch = nu, mu, motive, scrut, branch


class NIf:
    __slots__ = ("motive", "scrut", "tt", "ff")

    def __init__(self, motive: Optional[Closure], scrut: VNeu, tt, ff):
        self.motive, self.scrut, self.tt, self.ff = motive, scrut, tt, ff


class NComp:
    __slots__ = ("line", "phi", "tube", "cap")

    def __init__(self, line: IClosure, phi: FDnf, tube: IClosure, cap: Value):
        self.line, self.phi, self.tube, self.cap = line, phi, tube, cap


def var_value(level: int, ty: Optional[Value]) -> VNeu:
    return VNeu(NVar(level), ty)


# --------------------------------------------------------------------------
# Systems


def mk_sys(branches) -> Value:
    """Drop false branches; return the first branch whose face holds."""
    kept = []
    for face, th in branches:
        if not face:
            continue
        if frozenset() in face:
            return th.force({})
        kept.append((face, th))
    return VSys(tuple(kept))


def sys_map(v: VSys, f: Callable[[Value, Alpha], Value]) -> Value:
    """Distribute an elimination over the branches of a stuck system."""
    return VSys(tuple((face, Thunk(lambda a, th=th: f(th.force(a), a))) for face, th in v.branches))


def split_clauses(face: FDnf):
    return [dict(c) for c in sorted(face, key=lambda c: sorted(c))]


# --------------------------------------------------------------------------
# Eliminators


def app(f: Value, a: Value) -> Value:
    if isinstance(f, VLam):
        return f.clo(a)
    if isinstance(f, VNeu):
        ty = f.ty
        if isinstance(ty, VPi):
            return VNeu(NApp(f, a, ty.mu), ty.cod(a))
        return VNeu(NApp(f, a), None)
    if isinstance(f, VSys):
        return sys_map(f, lambda g, al: app(g, act(a, al)))
    raise EvalError(f"cannot apply {type(f).__name__}")


def papp(p: Value, r: IDnf) -> Value:
    if isinstance(p, VPLam):
        return p.clo(r)
    if isinstance(p, VNeu):
        ty = p.ty
        if isinstance(ty, VPath):
            if r == I_ZERO:
                return ty.a0
            if r == I_ONE:
                return ty.a1
            return VNeu(NPApp(p, r), ty.line(r))
        return VNeu(NPApp(p, r), None)
    if isinstance(p, VSys):
        return sys_map(p, lambda q, al: papp(q, i_subst(r, al)))
    raise EvalError(f"cannot apply {type(p).__name__} to an interval")


def fst(v: Value) -> Value:
    if isinstance(v, VPair):
        return v.fst
    if isinstance(v, VNeu):
        ty = v.ty
        return VNeu(NFst(v), ty.dom if isinstance(ty, VSigma) else None)
    if isinstance(v, VSys):
        return sys_map(v, lambda x, _a: fst(x))
    raise EvalError(f"cannot project from {type(v).__name__}")


def snd(v: Value) -> Value:
    if isinstance(v, VPair):
        return v.snd
    if isinstance(v, VNeu):
        ty = v.ty
        return VNeu(NSnd(v), ty.cod(fst(v)) if isinstance(ty, VSigma) else None)
    if isinstance(v, VSys):
        return sys_map(v, lambda x, _a: snd(x))
    raise EvalError(f"cannot project from {type(v).__name__}")


def letmod(nu, mu, motive: Optional[Closure], scrut: Value, branch: Closure, sig: Signature | None = None) -> Value:
    if isinstance(scrut, VBox):
        return branch(scrut.v)
    if isinstance(scrut, VNeu):
        if sig is not None and not sig.strict_mod_eq and nu.is_identity and _eta_branch(mu, branch):
            return scrut
        ty = motive(scrut) if motive is not None else None
        return VNeu(NLetMod(nu, mu, motive, scrut, branch), ty)
    if isinstance(scrut, VSys):
        return sys_map(
            scrut,
            lambda x, al: letmod(nu, mu, motive.act(al) if motive else None, x, branch.act(al), sig),
        )
    raise EvalError(f"cannot unbox {type(scrut).__name__}")


def _eta_branch(mu, branch: Closure) -> bool:
    """Does the branch rebuild the box it destructs (``y ↦ box_mu y``)?"""
    probe = fresh_name()
    out = branch(var_value(probe, None))
    return (
        isinstance(out, VBox)
        and out.mu.word == mu.word
        and isinstance(out.v, VNeu)
        and isinstance(out.v.ne, NVar)
        and out.v.ne.level == probe
    )


def if_(motive: Optional[Closure], b: Value, tt: Value, ff: Value) -> Value:
    if isinstance(b, VTrue):
        return tt
    if isinstance(b, VFalse):
        return ff
    if isinstance(b, VNeu):
        return VNeu(NIf(motive, b, tt, ff), motive(b) if motive is not None else None)
    if isinstance(b, VSys):
        return sys_map(
            b, lambda x, al: if_(motive.act(al) if motive else None, x, act(tt, al), act(ff, al))
        )
    raise EvalError(f"cannot branch on {type(b).__name__}")


def unbox(v: Value) -> Value:
    if isinstance(v, VBox):
        return v.v
    if isinstance(v, VSys):
        return sys_map(v, lambda x, _a: unbox(x))
    raise EvalError("not a box")


# --------------------------------------------------------------------------
# Face substitution on values


def act(v: Value, alpha: Alpha) -> Value:
    if not alpha:
        return v
    match v:
        case VUniv() | VBool() | VTrue() | VFalse():
            return v
        case VPi():
            return VPi(v.mu, act(v.dom, alpha), v.cod.act(alpha), v.name)
        case VSigma():
            return VSigma(act(v.dom, alpha), v.cod.act(alpha), v.name)
        case VPath():
            return VPath(v.line.act(alpha), act(v.a0, alpha), act(v.a1, alpha), v.name)
        case VModal():
            return VModal(v.mu, act(v.ty, alpha))
        case VLam():
            return VLam(v.mu, v.clo.act(alpha), v.name)
        case VPLam():
            return VPLam(v.clo.act(alpha), v.name)
        case VPair():
            return VPair(act(v.fst, alpha), act(v.snd, alpha))
        case VBox():
            return VBox(v.mu, act(v.v, alpha))
        case VSys():
            return mk_sys((f_subst(f, alpha), th.act(alpha)) for f, th in v.branches)
        case VNeu():
            return act_neu(v, alpha)
    raise EvalError(f"cannot act on {type(v).__name__}")


def act_neu(v: VNeu, alpha: Alpha) -> Value:
    ne = v.ne
    match ne:
        case NVar() | NConst():
            return VNeu(ne, None if v.ty is None else act(v.ty, alpha))
        case NApp():
            return app(act(ne.fn, alpha), act(ne.arg, alpha))
        case NPApp():
            return papp(act(ne.p, alpha), i_subst(ne.r, alpha))
        case NFst():
            return fst(act(ne.e, alpha))
        case NSnd():
            return snd(act(ne.e, alpha))
        case NLetMod():
            motive = ne.motive.act(alpha) if ne.motive is not None else None
            return letmod(ne.nu, ne.mu, motive, act(ne.scrut, alpha), ne.branch.act(alpha), _sig_of(ne.branch))
        case NIf():
            motive = ne.motive.act(alpha) if ne.motive is not None else None
            return if_(motive, act(ne.scrut, alpha), act(ne.tt, alpha), act(ne.ff, alpha))
        case NComp():
            from .kan import comp

            return comp(ne.line.act(alpha), f_subst(ne.phi, alpha), ne.tube.act(alpha), act(ne.cap, alpha))
    raise EvalError(f"unknown neutral {type(ne).__name__}")


def _sig_of(clo: Closure) -> Signature | None:
    return clo.env.sig if clo.env is not None else None


# --------------------------------------------------------------------------
# Evaluation


def eval_int(env: Env, r) -> IDnf:
    match r:
        case Zero():
            return I_ZERO
        case One():
            return I_ONE
        case IVar(index, _):
            return env.int(index)
        case Neg(a):
            return i_neg(eval_int(env, a))
        case Meet(a, b):
            return i_meet(eval_int(env, a), eval_int(env, b))
        case Join(a, b):
            return i_join(eval_int(env, a), eval_int(env, b))
        case IExc(_, a):
            return eval_int(env, a)
    raise EvalError(f"not an interval term: {r!r}")


def eval_face(env: Env, phi) -> FDnf:
    match phi:
        case FBot():
            return F_BOT
        case FTop():
            return F_TOP
        case Eq0(r):
            return eq0_dnf(eval_int(env, r))
        case Eq1(r):
            return eq1_dnf(eval_int(env, r))
        case FMeet(a, b):
            return f_meet(eval_face(env, a), eval_face(env, b))
        case FJoin(a, b):
            return f_join(eval_face(env, a), eval_face(env, b))
        case FExc(_, a):
            return eval_face(env, a)
    raise EvalError(f"not a face: {phi!r}")


def eval_expr(env: Env, e) -> Value:
    match e:
        case S.Var(index, _):
            return env.tm(index)
        case S.Const(name):
            d = env.sig.get(name)
            if d.body_val is not None:
                return d.body_val
            return VNeu(NConst(name), d.ty_val)
        case S.Univ(level):
            return VUniv(level)
        case S.Pi(mu, dom, cod, name):
            return VPi(mu, eval_expr(env, dom), Closure(env, cod), name)
        case S.Lam(mu, body, name):
            return VLam(mu, Closure(env, body), name)
        case S.App(fn, arg, _):
            return app(eval_expr(env, fn), eval_expr(env, arg))
        case S.Sigma(dom, cod, name):
            return VSigma(eval_expr(env, dom), Closure(env, cod), name)
        case S.Pair(a, b):
            return VPair(eval_expr(env, a), eval_expr(env, b))
        case S.Fst(a):
            return fst(eval_expr(env, a))
        case S.Snd(a):
            return snd(eval_expr(env, a))
        case S.Path(line, a0, a1, name):
            return VPath(IClosure(env, line), eval_expr(env, a0), eval_expr(env, a1), name)
        case S.PathAbs(body, name):
            return VPLam(IClosure(env, body), name)
        case S.PathApp(p, r):
            return papp(eval_expr(env, p), eval_int(env, r))
        case S.Modal(mu, ty):
            return VModal(mu, eval_expr(env, ty))
        case S.MkBox(mu, a):
            return VBox(mu, eval_expr(env, a))
        case S.LetMod(nu, mu, motive, scrut, branch, _, _):
            mot = Closure(env, motive) if motive is not None else None
            return letmod(nu, mu, mot, eval_expr(env, scrut), Closure(env, branch), env.sig)
        case S.SysTy(bs) | S.SysTm(bs):
            return mk_sys((eval_face(env, f), syntax_thunk(env, b)) for f, b in bs)
        case S.Comp(line, phi, tube, cap, _):
            from .kan import comp

            face = eval_face(env, phi)
            return comp(IClosure(env, line), face, restrict_tube(env, face, tube), eval_expr(env, cap))
        case S.Bool():
            return VBool()
        case S.TrueE():
            return VTrue()
        case S.FalseE():
            return VFalse()
        case S.If(motive, b, tt, ff, _):
            mot = Closure(env, motive) if motive is not None else None
            return if_(mot, eval_expr(env, b), eval_expr(env, tt), eval_expr(env, ff))
        case S.Ann(a, _):
            return eval_expr(env, a)
        case S.SubT(a, sigma) | S.SubTm(a, sigma):
            return eval_expr(eval_subst(env, sigma), a)
    raise EvalError(f"cannot evaluate {type(e).__name__}")


def restrict_tube(env: Env, face: FDnf, tube) -> IClosure:
    """A tube is only meaningful under its face; evaluate it lazily there."""

    def at(r: IDnf) -> Value:
        return mk_sys([(face, Thunk(lambda a: eval_expr(env.act(a).ext_int(i_subst(r, a)), tube)))])

    return IClosure(None, fn=at)


def eval_subst(env: Env, sigma) -> Env:
    match sigma:
        case S.Id() | S.WkFace() | S.Key() | S.ExcIntInv() | S.ExcFaceInv():
            return env
        case S.Compose(outer, inner):
            return eval_subst(eval_subst(env, inner), outer)
        case S.Empty():
            return Env(env.sig, (), (), env.alpha)
        case S.WkTm():
            return env.pop_tm()
        case S.WkInt():
            return env.pop_int()
        case S.LockApply(_, s) | S.RestrictSub(s, _):
            return eval_subst(env, s)
        case S.ExtTm(s, a, _, _):
            return eval_subst(env, s).ext_tm(eval_expr(env, a))
        case S.ExtInt(s, r):
            return eval_subst(env, s).ext_int(eval_int(env, r))
    raise EvalError(f"not a substitution: {sigma!r}")


# --------------------------------------------------------------------------
# Readback


@dataclass(frozen=True)
class Names:
    """Depths of the context a value is read back in."""

    tdepth: int = 0
    idepth: int = 0

    def bind_tm(self) -> "Names":
        return Names(self.tdepth + 1, self.idepth)

    def bind_int(self) -> "Names":
        return Names(self.tdepth, self.idepth + 1)


def quote_int(names: Names, r: IDnf):
    def lit(level, negated):
        idx = names.idepth - 1 - level
        if idx < 0:
            raise EvalError(f"interval level {level} escapes its scope")
        v = IVar(idx)
        return Neg(v) if negated else v

    clauses = sorted((sorted(c, key=lambda x: (x[0], x[1])) for c in r), key=lambda c: [(x[0], x[1]) for x in c])
    return join_all(meet_all(lit(a, n) for a, n in c) for c in clauses)


def quote_face(names: Names, phi: FDnf):
    def atom(level, bit):
        idx = names.idepth - 1 - level
        if idx < 0:
            raise EvalError(f"interval level {level} escapes its scope")
        return Eq1(IVar(idx)) if bit else Eq0(IVar(idx))

    clauses = sorted((sorted(c) for c in phi))
    return fjoin_all(fmeet_all(atom(a, b) for a, b in c) for c in clauses)


def quote(names: Names, v: Value, ty: Optional[Value] = None):
    """Read back a value; η-expands at Π, Path and Σ when the type is known."""
    if ty is not None and not isinstance(v, VSys):
        match ty:
            case VPi():
                x = var_value(names.tdepth, ty.dom)
                body = quote(names.bind_tm(), app(v, x), ty.cod(x))
                return S.Lam(ty.mu, body, ty.name)
            case VPath():
                k = ivar(names.idepth)
                return S.PathAbs(quote(names.bind_int(), papp(v, k), ty.line(k)), ty.name)
            case VSigma():
                a = fst(v)
                return S.Pair(quote(names, a, ty.dom), quote(names, snd(v), ty.cod(a)))
            case VModal():
                if isinstance(v, VBox):
                    return S.MkBox(v.mu, quote(names, v.v, ty.ty))
            case VUniv():
                return quote(names, v)
    match v:
        case VUniv():
            return S.Univ(v.level)
        case VPi():
            x = var_value(names.tdepth, v.dom)
            return S.Pi(v.mu, quote(names, v.dom, None), quote(names.bind_tm(), v.cod(x)), v.name)
        case VSigma():
            x = var_value(names.tdepth, v.dom)
            return S.Sigma(quote(names, v.dom), quote(names.bind_tm(), v.cod(x)), v.name)
        case VPath():
            k = ivar(names.idepth)
            line = v.line(k)
            return S.Path(
                quote(names.bind_int(), line),
                quote(names, v.a0, v.line(I_ZERO)),
                quote(names, v.a1, v.line(I_ONE)),
                v.name,
            )
        case VModal():
            return S.Modal(v.mu, quote(names, v.ty))
        case VBool():
            return S.Bool()
        case VTrue():
            return S.TrueE()
        case VFalse():
            return S.FalseE()
        case VLam():
            x = var_value(names.tdepth, None)
            return S.Lam(v.mu, quote(names.bind_tm(), v.clo(x)), v.name)
        case VPLam():
            k = ivar(names.idepth)
            return S.PathAbs(quote(names.bind_int(), v.clo(k)), v.name)
        case VPair():
            return S.Pair(quote(names, v.fst), quote(names, v.snd))
        case VBox():
            return S.MkBox(v.mu, quote(names, v.v))
        case VSys():
            return quote_sys(names, v, ty)
        case VNeu():
            return quote_neu(names, v)
    raise EvalError(f"cannot read back {type(v).__name__}")


def quote_sys(names: Names, v: VSys, ty: Optional[Value]):
    """Read a stuck system back one clause at a time."""
    out = []
    for face, th in v.branches:
        for clause in sorted(face, key=lambda c: sorted(c)):
            alpha = dict(clause)
            val = th.force(alpha)
            out.append((quote_face(names, frozenset([clause])), quote(names, val, act(ty, alpha) if ty is not None else None)))
    is_type = all(isinstance(b, (S.Pi, S.Sigma, S.Path, S.Modal, S.Bool, S.Univ, S.SysTy)) for _, b in out) and out
    return S.SysTy(tuple(out)) if is_type else S.SysTm(tuple(out))


def quote_neu(names: Names, v: VNeu):
    ne = v.ne
    match ne:
        case NVar(level=level):
            idx = names.tdepth - 1 - level
            if idx < 0:
                raise EvalError(f"term level {level} escapes its scope")
            return S.Var(idx)
        case NConst(name=name):
            return S.Const(name)
        case NApp():
            fty = ne.fn.ty
            dom = fty.dom if isinstance(fty, VPi) else None
            return S.App(quote_neu(names, ne.fn), quote(names, ne.arg, dom), ne.mu)
        case NPApp():
            return S.PathApp(quote_neu(names, ne.p), quote_int(names, ne.r))
        case NFst():
            return S.Fst(quote_neu(names, ne.e))
        case NSnd():
            return S.Snd(quote_neu(names, ne.e))
        case NLetMod():
            x = var_value(names.tdepth, None)
            motive = quote(names.bind_tm(), ne.motive(x)) if ne.motive is not None else None
            sty = ne.scrut.ty
            inner = sty.ty if isinstance(sty, VModal) else None
            y = var_value(names.tdepth, inner)
            bty = ne.motive(VBox(ne.nu, y)) if ne.motive is not None else None
            return S.LetMod(
                ne.nu, ne.mu, motive, quote_neu(names, ne.scrut), quote(names.bind_tm(), ne.branch(y), bty)
            )
        case NIf():
            x = var_value(names.tdepth, VBool())
            motive = quote(names.bind_tm(), ne.motive(x)) if ne.motive is not None else None
            tty = ne.motive(VTrue()) if ne.motive is not None else None
            fty = ne.motive(VFalse()) if ne.motive is not None else None
            return S.If(motive, quote_neu(names, ne.scrut), quote(names, ne.tt, tty), quote(names, ne.ff, fty))
        case NComp():
            k = ivar(names.idepth)
            inner = names.bind_int()
            line_k = ne.line(k)
            return S.Comp(
                quote(inner, line_k),
                quote_face(names, ne.phi),
                quote(inner, ne.tube(k), line_k),
                quote(names, ne.cap, ne.line(I_ZERO)),
            )
    raise EvalError(f"unknown neutral {type(ne).__name__}")


def normalize(sig: Signature, e, names: Names = Names(), env: Env | None = None, ty: Optional[Value] = None):
    env = env or Env(sig)
    return quote(names, eval_expr(env, e), ty)


def levels_in_face(phi: FDnf) -> set:
    return f_atoms(phi)


def levels_in_int(r: IDnf) -> set:
    return i_atoms(r)
