"""Core syntax: contexts, types and terms, explicit substitutions.

Types and terms share one expression family (universes are Russell
style).  Term variables and interval variables use separate de Bruijn
index spaces; locks and restrictions never shift indices.

Fields named ``mu`` on binders and applications record the modality of
the lock they introduce.  ``None`` there (and ``None`` motives) are holes
that only the elaborator may leave behind; the kernel rejects them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import IndexOutOfRange, MalformedSubstitution
from .interval_face import (
    AUTO,
    Eq0,
    Eq1,
    FaceExpr,
    FBot,
    FExc,
    FJoin,
    FMeet,
    FTop,
    IExc,
    IntervalExpr,
    IVar,
    Join,
    Meet,
    Neg,
    One,
    Zero,
    exc_face,
    exc_int,
)
from .mode_theory import Modality, ModeTheory

# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Var:
    """Term variable.  ``keyed`` marks access through a 2-cell key rather
    than an exactly matching lock trail."""

    index: int
    keyed: bool = False


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Univ:
    level: int = 0


@dataclass(frozen=True)
class Pi:
    mu: Optional[Modality]
    dom: "Expr"
    cod: "Expr"
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam:
    mu: Optional[Modality]
    body: "Expr"
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App:
    fn: "Expr"
    arg: "Expr"
    mu: Optional[Modality] = None


@dataclass(frozen=True)
class Sigma:
    dom: "Expr"
    cod: "Expr"
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Pair:
    fst: "Expr"
    snd: "Expr"


@dataclass(frozen=True)
class Fst:
    e: "Expr"


@dataclass(frozen=True)
class Snd:
    e: "Expr"


@dataclass(frozen=True)
class Path:
    """``line`` binds one interval variable."""

    line: "Expr"
    a0: "Expr"
    a1: "Expr"
    name: str = field(default="i", compare=False)


@dataclass(frozen=True)
class PathAbs:
    body: "Expr"
    name: str = field(default="i", compare=False)


@dataclass(frozen=True)
class PathApp:
    p: "Expr"
    r: IntervalExpr


@dataclass(frozen=True)
class Modal:
    mu: Modality
    ty: "Expr"


@dataclass(frozen=True)
class MkBox:
    mu: Modality
    e: "Expr"


@dataclass(frozen=True)
class LetMod:
    """``let_mu box_nu y = scrut in branch`` with motive binding ``x``."""

    nu: Modality
    mu: Modality
    motive: Optional["Expr"]
    scrut: "Expr"
    branch: "Expr"
    xname: str = field(default="x", compare=False)
    yname: str = field(default="y", compare=False)


@dataclass(frozen=True)
class SysTy:
    branches: tuple[tuple[FaceExpr, "Expr"], ...]


@dataclass(frozen=True)
class SysTm:
    branches: tuple[tuple[FaceExpr, "Expr"], ...]


@dataclass(frozen=True)
class Comp:
    """``comp^i line [phi ↦ tube] cap``; line and tube bind ``i``."""

    line: "Expr"
    phi: FaceExpr
    tube: "Expr"
    cap: "Expr"
    name: str = field(default="i", compare=False)


@dataclass(frozen=True)
class Bool:
    pass


@dataclass(frozen=True)
class TrueE:
    pass


@dataclass(frozen=True)
class FalseE:
    pass


@dataclass(frozen=True)
class If:
    motive: Optional["Expr"]
    scrut: "Expr"
    tt: "Expr"
    ff: "Expr"
    name: str = field(default="z", compare=False)


@dataclass(frozen=True)
class Ann:
    e: "Expr"
    ty: "Expr"


@dataclass(frozen=True)
class SubT:
    ty: "Expr"
    sigma: "SubstExpr"


@dataclass(frozen=True)
class SubTm:
    e: "Expr"
    sigma: "SubstExpr"


@dataclass(frozen=True)
class Zapp:
    """``f ⊛ a`` before elaboration into two modal lets."""

    fn: "Expr"
    arg: "Expr"
    mu: Optional[Modality] = None


Expr = Union[
    Var, Const, Univ, Pi, Lam, App, Sigma, Pair, Fst, Snd, Path, PathAbs, PathApp,
    Modal, MkBox, LetMod, SysTy, SysTm, Comp, Bool, TrueE, FalseE, If, Ann, SubT, SubTm, Zapp,
]


# --------------------------------------------------------------------------
# Substitutions (read ``σ : Δ → Γ``: terms of Γ become terms of Δ)


@dataclass(frozen=True)
class Id:
    pass


@dataclass(frozen=True)
class Compose:
    """``outer ∘ inner``: apply ``outer`` first, then ``inner``."""

    outer: "SubstExpr"
    inner: "SubstExpr"


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class WkTm:
    pass


@dataclass(frozen=True)
class WkInt:
    pass


@dataclass(frozen=True)
class WkFace:
    phi: FaceExpr


@dataclass(frozen=True)
class LockApply:
    mu: Modality
    sigma: "SubstExpr"


@dataclass(frozen=True)
class Key:
    """Key for a 2-cell ``src ≤ dst``: from ``Γ.🔒dst`` to ``Γ.🔒src``."""

    src: Modality
    dst: Modality


@dataclass(frozen=True)
class ExtTm:
    """``⟨σ, a⟩`` into ``Γ.x:(mu|ty)``; ``a`` lives behind ``mu``."""

    sigma: "SubstExpr"
    e: Expr
    mu: Optional[Modality] = None
    ty: Optional[Expr] = None


@dataclass(frozen=True)
class ExtInt:
    sigma: "SubstExpr"
    r: IntervalExpr


@dataclass(frozen=True)
class RestrictSub:
    sigma: "SubstExpr"
    phi: FaceExpr


@dataclass(frozen=True)
class ExcIntInv:
    """From ``Γ.🔒mu.j`` to ``Γ.i.🔒mu``."""

    mu: Modality


@dataclass(frozen=True)
class ExcFaceInv:
    """From ``Γ.🔒mu.⇑phi`` to ``Γ.phi.🔒mu``."""

    mu: Modality
    phi: FaceExpr


SubstExpr = Union[
    Id, Compose, Empty, WkTm, WkInt, WkFace, LockApply, Key, ExtTm, ExtInt, RestrictSub, ExcIntInv, ExcFaceInv,
]


def plus_int(sigma: SubstExpr) -> SubstExpr:
    """Lift ``σ : Δ → Γ`` to ``Δ.j → Γ.i``."""
    return ExtInt(Compose(sigma, WkInt()), IVar(0))


def exc_int_sub(mu: Modality) -> SubstExpr:
    """From ``Γ.i.🔒mu`` to ``Γ.🔒mu.j``: ``⟨WkInt.lock, ⇑q⟩``."""
    return ExtInt(LockApply(mu, WkInt()), IExc(mu, IVar(0)))


def exc_face_sub(mu: Modality, phi: FaceExpr) -> SubstExpr:
    """From ``Γ.phi.🔒mu`` to ``Γ.🔒mu.⇑phi``."""
    return RestrictSub(LockApply(mu, WkFace(phi)), FExc(mu, phi))


# --------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class Lock:
    mu: Modality


@dataclass(frozen=True)
class TmVar:
    mu: Modality
    ty: Expr
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class IntVar:
    name: str = field(default="i", compare=False)


@dataclass(frozen=True)
class Restrict:
    phi: FaceExpr


CtxEntry = Union[Lock, TmVar, IntVar, Restrict]


@dataclass(frozen=True)
class Ctx:
    mode: str
    entries: tuple[CtxEntry, ...] = ()

    def extend(self, *entries: CtxEntry) -> "Ctx":
        return Ctx(self.mode, self.entries + tuple(entries))


def ctx_mode(ctx: Ctx) -> str:
    mode = ctx.mode
    for e in ctx.entries:
        if isinstance(e, Lock):
            mode = e.mu.dom
    return mode


def _compose_list(theory: ModeTheory, mods: list[Modality]) -> Optional[Modality]:
    out = None
    for m in mods:
        out = m if out is None else theory.compose(out, m)
    return out


def locks_between(theory: ModeTheory, ctx: Ctx, var_index: int) -> Modality:
    """Composite of the locks right of the ``var_index``-th term variable."""
    seen = 0
    locks: list[Modality] = []
    for pos in range(len(ctx.entries) - 1, -1, -1):
        e = ctx.entries[pos]
        if isinstance(e, Lock):
            locks.append(e.mu)
        elif isinstance(e, TmVar):
            if seen == var_index:
                mode = ctx_mode(Ctx(ctx.mode, ctx.entries[: pos + 1]))
                out = _compose_list(theory, list(reversed(locks)))
                return theory.identity(mode) if out is None else out
            seen += 1
    raise IndexOutOfRange(f"term variable index {var_index} out of range")


def fuse_locks(theory: ModeTheory, ctx: Ctx) -> Ctx:
    """Fuse adjacent locks and drop identities."""
    out: list[CtxEntry] = []
    for e in ctx.entries:
        if isinstance(e, Lock):
            if out and isinstance(out[-1], Lock):
                e = Lock(theory.compose(out.pop().mu, e.mu))
            if e.mu.is_identity:
                continue
        out.append(e)
    return Ctx(ctx.mode, tuple(out))


# --------------------------------------------------------------------------
# Substitution


@dataclass(frozen=True)
class _Pos:
    """Where a traversal stands: binders and locks crossed since the root."""

    tcut: int = 0
    icut: int = 0
    trail: tuple[Modality, ...] = ()

    def bind_tm(self) -> "_Pos":
        return _Pos(self.tcut + 1, self.icut, self.trail)

    def bind_int(self) -> "_Pos":
        return _Pos(self.tcut, self.icut + 1, self.trail)

    def lock(self, mu: Optional[Modality]) -> "_Pos":
        if mu is None or mu.is_identity:
            return self
        return _Pos(self.tcut, self.icut, self.trail + (mu,))


class _Traversal:
    """Rebuild an expression, delegating free variables to hooks."""

    def __init__(self, theory: ModeTheory):
        self.theory = theory

    def tvar(self, v: Var, pos: _Pos) -> Expr:  # free term variable
        return v

    def ivar(self, v: IVar, pos: _Pos) -> IntervalExpr:  # free interval variable
        return v

    # -- intervals and faces

    def interval(self, r: IntervalExpr, pos: _Pos) -> IntervalExpr:
        match r:
            case Zero() | One():
                return r
            case IVar(index, _):
                return r if index < pos.icut else self.ivar(r, pos)
            case Neg(a):
                return Neg(self.interval(a, pos))
            case Meet(a, b):
                return Meet(self.interval(a, pos), self.interval(b, pos))
            case Join(a, b):
                return Join(self.interval(a, pos), self.interval(b, pos))
            case IExc(mu, a):
                return self.interval(exc_int(self.theory, mu, a), pos)
        raise MalformedSubstitution(f"not an interval term: {r!r}")

    def face(self, phi: FaceExpr, pos: _Pos) -> FaceExpr:
        match phi:
            case FBot() | FTop():
                return phi
            case Eq0(r):
                return Eq0(self.interval(r, pos))
            case Eq1(r):
                return Eq1(self.interval(r, pos))
            case FMeet(a, b):
                return FMeet(self.face(a, pos), self.face(b, pos))
            case FJoin(a, b):
                return FJoin(self.face(a, pos), self.face(b, pos))
            case FExc(mu, a):
                return self.face(exc_face(self.theory, mu, a), pos)
        raise MalformedSubstitution(f"not a face: {phi!r}")

    def sys(self, branches, pos: _Pos):
        return tuple((self.face(f, pos), self.expr(e, pos)) for f, e in branches)

    def opt(self, e, pos: _Pos):
        return None if e is None else self.expr(e, pos)

    def expr(self, e: Expr, pos: _Pos) -> Expr:
        x = self.expr
        match e:
            case Var(index, _):
                return e if index < pos.tcut else self.tvar(e, pos)
            case Const() | Univ() | Bool() | TrueE() | FalseE():
                return e
            case Pi(mu, dom, cod, name):
                return Pi(mu, x(dom, pos.lock(mu)), x(cod, pos.bind_tm()), name)
            case Lam(mu, body, name):
                return Lam(mu, x(body, pos.bind_tm()), name)
            case App(fn, arg, mu):
                return App(x(fn, pos), x(arg, pos.lock(mu)), mu)
            case Sigma(dom, cod, name):
                return Sigma(x(dom, pos), x(cod, pos.bind_tm()), name)
            case Pair(a, b):
                return Pair(x(a, pos), x(b, pos))
            case Fst(a):
                return Fst(x(a, pos))
            case Snd(a):
                return Snd(x(a, pos))
            case Path(line, a0, a1, name):
                return Path(x(line, pos.bind_int()), x(a0, pos), x(a1, pos), name)
            case PathAbs(body, name):
                return PathAbs(x(body, pos.bind_int()), name)
            case PathApp(p, r):
                return PathApp(x(p, pos), self.interval(r, pos))
            case Modal(mu, ty):
                return Modal(mu, x(ty, pos.lock(mu)))
            case MkBox(mu, a):
                return MkBox(mu, x(a, pos.lock(mu)))
            case LetMod(nu, mu, motive, scrut, branch, xn, yn):
                return LetMod(
                    nu, mu, self.opt(motive, pos.bind_tm()), x(scrut, pos.lock(nu)),
                    x(branch, pos.bind_tm()), xn, yn,
                )
            case SysTy(bs):
                return SysTy(self.sys(bs, pos))
            case SysTm(bs):
                return SysTm(self.sys(bs, pos))
            case Comp(line, phi, tube, cap, name):
                inner = pos.bind_int()
                return Comp(x(line, inner), self.face(phi, pos), x(tube, inner), x(cap, pos), name)
            case If(motive, scrut, tt, ff, name):
                return If(self.opt(motive, pos.bind_tm()), x(scrut, pos), x(tt, pos), x(ff, pos), name)
            case Ann(a, ty):
                return Ann(x(a, pos), x(ty, pos))
            case SubT(ty, sigma):
                return x(apply_subst(self.theory, sigma, ty), pos)
            case SubTm(a, sigma):
                return x(apply_subst(self.theory, sigma, a), pos)
            case Zapp(fn, arg, mu):
                return Zapp(x(fn, pos), x(arg, pos), mu)
        raise MalformedSubstitution(f"not an expression: {e!r}")

    def run(self, e, pos: _Pos | None = None):
        pos = pos or _Pos()
        if is_interval(e):
            return self.interval(e, pos)
        if is_face(e):
            return self.face(e, pos)
        return self.expr(e, pos)


def is_interval(e) -> bool:
    return isinstance(e, (Zero, One, IVar, Neg, Meet, Join, IExc))


def is_face(e) -> bool:
    return isinstance(e, (FBot, FTop, Eq0, Eq1, FMeet, FJoin, FExc))


class _Shift(_Traversal):
    """Weaken by ``dt`` term and ``di`` interval binders at the root."""

    def __init__(self, theory, dt: int, di: int, key_free: bool):
        super().__init__(theory)
        self.dt, self.di, self.key_free = dt, di, key_free

    def tvar(self, v, pos):
        return Var(v.index + self.dt, v.keyed or self.key_free)

    def ivar(self, v, pos):
        return IVar(v.index + self.di, v.exc)


def shift(theory: ModeTheory, e, dt: int = 1, di: int = 0, key_free: bool = False):
    if dt == 0 and di == 0 and not key_free:
        return e
    return _Shift(theory, dt, di, key_free).run(e)


def _trail_equal(theory: ModeTheory, trail: tuple, mu: Modality) -> bool:
    mods = list(trail)
    if not mods:
        return mu.is_identity
    acc = _compose_list(theory, mods)
    return (acc.dom, acc.cod) == (mu.dom, mu.cod) and acc.word == theory.normalize(mu.word)


class _Apply(_Traversal):
    """One primitive substitution applied below ``prefix`` locks."""

    def __init__(self, theory, sigma, prefix: tuple):
        super().__init__(theory)
        self.sigma = sigma
        self.prefix = prefix

    def tvar(self, v, pos):
        k = v.index - pos.tcut
        match self.sigma:
            case Id() | WkFace() | ExcIntInv() | ExcFaceInv():
                return v
            case WkInt():
                return v
            case WkTm():
                return Var(v.index + 1, v.keyed)
            case Key(src, dst):
                keyed = v.keyed or not (src.word == dst.word)
                return Var(v.index, keyed)
            case ExtTm(sigma, a, mu, _):
                if k == 0:
                    trail = self.prefix + pos.trail
                    same = mu is not None and _trail_equal(self.theory, trail, mu)
                    return shift(self.theory, a, pos.tcut, pos.icut, key_free=not same)
                inner = apply_subst(self.theory, sigma, Var(k - 1, v.keyed), self.prefix + pos.trail)
                return shift(self.theory, inner, pos.tcut, pos.icut)
            case ExtInt(sigma, _) | RestrictSub(sigma, _):
                inner = apply_subst(self.theory, sigma, Var(k, v.keyed), self.prefix + pos.trail)
                return shift(self.theory, inner, pos.tcut, pos.icut)
            case LockApply(mu, sigma):
                inner = apply_subst(self.theory, sigma, Var(k, v.keyed), (mu,) + self.prefix + pos.trail)
                return shift(self.theory, inner, pos.tcut, pos.icut)
            case Empty():
                raise MalformedSubstitution("free term variable under the empty substitution")
        raise MalformedSubstitution(f"not a substitution: {self.sigma!r}")

    def ivar(self, v, pos):
        k = v.index - pos.icut
        match self.sigma:
            case Id() | WkFace() | ExcFaceInv() | WkTm() | Key():
                return v
            case WkInt():
                return IVar(v.index + 1, v.exc)
            case ExcIntInv(mu):
                if k != 0:
                    return v
                acc = _compose_list(self.theory, list(self.prefix + pos.trail))
                return IVar(v.index, None if acc is None or acc.is_identity else acc)
            case ExtInt(sigma, r):
                if k == 0:
                    out = _Traversal(self.theory).run(shift(self.theory, r, pos.tcut, pos.icut))
                    if v.exc is not None and v.exc != AUTO:
                        out = exc_int(self.theory, v.exc, out)
                    return out
                inner = apply_subst(self.theory, sigma, IVar(k - 1, v.exc), self.prefix + pos.trail)
                return shift(self.theory, inner, pos.tcut, pos.icut)
            case ExtTm(sigma, _, _, _) | RestrictSub(sigma, _):
                inner = apply_subst(self.theory, sigma, IVar(k, v.exc), self.prefix + pos.trail)
                return shift(self.theory, inner, pos.tcut, pos.icut)
            case LockApply(mu, sigma):
                inner = apply_subst(self.theory, sigma, IVar(k, v.exc), (mu,) + self.prefix + pos.trail)
                return shift(self.theory, inner, pos.tcut, pos.icut)
            case Empty():
                raise MalformedSubstitution("free interval variable under the empty substitution")
        raise MalformedSubstitution(f"not a substitution: {self.sigma!r}")


def apply_subst(theory: ModeTheory, sigma: SubstExpr, e, prefix: tuple = ()):
    """Push ``sigma`` through ``e`` (a type, term, interval or face).

    ``prefix`` lists locks between the codomain of ``sigma`` and the root of
    ``e``; it is used when a substitution is applied under ``LockApply``.
    """
    match sigma:
        case Id():
            return _Traversal(theory).run(e) if _has_explicit_sub(e) else e
        case Compose(outer, inner):
            return apply_subst(theory, inner, apply_subst(theory, outer, e, prefix), prefix)
        case (Empty() | WkTm() | WkInt() | WkFace() | LockApply() | Key() | ExtTm() | ExtInt()
              | RestrictSub() | ExcIntInv() | ExcFaceInv()):
            return _Apply(theory, sigma, prefix).run(e)
    raise MalformedSubstitution(f"not a substitution: {sigma!r}")


def _has_explicit_sub(e) -> bool:
    if isinstance(e, (SubT, SubTm)):
        return True
    if not hasattr(e, "__dataclass_fields__"):
        return False
    for f in e.__dataclass_fields__:
        v = getattr(e, f)
        if isinstance(v, tuple):
            if any(_has_explicit_sub(x) for b in v for x in (b if isinstance(b, tuple) else (b,))):
                return True
        elif _has_explicit_sub(v):
            return True
    return False


def subst_top(theory: ModeTheory, e, a: Expr, mu: Optional[Modality] = None):
    """Instantiate term variable 0 of ``e`` with ``a``."""
    return apply_subst(theory, ExtTm(Id(), a, mu), e)


def subst_top_int(theory: ModeTheory, e, r: IntervalExpr):
    return apply_subst(theory, ExtInt(Id(), r), e)


def expand_exchanges(theory: ModeTheory, e):
    """Replace ``IExc``/``FExc`` nodes by annotation arithmetic."""
    return _Traversal(theory).run(e)


# --------------------------------------------------------------------------
# S-expression dump


def _mod(m) -> str:
    return "_" if m is None else str(m)


def dump(e) -> str:
    """Stable s-expression rendering; head symbols follow the rule names."""
    d = dump
    match e:
        # intervals
        case Zero():
            return "(int/bot)"
        case One():
            return "(int/top)"
        case IVar(index, exc):
            return f"(int/var {index})" if exc is None else f"(int/var {index} {_mod(exc) if exc != AUTO else '?'})"
        case Neg(r):
            return f"(int/inv {d(r)})"
        case Meet(r, s):
            return f"(int/meet {d(r)} {d(s)})"
        case Join(r, s):
            return f"(int/join {d(r)} {d(s)})"
        case IExc(mu, r):
            return f"(int/exc {mu} {d(r)})"
        # faces
        case FBot():
            return "(face/bot)"
        case FTop():
            return "(face/top)"
        case Eq0(r):
            return f"(face/eq {d(r)} 0)"
        case Eq1(r):
            return f"(face/eq {d(r)} 1)"
        case FMeet(a, b):
            return f"(face/meet {d(a)} {d(b)})"
        case FJoin(a, b):
            return f"(face/join {d(a)} {d(b)})"
        case FExc(mu, a):
            return f"(face/exc {mu} {d(a)})"
        # substitutions
        case Id():
            return "(sb/id)"
        case Compose(o, i):
            return f"(sb/comp {d(o)} {d(i)})"
        case Empty():
            return "(sb/emp)"
        case WkTm():
            return "(sb/weak-type)"
        case WkInt():
            return "(sb/weak-int)"
        case WkFace(phi):
            return f"(sb/weak-res {d(phi)})"
        case LockApply(mu, s):
            return f"(sb/lock {mu} {d(s)})"
        case Key(src, dst):
            return f"(sb/key {src} {dst})"
        case ExtTm(s, a, mu, _):
            return f"(sb/ext-type {d(s)} {_mod(mu)} {d(a)})"
        case ExtInt(s, r):
            return f"(sb/ext-int {d(s)} {d(r)})"
        case RestrictSub(s, phi):
            return f"(sb/face-res {d(s)} {d(phi)})"
        case ExcIntInv(mu):
            return f"(sb/exc-int-inv {mu})"
        case ExcFaceInv(mu, phi):
            return f"(sb/exc-face-inv {mu} {d(phi)})"
        # expressions
        case Var(index, keyed):
            return f"(term/var {index} key)" if keyed else f"(term/var {index})"
        case Const(name):
            return f"(const {name})"
        case Univ(level):
            return f"(type/univ {level})"
        case Pi(mu, dom, cod, _):
            return f"(type/pi {_mod(mu)} {d(dom)} {d(cod)})"
        case Lam(mu, body, _):
            return f"(term/pi-lam {_mod(mu)} {d(body)})"
        case App(fn, arg, mu):
            return f"(term/pi-app {_mod(mu)} {d(fn)} {d(arg)})"
        case Sigma(dom, cod, _):
            return f"(type/sigma {d(dom)} {d(cod)})"
        case Pair(a, b):
            return f"(term/sigma-pair {d(a)} {d(b)})"
        case Fst(a):
            return f"(term/sigma-fst {d(a)})"
        case Snd(a):
            return f"(term/sigma-snd {d(a)})"
        case Path(line, a0, a1, _):
            return f"(type/path {d(line)} {d(a0)} {d(a1)})"
        case PathAbs(body, _):
            return f"(term/path-abs {d(body)})"
        case PathApp(p, r):
            return f"(term/path-app {d(p)} {d(r)})"
        case Modal(mu, ty):
            return f"(type/mod {mu} {d(ty)})"
        case MkBox(mu, a):
            return f"(term/mod-mod {mu} {d(a)})"
        case LetMod(nu, mu, motive, scrut, branch, _, _):
            mot = "_" if motive is None else d(motive)
            return f"(term/mod-let {nu} {mu} {mot} {d(scrut)} {d(branch)})"
        case SysTy(bs):
            inner = " ".join(f"({d(f)} {d(a)})" for f, a in bs)
            return f"(type/sys {inner})" if bs else "(type/sys)"
        case SysTm(bs):
            if not bs:
                return "(term/sys-null)"
            inner = " ".join(f"({d(f)} {d(a)})" for f, a in bs)
            return f"(term/sys-bin {inner})"
        case Comp(line, phi, tube, cap, _):
            return f"(term/comp {d(line)} {d(phi)} {d(tube)} {d(cap)})"
        case Bool():
            return "(type/bool)"
        case TrueE():
            return "(term/true)"
        case FalseE():
            return "(term/false)"
        case If(motive, b, t, f, _):
            mot = "_" if motive is None else d(motive)
            return f"(term/if {mot} {d(b)} {d(t)} {d(f)})"
        case Ann(a, ty):
            return f"(term/ann {d(a)} {d(ty)})"
        case SubT(ty, s):
            return f"(type/sb {d(ty)} {d(s)})"
        case SubTm(a, s):
            return f"(term/sb {d(a)} {d(s)})"
        case Zapp(f, a, _):
            return f"(zapp {d(f)} {d(a)})"
    raise TypeError(f"cannot dump {e!r}")
