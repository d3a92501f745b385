"""Bidirectional checking and elaboration.

One engine serves two purposes.  In *elaborate* mode it fills the holes
the surface translation leaves (modality annotations, motives, key flags
and exchange annotations, ``⊛``) and returns the completed core term.  In
*kernel* mode it accepts only complete core terms and checks them against
the primitive rules; every declaration is elaborated first and then
re-checked by the kernel.

Restrictions are never kept symbolically: a frame is restricted to one
clause of a face at a time, by substituting endpoints into its
environment, and a judgement under a face holds when it holds under each
clause.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

from . import core_syntax as S
from .conversion import MAX_CLAUSES, Conv
from .errors import (
    BoundaryMismatch,
    CmttError,
    ConversionError,
    CoverNotTotal,
    DuplicateName,
    LockMismatch,
    MalformedSubstitution,
    ModeMismatch,
    NotAFunction,
    NotAPath,
    NotModal,
    OverlapMismatch,
    ResourceError,
    TypeCheckError,
    UnknownVariable,
)
from .interval_face import (
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
    exc_face,
    exc_int,
    f_join,
    f_meet,
)
from .mode_theory import Modality, ModeTheory
from .semantics import (
    Decl,
    Env,
    FDnf,
    Names,
    Rewrite,
    Signature,
    Value,
    VBool,
    VBox,
    VModal,
    VPath,
    VPi,
    VSigma,
    VSys,
    VUniv,
    act,
    eval_expr,
    eval_face,
    eval_int,
    fst,
    ivar,
    quote,
    quote_face,
    var_value,
)
from .interval_face import I_ONE, I_ZERO

# --------------------------------------------------------------------------
# Frames: a context together with its semantic environment


class Frame:
    """A context restricted to (at most) one face clause.

    ``entries`` is the syntactic context; ``env``/``tys`` give the values
    and types of its variables in the ambient world, whose depth is
    ``names``.  The two agree except in frames built for the codomain of
    an explicit substitution (``rebased``).
    """

    __slots__ = ("base_mode", "entries", "env", "tys", "names", "mode", "inames", "rebased")

    def __init__(self, base_mode, entries, env, tys, names, mode, inames, rebased=False):
        self.base_mode = base_mode
        self.entries = entries
        self.env = env
        self.tys = tys
        self.names = names
        self.mode = mode
        self.inames = inames
        self.rebased = rebased

    @staticmethod
    def empty(sig: Signature, mode: str) -> "Frame":
        sig.theory.identity(mode)
        return Frame(mode, (), Env(sig), (), Names(), mode, {})

    def _with(self, **kw) -> "Frame":
        vals = {k: getattr(self, k) for k in self.__slots__}
        vals.update(kw)
        return Frame(**vals)

    # -- extension ---------------------------------------------------------

    def ext_tm(self, mu: Modality, ty: S.Expr | None, ty_val: Value, name: str = "x") -> "Frame":
        v = var_value(self.names.tdepth, ty_val)
        return self._with(
            entries=self.entries + (S.TmVar(mu, ty, name),),
            env=self.env.ext_tm(v),
            tys=self.tys + (ty_val,),
            names=self.names.bind_tm(),
        )

    def ext_tm_value(self, mu, ty, ty_val, value, name="x") -> "Frame":
        return self._with(
            entries=self.entries + (S.TmVar(mu, ty, name),),
            env=self.env.ext_tm(value),
            tys=self.tys + (ty_val,),
            rebased=True,
        )

    def ext_int(self, name: str = "i") -> "Frame":
        level = self.names.idepth
        inames = dict(self.inames)
        inames[level] = name
        return self._with(
            entries=self.entries + (S.IntVar(name),),
            env=self.env.ext_int(ivar(level)),
            names=self.names.bind_int(),
            inames=inames,
        )

    def ext_int_value(self, r, name="i") -> "Frame":
        return self._with(entries=self.entries + (S.IntVar(name),), env=self.env.ext_int(r), rebased=True)

    def lock(self, theory: ModeTheory, mu: Modality, rule: str = "cx/lock") -> "Frame":
        if mu.cod != self.mode:
            raise ModeMismatch(
                f"lock {mu} : {mu.dom} -> {mu.cod} used at mode {self.mode}", rule=rule, mode=self.mode
            )
        return self._with(entries=self.entries + (S.Lock(mu),), mode=mu.dom)

    def restrict(self, phi: S.FaceExpr, clause: dict) -> "Frame":
        return self._with(entries=self.entries + (S.Restrict(phi),), env=self.env.act(clause))

    # -- popping (codomains of weakenings) ------------------------------------

    def pop(self) -> "Frame":
        if not self.entries:
            raise MalformedSubstitution("weakening of the empty context", rule="sb/weak-type")
        top = self.entries[-1]
        rest = self.entries[:-1]
        match top:
            case S.TmVar():
                return self._with(entries=rest, env=self.env.pop_tm(), tys=self.tys[:-1], rebased=True)
            case S.IntVar():
                return self._with(entries=rest, env=self.env.pop_int(), rebased=True)
            case S.Lock(mu):
                return self._with(entries=rest, mode=mu.cod, rebased=True)
            case S.Restrict():
                return self._with(entries=rest, rebased=True)
        raise MalformedSubstitution(f"unknown context entry {top!r}")

    def trailing_locks(self) -> list[Modality]:
        out = []
        for e in reversed(self.entries):
            if not isinstance(e, S.Lock):
                break
            out.append(e.mu)
        out.reverse()
        return out

    def pop_locks(self, theory: ModeTheory, mu: Modality, rule: str) -> "Frame":
        """Remove trailing locks whose composite is ``mu``."""
        if mu.is_identity and mu.cod == self.mode:
            fr = self
            while fr.entries and isinstance(fr.entries[-1], S.Lock) and fr.entries[-1].mu.is_identity:
                fr = fr.pop()
            return fr
        locks = self.trailing_locks()
        fr = self
        acc = None
        for k in range(1, len(locks) + 1):
            fr = fr.pop()
            m = locks[-k]
            acc = m if acc is None else theory.compose(m, acc)
            if (acc.dom, acc.cod) == (mu.dom, mu.cod) and acc.word == mu.word:
                return fr
        raise MalformedSubstitution(f"context does not end in a lock {mu}", rule=rule, mode=self.mode)

    # -- lookup ------------------------------------------------------------

    def lookup_tm(self, theory: ModeTheory, index: int):
        """Annotation, lock trail, type and name of term variable ``index``."""
        seen = 0
        locks: list[Modality] = []
        ntm = len(self.tys)
        for pos in range(len(self.entries) - 1, -1, -1):
            e = self.entries[pos]
            if isinstance(e, S.Lock):
                locks.append(e.mu)
            elif isinstance(e, S.TmVar):
                if seen == index:
                    locks.reverse()
                    trail = theory.compose_all(locks, locks[0].cod) if locks else theory.identity(self.mode)
                    ty = self.tys[ntm - 1 - index]
                    if self.env.alpha:
                        ty = act(ty, self.env.alpha)
                    return e.mu, trail, ty, e.name
                seen += 1
        raise UnknownVariable(f"term variable {index} is not bound", rule="term/var", mode=self.mode)

    def lookup_int(self, theory: ModeTheory, index: int):
        seen = 0
        locks: list[Modality] = []
        for pos in range(len(self.entries) - 1, -1, -1):
            e = self.entries[pos]
            if isinstance(e, S.Lock):
                locks.append(e.mu)
            elif isinstance(e, S.IntVar):
                if seen == index:
                    locks.reverse()
                    trail = theory.compose_all(locks, locks[0].cod) if locks else theory.identity(self.mode)
                    return trail, e.name
                seen += 1
        raise UnknownVariable(f"interval variable {index} is not bound", rule="int/var", mode=self.mode)

    def split_at_last_lock(self):
        """Frame before the last lock, the lock, and the number of interval
        binders after it."""
        fr = self
        d_int = 0
        while fr.entries:
            top = fr.entries[-1]
            if isinstance(top, S.Lock):
                return fr.pop(), top.mu, d_int
            if isinstance(top, S.IntVar):
                d_int += 1
            fr = fr.pop()
        return None, None, d_int

    def to_ctx(self) -> S.Ctx:
        return S.Ctx(self.base_mode, self.entries)

    def clause_text(self) -> str | None:
        alpha = self.env.alpha
        if not alpha:
            return None
        parts = [f"({self.inames.get(k, f'i{k}')}={v})" for k, v in sorted(alpha.items())]
        return " ∧ ".join(parts)


# --------------------------------------------------------------------------
# The engine


@dataclass
class Checker:
    sig: Signature
    elaborate: bool = False
    max_clauses: int = MAX_CLAUSES
    decl: Optional[str] = None

    @property
    def theory(self) -> ModeTheory:
        return self.sig.theory

    # -- helpers -----------------------------------------------------------

    def fail(self, cls, fr: Frame | None, msg: str, rule: str):
        return cls(
            msg,
            rule=rule,
            mode=None if fr is None else fr.mode,
            clause=None if fr is None else fr.clause_text(),
            decl=self.decl,
        )

    def conv(self) -> Conv:
        return Conv(self.sig, fuel=self.sig.unfold_fuel, max_clauses=self.max_clauses)

    def eq_tm(self, fr: Frame, ty, a, b) -> bool:
        return self.conv().eq(fr.names, ty, a, b)

    def eq_ty(self, fr: Frame, a, b) -> bool:
        return self.conv().eq_ty(fr.names, a, b)

    def eval(self, fr: Frame, e) -> Value:
        return eval_expr(fr.env, e)

    def show(self, fr: Frame, v: Value) -> str:
        from .pretty import show_value

        return show_value(fr, v)

    def show_expr(self, fr: Frame, e) -> str:
        from .pretty import show_expr

        return show_expr(fr, e)

    def clauses(self, fr: Frame, phi_expr, phi_val: FDnf):
        """Restrict ``fr`` to each clause of ``phi_val``."""
        if len(phi_val) > self.max_clauses:
            raise ResourceError(
                f"face splits into {len(phi_val)} clauses (limit {self.max_clauses})",
                rule="conv/split", mode=fr.mode, decl=self.decl,
            )
        return [fr.restrict(phi_expr, dict(c)) for c in sorted(phi_val, key=lambda c: sorted(c))]

    def require_no_holes(self, fr: Frame, what: str, rule: str):
        raise self.fail(TypeCheckError, fr, f"missing {what} in core term", rule)

    def default_mod(self, fr: Frame, mu):
        return self.theory.identity(fr.mode) if mu is None else mu

    def mod_eq(self, a: Modality, b: Modality) -> bool:
        return (a.dom, a.cod) == (b.dom, b.cod) and a.word == b.word

    def quote_in(self, fr: Frame, v: Value, rule: str):
        if fr.rebased:
            raise self.fail(TypeCheckError, fr, "annotation required under an explicit substitution", rule)
        return quote(fr.names, v)

    # -- intervals and faces -------------------------------------------------

    def check_int(self, fr: Frame, r):
        match r:
            case Zero() | One():
                return r
            case IVar(index, exc):
                trail, name = fr.lookup_int(self.theory, index)
                if self.elaborate:
                    return IVar(index, None if trail.is_identity else trail)
                if exc == AUTO:
                    self.require_no_holes(fr, "exchange annotation", "int/var")
                ann = self.theory.identity(trail.dom) if exc is None else exc
                if (ann.dom, ann.cod) != (trail.dom, trail.cod) or not self.theory.cell_exists(ann, trail):
                    raise self.fail(
                        LockMismatch, fr,
                        f"interval variable {name} carries exchange {ann} but sits behind locks {trail}",
                        "int/var",
                    )
                return r
            case Neg(a):
                return Neg(self.check_int(fr, a))
            case Meet(a, b):
                return Meet(self.check_int(fr, a), self.check_int(fr, b))
            case Join(a, b):
                return Join(self.check_int(fr, a), self.check_int(fr, b))
            case IExc(mu, a):
                base, lock, d_int = fr.split_at_last_lock()
                if base is None or not self.mod_eq(lock, mu):
                    raise self.fail(LockMismatch, fr, f"exchange {mu} does not match the innermost lock", "int/exc")
                inner = _shift_int(a, -d_int, fr)
                checked = self.check_int(base, inner)
                return _shift_int(exc_int(self.theory, mu, checked), d_int, fr)
        raise self.fail(TypeCheckError, fr, f"not an interval term: {r!r}", "int/var")

    def check_face(self, fr: Frame, phi):
        match phi:
            case FBot() | FTop():
                return phi
            case Eq0(r):
                return Eq0(self.check_int(fr, r))
            case Eq1(r):
                return Eq1(self.check_int(fr, r))
            case FMeet(a, b):
                return FMeet(self.check_face(fr, a), self.check_face(fr, b))
            case FJoin(a, b):
                return FJoin(self.check_face(fr, a), self.check_face(fr, b))
            case FExc(mu, a):
                base, lock, _ = fr.split_at_last_lock()
                if base is None or not self.mod_eq(lock, mu):
                    raise self.fail(LockMismatch, fr, f"exchange {mu} does not match the innermost lock", "face/exc")
                checked = self.check_face(base, a)
                return exc_face(self.theory, mu, checked)
        raise self.fail(TypeCheckError, fr, f"not a face: {phi!r}", "face/eq")

    # -- types ---------------------------------------------------------------

    def check_type(self, fr: Frame, e) -> tuple[S.Expr, int]:
        th = self.theory
        match e:
            case S.Univ(level):
                return e, level + 1
            case S.Bool():
                return e, 0
            case S.Pi(mu, dom, cod, name):
                mu = self.default_mod(fr, mu)
                if mu.cod != fr.mode:
                    raise self.fail(ModeMismatch, fr, f"modality {mu} : {mu.dom} -> {mu.cod} at mode {fr.mode}", "type/pi")
                dom1, l1 = self.check_type(fr.lock(th, mu, "type/pi"), dom)
                dval = self.eval(fr, dom1)
                cod1, l2 = self.check_type(fr.ext_tm(mu, dom1, dval, name), cod)
                return S.Pi(mu, dom1, cod1, name), max(l1, l2)
            case S.Sigma(dom, cod, name):
                dom1, l1 = self.check_type(fr, dom)
                dval = self.eval(fr, dom1)
                cod1, l2 = self.check_type(fr.ext_tm(th.identity(fr.mode), dom1, dval, name), cod)
                return S.Sigma(dom1, cod1, name), max(l1, l2)
            case S.Path(line, a0, a1, name):
                line1, lvl = self.check_type(fr.ext_int(name), line)
                env = fr.env
                t0 = eval_expr(env.ext_int(I_ZERO), line1)
                t1 = eval_expr(env.ext_int(I_ONE), line1)
                a01 = self.check(fr, a0, t0, "type/path")
                a11 = self.check(fr, a1, t1, "type/path")
                return S.Path(line1, a01, a11, name), lvl
            case S.Modal(mu, ty):
                if mu.cod != fr.mode:
                    raise self.fail(
                        ModeMismatch, fr, f"modality {mu} : {mu.dom} -> {mu.cod} used at mode {fr.mode}", "type/mod"
                    )
                ty1, lvl = self.check_type(fr.lock(th, mu, "type/mod"), ty)
                return S.Modal(mu, ty1), lvl
            case S.SysTy(branches) | S.SysTm(branches):
                out, lvl = self._check_system(fr, branches, None, types=True)
                return S.SysTy(out), lvl
            case S.SubT(ty, sigma):
                sigma1, gam = self.check_subst(fr, sigma)
                ty1, lvl = self.check_type(gam, ty)
                return S.SubT(ty1, sigma1), lvl
        e1, ty = self.infer(fr, e)
        if isinstance(ty, VUniv):
            return e1, ty.level
        raise self.fail(TypeCheckError, fr, f"expected a type, got a term of type {self.show(fr, ty)}", "type/univ")

    # -- inference -----------------------------------------------------------

    def infer(self, fr: Frame, e) -> tuple[S.Expr, Value]:
        th = self.theory
        match e:
            case S.Var(index, keyed):
                mu, trail, ty, name = fr.lookup_tm(th, index)
                if (mu.dom, mu.cod) != (trail.dom, trail.cod):
                    raise self.fail(
                        LockMismatch, fr,
                        f"variable {name} : ({mu} | ...) is used behind locks {trail} at the wrong mode",
                        "term/var",
                    )
                exact = self.mod_eq(mu, trail)
                if self.elaborate:
                    keyed = not exact
                elif not keyed and not exact:
                    raise self.fail(
                        LockMismatch, fr, f"variable {name} needs locks exactly {mu} but sits behind {trail}", "term/var"
                    )
                if keyed and not th.cell_exists(mu, trail):
                    raise self.fail(
                        LockMismatch, fr,
                        f"variable {name} : ({mu} | ...) is not accessible behind locks {trail}: no 2-cell {mu} ⇒ {trail}",
                        "term/var",
                    )
                return S.Var(index, keyed), ty
            case S.Const(name):
                if name not in self.sig.decls:
                    raise self.fail(UnknownVariable, fr, f"unknown constant {name}", "term/var")
                d = self.sig.decls[name]
                if d.mode != fr.mode:
                    raise self.fail(
                        ModeMismatch, fr, f"{name} lives at mode {d.mode}, used at mode {fr.mode}", "term/var"
                    )
                return e, d.ty_val
            case S.Univ() | S.Pi() | S.Sigma() | S.Path() | S.Modal() | S.Bool() | S.SysTy() | S.SubT():
                e1, lvl = self.check_type(fr, e)
                return e1, VUniv(lvl)
            case S.App(fn, arg, mu):
                fn1, fty = self.infer(fr, fn)
                if not isinstance(fty, VPi):
                    raise self.fail(
                        NotAFunction, fr, f"{self.show_expr(fr, fn1)} has type {self.show(fr, fty)}, not a function type",
                        "term/pi-app",
                    )
                mu = self._match_mod(fr, mu, fty.mu, "term/pi-app")
                arg1 = self.check(fr.lock(th, mu, "term/pi-app"), arg, fty.dom, "term/pi-app")
                return S.App(fn1, arg1, mu), fty.cod(self.eval(fr, arg1))
            case S.Fst(a):
                a1, ty = self.infer(fr, a)
                if not isinstance(ty, VSigma):
                    raise self.fail(TypeCheckError, fr, f"expected a pair, got {self.show(fr, ty)}", "term/sigma-fst")
                return S.Fst(a1), ty.dom
            case S.Snd(a):
                a1, ty = self.infer(fr, a)
                if not isinstance(ty, VSigma):
                    raise self.fail(TypeCheckError, fr, f"expected a pair, got {self.show(fr, ty)}", "term/sigma-snd")
                return S.Snd(a1), ty.cod(fst(self.eval(fr, a1)))
            case S.PathApp(p, r):
                p1, ty = self.infer(fr, p)
                if not isinstance(ty, VPath):
                    raise self.fail(
                        NotAPath, fr, f"{self.show_expr(fr, p1)} has type {self.show(fr, ty)}, not a path type",
                        "term/path-app",
                    )
                r1 = self.check_int(fr, r)
                return S.PathApp(p1, r1), ty.line(eval_int(fr.env, r1))
            case S.LetMod(motive=motive):
                if motive is None:
                    raise self.fail(TypeCheckError, fr, "cannot infer the type of a modal let without a motive", "term/mod-let")
                return self._letmod(fr, e, None)
            case S.If(motive=motive):
                if motive is None:
                    raise self.fail(TypeCheckError, fr, "cannot infer the type of if without a motive", "term/if")
                return self._if(fr, e, None)
            case S.Comp():
                return self._comp(fr, e)
            case S.Ann(a, ty):
                ty1, _ = self.check_type(fr, ty)
                tv = self.eval(fr, ty1)
                return S.Ann(self.check(fr, a, tv), ty1), tv
            case S.SubTm(a, sigma):
                sigma1, gam = self.check_subst(fr, sigma)
                a1, ty = self.infer(gam, a)
                return S.SubTm(a1, sigma1), ty
            case S.Zapp(fn, arg, mu):
                if not self.elaborate:
                    self.require_no_holes(fr, "⊛ expansion", "term/mod-let")
                return self.infer(fr, self._expand_zapp(fr, e))
            case S.MkBox(mu, a) if mu is not None:
                a1, ty = self.infer(fr.lock(th, mu, "term/mod-mod"), a)
                return S.MkBox(mu, a1), VModal(mu, ty)
            case S.Lam() | S.PathAbs() | S.Pair() | S.MkBox() | S.SysTm() | S.TrueE() | S.FalseE():
                if isinstance(e, (S.TrueE, S.FalseE)):
                    return e, VBool()
                raise self.fail(
                    TypeCheckError, fr, f"cannot infer a type for {type(e).__name__}; add an annotation", _intro_rule(e)
                )
        raise self.fail(TypeCheckError, fr, f"unexpected expression {type(e).__name__}", "term/var")

    def _match_mod(self, fr, given, expected: Modality, rule: str) -> Modality:
        if given is None:
            if not self.elaborate:
                self.require_no_holes(fr, "modality annotation", rule)
            return expected
        if not self.mod_eq(given, expected):
            raise self.fail(ModeMismatch, fr, f"modality {given} does not match {expected}", rule)
        return given

    # -- checking ------------------------------------------------------------

    def check(self, fr: Frame, e, ty: Value, rule: str | None = None) -> S.Expr:
        th = self.theory
        if isinstance(ty, VSys):
            return self._check_split_type(fr, e, ty, rule)
        match e, ty:
            case S.Lam(mu, body, name), VPi():
                mu = self._match_mod(fr, mu, ty.mu, "term/pi-lam")
                inner = fr.ext_tm(mu, None, ty.dom, name)
                body1 = self.check(inner, body, ty.cod(inner.env.tm(0)))
                return S.Lam(mu, body1, name)
            case S.Pair(a, b), VSigma():
                a1 = self.check(fr, a, ty.dom, "term/sigma-pair")
                b1 = self.check(fr, b, ty.cod(self.eval(fr, a1)), "term/sigma-pair")
                return S.Pair(a1, b1)
            case S.PathAbs(body, name), VPath():
                inner = fr.ext_int(name)
                body1 = self.check(inner, body, ty.line(inner.env.int(0)))
                env = fr.env
                for end, r, want in ((0, I_ZERO, ty.a0), (1, I_ONE, ty.a1)):
                    got = eval_expr(env.ext_int(r), body1)
                    tend = ty.line(r)
                    if not self.eq_tm(fr, tend, got, want):
                        raise self.fail(
                            BoundaryMismatch, fr,
                            f"path endpoint at {end} is {self.show(fr, got)} but the type requires {self.show(fr, want)}",
                            "term/path-abs",
                        )
                return S.PathAbs(body1, name)
            case S.MkBox(mu, a), VModal():
                mu = self._match_mod(fr, mu, ty.mu, "term/mod-mod")
                a1 = self.check(fr.lock(th, mu, "term/mod-mod"), a, ty.ty, "term/mod-mod")
                return S.MkBox(mu, a1)
            case S.SysTm(branches), _:
                out, _ = self._check_system(fr, branches, ty, types=False)
                return S.SysTm(out)
            case S.LetMod(), _:
                e1, _ = self._letmod(fr, e, ty)
                return e1
            case S.If(), _:
                e1, _ = self._if(fr, e, ty)
                return e1
            case _, VUniv():
                if not isinstance(e, (S.Var, S.Const, S.App, S.Fst, S.Snd, S.PathApp, S.SubTm, S.Ann, S.Comp, S.Zapp)):
                    e1, lvl = self.check_type(fr, e)
                    if lvl != ty.level:
                        raise self.fail(
                            ConversionError, fr, f"type lives in universe {lvl}, expected universe {ty.level}",
                            rule or "type/univ",
                        )
                    return e1
        e1, got = self.infer(fr, e)
        if not self.eq_ty(fr, got, ty):
            raise self.fail(
                ConversionError, fr,
                f"{self.show_expr(fr, e1)} has type {self.show(fr, got)} but {self.show(fr, ty)} was expected",
                rule or _rule_of(e),
            )
        return e1

    def _check_split_type(self, fr, e, ty: VSys, rule):
        outs = []
        for c in sorted(ty.face, key=lambda c: sorted(c)):
            alpha = dict(c)
            sub = fr.restrict(quote_face(fr.names, frozenset([c])), alpha)
            outs.append(self.check(sub, e, act(ty, alpha), rule))
        return self._agree(fr, outs, e, rule or "type/sys")

    def _agree(self, fr, outs, original, rule):
        """Combine the elaborations of one term made under several clauses.

        A subterm that is unreachable under some clause (a system branch
        whose face is false there) comes back unelaborated from that
        clause; the elaboration from another clause is used for it.
        """
        if not outs:
            return original
        acc = outs[0]
        for o in outs[1:]:
            acc = _merge(acc, o, original)
            if acc is _CLASH:
                raise self.fail(TypeCheckError, fr, "elaboration differs between face clauses; annotate the term", rule)
        return acc

    # -- systems ---------------------------------------------------------------

    def _check_system(self, fr: Frame, branches, ty: Value | None, types: bool):
        rule_bin = "type/sys" if types else "term/sys-bin"
        rule_null = "type/sys" if types else "term/sys-null"
        faces = []
        for phi, _ in branches:
            faces.append(self.check_face(fr, phi))
        vals = [eval_face(fr.env, f) for f in faces]
        cover = frozenset()
        for v in vals:
            cover = f_join(cover, v)
        if frozenset() not in cover:
            raise self.fail(
                CoverNotTotal, fr,
                "system faces do not cover the context" + ("" if branches else " (empty system)"),
                rule_bin if branches else rule_null,
            )
        out = []
        level = None
        for (phi, body), f1, fv in zip(branches, faces, vals):
            results = []
            for sub in self.clauses(fr, f1, fv):
                if types:
                    b1, lvl = self.check_type(sub, body)
                    if level is None:
                        level = lvl
                    elif lvl != level:
                        raise self.fail(ConversionError, sub, "system branches live in different universes", rule_bin)
                else:
                    b1 = self.check(sub, body, act(ty, sub.env.alpha), rule_bin)
                results.append(b1)
            out.append((f1, self._agree(fr, results, body, rule_bin)))
        # pairwise agreement on overlaps
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                both = f_meet(vals[i], vals[j])
                for sub in self.clauses(fr, FMeet(out[i][0], out[j][0]), both):
                    a = eval_expr(sub.env, out[i][1])
                    b = eval_expr(sub.env, out[j][1])
                    ok = self.eq_ty(sub, a, b) if types else self.eq_tm(sub, act(ty, sub.env.alpha), a, b)
                    if not ok:
                        raise self.fail(
                            OverlapMismatch, sub,
                            f"branches {i} and {j} disagree on their overlap: {self.show(sub, a)} vs {self.show(sub, b)}",
                            rule_bin,
                        )
        return tuple(out), (level or 0)

    # -- eliminators with motives ----------------------------------------------

    def _letmod(self, fr: Frame, e: S.LetMod, expected: Value | None):
        th = self.theory
        nu = self.default_mod(fr, e.nu)
        if nu.cod != fr.mode:
            raise self.fail(ModeMismatch, fr, f"modality {nu} used at mode {fr.mode}", "term/mod-let")
        scrut1, sty = self.infer(fr.lock(th, nu, "term/mod-let"), e.scrut)
        if not isinstance(sty, VModal):
            raise self.fail(
                NotModal, fr, f"{self.show_expr(fr, scrut1)} has type {self.show(fr, sty)}, not a modal type", "term/mod-let"
            )
        mu = self._match_mod(fr, e.mu, sty.mu, "term/mod-let")
        xfr = fr.ext_tm(nu, None, sty, e.xname)
        if e.motive is None:
            if expected is None:
                raise self.fail(TypeCheckError, fr, "modal let needs a motive", "term/mod-let")
            if not self.elaborate:
                self.require_no_holes(fr, "motive", "term/mod-let")
            motive_src = S.shift(th, self.quote_in(fr, expected, "term/mod-let"), 1)
        else:
            motive_src = e.motive
        motive1, _ = self.check_type(xfr, motive_src)
        nm = th.compose(nu, mu)
        yfr = fr.ext_tm(nm, None, sty.ty, e.yname)
        y = yfr.env.tm(0)
        bty = eval_expr(fr.env.ext_tm(VBox(mu, y)), motive1)
        branch1 = self.check(yfr, e.branch, bty, "term/mod-let")
        result_ty = eval_expr(fr.env.ext_tm(self.eval(fr, scrut1)), motive1)
        if expected is not None and not self.eq_ty(fr, result_ty, expected):
            raise self.fail(
                ConversionError, fr,
                f"modal let has type {self.show(fr, result_ty)} but {self.show(fr, expected)} was expected",
                "term/mod-let",
            )
        return S.LetMod(nu, mu, motive1, scrut1, branch1, e.xname, e.yname), result_ty

    def _if(self, fr: Frame, e: S.If, expected: Value | None):
        th = self.theory
        scrut1 = self.check(fr, e.scrut, VBool(), "term/if")
        zfr = fr.ext_tm(th.identity(fr.mode), S.Bool(), VBool(), e.name)
        if e.motive is None:
            if expected is None:
                raise self.fail(TypeCheckError, fr, "if needs a motive", "term/if")
            if not self.elaborate:
                self.require_no_holes(fr, "motive", "term/if")
            motive_src = S.shift(th, self.quote_in(fr, expected, "term/if"), 1)
        else:
            motive_src = e.motive
        motive1, _ = self.check_type(zfr, motive_src)
        from .semantics import VFalse, VTrue

        tt1 = self.check(fr, e.tt, eval_expr(fr.env.ext_tm(VTrue()), motive1), "term/if")
        ff1 = self.check(fr, e.ff, eval_expr(fr.env.ext_tm(VFalse()), motive1), "term/if")
        result_ty = eval_expr(fr.env.ext_tm(self.eval(fr, scrut1)), motive1)
        if expected is not None and not self.eq_ty(fr, result_ty, expected):
            raise self.fail(
                ConversionError, fr, f"if has type {self.show(fr, result_ty)} but {self.show(fr, expected)} was expected",
                "term/if",
            )
        return S.If(motive1, scrut1, tt1, ff1, e.name), result_ty

    # -- composition -----------------------------------------------------------

    def _comp(self, fr: Frame, e: S.Comp):
        ifr = fr.ext_int(e.name)
        line1, _ = self.check_type(ifr, e.line)
        phi1 = self.check_face(fr, e.phi)
        phiv = eval_face(fr.env, phi1)
        env = fr.env
        t0 = eval_expr(env.ext_int(I_ZERO), line1)
        t1 = eval_expr(env.ext_int(I_ONE), line1)
        cap1 = self.check(fr, e.cap, t0, "term/comp")
        results = []
        phi_shift = S.shift(self.theory, phi1, 0, 1)
        for sub in self.clauses(ifr, phi_shift, phiv):
            results.append(self.check(sub, e.tube, eval_expr(sub.env, line1), "term/comp"))
        tube1 = self._agree(fr, results, e.tube, "term/comp")
        # boundary: the tube at 0 agrees with the cap under phi
        for sub in self.clauses(fr, phi1, phiv):
            at0 = eval_expr(sub.env.ext_int(I_ZERO), tube1)
            cap_v = eval_expr(sub.env, cap1)
            if not self.eq_tm(sub, act(t0, sub.env.alpha), at0, cap_v):
                raise self.fail(
                    BoundaryMismatch, sub,
                    f"tube at 0 is {self.show(sub, at0)} but the cap is {self.show(sub, cap_v)}",
                    "term/comp",
                )
        return S.Comp(line1, phi1, tube1, cap1, e.name), t1

    # -- ⊛ -------------------------------------------------------------------

    def _expand_zapp(self, fr: Frame, e: S.Zapp):
        """``f ⊛ a`` as nested modal lets ending in ``box_μ (f' a')``."""
        th = self.theory
        _, fty = self.infer(fr, e.fn)
        if not isinstance(fty, VModal) or not isinstance(fty.ty, VPi):
            raise self.fail(NotModal, fr, f"⊛ expects a boxed function, got {self.show(fr, fty)}", "term/mod-let")
        mu, pi = fty.mu, fty.ty
        ident = th.identity(fr.mode)
        probe = var_value(fr.names.tdepth, pi.dom)
        # the codomain, read back under one binder; it must ignore that binder
        cod_q = self.quote_in(fr.ext_tm(mu, None, pi.dom), pi.cod(probe), "term/mod-let")
        if _mentions_var(th, cod_q, 0):
            raise self.fail(TypeCheckError, fr, "⊛ needs a non-dependent function type", "term/mod-let")
        inner = S.LetMod(
            ident, mu, S.Modal(mu, S.shift(th, cod_q, 1)), S.shift(th, e.arg, 1),
            S.MkBox(mu, S.App(S.Var(1), S.Var(0), pi.mu)), "z", "a",
        )
        return S.LetMod(ident, mu, S.Modal(mu, cod_q), e.fn, inner, "z", "f")

    # -- explicit substitutions --------------------------------------------------

    def check_subst(self, fr: Frame, sigma) -> tuple[S.SubstExpr, Frame]:
        th = self.theory
        match sigma:
            case S.Id():
                return sigma, fr
            case S.Compose(outer, inner):
                inner1, mid = self.check_subst(fr, inner)
                outer1, cod = self.check_subst(mid, outer)
                return S.Compose(outer1, inner1), cod
            case S.Empty():
                return sigma, Frame(fr.mode, (), Env(self.sig, (), (), fr.env.alpha), (), fr.names, fr.mode, fr.inames, True)
            case S.WkTm():
                if not fr.entries or not isinstance(fr.entries[-1], S.TmVar):
                    raise self.fail(MalformedSubstitution, fr, "weakening needs a term variable", "sb/weak-type")
                return sigma, fr.pop()
            case S.WkInt():
                if not fr.entries or not isinstance(fr.entries[-1], S.IntVar):
                    raise self.fail(MalformedSubstitution, fr, "weakening needs an interval variable", "sb/weak-int")
                return sigma, fr.pop()
            case S.WkFace(phi):
                if not fr.entries or not isinstance(fr.entries[-1], S.Restrict):
                    raise self.fail(MalformedSubstitution, fr, "weakening needs a restriction", "sb/weak-res")
                base = fr.pop()
                phi1 = self.check_face(base, phi)
                return S.WkFace(phi1), base
            case S.LockApply(mu, s):
                base = fr.pop_locks(th, mu, "sb/lock")
                s1, cod = self.check_subst(base, s)
                return S.LockApply(mu, s1), cod.lock(th, mu, "sb/lock")._with(rebased=True)
            case S.Key(src, dst):
                if not th.cell_exists(src, dst):
                    raise self.fail(LockMismatch, fr, f"no 2-cell {src} ⇒ {dst}", "sb/key")
                base = fr.pop_locks(th, dst, "sb/key")
                return sigma, base.lock(th, src, "sb/key")._with(rebased=True)
            case S.ExtTm(s, a, mu, ty):
                if mu is None or ty is None:
                    raise self.fail(MalformedSubstitution, fr, "term extension needs its modality and type", "sb/ext-type")
                s1, gam = self.check_subst(fr, s)
                ty1, _ = self.check_type(gam.lock(th, mu, "sb/ext-type"), ty)
                tyv = eval_expr(gam.env, ty1)
                a1 = self.check(fr.lock(th, mu, "sb/ext-type"), a, tyv, "sb/ext-type")
                return S.ExtTm(s1, a1, mu, ty1), gam.ext_tm_value(mu, ty1, tyv, self.eval(fr, a1))
            case S.ExtInt(s, r):
                s1, gam = self.check_subst(fr, s)
                r1 = self.check_int(fr, r)
                return S.ExtInt(s1, r1), gam.ext_int_value(eval_int(fr.env, r1))
            case S.RestrictSub(s, phi):
                s1, gam = self.check_subst(fr, s)
                phi1 = self.check_face(gam, phi)
                if frozenset() not in eval_face(gam.env, phi1):
                    raise self.fail(
                        MalformedSubstitution, fr, "restriction substitution: the face does not hold", "sb/face-res"
                    )
                return S.RestrictSub(s1, phi1), gam._with(entries=gam.entries + (S.Restrict(phi1),))
            case S.ExcIntInv(mu):
                # Γ.𝐒_μ.𝕀 → Γ.𝕀.𝐒_μ
                if not fr.entries or not isinstance(fr.entries[-1], S.IntVar):
                    raise self.fail(MalformedSubstitution, fr, "exchange inverse needs an interval variable", "sb/exc-int-inv")
                r = fr.env.int(0)
                base = fr.pop().pop_locks(th, mu, "sb/exc-int-inv")
                return sigma, base.ext_int_value(r).lock(th, mu, "sb/exc-int-inv")._with(rebased=True)
            case S.ExcFaceInv(mu, phi):
                # Γ.𝐒_μ.(⇑φ) → Γ.φ.𝐒_μ
                if not fr.entries or not isinstance(fr.entries[-1], S.Restrict):
                    raise self.fail(MalformedSubstitution, fr, "exchange inverse needs a restriction", "sb/exc-face-inv")
                base = fr.pop().pop_locks(th, mu, "sb/exc-face-inv")
                phi1 = self.check_face(base, phi)
                return S.ExcFaceInv(mu, phi1), base._with(entries=base.entries + (S.Restrict(phi1),)).lock(
                    th, mu, "sb/exc-face-inv"
                )._with(rebased=True)
        raise self.fail(MalformedSubstitution, fr, f"not a substitution: {sigma!r}", "sb/id")


_CLASH = object()


def _merge(a, b, orig):
    if a == b:
        return a
    if orig is not None and a == orig:
        return b
    if orig is not None and b == orig:
        return a
    if type(a) is not type(b):
        return _CLASH
    if isinstance(a, tuple):
        if len(a) != len(b):
            return _CLASH
        os = orig if isinstance(orig, tuple) and len(orig) == len(a) else (None,) * len(a)
        out = tuple(_merge(x, y, o) for x, y, o in zip(a, b, os))
        return _CLASH if any(x is _CLASH for x in out) else out
    if not hasattr(a, "__dataclass_fields__"):
        return _CLASH
    same = type(orig) is type(a)
    vals = {}
    for f in fields(a):
        x, y = getattr(a, f.name), getattr(b, f.name)
        m = _merge(x, y, getattr(orig, f.name) if same else None)
        if m is _CLASH:
            return _CLASH
        vals[f.name] = m
    return type(a)(**vals)


def _intro_rule(e) -> str:
    return {
        S.Lam: "term/pi-lam",
        S.PathAbs: "term/path-abs",
        S.Pair: "term/sigma-pair",
        S.MkBox: "term/mod-mod",
        S.SysTm: "term/sys-bin",
    }.get(type(e), "term/var")


def _rule_of(e) -> str:
    return {
        S.Var: "term/var",
        S.App: "term/pi-app",
        S.PathApp: "term/path-app",
        S.Comp: "term/comp",
        S.LetMod: "term/mod-let",
        S.SubTm: "term/sb",
        S.Const: "term/var",
    }.get(type(e), "term/conv")


def _shift_int(r, d: int, fr: Frame):
    if d == 0:
        return r
    match r:
        case Zero() | One():
            return r
        case IVar(index, exc):
            if index + d < 0:
                raise TypeCheckError("exchanged interval term mentions a variable bound inside the lock", rule="int/exc")
            return IVar(index + d, exc)
        case Neg(a):
            return Neg(_shift_int(a, d, fr))
        case Meet(a, b):
            return Meet(_shift_int(a, d, fr), _shift_int(b, d, fr))
        case Join(a, b):
            return Join(_shift_int(a, d, fr), _shift_int(b, d, fr))
        case IExc(mu, a):
            return IExc(mu, _shift_int(a, d, fr))
    raise TypeError(r)


class _Occurs(S._Traversal):
    def __init__(self, theory, index):
        super().__init__(theory)
        self.index = index
        self.found = False

    def tvar(self, v, pos):
        if v.index - pos.tcut == self.index:
            self.found = True
        return v


def _mentions_var(theory, e, index: int) -> bool:
    t = _Occurs(theory, index)
    t.run(e)
    return t.found


# --------------------------------------------------------------------------
# Contexts


def check_ctx(sig: Signature, ctx: S.Ctx, elaborate: bool = False) -> list[Frame]:
    """Validate every entry in its prefix; one frame per restriction clause."""
    ch = Checker(sig, elaborate)
    frames = [Frame.empty(sig, ctx.mode)]
    th = sig.theory
    for entry in ctx.entries:
        nxt = []
        for fr in frames:
            match entry:
                case S.Lock(mu):
                    nxt.append(fr.lock(th, mu))
                case S.TmVar(mu, ty, name):
                    ty1, _ = ch.check_type(fr.lock(th, mu, "cx/ext-type"), ty)
                    nxt.append(fr.ext_tm(mu, ty1, eval_expr(fr.env, ty1), name))
                case S.IntVar(name):
                    nxt.append(fr.ext_int(name))
                case S.Restrict(phi):
                    phi1 = ch.check_face(fr, phi)
                    nxt.extend(ch.clauses(fr, phi1, eval_face(fr.env, phi1)))
        frames = nxt
    return frames


def frames_equal(sig: Signature, a: Frame, b: Frame) -> bool:
    """Context equality up to lock fusion, comparing types by conversion."""
    th = sig.theory
    ca = S.fuse_locks(th, a.to_ctx()).entries
    cb = S.fuse_locks(th, b.to_ctx()).entries
    if len(ca) != len(cb) or a.base_mode != b.base_mode:
        return False
    if len(a.tys) != len(b.tys):
        return False
    conv = Conv(sig)
    for x, y in zip(ca, cb):
        if type(x) is not type(y):
            return False
        if isinstance(x, S.Lock) and x.mu != y.mu:
            return False
        if isinstance(x, S.TmVar) and x.mu != y.mu:
            return False
    for ta, tb in zip(a.tys, b.tys):
        if not conv.eq_ty(a.names, act(ta, a.env.alpha), act(tb, b.env.alpha)):
            return False
    return True


def subst_equal(sig: Signature, fr: Frame, s1, s2) -> bool:
    """Equality of substitutions out of ``fr``: compare their evaluations."""
    ch = Checker(sig)
    _, g1 = ch.check_subst(fr, s1)
    _, g2 = ch.check_subst(fr, s2)
    if not frames_equal(sig, g1, g2):
        return False
    e1, e2 = g1.env, g2.env
    conv = Conv(sig)
    for k in range(len(e1.tms)):
        ty = act(g1.tys[k], e1.alpha)
        if not conv.eq(fr.names, ty, act(e1.tms[k], e1.alpha), act(e2.tms[k], e2.alpha)):
            return False
    for k in range(len(e1.ints)):
        if e1.int(len(e1.ints) - 1 - k) != e2.int(len(e2.ints) - 1 - k):
            return False
    return True


# --------------------------------------------------------------------------
# Declarations


@dataclass
class Declaration:
    """A core declaration awaiting checking."""

    name: str
    kind: str  # def | theorem | axiom
    mode: str
    params: tuple = ()  # (name, modality | None, type)
    ty: S.Expr = None
    body: Optional[S.Expr] = None
    rewrite: Optional[S.Expr] = None
    span: object = None


@dataclass
class Checked:
    """Result of checking one declaration."""

    decl: Decl
    core_ty: S.Expr
    core_body: Optional[S.Expr]
    core_rewrite: Optional[S.Expr] = None


def _telescope_type(params, ty):
    out = ty
    for name, mu, pty in reversed(params):
        out = S.Pi(mu, pty, out, name)
    return out


def _telescope_body(params, body):
    out = body
    for name, mu, _ in reversed(params):
        out = S.Lam(mu, out, name)
    return out


def check_declaration(sig: Signature, d: Declaration) -> Checked:
    """Elaborate, re-check with the kernel, then extend ``sig`` in place."""
    if d.name in sig.decls:
        raise DuplicateName(f"{d.name} is already defined", rule="decl", decl=d.name, span=d.span)
    try:
        return _check_declaration(sig, d)
    except CmttError as err:
        if err.decl is None:
            err.decl = d.name
        if err.span is None:
            err.span = d.span
        raise


def _check_declaration(sig: Signature, d: Declaration) -> Checked:
    elab = Checker(sig, elaborate=True, decl=d.name)
    kern = Checker(sig, elaborate=False, decl=d.name)
    root = Frame.empty(sig, d.mode)
    full_ty = _telescope_type(d.params, d.ty)
    ty1, _ = elab.check_type(root, full_ty)
    kern.check_type(root, ty1)
    ty_val = eval_expr(root.env, ty1)
    body1 = None
    if d.body is not None:
        body1 = elab.check(root, _telescope_body(d.params, d.body), ty_val)
        kern.check(root, body1, ty_val)
    elif d.kind != "axiom":
        raise TypeCheckError(f"{d.name} has no body", rule="decl", decl=d.name)
    rewrite = None
    rhs1 = None
    if d.rewrite is not None:
        if d.kind != "axiom":
            raise TypeCheckError("only axioms carry rewrite equations", rule="decl", decl=d.name)
        # check the right-hand side in the parameter telescope against the result type
        pfr = root
        tmp_decl = Decl(d.name, d.mode, d.kind, ty1, ty_val)
        sig.decls[d.name] = tmp_decl
        try:
            pfr, res_ty = _enter_telescope(elab, pfr, ty_val, len(d.params))
            rhs1 = elab.check(pfr, d.rewrite, res_ty)
            kern.check(pfr, rhs1, res_ty)
        finally:
            del sig.decls[d.name]
        rewrite = Rewrite(len(d.params), rhs1)
    body_val = eval_expr(root.env, body1) if body1 is not None and d.kind != "axiom" else None
    decl = Decl(d.name, d.mode, d.kind, ty1, ty_val, body1, body_val, rewrite, tuple(d.params))
    sig.decls[d.name] = decl
    return Checked(decl, ty1, body1, rhs1)


def _enter_telescope(ch: Checker, fr: Frame, ty: Value, n: int):
    for _ in range(n):
        if not isinstance(ty, VPi):
            raise TypeCheckError("rewrite arity exceeds the declared telescope", rule="decl")
        dom_q = quote(fr.lock(ch.theory, ty.mu).names, ty.dom)
        fr2 = fr.ext_tm(ty.mu, dom_q, ty.dom, ty.name)
        ty = ty.cod(fr2.env.tm(0))
        fr = fr2
    return fr, ty


# --------------------------------------------------------------------------
# Context-level conveniences


def _single(sig: Signature, ctx: S.Ctx) -> list[Frame]:
    return check_ctx(sig, ctx)


def infer(sig: Signature, ctx: S.Ctx, e) -> list[tuple[S.Expr, Value]]:
    ch = Checker(sig)
    return [ch.infer(fr, e) for fr in _single(sig, ctx)]


def check(sig: Signature, ctx: S.Ctx, e, ty: S.Expr) -> bool:
    ch = Checker(sig)
    for fr in _single(sig, ctx):
        ty1, _ = ch.check_type(fr, ty)
        ch.check(fr, e, eval_expr(fr.env, ty1))
    return True


def check_type(sig: Signature, ctx: S.Ctx, ty) -> bool:
    ch = Checker(sig)
    for fr in _single(sig, ctx):
        ch.check_type(fr, ty)
    return True


def new_signature(theory: ModeTheory, strict_mod_eq: bool = False) -> Signature:
    return Signature(theory, strict_mod_eq=strict_mod_eq)


__all__ = [
    "Checker",
    "Frame",
    "Declaration",
    "Checked",
    "Signature",
    "check_ctx",
    "check_declaration",
    "frames_equal",
    "subst_equal",
    "infer",
    "check",
    "check_type",
    "new_signature",
]
