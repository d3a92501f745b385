"""Randomized structural properties of the kernel.

Substitution functoriality, read-back stability and soundness of
splitting a context along a face, each over 1000 generated instances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cmtt import core_syntax as S
from cmtt.interval_face import Eq0, Eq1, FTop, IVar
from cmtt.semantics import act, eval_expr, eval_face, quote
from cmtt.typechecker import Checker, check_ctx, frames_equal

from generators import BASE, BOOL, ID, THEORY, Scope, TermGen, elaborate_in, fresh_sig, random_face, random_instance

N = 1000
PROPS = settings(max_examples=N, deadline=None, derandomize=True, suppress_health_check=list(HealthCheck))
seeds = st.integers(0, 2**32 - 1)
SIG = fresh_sig()


# ------------------------------------------------------------ substitutions


@dataclass
class Sub:
    """A substitution ``sigma : source -> target`` with both contexts."""

    sigma: S.SubstExpr
    source: tuple
    target: tuple


def _lift(sigma, entry):
    """Carry ``sigma : Δ → Γ`` under one more entry of ``Γ``; returns the
    lifted substitution and the matching new entry of ``Δ``."""
    match entry:
        case S.IntVar():
            return S.plus_int(sigma), entry
        case S.TmVar(mu, ty, name):
            moved = S.TmVar(mu, S.apply_subst(THEORY, S.LockApply(mu, sigma), ty), name)
            return S.ExtTm(S.Compose(sigma, S.WkTm()), S.Var(0), mu, ty), moved
        case S.Lock(mu):
            return S.LockApply(mu, sigma), entry
        case S.Restrict(phi):
            moved = S.apply_subst(THEORY, sigma, phi)
            return S.RestrictSub(S.Compose(sigma, S.WkFace(moved)), phi), S.Restrict(moved)
    raise AssertionError(entry)


def _elab(entries, term, ty):
    return elaborate_in(SIG, S.Ctx("t", tuple(entries)), term, ty).term


def _primitive(rng: random.Random, prefix: tuple):
    """A one-step substitution into ``prefix`` and its source prefix."""
    gen = TermGen(rng)
    opts = ["wk-tm", "wk-int"]
    n_ints = sum(isinstance(e, S.IntVar) for e in prefix)
    if n_ints:
        opts.append("wk-face")
    last = prefix[-1] if prefix else None
    if isinstance(last, S.IntVar):
        opts += ["inst-int"] * 2
    if isinstance(last, S.TmVar) and last.ty == BOOL:
        opts += ["inst-tm"] * 2
    match rng.choice(opts):
        case "wk-tm":
            return S.WkTm(), prefix + (S.TmVar(ID, BOOL, "z"),)
        case "wk-int":
            return S.WkInt(), prefix + (S.IntVar("k"),)
        case "wk-face":
            v = IVar(rng.randrange(n_ints))
            phi = Eq0(v) if rng.random() < 0.5 else Eq1(v)
            return S.WkFace(phi), prefix + (S.Restrict(phi),)
        case "inst-int":
            rest = prefix[:-1]
            r = gen.interval(Scope(list(rest)))
            return S.ExtInt(S.Id(), r), rest
        case "inst-tm":
            rest = prefix[:-1]
            inner = rest + ((S.Lock(last.mu),) if not last.mu.is_identity else ())
            b = gen.bool(Scope(list(inner)), rng.randrange(3))
            return S.ExtTm(S.Id(), _elab(inner, b, BOOL), last.mu, BOOL), rest


def random_sub(rng: random.Random, target: tuple) -> Sub:
    """A primitive step at a random depth of ``target``, lifted back out.

    Retries until the source context is a single frame, so that a face
    pushed through the step does not split or vanish.
    """
    while True:
        cut = rng.randrange(len(target) + 1)
        prefix, suffix = target[:cut], target[cut:]
        sigma, source = _primitive(rng, prefix)
        for e in suffix:
            sigma, moved = _lift(sigma, e)
            source += (moved,)
        if len(check_ctx(SIG, S.Ctx("t", source))) == 1:
            return Sub(sigma, source, target)


def _frame(entries):
    frs = check_ctx(SIG, S.Ctx("t", tuple(entries)))
    assert len(frs) == 1
    return frs[0]


@settings(PROPS)
@given(seeds)
def test_substitution_functoriality(seed):
    rng = random.Random(seed)
    inst = random_instance(seed, depth=rng.randrange(1, 4))
    sig_s = random_sub(rng, BASE)
    tau = random_sub(rng, sig_s.source)
    theta = _frame(tau.source)
    kern = Checker(SIG)

    both = S.Compose(sig_s.sigma, tau.sigma)
    _, gam = kern.check_subst(theta, both)
    assert frames_equal(SIG, gam, inst.frame)

    ty_s = S.apply_subst(THEORY, both, inst.ty)
    ty_v = kern.eval(theta, kern.check_type(theta, ty_s)[0])
    stepwise = S.apply_subst(THEORY, tau.sigma, S.apply_subst(THEORY, sig_s.sigma, inst.term))
    at_once = S.apply_subst(THEORY, both, inst.term)
    assert stepwise == at_once
    kern.check(theta, at_once, ty_v)

    # syntactic pushing agrees with evaluating the explicit substitution
    explicit = S.SubTm(S.SubTm(S.Ann(inst.term, inst.ty), sig_s.sigma), tau.sigma)
    v_syn = kern.eval(theta, at_once)
    v_env = kern.eval(theta, kern.check(theta, explicit, ty_v))
    assert kern.conv().eq(theta.names, ty_v, v_syn, v_env)

    assert S.apply_subst(THEORY, S.Id(), inst.term) == inst.term
    assert S.apply_subst(THEORY, S.Compose(S.Id(), sig_s.sigma), inst.term) == S.apply_subst(
        THEORY, sig_s.sigma, inst.term
    )


# ---------------------------------------------------------------- read-back


@settings(PROPS)
@given(seeds)
def test_quote_eval_idempotent(seed):
    inst = random_instance(seed, depth=random.Random(seed).randrange(1, 5))
    fr, kern = inst.frame, Checker(inst.sig)
    v = kern.eval(fr, inst.term)
    nf = quote(fr.names, v, inst.ty_val)
    # read-back leaves key marks to elaboration
    nf_k = Checker(inst.sig, elaborate=True).check(fr, nf, inst.ty_val)
    kern.check(fr, nf_k, inst.ty_val)
    again = quote(fr.names, kern.eval(fr, nf_k), inst.ty_val)
    assert again == nf
    assert kern.conv().eq(fr.names, inst.ty_val, v, kern.eval(fr, nf_k))


# ------------------------------------------------------------ face splitting


@settings(PROPS)
@given(seeds)
def test_face_splitting_sound(seed):
    rng = random.Random(seed)
    inst = random_instance(seed, depth=rng.randrange(1, 4))
    phi = random_face(rng, rng.randrange(4), 2)
    frs = check_ctx(SIG, S.Ctx("t", BASE + (S.Restrict(phi),)))
    whole = eval_face(inst.frame.env, phi)

    # the clause frames are exactly the clauses of the face
    got = frozenset(frozenset(fr.env.alpha.items()) for fr in frs)
    assert len(got) == len(frs)
    assert got == whole

    kern = Checker(inst.sig)
    v = kern.eval(inst.frame, inst.term)
    for fr in frs:
        alpha = fr.env.alpha
        assert frozenset() in eval_face(fr.env, phi)
        ty_v = eval_expr(fr.env, inst.ty)
        kern.check(fr, inst.term, ty_v)
        # restricting then evaluating agrees with evaluating then restricting
        assert kern.conv().eq(fr.names, ty_v, kern.eval(fr, inst.term), act(v, alpha))

    # a system whose branches overlap on φ checks by splitting and collapses to the term
    sys = S.SysTm(((phi, inst.term), (FTop(), inst.term)))
    e = kern.check(inst.frame, sys, inst.ty_val)
    assert kern.eq_tm(inst.frame, inst.ty_val, kern.eval(inst.frame, e), v)
