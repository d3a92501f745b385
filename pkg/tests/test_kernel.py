"""Unit tests for core syntax, evaluation, Kan operations and conversion."""

import pytest

from cmtt import core_syntax as S
from cmtt.errors import (
    BoundaryMismatch, CmttError, CoverNotTotal, MalformedSubstitution, ResourceError, TypeCheckError,
)
from cmtt.frontend.driver import check_source
from cmtt.interval_face import Eq0, Eq1, FBot, FJoin, FMeet, FTop, IVar, Meet, Neg, One
from cmtt.kan import comp, transp
from cmtt.mode_theory import builtin_guarded
from cmtt.semantics import (
    Env, IClosure, Names, VBool, VFalse, VNeu, VPair, VTrue, const_iclosure, eval_expr, mk_sys, quote,
    value_thunk,
)
from cmtt.interval_face import F_TOP
from cmtt.typechecker import Checker, check, check_ctx, infer, new_signature

TH = builtin_guarded()
L, G, D = TH.gen("ℓ"), TH.gen("γ"), TH.gen("δ")
ID = TH.identity("t")
BOOL = S.Bool()


def ok(src, **kw):
    return check_source(src, **kw)


def rule_of(src, **kw):
    with pytest.raises(CmttError) as info:
        check_source(src, **kw)
    return info.value.rule


# -------------------------------------------------------------- core syntax


def test_shift_skips_bound_variables():
    e = S.Lam(ID, S.App(S.Var(0), S.Var(1), ID), "x")
    assert S.shift(TH, e, 2) == S.Lam(ID, S.App(S.Var(0), S.Var(3), ID), "x")
    p = S.PathAbs(S.PathApp(S.Var(0), Meet(IVar(0), IVar(1))), "i")
    assert S.shift(TH, p, 0, 1) == S.PathAbs(S.PathApp(S.Var(0), Meet(IVar(0), IVar(2))), "i")


def test_shift_key_free_marks_variables():
    assert S.shift(TH, S.Var(0), 0, 0, key_free=True) == S.Var(0, True)


def test_subst_top_instantiates():
    body = S.App(S.Var(1), S.Var(0), ID)
    assert S.subst_top(TH, body, S.TrueE(), ID) == S.App(S.Var(0), S.TrueE(), ID)
    assert S.subst_top_int(TH, S.PathApp(S.Var(0), Neg(IVar(0))), One()) == S.PathApp(S.Var(0), Neg(One()))


def test_subst_under_lock_keys_the_variable():
    # a term variable substituted below a lock it does not match gets a key
    e = S.MkBox(L, S.Var(0, True))
    out = S.apply_subst(TH, S.ExtTm(S.WkTm(), S.Var(0), ID, BOOL), e)
    assert out == S.MkBox(L, S.Var(0, True))


def test_weakening_shifts_free_variables():
    assert S.apply_subst(TH, S.WkTm(), S.Var(0)) == S.Var(1)
    assert S.apply_subst(TH, S.WkInt(), IVar(0)) == IVar(1)
    assert S.apply_subst(TH, S.Compose(S.WkTm(), S.WkTm()), S.Var(0)) == S.Var(2)


def test_empty_substitution_rejects_free_variables():
    with pytest.raises(MalformedSubstitution):
        S.apply_subst(TH, S.Empty(), S.Var(0))
    assert S.apply_subst(TH, S.Empty(), S.TrueE()) == S.TrueE()


def test_explicit_substitution_is_pushed():
    e = S.SubTm(S.Var(0), S.WkTm())
    assert S.apply_subst(TH, S.Id(), e) == S.Var(1)


def test_fuse_locks_and_trails():
    ctx = S.Ctx("t", (S.TmVar(L, BOOL, "y"), S.Lock(L), S.Lock(ID), S.TmVar(ID, BOOL, "x")))
    fused = S.fuse_locks(TH, ctx)
    assert [type(e).__name__ for e in fused.entries] == ["TmVar", "Lock", "TmVar"]
    assert S.locks_between(TH, ctx, 1) == L
    assert S.locks_between(TH, ctx, 0).is_identity


def test_dump_is_stable():
    e = S.Comp(BOOL, FJoin(Eq0(IVar(0)), FBot()), S.TrueE(), S.MkBox(L, S.Var(2, True)))
    assert S.dump(e) == (
        "(term/comp (type/bool) (face/join (face/eq (int/var 0) 0) (face/bot)) (term/true) "
        "(term/mod-mod ℓ (term/var 2 key)))"
    )


# ------------------------------------------------------------ evaluation / Kan


def _bool_line():
    return const_iclosure(VBool())


def test_transport_literal_in_bool():
    assert isinstance(transp(_bool_line(), VTrue()), VTrue)


def test_comp_at_top_face_is_the_tube_end():
    tube = IClosure(None, fn=lambda r: VFalse())
    assert isinstance(comp(_bool_line(), F_TOP, tube, VFalse()), VFalse)


def test_comp_bool_disagreeing_tube_is_stuck():
    tube = IClosure(None, fn=lambda r: VFalse())
    phi = frozenset([frozenset([(0, 0)])])
    out = comp(_bool_line(), phi, tube, VTrue())
    assert isinstance(out, VNeu)


def test_comp_sigma_is_componentwise():
    from cmtt.semantics import VSigma, const_closure

    line = const_iclosure(VSigma(VBool(), const_closure(VBool()), "_"))
    out = transp(line, VPair(VTrue(), VFalse()))
    assert isinstance(out, VPair) and isinstance(out.fst, VTrue) and isinstance(out.snd, VFalse)


def test_mk_sys_collapses_top():
    assert isinstance(mk_sys([(F_TOP, value_thunk(VTrue()))]), VTrue)


def test_eval_quote_round_trip_closed():
    sig = new_signature(TH)
    e = S.App(S.Ann(S.Lam(ID, S.If(BOOL, S.Var(0), S.FalseE(), S.TrueE()), "b"), S.Pi(ID, BOOL, BOOL, "_")),
              S.TrueE(), ID)
    assert quote(Names(), eval_expr(Env(sig), e)) == S.FalseE()


@pytest.mark.parametrize("src", [
    "def e : Path Bool (comp^i (Bool → Bool) [] (λ x. x) true) true := <i> true",
    "def e (x : Bool) : Path Bool (fst (comp^i (Bool × Bool) [] (true, x))) true := <i> true",
    "def e (p : Path Bool true true) : Path Bool ((comp^i (Path Bool true true) [] p) @ 0) true := <i> true",
    "def e : Path (▷ Bool) (comp^i (▷ Bool) [] (next true)) (next true) := <i> next true",
    "def e : Path Bool (comp^i Bool [] false) false := <i> false",
    "def e (A : U) (a : A) : A := comp^i A [] a",
    "def e (b : Bool) : Path Bool b b := <k> comp^i Bool [(k=0) ↦ b | (k=1) ↦ b] b",
])
def test_kan_reductions(src):
    ok(src)


def test_comp_pi_with_neutral_function_stays_stuck():
    # no regularity: composing along a constant line does not reduce on neutrals
    assert rule_of("def e (f : Bool → Bool) : Path Bool (comp^i (Bool → Bool) [] f true) (f true) := <i> f true") \
        == "term/path-abs"


# ---------------------------------------------------------------- conversion


@pytest.mark.parametrize("src", [
    "def e (f : Bool → Bool) : Path (Bool → Bool) f (λ x. f x) := <i> f",
    "def e (p : Bool × Bool) : Path (Bool × Bool) p (fst p, snd p) := <i> p",
    "def e (p : Path Bool true true) : Path (Path Bool true true) p (<j> p @ j) := <i> p",
    "def e : Path Bool ((λ x. x : Bool → Bool) true) true := <i> true",
    "def e : Path Bool (if true then false else true) false := <i> false",
    "def e (p : Path Bool true true) : Path Bool (p @ (0 ∧ 1)) true := <i> true",
])
def test_conversion_positive(src):
    ok(src)


@pytest.mark.parametrize("src", [
    "def e : Path Bool true false := <i> true",
    "def e (f g : Bool → Bool) : Path (Bool → Bool) f g := <i> f",
    "def e (p : Path Bool true false) : Path Bool (p @ 0) (p @ 1) := <i> true",
])
def test_conversion_negative(src):
    assert rule_of(src) == "term/path-abs"


ETA_MOD = "def e (x : ▷ Bool) : Path (▷ Bool) x (let box y = x in next y) := <i> x"


def test_modal_eta_is_switchable():
    ok(ETA_MOD)
    assert rule_of(ETA_MOD, strict_mod_eq=True) == "term/path-abs"


LOB = (
    "axiom lob (A : U) (f : ▷ A → A) : A rewrite f (next (lob A f))\n"
    "def u (A : U) (f : ▷ A → A) : Path A (lob A f) (f (next (lob A f))) := <i> lob A f\n"
)


def test_rewrite_unfolding_and_fuel():
    ok(LOB)
    sig = new_signature(TH)
    sig.unfold_fuel = 0
    with pytest.raises(TypeCheckError):
        check_source(LOB, sig=sig)


def test_interval_is_de_morgan_not_boolean():
    # i ∨ ~i is not 1, so (i=0) ∨ (i=1) does not cover
    with pytest.raises(CoverNotTotal):
        ok("def e (b : Bool) : Path Bool b b := <i> [(i=0) ↦ b | (i=1) ↦ b]")


def test_split_limit():
    sig = new_signature(TH)
    ch = Checker(sig)
    ch.max_clauses = 1
    fr = check_ctx(sig, S.Ctx("t", (S.IntVar("i"), S.IntVar("j"))))[0]
    two = FJoin(Eq0(IVar(0)), Eq0(IVar(1)))
    with pytest.raises(ResourceError) as info:
        ch.check(fr, S.SysTm(((two, S.TrueE()), (FTop(), S.TrueE()))), VBool())
    assert info.value.rule == "conv/split"


# -------------------------------------------------------------- typechecker


def test_top_level_helpers():
    sig = new_signature(TH)
    ctx = S.Ctx("t", (S.TmVar(ID, BOOL, "x"),))
    assert check(sig, ctx, S.Var(0), BOOL)
    [(e, ty)] = infer(sig, ctx, S.Ann(S.Var(0), BOOL))
    assert isinstance(ty, VBool)


def test_restricted_context_splits_and_empties():
    sig = new_signature(TH)
    i = S.IntVar("i")
    assert len(check_ctx(sig, S.Ctx("t", (i, S.Restrict(FJoin(Eq0(IVar(0)), Eq1(IVar(0)))))))) == 2
    assert check_ctx(sig, S.Ctx("t", (i, S.Restrict(FMeet(Eq0(IVar(0)), Eq1(IVar(0))))))) == []


def test_comp_boundary_reports_clause():
    with pytest.raises(BoundaryMismatch) as info:
        ok("def e (p : Path Bool true false) : Path Bool false false := <j> comp^i Bool [(j=0) ↦ p @ i] false")
    assert info.value.rule == "term/comp"


def test_modal_types_at_other_mode():
    ok("def e @ s (A : U) : U := ⟨γ | ⟨δ | A⟩⟩", theory="guarded")
    assert rule_of("def e (A : U) : U := ⟨γ | A⟩") == "type/mod"


def test_key_access_later_variable():
    # x is used under ▷ through the unit cell 1 ≤ ℓ; the converse has no cell
    ok("def e (x : Bool) : ▷ Bool := next x")
    assert rule_of("def e (x : ▷ Bool) : Bool := let box y = x in y") == "term/var"


def test_path_endpoints_reduce():
    ok("def e (p : Path Bool true false) : Path Bool (p @ 0) true := <i> true")
    ok("def e (p : Path Bool true false) : Path Bool (p @ ~1) true := <i> true")
