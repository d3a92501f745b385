import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmtt.errors import ConfigError, UnboundVariable
from cmtt.interval_face import (
    AUTO, DM4, Eq0, Eq1, F_BOT, F_TOP, FBot, FExc, FJoin, FMeet, FTop, FaceContext, I_ONE, I_ZERO, IExc, IVar,
    Join, Meet, Neg, One, Zero, dm4_table, dnf_to_face, exc_face, exc_int, expand_exc, f_entails, face_canon,
    face_entails, int_dnf, int_equal, int_equal_under, int_eval_dm4, int_vars,
)
from cmtt.mode_theory import builtin_guarded

from algebra_check import face_exhaustive, interval_exhaustive
from generators import equivalent_variant, random_face, random_interval
from oracles import DM4Oracle, LatticeOracle, face_sat, sat_leq

TH = builtin_guarded()
i, j, k = IVar(0), IVar(1), IVar(2)
seeds = st.integers(0, 2**32 - 1)


def test_dm4_is_de_morgan_not_boolean():
    # x ∧ ~x = 0 fails in DM4, so it is not an identity of the interval
    assert not int_equal(Meet(i, Neg(i)), Zero())
    assert not int_equal(Join(i, Neg(i)), One())
    assert int_equal(Neg(Meet(i, j)), Join(Neg(i), Neg(j)))
    assert int_equal(Neg(Neg(i)), i)


def test_kleene_law_fails():
    # (x ∧ ~x) ≤ (y ∨ ~y) holds in Kleene algebras only
    lhs = Join(Meet(i, Neg(i)), Join(j, Neg(j)))
    assert not int_equal(lhs, Join(j, Neg(j)))


def test_dnf_is_canonical_antichain():
    r = Join(Meet(i, j), i)
    assert int_dnf(r) == int_dnf(i)
    assert int_dnf(Zero()) == I_ZERO and int_dnf(One()) == I_ONE


def test_dm4_table_shape():
    tab = dm4_table(Meet(i, j), [(0, None), (1, None)])
    assert len(tab) == 16 and set(tab) <= set(DM4)


def test_unfilled_exchange_rejected():
    with pytest.raises(ConfigError):
        int_dnf(IVar(0, AUTO))


def test_missing_valuation():
    with pytest.raises(UnboundVariable):
        int_eval_dm4(i, {})


def test_exchange_is_a_homomorphism():
    l = TH.gen("ℓ")
    r = Meet(Neg(i), Join(j, One()))
    pushed = exc_int(TH, l, r)
    assert pushed == Meet(Neg(IVar(0, l)), Join(IVar(1, l), One()))
    assert expand_exc(TH, IExc(l, r)) == pushed
    assert int_vars(IExc(l, i), TH) == {(0, l)}
    assert exc_face(TH, l, FMeet(Eq0(i), FTop())) == FMeet(Eq0(IVar(0, l)), FTop())


def test_exchange_needs_theory():
    with pytest.raises(ConfigError):
        int_dnf(IExc(TH.gen("ℓ"), i))
    with pytest.raises(ConfigError):
        face_canon(FExc(TH.gen("ℓ"), Eq0(i)))


def test_exchanges_compose():
    l = TH.gen("ℓ")
    assert exc_int(TH, l, exc_int(TH, l, i)) == IVar(0, TH.compose(l, l))


def test_face_endpoints_disjoint():
    assert face_canon(FMeet(Eq0(i), Eq1(i))) == F_BOT
    assert face_canon(FJoin(Eq0(i), Eq1(i))) != F_TOP


def test_face_of_compound_interval():
    assert face_canon(Eq0(Meet(i, j))) == face_canon(FJoin(Eq0(i), Eq0(j)))
    assert face_canon(Eq1(Neg(i))) == face_canon(Eq0(i))
    assert face_canon(Eq1(Meet(i, Neg(i)))) == F_BOT


def test_face_context():
    ctx = FaceContext.of(Eq0(i), Eq1(j))
    assert face_entails(ctx, Eq0(i))
    assert face_entails(ctx, FJoin(Eq0(i), Eq0(k)))
    assert not face_entails(ctx, Eq0(k))
    assert FaceContext.of(Eq0(i)).assume(Eq1(i)).collapsed


def test_int_equal_under_context():
    ctx = FaceContext.of(Eq0(j))
    assert int_equal_under(ctx, Join(i, j), i)
    assert not int_equal_under(FaceContext(), Join(i, j), i)
    # the empty face makes everything equal
    assert int_equal_under(FaceContext(F_BOT), Zero(), One())


def test_dnf_to_face_round_trip():
    phi = FJoin(FMeet(Eq0(i), Eq1(j)), Eq1(k))
    assert face_canon(dnf_to_face(face_canon(phi))) == face_canon(phi)


def test_exhaustive_up_to_size_three():
    rep = interval_exhaustive(max_size=3)
    assert rep.ok, rep.failures
    # frozen: the number of distinct elements reached with <= 3 connectives
    assert rep.classes == 162


def test_faces_exhaustive():
    rep = face_exhaustive()
    assert rep.ok, rep.failures
    assert rep.classes == (144, 147, 281)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_int_equal_matches_oracles(seed):
    rng = random.Random(seed)
    r = random_interval(rng, rng.randrange(8), 3)
    s = equivalent_variant(rng, r) if rng.random() < 0.5 else random_interval(rng, rng.randrange(8), 3)
    dm4, lat = DM4Oracle(3), LatticeOracle(3)
    assert int_equal(r, s) == (dm4.key(r) == dm4.key(s)) == (lat.key(r) == lat.key(s))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_unused_atoms_do_not_matter(seed):
    rng = random.Random(seed)
    r = random_interval(rng, rng.randrange(6), 2)
    s = random_interval(rng, rng.randrange(6), 2)
    padded = Meet(r, Join(k, One()))
    assert int_equal(r, s) == int_equal(padded, s)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_face_entails_matches_satisfaction(seed):
    rng = random.Random(seed)
    phi = random_face(rng, rng.randrange(5), 3, 2)
    psi = random_face(rng, rng.randrange(5), 3, 2)
    assert f_entails(face_canon(phi), face_canon(psi)) == sat_leq(face_sat(phi), face_sat(psi))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_face_lattice_laws(seed):
    rng = random.Random(seed)
    a, b, c = (random_face(rng, rng.randrange(3), 3) for _ in range(3))
    canon = face_canon
    assert canon(FMeet(a, FJoin(b, c))) == canon(FJoin(FMeet(a, b), FMeet(a, c)))
    assert canon(FJoin(a, FMeet(a, b))) == canon(a)
    assert f_entails(canon(FMeet(a, b)), canon(a))
    assert f_entails(canon(a), canon(FJoin(a, b)))
    assert canon(FMeet(a, FBot())) == F_BOT
