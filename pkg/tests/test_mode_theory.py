import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmtt.errors import ConfigError, ModeMismatch, RewriteDivergence, SaturationBoundExceeded
from cmtt.mode_theory import Modality, builtin_guarded, builtin_trivial, load_mode_theory, parse_mode_theory

from oracles import D, G, L, composable_words, guarded_leq, guarded_nf_shape, guarded_reduce

TH = builtin_guarded()


def mod(word, dom, cod):
    return TH.make(tuple(word), dom, cod)


@pytest.fixture(scope="module")
def words6():
    return composable_words(6)


def test_parse_word_aliases_agree():
    assert TH.parse_word("l.d.g") == TH.parse_word("ℓ∘δ∘γ")
    assert TH.parse_word("1", "s") == TH.identity("s")
    assert TH.parse_word("1_t").is_identity


@pytest.mark.parametrize("text", ["", "ℓ∘", "ψ", "γ∘γ"])
def test_parse_word_rejects(text):
    with pytest.raises((ConfigError, ModeMismatch)):
        TH.parse_word(text)


def test_bare_identity_needs_mode():
    with pytest.raises(ConfigError):
        TH.parse_word("1")


def test_guarded_laws():
    g, d, l = TH.gen("γ"), TH.gen("δ"), TH.gen("ℓ")
    assert TH.compose(g, d) == TH.identity("s")
    assert TH.compose(g, l) == g
    assert TH.cell_exists(TH.compose(d, g), TH.identity("t"))
    assert TH.cell_exists(TH.identity("t"), l)


def test_no_reverse_cells():
    g, d, l = TH.gen("γ"), TH.gen("δ"), TH.gen("ℓ")
    assert not TH.cell_exists(l, TH.identity("t"))
    assert not TH.cell_exists(TH.identity("t"), TH.compose(d, g))


def test_compose_checks_modes():
    with pytest.raises(ModeMismatch):
        TH.compose(TH.gen("γ"), TH.gen("γ"))


def test_cell_exists_needs_parallel():
    with pytest.raises(ModeMismatch):
        TH.cell_exists(TH.gen("γ"), TH.gen("ℓ"))


def test_normal_form_characterization(words6):
    for dom, cod, w in words6:
        nf = TH.make(w, dom, cod).word
        assert guarded_nf_shape(dom, cod, nf) is not None, (w, nf)
        assert nf == guarded_reduce(w)


def test_normal_forms_distinct_and_irreducible():
    # frozen: forms of length <= 6 per hom-set
    counts = {}
    for (dom, cod), ws in TH.normal_forms.items():
        short = [w for w in ws if len(w) <= 6]
        counts[(dom, cod)] = len(short)
        for w in short:
            assert TH.is_normal(w)
            assert guarded_nf_shape(dom, cod, w) is not None
    assert counts == {("t", "t"): 12, ("s", "t"): 6, ("t", "s"): 1, ("s", "s"): 1}


def test_cell_order_matches_hand_derivation(words6):
    nfs = {(d, c, TH.make(w, d, c).word) for d, c, w in words6}
    for d1, c1, a in nfs:
        for d2, c2, b in nfs:
            if (d1, c1) != (d2, c2):
                continue
            got = TH.cell_exists(Modality(d1, c1, a), Modality(d2, c2, b))
            assert got == guarded_leq(d1, c1, a, b), (a, b)


def test_saturated_cells_contains_generators():
    cells = TH.saturated_cells()
    assert (TH.compose(TH.gen("δ"), TH.gen("γ")), TH.identity("t")) in cells
    assert (TH.identity("t"), TH.gen("ℓ")) in cells


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([L, G, D]), max_size=8))
def test_normalize_idempotent(word):
    try:
        TH._check_composable(tuple(word))
    except ModeMismatch:
        return
    once = TH.normalize(tuple(word))
    assert TH.normalize(once) == once


def test_trivial_theory():
    th = builtin_trivial()
    assert th.modes == ("m",)
    assert th.identity("m").is_identity


def test_parse_presentation_round_trip():
    th = parse_mode_theory(TH.describe(), "copy")
    assert th.generators == TH.generators
    assert th.make((G, L), "t", "s") == TH.make((G,), "t", "s")


@pytest.mark.parametrize("text", [
    "mode t; gen a : t -> u;",
    "mode t; gen a : t -> t; gen a : t -> t;",
    "mode t; frob;",
    "mode t; gen a : t -> t; rule a;",
    "mode t; bound x;",
])
def test_parse_presentation_errors(text):
    with pytest.raises(ConfigError):
        parse_mode_theory(text)


def test_rewriting_divergence_detected():
    th = parse_mode_theory("mode t; gen a : t -> t; gen b : t -> t; rule a = b; rule b = a; bound 4;")
    with pytest.raises(RewriteDivergence):
        th.normalize(("a",))


def test_saturation_bound():
    th = parse_mode_theory("mode t; gen a : t -> t; cell 1_t <= a; bound 3;")
    with pytest.raises(SaturationBoundExceeded):
        th.cell_exists(th.make(("a",) * 5, "t", "t"), th.make(("a",) * 6, "t", "t"))


def test_load_unknown_theory():
    with pytest.raises(ConfigError):
        load_mode_theory("no-such-theory")
