import json
import random
from pathlib import Path

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cmtt.errors import ConfigError, ParseError, ScopeError
from cmtt.frontend import printer
from cmtt.frontend.cli import main
from cmtt.frontend.driver import CheckJob, check_source, normal_form, run_job
from cmtt.frontend.lexer import tokenize
from cmtt.frontend.parser import parse, parse_term
from cmtt.frontend.resolve import resolve_term
from cmtt.pretty import show_core
from cmtt.typechecker import Checker

from generators import BASE, THEORY, random_instance

ROOT = Path(__file__).resolve().parent.parent
STDLIB = sorted((ROOT / "stdlib").glob("*.cmtt"))
BAD = sorted((ROOT / "bad").glob("*.cmtt"))
PATHS = str(ROOT / "stdlib" / "paths.cmtt")
GUARDED = str(ROOT / "stdlib" / "guarded.cmtt")

BAD_RULES = {
    "comp_boundary": "term/comp",
    "lock_mismatch": "term/var",
    "mode_mismatch": "type/mod",
    "non_covering": "term/sys-bin",
    "overlap_mismatch": "term/sys-bin",
}


# ------------------------------------------------------------------- parsing


def test_lexer_spans_and_unicode():
    toks = tokenize("def f (ℓ | a : A) : ▷ A\n  := next a")
    texts = [t.text for t in toks if t.text]
    assert texts[:4] == ["def", "f", "(", "ℓ"]
    assert any(t.text == "▷" for t in toks)
    last = [t for t in toks if t.text == "a"][-1]
    assert last.span("x").line == 2


def test_ascii_and_unicode_agree():
    a = parse_term("\\x. <i> x")
    b = parse_term("λ x. <i> x")
    assert printer.term(a) == printer.term(b)


@pytest.mark.parametrize("path", STDLIB + BAD, ids=lambda p: p.name)
def test_parse_print_parse(path):
    text = path.read_text()
    once = parse(text, str(path))
    printed = printer.program(once)
    again = parse(printed)
    assert again == once
    assert printer.program(again) == printed


@pytest.mark.parametrize(
    "text, col",
    [
        ("def x : U :=", 13),
        ("def 1x : U := U", 5),
        ("def p : Path Bool true true := <i> [(i=2) ↦ true]", 38),
        ("def f : U := ⟨ℓ | Bool", 23),
    ],
)
def test_parse_errors_have_spans(text, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.rule == "parse"
    assert info.value.span.line == 1 and info.value.span.col == col


def test_scope_errors():
    with pytest.raises(ScopeError) as info:
        check_source("def f : Bool := nope")
    assert info.value.rule == "scope" and info.value.decl == "f"
    with pytest.raises(ScopeError) as info:
        check_source("def f : Bool := true\ndef f : Bool := false")
    assert info.value.rule == "decl"
    with pytest.raises(ScopeError) as info:
        check_source("def f : ⟨ψ | Bool⟩ := true")
    assert info.value.rule == "modality"


def test_interval_names_are_separate():
    # i is an interval name; using it as a term is a scope error
    with pytest.raises(ScopeError):
        check_source("def f : Path Bool true true := <i> i")


# ---------------------------------------------------------- surface ↔ core

TM_NAMES = tuple(e.name for e in BASE if hasattr(e, "ty"))
INT_NAMES = ("i", "j")


@settings(max_examples=300, deadline=None, derandomize=True, suppress_health_check=list(HealthCheck))
@given(st.integers(0, 2**32 - 1))
def test_delab_resolve_round_trip(seed):
    inst = random_instance(seed, depth=random.Random(seed).randrange(1, 4))
    text = show_core(inst.term, TM_NAMES, INT_NAMES, THEORY)
    surface = parse_term(text)
    core = resolve_term(THEORY, set(), surface, "t", TM_NAMES, INT_NAMES)
    back = Checker(inst.sig, elaborate=True).check(inst.frame, core, inst.ty_val)
    kern = Checker(inst.sig)
    assert kern.eq_tm(inst.frame, inst.ty_val, kern.eval(inst.frame, back), kern.eval(inst.frame, inst.term)), text


# ------------------------------------------------------------------- driver


def test_stdlib_checks():
    res = run_job(CheckJob([PATHS, GUARDED]))
    names = [c.decl.name for c in res.checked]
    assert {"trans", "modext", "modextinv", "modext_sec", "modext_ret", "lob_unique"} <= set(names)
    # imports are loaded once
    assert len(names) == len(set(names))


def test_normal_form_of_trans_refl_refl():
    res = run_job(CheckJob([PATHS]))
    text = show_core(normal_form(res.sig, "trans_refl_refl"), avoid=frozenset(res.sig.decls))
    assert text == "λ A a. <i> comp^i1 A [(i=0) ↦ a | (i=1) ↦ a] a"


def test_normal_form_errors():
    res = run_job(CheckJob([GUARDED]))
    with pytest.raises(ScopeError):
        normal_form(res.sig, "lob")
    with pytest.raises(ScopeError):
        normal_form(res.sig, "missing")


@pytest.mark.parametrize("path", BAD, ids=lambda p: p.stem)
def test_bad_corpus_rules(path):
    with pytest.raises(Exception) as info:
        run_job(CheckJob([str(path)]))
    assert getattr(info.value, "rule", None) == BAD_RULES[path.stem]


def test_conflicting_theories(tmp_path):
    f = tmp_path / "x.cmtt"
    f.write_text("modetheory guarded\nmodetheory trivial\ndef b : Bool := true\n")
    with pytest.raises(ConfigError):
        run_job(CheckJob([str(f)]))
    # the flag overrides the directives
    assert run_job(CheckJob([str(f)], mode_theory="trivial")).checked


def test_missing_import(tmp_path):
    f = tmp_path / "x.cmtt"
    f.write_text('import "nowhere.cmtt"\n')
    with pytest.raises(ConfigError):
        run_job(CheckJob([str(f)]))


def test_mode_annotation_on_declaration():
    res = check_source("def b @ s : Bool := true", theory="guarded")
    assert res.checked[0].decl.mode == "s"
    with pytest.raises(ScopeError):
        check_source("def b @ q : Bool := true", theory="guarded")


# ---------------------------------------------------------------------- CLI


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_cli_check_ok():
    r = run("check", PATHS, GUARDED)
    assert r.exit_code == 0, r.output
    assert r.output.startswith("ok: ")


def test_cli_check_json_ok():
    r = run("check", "--json", PATHS)
    assert r.exit_code == 0
    assert "trans" in json.loads(r.output)["checked"]


@pytest.mark.parametrize("path", BAD, ids=lambda p: p.stem)
def test_cli_bad_json(path):
    r = run("check", "--json", str(path))
    assert r.exit_code == 1
    diag = json.loads(r.output)
    assert set(diag) == {"decl", "rule", "mode", "clause", "message", "span"}
    assert diag["rule"] == BAD_RULES[path.stem]
    assert diag["mode"] == "t"
    assert diag["span"]["file"].endswith(path.name)


def test_cli_clause_reported():
    r = run("check", "--json", str(ROOT / "bad" / "overlap_mismatch.cmtt"))
    assert json.loads(r.output)["clause"] == "(i=0)"


def test_cli_text_diagnostic():
    r = run("check", str(ROOT / "bad" / "lock_mismatch.cmtt"))
    assert r.exit_code == 1
    assert "[term/var]" in r.output and "in force" in r.output


def test_cli_config_errors():
    assert run("check", "--mode-theory", "nope", PATHS).exit_code == 2
    assert run("check", "no/such/file.cmtt").exit_code == 2


def test_cli_parse_error(tmp_path):
    f = tmp_path / "x.cmtt"
    f.write_text("def x : U :=\n")
    r = run("check", "--json", str(f))
    assert r.exit_code == 1
    assert json.loads(r.output)["rule"] == "parse"


def test_cli_normalize():
    r = run("normalize", PATHS, "--decl", "trans_refl_refl")
    assert r.exit_code == 0
    assert r.output.strip() == "λ A a. <i> comp^i1 A [(i=0) ↦ a | (i=1) ↦ a] a"
    r = run("normalize", "--json", PATHS, "--decl", "trans_refl_refl")
    assert json.loads(r.output)["decl"] == "trans_refl_refl"
    assert run("normalize", PATHS, "--decl", "missing").exit_code == 1


def test_cli_dump_core():
    r = run("check", "--dump-core", PATHS)
    assert r.exit_code == 0
    assert any(line.startswith("(def refl ") for line in r.output.splitlines())


def test_cli_strict_mod_eq_flag():
    assert run("check", "--strict-mod-eq", PATHS).exit_code == 0
