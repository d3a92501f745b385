"""Loading files, following imports and checking declarations in order.

Checking stops at the first failing declaration.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError, ParseError, ResourceError, ScopeError
from ..mode_theory import ModeTheory, load_mode_theory
from ..semantics import Env, Names, Signature, eval_expr, quote
from ..typechecker import Checked, check_declaration, new_signature
from . import ast as A
from .parser import parse
from .resolve import resolve_decl

DEFAULT_THEORY = "guarded"
RECURSION_LIMIT = 20000


@dataclass
class CheckJob:
    files: list[str]
    mode_theory: str | None = None
    strict_mod_eq: bool = False


@dataclass
class Loaded:
    decls: list[A.DeclS] = field(default_factory=list)
    theories: list[tuple[str, A.ModeTheoryS]] = field(default_factory=list)
    seen: set[Path] = field(default_factory=set)


@dataclass
class CheckResult:
    sig: Signature
    checked: list[Checked]


def read_source(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"no such file: {path}", rule="io") from None
    except UnicodeDecodeError as err:
        raise ParseError(f"{path} is not UTF-8: {err}", rule="parse") from None


def load(path: Path, acc: Loaded) -> None:
    """Parse ``path`` and its imports depth first, each file once."""
    path = path.resolve()
    if path in acc.seen:
        return
    acc.seen.add(path)
    for item in parse(read_source(path), str(path)):
        match item:
            case A.ImportS(rel):
                target = (path.parent / rel)
                if not target.exists():
                    raise ConfigError(f"imported file not found: {rel}", rule="io", span=item.span)
                load(target, acc)
            case A.ModeTheoryS(sel):
                local = path.parent / sel
                acc.theories.append((str(local) if local.is_file() else sel, item))
            case A.DeclS():
                acc.decls.append(item)


def choose_theory(job: CheckJob, loaded: Loaded) -> ModeTheory:
    """Exactly one mode theory per job: the flag wins, directives must agree."""
    if job.mode_theory is not None:
        return load_mode_theory(job.mode_theory)
    picks = {sel for sel, _ in loaded.theories}
    if len(picks) > 1:
        _, item = loaded.theories[1]
        raise ConfigError(f"conflicting mode theory directives: {sorted(picks)}", rule="config", span=item.span)
    return load_mode_theory(picks.pop() if picks else DEFAULT_THEORY)


def check_decls(sig: Signature, decls: list[A.DeclS], on_checked=None) -> list[Checked]:
    out = []
    for d in decls:
        if d.name in sig.decls:
            raise ScopeError(f"{d.name} is already defined", rule="decl", decl=d.name, span=d.span)
        core = resolve_decl(sig.theory, set(sig.decls), d)
        checked = check_declaration(sig, core)
        out.append(checked)
        if on_checked is not None:
            on_checked(checked)
    return out


def run_job(job: CheckJob, on_checked=None) -> CheckResult:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), RECURSION_LIMIT))
    loaded = Loaded()
    for f in job.files:
        load(Path(f), loaded)
    theory = choose_theory(job, loaded)
    sig = new_signature(theory, strict_mod_eq=job.strict_mod_eq)
    try:
        checked = check_decls(sig, loaded.decls, on_checked)
    except RecursionError:
        raise ResourceError("recursion depth exceeded while checking", rule="resource") from None
    return CheckResult(sig, checked)


def check_source(text: str, theory: str | ModeTheory = DEFAULT_THEORY, strict_mod_eq: bool = False,
                 file: str = "<input>", sig: Signature | None = None) -> CheckResult:
    """Check a source string without imports (handy in tests)."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), RECURSION_LIMIT))
    if sig is None:
        th = theory if isinstance(theory, ModeTheory) else load_mode_theory(theory)
        sig = new_signature(th, strict_mod_eq=strict_mod_eq)
    decls = [d for d in parse(text, file) if isinstance(d, A.DeclS)]
    return CheckResult(sig, check_decls(sig, decls))


def normal_form(sig: Signature, name: str):
    """The quoted normal form of a checked definition's body."""
    d = sig.decls.get(name)
    if d is None:
        raise ScopeError(f"no declaration named {name}", rule="decl", decl=name)
    if d.body is None:
        raise ScopeError(f"{name} is an axiom and has no body", rule="decl", decl=name)
    v = eval_expr(Env(sig), d.body)
    return quote(Names(), v, d.ty_val)


__all__ = ["CheckJob", "CheckResult", "run_job", "check_source", "normal_form"]
