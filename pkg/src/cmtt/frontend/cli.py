"""Command line: ``cmtt check`` and ``cmtt normalize``.

Exit codes: 0 success, 1 type or syntax error, 2 configuration error,
3 resource limit.
"""

from __future__ import annotations

import json
import sys

import click

from .. import core_syntax as S
from ..errors import CmttError
from ..pretty import show_core
from .driver import CheckJob, normal_form, run_job


def _report(err: CmttError, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(err.diagnostic(), ensure_ascii=False))
        return
    where = f"{err.span}: " if err.span is not None else ""
    rule = f"[{err.rule}] " if err.rule else ""
    extra = []
    if err.decl:
        extra.append(f"in {err.decl}")
    if err.mode:
        extra.append(f"at mode {err.mode}")
    if err.clause:
        extra.append(f"under {err.clause}")
    tail = f" ({', '.join(extra)})" if extra else ""
    click.echo(f"{where}error {rule}{err.message}{tail}", err=True)


_common = [
    click.option("--mode-theory", "mode_theory", default=None,
                 help="guarded, trivial, or a path to a mode theory file (default: file directive, else guarded)"),
    click.option("--json", "as_json", is_flag=True, help="Print diagnostics as JSON."),
    click.option("--strict-mod-eq", is_flag=True, help="Turn off the modal η rule in conversion."),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Proof checker for cubical multimodal type theory."""


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path())
@_with_common
@click.option("--dump-core", is_flag=True, help="Print each checked declaration as a core s-expression.")
def check(files, mode_theory, as_json, strict_mod_eq, dump_core):
    """Check FILES in order; stop at the first error."""
    job = CheckJob(list(files), mode_theory, strict_mod_eq)

    def on_checked(c):
        if dump_core:
            body = "" if c.core_body is None else f" {S.dump(c.core_body)}"
            click.echo(f"({c.decl.kind} {c.decl.name} {S.dump(c.core_ty)}{body})")

    try:
        result = run_job(job, on_checked)
    except CmttError as err:
        _report(err, as_json)
        sys.exit(err.exit_code)
    if as_json:
        click.echo(json.dumps({"checked": [c.decl.name for c in result.checked]}, ensure_ascii=False))
    elif not dump_core:
        click.echo(f"ok: {len(result.checked)} declarations checked")


@main.command()
@click.argument("file", type=click.Path())
@click.option("--decl", "name", required=True, help="Declaration to normalize.")
@_with_common
def normalize(file, name, mode_theory, as_json, strict_mod_eq):
    """Print the normal form of a definition in FILE."""
    try:
        result = run_job(CheckJob([file], mode_theory, strict_mod_eq))
        nf = normal_form(result.sig, name)
    except CmttError as err:
        _report(err, as_json)
        sys.exit(err.exit_code)
    text = show_core(nf, avoid=frozenset(result.sig.decls))
    if as_json:
        click.echo(json.dumps({"decl": name, "normal_form": text}, ensure_ascii=False))
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
