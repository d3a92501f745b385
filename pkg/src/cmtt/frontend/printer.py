"""Surface trees back to source text that parses to the same tree."""

from __future__ import annotations

from . import ast as A

# precedence levels, loosest first
BINDER, ARROW, PROD, ZAPP, APP, ATOM = range(6)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


def _box(mod: str | None, word: str) -> str:
    if mod is None:
        return word
    if any(ch.isspace() for ch in mod):
        return f"{word}_{{{mod}}}"
    return f"{word}_{mod}"


def term(e: A.Term, prec: int = BINDER) -> str:
    match e:
        case A.Name(name):
            return name
        case A.Universe(level):
            return "U" if level == 0 else f"U{level}"
        case A.BoolTy():
            return "Bool"
        case A.Lit(value):
            return "true" if value else "false"
        case A.PiTy(name, mod, dom, cod):
            if name is None and mod is None:
                s = f"{term(dom, PROD)} → {term(cod, BINDER)}"
            else:
                s = f"{_binder(name or '_', mod, dom)} → {term(cod, BINDER)}"
            return _paren(s, prec > ARROW)
        case A.SigmaTy(name, dom, cod):
            if name is None:
                s = f"{term(dom, ZAPP)} × {term(cod, PROD)}"
            else:
                s = f"{_binder(name, None, dom)} × {term(cod, PROD)}"
            return _paren(s, prec > PROD)
        case A.Lambda():
            binders = []
            while isinstance(e, A.Lambda):
                binders.append(e.name if e.mod is None else f"({e.mod} | {e.name})")
                e = e.body
            return _paren(f"λ {' '.join(binders)}. {term(e, BINDER)}", prec > BINDER)
        case A.Apply(fn, arg):
            return _paren(f"{term(fn, APP)} {term(arg, ATOM)}", prec > APP)
        case A.PLam():
            names = []
            while isinstance(e, A.PLam):
                names.append(e.name)
                e = e.body
            return _paren(f"<{' '.join(names)}> {term(e, BINDER)}", prec > BINDER)
        case A.PApp(p, r):
            return _paren(f"{term(p, APP)} @ {interval(r, 2)}", prec > APP)
        case A.PathTy(ty, a0, a1):
            return _paren(f"Path {term(ty, ATOM)} {term(a0, ATOM)} {term(a1, ATOM)}", prec > APP)
        case A.PathPTy(name, line, a0, a1):
            return _paren(f"PathP (<{name}> {term(line)}) {term(a0, ATOM)} {term(a1, ATOM)}", prec > APP)
        case A.ModalTy(mod, ty):
            return f"⟨{mod} | {term(ty)}⟩"
        case A.LaterTy(ty):
            return _paren(f"▷ {term(ty, ATOM)}", prec > APP)
        case A.Box(mod, body):
            return _paren(f"{_box(mod, 'box')} {term(body, ATOM)}", prec > APP)
        case A.Next(body):
            return _paren(f"next {term(body, ATOM)}", prec > APP)
        case A.LetBox(nu, mu, var, scrut, zname, motive, body):
            ret = "" if motive is None else f" return {zname}. {term(motive)}"
            s = f"{_box(nu, 'let')} {_box(mu, 'box')} {var} = {term(scrut)}{ret} in {term(body)}"
            return _paren(s, prec > BINDER)
        case A.IfThen(scrut, zname, motive, tt, ff):
            ret = "" if motive is None else f" return {zname}. {term(motive)}"
            return _paren(f"if {term(scrut)}{ret} then {term(tt)} else {term(ff)}", prec > BINDER)
        case A.System(branches):
            return _system(branches)
        case A.CompTm(name, line, branches, cap):
            return _paren(f"comp^{name} {term(line, ATOM)} {_system(branches)} {term(cap, ATOM)}", prec > APP)
        case A.PairTm(a, b):
            return f"({term(a)}, {term(b)})"
        case A.Proj(which, body):
            return _paren(f"{'fst' if which == 1 else 'snd'} {term(body, ATOM)}", prec > APP)
        case A.Annot(body, ty):
            return f"({term(body)} : {term(ty)})"
        case A.ZApp(fn, arg):
            return _paren(f"{term(fn, ZAPP)} ⊛ {term(arg, APP)}", prec > ZAPP)
    raise TypeError(f"cannot print {e!r}")


def _binder(name: str, mod: str | None, ty: A.Term) -> str:
    pre = "" if mod is None else f"{mod} | "
    return f"({pre}{name} : {term(ty)})"


def _system(branches) -> str:
    if not branches:
        return "[]"
    return "[" + " | ".join(f"{face(phi)} ↦ {term(b)}" for phi, b in branches) + "]"


def interval(r: A.Interval, prec: int = 0) -> str:
    match r:
        case A.IZero():
            return "0"
        case A.IOne():
            return "1"
        case A.IName(name):
            return name
        case A.INeg(a):
            return _paren(f"~{interval(a, 2)}", prec > 2)
        case A.IMeet(a, b):
            return _paren(f"{interval(a, 1)} ∧ {interval(b, 2)}", prec > 1)
        case A.IJoin(a, b):
            return _paren(f"{interval(a, 0)} ∨ {interval(b, 1)}", prec > 0)
        case A.IExch(a, mod):
            inner = interval(a, 3)
            return f"{inner}^{mod}" if isinstance(a, (A.IZero, A.IOne, A.IName, A.IExch)) else f"({interval(a)})^{mod}"
    raise TypeError(r)


def face(phi: A.Face, prec: int = 0) -> str:
    match phi:
        case A.FaceTop():
            return "top"
        case A.FaceBot():
            return "bot"
        case A.FaceEq(r, bit):
            return f"({interval(r)}={bit})"
        case A.FaceMeet(a, b):
            return _paren(f"{face(a, 1)} ∧ {face(b, 2)}", prec > 1)
        case A.FaceJoin(a, b):
            return _paren(f"{face(a, 0)} ∨ {face(b, 1)}", prec > 0)
        case A.FaceExch(a, mod):
            return f"{face(a, 2)}^{mod}" if isinstance(a, (A.FaceTop, A.FaceBot, A.FaceEq, A.FaceExch)) else f"({face(a)})^{mod}"
    raise TypeError(phi)


def decl(d: A.TopLevel) -> str:
    match d:
        case A.ImportS(path):
            return f'import "{path}"'
        case A.ModeTheoryS(sel):
            return f"modetheory {sel}" if sel.isidentifier() else f'modetheory "{sel}"'
        case A.DeclS(kind, name, mode, params, ty, body, rewrite):
            head = f"{kind} {name}" + ("" if mode is None else f" @ {mode}")
            for p in params:
                head += " " + _binder(p.name, p.mod, p.ty)
            out = f"{head} : {term(ty)}"
            if body is not None:
                out += f"\n  := {term(body)}"
            if rewrite is not None:
                out += f"\n  rewrite {term(rewrite)}"
            return out
    raise TypeError(d)


def program(decls) -> str:
    return "\n\n".join(decl(d) for d in decls) + "\n"
