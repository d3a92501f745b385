"""Recursive-descent parser for ``.cmtt`` sources.

Precedence, loosest first: binders (``λ``, ``<i>``, ``let``, ``if``), the
arrow, the product ``×``, ``⊛``, then application spines where ``e @ r``
is a left-associative postfix.  Modalities are kept as source text.
"""

from __future__ import annotations

from ..errors import ParseError, Span
from . import ast as A
from .lexer import KEYWORDS as _KEYWORDS
from .lexer import Token, tokenize

_ARROWS = ("→", "->")
_MAPS = ("↦", "|->")
_MEET = ("∧", "/\\")
_JOIN = ("∨", "\\/")
_NEG = ("~", "¬")
_LAMBDA = ("λ", "\\")
_TOPLEVEL = ("def", "theorem", "axiom", "import", "modetheory")


class Parser:
    def __init__(self, text: str, file: str = "<input>"):
        self.file = file
        self.toks = tokenize(text, file)
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text in texts

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text in words

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"{msg} (found {found})", span=t.span(self.file), rule="parse")

    def expect(self, *texts: str) -> Token:
        if not self.at(*texts):
            raise self.error(f"expected {' or '.join(repr(t) for t in texts)}")
        return self.next()

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in _KEYWORDS:
            raise self.error("expected an identifier")
        self.next()
        return t.text

    def span_from(self, start: Token) -> Span:
        end = self.toks[self.pos - 1] if self.pos > 0 else start
        return Span(self.file, start.line, start.col, end.line, end.col + max(1, len(end.text)))

    # -- modalities ------------------------------------------------------------

    def modality(self) -> str:
        """Modality text: ``ℓ∘δ``, ``l.d``, ``1``, ``1_t``, or a braced word."""
        parts = []
        if self.at("{"):
            self.next()
            while not self.at("}"):
                if self.tok.kind == "eof":
                    raise self.error("unterminated modality")
                parts.append(self.next().text)
            self.next()
            return "".join(parts)
        while True:
            t = self.tok
            if t.kind == "num" and t.text == "1":
                self.next()
                parts.append("1")
                nt = self.tok
                if nt.kind == "ident" and nt.text.startswith("_") and nt.col == t.col + 1 and nt.line == t.line:
                    parts.append(self.next().text)
            elif t.kind == "ident" and t.text not in _KEYWORDS:
                parts.append(self.next().text)
            else:
                raise self.error("expected a modality")
            if self.at("∘", "."):
                parts.append(self.next().text)
                continue
            return "".join(parts)

    # -- top level -----------------------------------------------------------

    def program(self) -> list[A.TopLevel]:
        out: list[A.TopLevel] = []
        while self.tok.kind != "eof":
            out.append(self.toplevel())
        return out

    def toplevel(self) -> A.TopLevel:
        start = self.tok
        if self.at_kw("import"):
            self.next()
            if self.tok.kind != "string":
                raise self.error("expected a quoted file name")
            path = self.next().text
            self._semi()
            return A.ImportS(path, self.span_from(start))
        if self.at_kw("modetheory"):
            self.next()
            if self.tok.kind == "string":
                sel = self.next().text
            else:
                sel = self.ident()
            self._semi()
            return A.ModeTheoryS(sel, self.span_from(start))
        if self.at_kw("def", "theorem", "axiom"):
            return self.decl()
        raise self.error("expected a declaration")

    def _semi(self):
        if self.at(";"):
            self.next()

    def decl(self) -> A.DeclS:
        start = self.tok
        kind = self.next().text
        name = self.ident()
        mode = None
        if self.at("@"):
            self.next()
            mode = self.ident()
        params: list[A.Param] = []
        while self.at("("):
            params.extend(self.binder_group())
        self.expect(":")
        ty = self.term()
        body = None
        rewrite = None
        if self.at(":="):
            if kind == "axiom":
                raise self.error("axioms have no body")
            self.next()
            body = self.term()
        elif kind != "axiom":
            raise self.error("expected ':='")
        if self.at_kw("rewrite"):
            self.next()
            rewrite = self.term()
        self._semi()
        return A.DeclS(kind, name, mode, tuple(params), ty, body, rewrite, self.span_from(start))

    def binder_group(self) -> list[A.Param]:
        """``(x y : A)`` or ``(μ | x y : A)``."""
        self.expect("(")
        mod = None
        if self._mod_bar_ahead():
            mod = self.modality()
            self.expect("|")
        names = [self.binder_name()]
        while not self.at(":"):
            names.append(self.binder_name())
        self.expect(":")
        ty = self.term()
        self.expect(")")
        return [A.Param(n, mod, ty) for n in names]

    def binder_name(self) -> str:
        return self.ident()

    def _mod_bar_ahead(self) -> bool:
        """Is there a ``|`` before the ``:`` of this binder group?"""
        k = 0
        while True:
            t = self.peek(k)
            if t.kind == "eof" or (t.kind == "sym" and t.text in (":", ")", "(")):
                return False
            if t.kind == "sym" and t.text == "|":
                return True
            k += 1

    # -- terms -----------------------------------------------------------------

    def term(self) -> A.Term:
        t = self.tok
        if self.at(*_LAMBDA) or self.at_kw("fun"):
            return self.lam()
        if self.at("<") and self._path_binder_ahead():
            self.next()
            names = []
            while not self.at(">"):
                names.append(self.binder_name())
            self.next()
            body = self.term()
            for n in reversed(names):
                body = A.PLam(n, body)
            return body
        if self.at_kw("let") or t.kind == "letmod":
            return self.let()
        if self.at_kw("if"):
            return self.ite()
        return self.arrow()

    def _path_binder_ahead(self) -> bool:
        k = 1
        while self.peek(k).kind == "ident":
            k += 1
        t = self.peek(k)
        return k > 1 and t.kind == "sym" and t.text == ">"

    def lam(self) -> A.Term:
        self.next()
        binders: list[tuple[str, str | None]] = []
        while not self.at("."):
            if self.at("("):
                self.next()
                mod = None
                if self._mod_bar_ahead():
                    mod = self.modality()
                    self.expect("|")
                names = [self.binder_name()]
                while not self.at(")"):
                    names.append(self.binder_name())
                self.next()
                binders.extend((n, mod) for n in names)
            else:
                binders.append((self.binder_name(), None))
        if not binders:
            raise self.error("λ needs at least one binder")
        self.expect(".")
        body = self.term()
        for n, mod in reversed(binders):
            body = A.Lambda(n, mod, body)
        return body

    def let(self) -> A.Term:
        nu = None
        if self.tok.kind == "letmod":
            nu = self.next().mod
        else:
            self.next()
        mu = None
        if self.tok.kind == "boxmod":
            mu = self.next().mod
        elif self.at_kw("box"):
            self.next()
        else:
            raise self.error("expected 'box' after 'let'")
        var = self.binder_name()
        self.expect("=")
        scrut = self.term()
        zname, motive = self._motive()
        if not self.at_kw("in"):
            raise self.error("expected 'in'")
        self.next()
        body = self.term()
        return A.LetBox(nu, mu, var, scrut, zname, motive, body)

    def _motive(self):
        if not self.at_kw("return"):
            return None, None
        self.next()
        z = self.binder_name()
        self.expect(".")
        return z, self.term()

    def ite(self) -> A.Term:
        self.next()
        scrut = self.term()
        zname, motive = self._motive()
        if not self.at_kw("then"):
            raise self.error("expected 'then'")
        self.next()
        tt = self.term()
        if not self.at_kw("else"):
            raise self.error("expected 'else'")
        self.next()
        ff = self.term()
        return A.IfThen(scrut, zname, motive, tt, ff)

    def arrow(self) -> A.Term:
        if self.at("("):
            tele = self._try_telescope()
            if tele is not None:
                groups, op = tele
                cod = self.arrow_rhs() if op in _ARROWS else self.product_rhs()
                for p in reversed(groups):
                    cod = A.PiTy(p.name, p.mod, p.ty, cod) if op in _ARROWS else A.SigmaTy(p.name, p.ty, cod)
                return cod
        lhs = self.product()
        if self.at(*_ARROWS):
            self.next()
            return A.PiTy(None, None, lhs, self.arrow_rhs())
        return lhs

    def arrow_rhs(self) -> A.Term:
        return self.term()

    def product_rhs(self) -> A.Term:
        if self.at("("):
            tele = self._try_telescope()
            if tele is not None:
                groups, op = tele
                cod = self.arrow_rhs() if op in _ARROWS else self.product_rhs()
                for p in reversed(groups):
                    cod = A.PiTy(p.name, p.mod, p.ty, cod) if op in _ARROWS else A.SigmaTy(p.name, p.ty, cod)
                return cod
        return self.product()

    def _try_telescope(self):
        """Binder groups followed by ``→`` or ``×``; otherwise rewind."""
        save = self.pos
        groups: list[A.Param] = []
        try:
            while self.at("("):
                groups.extend(self.binder_group())
        except ParseError:
            self.pos = save
            return None
        if groups and self.at(*_ARROWS, "×", "*"):
            op = self.next().text
            if op in ("×", "*") and any(p.mod is not None for p in groups):
                raise self.error("Σ binders take no modality")
            return groups, op
        self.pos = save
        return None

    def product(self) -> A.Term:
        lhs = self.zapp()
        if self.at("×", "*"):
            self.next()
            return A.SigmaTy(None, lhs, self.product_rhs())
        return lhs

    def zapp(self) -> A.Term:
        lhs = self.spine()
        while self.at("⊛", "<*>"):
            self.next()
            lhs = A.ZApp(lhs, self.spine())
        return lhs

    def spine(self) -> A.Term:
        head = self.head()
        while True:
            if self.at("@"):
                self.next()
                head = A.PApp(head, self.iunary())
            elif self._atom_start():
                head = A.Apply(head, self.atom())
            else:
                return head

    def head(self) -> A.Term:
        t = self.tok
        if t.kind == "boxmod":
            self.next()
            return A.Box(t.mod, self.atom())
        if self.at_kw("box"):
            self.next()
            return A.Box(None, self.atom())
        if self.at_kw("next"):
            self.next()
            return A.Next(self.atom())
        if self.at("▷") or self.at_kw("Later"):
            self.next()
            return A.LaterTy(self.atom())
        if self.at_kw("fst", "snd"):
            which = 1 if self.next().text == "fst" else 2
            return A.Proj(which, self.atom())
        if self.at_kw("zapp"):
            self.next()
            f = self.atom()
            return A.ZApp(f, self.atom())
        if self.at_kw("Path"):
            self.next()
            return A.PathTy(self.atom(), self.atom(), self.atom())
        if self.at_kw("PathP"):
            self.next()
            line = self.atom()
            if not isinstance(line, A.PLam):
                raise self.error("PathP expects a line <i> A")
            return A.PathPTy(line.name, line.body, self.atom(), self.atom())
        if self.at_kw("comp"):
            return self.comp()
        return self.atom()

    def comp(self) -> A.Term:
        self.next()
        self.expect("^")
        name = self.binder_name()
        line = self.atom()
        if not self.at("["):
            raise self.error("expected a system after the comp line")
        branches = self.system_branches()
        cap = self.atom()
        return A.CompTm(name, line, branches, cap)

    def _atom_start(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in _KEYWORDS or t.text in ("U", "Bool", "true", "false")
        if t.kind == "num":
            return False
        if t.kind == "sym":
            if t.text in ("(", "[", "⟨"):
                return True
            if t.text == "<":
                return self._modal_bracket_ahead()
        return False

    def _modal_bracket_ahead(self) -> bool:
        k = 1
        while True:
            t = self.peek(k)
            if t.kind == "eof" or (t.kind == "sym" and t.text in (">", "(", ")", "[", "]")):
                return False
            if t.kind == "sym" and t.text == "|":
                return True
            k += 1

    def atom(self) -> A.Term:
        t = self.tok
        if t.kind == "ident":
            if t.text == "U":
                self.next()
                return A.Universe(0)
            if t.text == "Bool":
                self.next()
                return A.BoolTy()
            if t.text in ("true", "false"):
                self.next()
                return A.Lit(t.text == "true")
            if t.text.startswith("U") and t.text[1:].isdigit():
                self.next()
                return A.Universe(int(t.text[1:]))
            if t.text in _KEYWORDS:
                raise self.error("unexpected keyword")
            self.next()
            return A.Name(t.text)
        if self.at("⟨") or (self.at("<") and self._modal_bracket_ahead()):
            close = "⟩" if self.next().text == "⟨" else ">"
            mod = self.modality()
            self.expect("|")
            ty = self.term()
            self.expect(close)
            return A.ModalTy(mod, ty)
        if self.at("["):
            return A.System(self.system_branches())
        if self.at("("):
            self.next()
            e = self.term()
            if self.at(":"):
                self.next()
                ty = self.term()
                self.expect(")")
                return A.Annot(e, ty)
            if self.at(","):
                self.next()
                b = self.term()
                self.expect(")")
                return A.PairTm(e, b)
            self.expect(")")
            return e
        raise self.error("expected a term")

    def system_branches(self) -> tuple:
        self.expect("[")
        branches = []
        if self.at("]"):
            self.next()
            return ()
        while True:
            phi = self.face()
            self.expect(*_MAPS)
            branches.append((phi, self.term()))
            if self.at("|"):
                self.next()
                continue
            if self.at("]"):
                self.next()
                return tuple(branches)
            raise self.error("expected '|' or ']' in system")

    # -- intervals ---------------------------------------------------------------

    def interval(self) -> A.Interval:
        lhs = self.imeet()
        while self.at(*_JOIN):
            self.next()
            lhs = A.IJoin(lhs, self.imeet())
        return lhs

    def imeet(self) -> A.Interval:
        lhs = self.iunary()
        while self.at(*_MEET):
            self.next()
            lhs = A.IMeet(lhs, self.iunary())
        return lhs

    def iunary(self) -> A.Interval:
        if self.at(*_NEG):
            self.next()
            return A.INeg(self.iunary())
        r = self.iatom()
        while self.at("^"):
            self.next()
            r = A.IExch(r, self.modality())
        return r

    def iatom(self) -> A.Interval:
        t = self.tok
        if t.kind == "num" and t.text in ("0", "1"):
            self.next()
            return A.IZero() if t.text == "0" else A.IOne()
        if t.kind == "ident" and t.text not in _KEYWORDS:
            self.next()
            return A.IName(t.text)
        if self.at("("):
            self.next()
            r = self.interval()
            self.expect(")")
            return r
        raise self.error("expected an interval term")

    # -- faces -------------------------------------------------------------------

    def face(self) -> A.Face:
        lhs = self.fmeet()
        while self.at(*_JOIN):
            self.next()
            lhs = A.FaceJoin(lhs, self.fmeet())
        return lhs

    def fmeet(self) -> A.Face:
        lhs = self.fatom()
        while self.at(*_MEET):
            self.next()
            lhs = A.FaceMeet(lhs, self.fatom())
        return lhs

    def fatom(self) -> A.Face:
        phi = self._fatom()
        while self.at("^"):
            self.next()
            phi = A.FaceExch(phi, self.modality())
        return phi

    def _fatom(self) -> A.Face:
        if self.at_kw("top") or self.at("⊤"):
            self.next()
            return A.FaceTop()
        if self.at_kw("bot") or self.at("⊥"):
            self.next()
            return A.FaceBot()
        if self.at("("):
            save = self.pos
            self.next()
            try:
                r = self.interval()
                self.expect("=")
                bit = self.tok
                if bit.kind != "num" or bit.text not in ("0", "1"):
                    raise self.error("expected 0 or 1")
                self.next()
                self.expect(")")
                return A.FaceEq(r, int(bit.text))
            except ParseError:
                self.pos = save + 1
            phi = self.face()
            self.expect(")")
            return phi
        raise self.error("expected a face")



def parse(text: str, file: str = "<input>") -> list[A.TopLevel]:
    return Parser(text, file).program()


def parse_term(text: str, file: str = "<input>") -> A.Term:
    p = Parser(text, file)
    e = p.term()
    if p.tok.kind != "eof":
        raise p.error("trailing input after term")
    return e
