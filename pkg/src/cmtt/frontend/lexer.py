"""Tokenizer for ``.cmtt`` sources."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError, Span


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | string | sym | boxmod | letmod | eof
    text: str
    line: int
    col: int
    mod: str | None = None  # modality text attached to box_/let_

    def span(self, file: str) -> Span:
        return Span(file, self.line, self.col, self.line, self.col + max(1, len(self.text)))


KEYWORDS = {
    "def", "theorem", "axiom", "import", "modetheory", "rewrite",
    "let", "in", "return", "if", "then", "else", "box", "next",
    "fst", "snd", "Path", "PathP", "comp", "U", "Bool", "true", "false",
    "top", "bot", "fun", "Later", "zapp",
}

# longest first
SYMBOLS = [
    ":=", "|->", "->", "/\\", "\\/", "<*>",
    "(", ")", "[", "]", "{", "}", ",", ".", ":", "|", ";", "@", "~", "=", "^", "<", ">",
    "↦", "→", "×", "*", "⊛", "¬", "∧", "∨", "⟨", "⟩", "λ", "\\", "▷", "∘", "⊤", "⊥",
]

_MOD = r"(?:\{[^}]*\}|[^\s(){}\[\]<>⟨⟩,:|=;@]+)"
_BOXMOD = re.compile(r"(box|let)_(" + _MOD + ")")
_IDENT = re.compile(r"[^\W\d][\w']*", re.UNICODE)
_NUM = re.compile(r"\d+")
_STRING = re.compile(r'"([^"\\\n]*)"')


def _is_ident_start(ch: str) -> bool:
    return bool(_IDENT.match(ch)) and ch not in "λ▷¬∧∨⊛×→↦⟨⟩∘⊤⊥"


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int):
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("--", i) or ch == "#":
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if text.startswith("{-", i):
            j = text.find("-}", i)
            if j < 0:
                raise ParseError("unterminated block comment", span=Span(file, line, col, line, col + 2), rule="parse")
            advance(j + 2 - i)
            continue
        m = _BOXMOD.match(text, i)
        if m:
            mod = m.group(2)
            if mod.startswith("{"):
                mod = mod[1:-1].strip()
            toks.append(Token("boxmod" if m.group(1) == "box" else "letmod", m.group(0), line, col, mod))
            advance(m.end() - i)
            continue
        m = _STRING.match(text, i)
        if m:
            toks.append(Token("string", m.group(1), line, col))
            advance(m.end() - i)
            continue
        m = _NUM.match(text, i)
        if m:
            toks.append(Token("num", m.group(0), line, col))
            advance(m.end() - i)
            continue
        if _is_ident_start(ch):
            m = _IDENT.match(text, i)
            word = m.group(0)
            # identifiers never swallow the ∘ composition sign
            toks.append(Token("ident", word, line, col))
            advance(len(word))
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", span=Span(file, line, col, line, col + 1), rule="parse")
    toks.append(Token("eof", "", line, col))
    return toks
