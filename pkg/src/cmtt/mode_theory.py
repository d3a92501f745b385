"""Finitely presented poset-enriched mode theories.

A presentation lists modes, generating modalities, an oriented rewrite
system on words and generating 2-cells.  Words are tuples of generator
names read like composition: ``("γ", "ℓ")`` is ``γ∘ℓ`` and applies ``ℓ``
first.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import ConfigError, ModeMismatch, RewriteDivergence, SaturationBoundExceeded

Mode = str
Word = tuple[str, ...]

# Above this many normal forms the saturation is abandoned.
MAX_SATURATION_WORDS = 4000


@dataclass(frozen=True)
class Modality:
    dom: Mode
    cod: Mode
    word: Word = ()

    @property
    def is_identity(self) -> bool:
        return not self.word

    def __str__(self) -> str:
        if not self.word:
            return f"1_{self.dom}"
        return "∘".join(self.word)


@dataclass(frozen=True)
class TwoCellJudgment:
    src: Modality
    dst: Modality
    holds: bool


@dataclass(frozen=True)
class Rel:
    """A rule or cell between two parallel raw words."""

    lhs: Word
    rhs: Word
    dom: Mode
    cod: Mode


@dataclass
class ModeTheory:
    """A mode theory presentation together with its decision procedures."""

    name: str
    modes: tuple[Mode, ...]
    generators: dict[str, tuple[Mode, Mode]]
    rewrite_rules: list[Rel]
    cell_generators: list[Rel]
    saturation_bound: int = 16
    aliases: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.modes)) != len(self.modes):
            raise ConfigError("duplicate mode name")
        if not self.modes:
            raise ConfigError("a mode theory needs at least one mode")
        if self.saturation_bound <= 0:
            raise ConfigError("saturation bound must be positive")
        for g, (d, c) in self.generators.items():
            if d not in self.modes or c not in self.modes:
                raise ConfigError(f"generator {g} uses an undeclared mode")
        for kind, rels in (("rule", self.rewrite_rules), ("cell", self.cell_generators)):
            for rel in rels:
                if kind == "rule" and not rel.lhs:
                    raise ConfigError("rewrite rule with empty left-hand side")
                for w in (rel.lhs, rel.rhs):
                    if w:
                        self._check_composable(w)
                        if self.generators[w[-1]][0] != rel.dom or self.generators[w[0]][1] != rel.cod:
                            raise ConfigError(f"{kind} relates non-parallel words")
                    elif rel.dom != rel.cod:
                        raise ConfigError(f"{kind} relates non-parallel words")

    # ------------------------------------------------------------------ words

    def _check_composable(self, word: Word) -> None:
        for g in word:
            if g not in self.generators:
                raise ConfigError(f"unknown generator {g!r}")
        for left, right in zip(word, word[1:]):
            if self.generators[left][0] != self.generators[right][1]:
                raise ModeMismatch(f"generators {left} and {right} are not composable")

    def canonical_name(self, name: str) -> str:
        return self.aliases.get(name, name)

    def identity(self, mode: Mode) -> Modality:
        if mode not in self.modes:
            raise ModeMismatch(f"unknown mode {mode!r}")
        return Modality(mode, mode, ())

    def gen(self, name: str) -> Modality:
        name = self.canonical_name(name)
        if name not in self.generators:
            raise ConfigError(f"unknown generator {name!r}")
        d, c = self.generators[name]
        return self.make((name,), d, c)

    def make(self, word: Word, dom: Mode, cod: Mode) -> Modality:
        word = tuple(self.canonical_name(g) for g in word)
        if word:
            self._check_composable(word)
            if self.generators[word[-1]][0] != dom or self.generators[word[0]][1] != cod:
                raise ModeMismatch(f"word {'∘'.join(word)} is not {dom} -> {cod}")
        elif dom != cod:
            raise ModeMismatch("empty word between distinct modes")
        return Modality(dom, cod, self.normalize(word))

    def normalize(self, word: Word) -> Word:
        """Leftmost rewriting to a fixpoint, with a dynamic step limit."""
        limit = self.saturation_bound * max(1, len(word))
        steps = 0
        word = tuple(word)
        while True:
            hit = self._leftmost_redex(word)
            if hit is None:
                return word
            pos, lhs, rhs = hit
            word = word[:pos] + rhs + word[pos + len(lhs):]
            steps += 1
            if steps > limit:
                raise RewriteDivergence(
                    f"rewriting did not terminate within {limit} steps in theory {self.name}"
                )

    def _leftmost_redex(self, word: Word):
        for pos in range(len(word)):
            for rel in self.rewrite_rules:
                if word[pos:pos + len(rel.lhs)] == rel.lhs:
                    return pos, rel.lhs, rel.rhs
        return None

    def is_normal(self, word: Word) -> bool:
        return self._leftmost_redex(word) is None

    # ------------------------------------------------------------ operations

    def compose(self, mu: Modality, nu: Modality) -> Modality:
        """``mu ∘ nu``: apply ``nu`` first."""
        if nu.cod != mu.dom:
            raise ModeMismatch(f"cannot compose {mu} : {mu.dom} -> {mu.cod} after {nu} : {nu.dom} -> {nu.cod}")
        return Modality(nu.dom, mu.cod, self.normalize(mu.word + nu.word))

    def compose_all(self, mods, mode: Mode) -> Modality:
        """Fold ``compose`` left to right; identity at ``mode`` when empty."""
        acc = self.identity(mode)
        for m in mods:
            acc = self.compose(acc, m)
        return acc

    def mod_equal(self, mu: Modality, nu: Modality) -> bool:
        self._require_parallel(mu, nu)
        return self.normalize(mu.word) == self.normalize(nu.word)

    def cell_exists(self, src: Modality, dst: Modality) -> bool:
        self._require_parallel(src, dst)
        s, d = self.normalize(src.word), self.normalize(dst.word)
        if s == d:
            return True
        if len(s) > self.saturation_bound or len(d) > self.saturation_bound:
            raise SaturationBoundExceeded(
                f"2-cell query {src} <= {dst} exceeds saturation bound {self.saturation_bound}"
            )
        graph = self._cell_graph
        s, d = Modality(src.dom, src.cod, s), Modality(dst.dom, dst.cod, d)
        seen = {s}
        todo = deque([s])
        while todo:
            w = todo.popleft()
            for nxt in graph.get(w, ()):
                if nxt == d:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return False

    def _require_parallel(self, a: Modality, b: Modality) -> None:
        if (a.dom, a.cod) != (b.dom, b.cod):
            raise ModeMismatch(f"modalities {a} and {b} are not parallel")

    # ------------------------------------------------------------ saturation

    @cached_property
    def normal_forms(self) -> dict[tuple[Mode, Mode], list[Word]]:
        """All irreducible words of length <= bound, grouped by (dom, cod)."""
        by_ends: dict[tuple[Mode, Mode], list[Word]] = {(m, m): [()] for m in self.modes}
        frontier: list[tuple[Word, Mode, Mode]] = [((), m, m) for m in self.modes]
        total = len(frontier)
        for _ in range(self.saturation_bound):
            nxt = []
            for w, d, c in frontier:
                for g, (gd, gc) in self.generators.items():
                    if gd != c:
                        continue
                    cand = (g,) + w
                    if not self.is_normal(cand):
                        continue
                    by_ends.setdefault((d, gc), []).append(cand)
                    nxt.append((cand, d, gc))
                    total += 1
                    if total > MAX_SATURATION_WORDS:
                        raise SaturationBoundExceeded(
                            f"theory {self.name} has more than {MAX_SATURATION_WORDS} normal forms within its bound"
                        )
            frontier = nxt
        return by_ends

    def words_between(self, dom: Mode, cod: Mode) -> list[Word]:
        return self.normal_forms.get((dom, cod), [])

    @cached_property
    def _cell_graph(self) -> dict[Modality, set[Modality]]:
        """One-step edges: every generating cell whiskered on both sides."""
        nfs = self.normal_forms
        bound = self.saturation_bound
        graph: dict[Modality, set[Modality]] = {}
        for rel in self.cell_generators:
            for (xd, xc), xs in nfs.items():
                if xd != rel.cod:
                    continue
                for (yd, yc), ys in nfs.items():
                    if yc != rel.dom:
                        continue
                    for x in xs:
                        for y in ys:
                            a = self.normalize(x + rel.lhs + y)
                            b = self.normalize(x + rel.rhs + y)
                            if a == b or len(a) > bound or len(b) > bound:
                                continue
                            graph.setdefault(Modality(yd, xc, a), set()).add(Modality(yd, xc, b))
        return graph

    def saturated_cells(self) -> set[tuple[Modality, Modality]]:
        """Reflexive-transitive closure of the one-step edges (test helper)."""
        out = set()
        for (d, c), words in self.normal_forms.items():
            for w in words:
                m = Modality(d, c, w)
                out.add((m, m))
        graph = self._cell_graph
        for start in list(graph):
            seen = {start}
            todo = [start]
            while todo:
                w = todo.pop()
                for n in graph.get(w, ()):
                    if n not in seen:
                        seen.add(n)
                        todo.append(n)
            out.update((start, w) for w in seen)
        return out

    # --------------------------------------------------------------- parsing

    def parse_word(self, text: str, mode: Mode | None = None) -> Modality:
        """Parse ``ℓ∘δ∘γ``, ``l.d.g``, ``1_t`` or (given ``mode``) ``1``."""
        text = text.strip()
        if text == "1" or text == "id":
            if mode is None:
                raise ConfigError("bare identity modality needs a known mode")
            return self.identity(mode)
        m = re.fullmatch(r"1_(\S+)", text)
        if m:
            return self.identity(m.group(1))
        parts = [p.strip() for p in re.split(r"[∘.]", text)]
        if any(not p for p in parts):
            raise ConfigError(f"malformed modality {text!r}")
        word = tuple(self.canonical_name(p) for p in parts)
        for g in word:
            if g not in self.generators:
                raise ConfigError(f"unknown generator {g!r} in modality {text!r}")
        self._check_composable(word)
        return Modality(self.generators[word[-1]][0], self.generators[word[0]][1], self.normalize(word))

    def describe(self) -> str:
        lines = [f"-- mode theory {self.name}"]
        lines += [f"mode {m};" for m in self.modes]
        lines += [f"gen {g} : {d} -> {c};" for g, (d, c) in self.generators.items()]
        for r in self.rewrite_rules:
            lines.append(f"rule {self._show(r.lhs, r.dom)} = {self._show(r.rhs, r.dom)};")
        for c in self.cell_generators:
            lines.append(f"cell {self._show(c.lhs, c.dom)} <= {self._show(c.rhs, c.dom)};")
        lines.append(f"bound {self.saturation_bound};")
        return "\n".join(lines)

    @staticmethod
    def _show(word: Word, mode: Mode) -> str:
        return "∘".join(word) if word else f"1_{mode}"


def _build(name, modes, generators, rules, cells, bound, aliases=None) -> ModeTheory:
    """Rules and cells are given as ``(lhs, rhs)`` where an identity word is
    written as the mode name wrapped in a one-element list."""

    def rel(lhs, rhs) -> Rel:
        ends = None
        for w in (lhs, rhs):
            if isinstance(w, list):
                ends = (w[0], w[0])
            elif w:
                for g in w:
                    if g not in generators:
                        raise ConfigError(f"unknown generator {g!r}")
                ends = (generators[w[-1]][0], generators[w[0]][1])
                break
        norm = lambda w: () if isinstance(w, list) else tuple(w)
        return Rel(norm(lhs), norm(rhs), ends[0], ends[1])

    return ModeTheory(
        name=name,
        modes=tuple(modes),
        generators=dict(generators),
        rewrite_rules=[rel(a, b) for a, b in rules],
        cell_generators=[rel(a, b) for a, b in cells],
        saturation_bound=bound,
        aliases=dict(aliases or {}),
    )


def builtin_guarded() -> ModeTheory:
    """Modes t (time) and s (space): ℓ later, γ global sections, δ constant."""
    return _build(
        "guarded",
        ["t", "s"],
        {"ℓ": ("t", "t"), "γ": ("t", "s"), "δ": ("s", "t")},
        [(("γ", "δ"), ["s"]), (("γ", "ℓ"), ("γ",))],
        [(("δ", "γ"), ["t"]), (["t"], ("ℓ",))],
        16,
        aliases={"l": "ℓ", "g": "γ", "d": "δ"},
    )


def builtin_trivial() -> ModeTheory:
    return _build("trivial", ["m"], {}, [], [], 16)


BUILTINS = {"guarded": builtin_guarded, "trivial": builtin_trivial}


def parse_mode_theory(text: str, name: str = "<file>") -> ModeTheory:
    """Parse the ``mode/gen/rule/cell/bound`` statement format."""
    text = re.sub(r"(--|#)[^\n]*", "", text)
    modes: list[str] = []
    gens: dict[str, tuple[str, str]] = {}
    raw_rules: list[tuple[str, str]] = []
    raw_cells: list[tuple[str, str]] = []
    bound = 16
    for stmt in (s.strip() for s in text.split(";")):
        if not stmt:
            continue
        head, _, rest = stmt.partition(" ")
        rest = rest.strip()
        if head == "mode":
            if not re.fullmatch(r"[^\s∘.;:]+", rest):
                raise ConfigError(f"bad mode name {rest!r}")
            modes.append(rest)
        elif head == "gen":
            m = re.fullmatch(r"(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", rest)
            if not m:
                raise ConfigError(f"bad generator declaration {stmt!r}")
            if m.group(1) in gens:
                raise ConfigError(f"duplicate generator {m.group(1)}")
            gens[m.group(1)] = (m.group(2), m.group(3))
        elif head == "rule":
            lhs, sep, rhs = rest.partition("=")
            if not sep:
                raise ConfigError(f"bad rule {stmt!r}")
            raw_rules.append((lhs.strip(), rhs.strip()))
        elif head == "cell":
            lhs, sep, rhs = rest.partition("<=")
            if not sep:
                raise ConfigError(f"bad cell {stmt!r}")
            raw_cells.append((lhs.strip(), rhs.strip()))
        elif head == "bound":
            try:
                bound = int(rest)
            except ValueError as exc:
                raise ConfigError(f"bad bound {rest!r}") from exc
        else:
            raise ConfigError(f"unknown statement {stmt!r}")

    def word(w: str):
        m = re.fullmatch(r"1_(\S+)", w)
        if m:
            if m.group(1) not in modes:
                raise ConfigError(f"unknown mode in {w!r}")
            return [m.group(1)]
        parts = tuple(p.strip() for p in re.split(r"[∘.]", w))
        if any(not p for p in parts):
            raise ConfigError(f"malformed word {w!r}")
        return parts

    return _build(
        name,
        modes,
        gens,
        [(word(a), word(b)) for a, b in raw_rules],
        [(word(a), word(b)) for a, b in raw_cells],
        bound,
    )


def load_mode_theory(selection: str) -> ModeTheory:
    """Resolve a builtin name or a path to a presentation file."""
    if selection in BUILTINS:
        return BUILTINS[selection]()
    path = Path(selection)
    if not path.is_file():
        raise ConfigError(f"no builtin mode theory or file named {selection!r}")
    return parse_mode_theory(path.read_text(encoding="utf-8"), name=path.stem)
