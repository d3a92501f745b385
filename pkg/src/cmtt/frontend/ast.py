"""Surface syntax trees.  Modalities are kept as text until resolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import Span

# intervals


@dataclass(frozen=True)
class IZero:
    pass


@dataclass(frozen=True)
class IOne:
    pass


@dataclass(frozen=True)
class IName:
    name: str


@dataclass(frozen=True)
class INeg:
    r: "Interval"


@dataclass(frozen=True)
class IMeet:
    r: "Interval"
    s: "Interval"


@dataclass(frozen=True)
class IJoin:
    r: "Interval"
    s: "Interval"


@dataclass(frozen=True)
class IExch:
    r: "Interval"
    mod: str


Interval = Union[IZero, IOne, IName, INeg, IMeet, IJoin, IExch]

# faces


@dataclass(frozen=True)
class FaceTop:
    pass


@dataclass(frozen=True)
class FaceBot:
    pass


@dataclass(frozen=True)
class FaceEq:
    r: Interval
    bit: int


@dataclass(frozen=True)
class FaceMeet:
    a: "Face"
    b: "Face"


@dataclass(frozen=True)
class FaceJoin:
    a: "Face"
    b: "Face"


@dataclass(frozen=True)
class FaceExch:
    a: "Face"
    mod: str


Face = Union[FaceTop, FaceBot, FaceEq, FaceMeet, FaceJoin, FaceExch]

# terms


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Universe:
    level: int


@dataclass(frozen=True)
class BoolTy:
    pass


@dataclass(frozen=True)
class Lit:
    value: bool


@dataclass(frozen=True)
class PiTy:
    name: Optional[str]
    mod: Optional[str]
    dom: "Term"
    cod: "Term"


@dataclass(frozen=True)
class SigmaTy:
    name: Optional[str]
    dom: "Term"
    cod: "Term"


@dataclass(frozen=True)
class Lambda:
    name: str
    mod: Optional[str]
    body: "Term"


@dataclass(frozen=True)
class Apply:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class PLam:
    name: str
    body: "Term"


@dataclass(frozen=True)
class PApp:
    p: "Term"
    r: Interval


@dataclass(frozen=True)
class PathTy:
    ty: "Term"
    a0: "Term"
    a1: "Term"


@dataclass(frozen=True)
class PathPTy:
    name: str
    line: "Term"
    a0: "Term"
    a1: "Term"


@dataclass(frozen=True)
class ModalTy:
    mod: str
    ty: "Term"


@dataclass(frozen=True)
class LaterTy:
    ty: "Term"


@dataclass(frozen=True)
class Box:
    mod: Optional[str]
    e: "Term"


@dataclass(frozen=True)
class Next:
    e: "Term"


@dataclass(frozen=True)
class LetBox:
    nu: Optional[str]
    mu: Optional[str]
    var: str
    scrut: "Term"
    zname: Optional[str]
    motive: Optional["Term"]
    body: "Term"


@dataclass(frozen=True)
class IfThen:
    scrut: "Term"
    zname: Optional[str]
    motive: Optional["Term"]
    tt: "Term"
    ff: "Term"


@dataclass(frozen=True)
class System:
    branches: tuple[tuple[Face, "Term"], ...]


@dataclass(frozen=True)
class CompTm:
    name: str
    line: "Term"
    branches: tuple[tuple[Face, "Term"], ...]
    cap: "Term"


@dataclass(frozen=True)
class PairTm:
    a: "Term"
    b: "Term"


@dataclass(frozen=True)
class Proj:
    which: int
    e: "Term"


@dataclass(frozen=True)
class Annot:
    e: "Term"
    ty: "Term"


@dataclass(frozen=True)
class ZApp:
    fn: "Term"
    arg: "Term"


Term = Union[
    Name, Universe, BoolTy, Lit, PiTy, SigmaTy, Lambda, Apply, PLam, PApp, PathTy, PathPTy,
    ModalTy, LaterTy, Box, Next, LetBox, IfThen, System, CompTm, PairTm, Proj, Annot, ZApp,
]

# declarations


@dataclass(frozen=True)
class Param:
    name: str
    mod: Optional[str]
    ty: Term


@dataclass(frozen=True)
class DeclS:
    kind: str  # def | theorem | axiom
    name: str
    mode: Optional[str]
    params: tuple[Param, ...]
    ty: Term
    body: Optional[Term]
    rewrite: Optional[Term] = None
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class ImportS:
    path: str
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class ModeTheoryS:
    selection: str
    span: Optional[Span] = field(default=None, compare=False)


TopLevel = Union[DeclS, ImportS, ModeTheoryS]
