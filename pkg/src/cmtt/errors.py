"""Exception hierarchy shared by every layer of the checker.

Exit-code classes: ``TypeCheckError`` and ``ParseError`` map to 1,
``ConfigError`` to 2 and ``ResourceError`` to 3.
"""

from __future__ import annotations

from dataclasses import dataclass


class CmttError(Exception):
    """Base class. Carries enough context to build a diagnostic record."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        *,
        rule: str | None = None,
        mode: str | None = None,
        clause: str | None = None,
        span: "Span | None" = None,
        decl: str | None = None,
    ):
        super().__init__(message)
        self.message = message
        self.rule = rule
        self.mode = mode
        self.clause = clause
        self.span = span
        self.decl = decl

    def diagnostic(self) -> dict:
        return {
            "decl": self.decl,
            "rule": self.rule,
            "mode": self.mode,
            "clause": self.clause,
            "message": self.message,
            "span": None if self.span is None else self.span.as_dict(),
        }


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def as_dict(self) -> dict:
        return {
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


class ConfigError(CmttError):
    exit_code = 2


class ResourceError(CmttError):
    exit_code = 3


class ModeMismatch(CmttError):
    """Modalities or contexts whose modes do not line up."""


class SaturationBoundExceeded(ResourceError):
    """A 2-cell query left the explored word space; the answer is unknown."""


class RewriteDivergence(ConfigError):
    """A user rewrite system did not terminate within its declared bound."""


class ParseError(CmttError):
    pass


class ScopeError(CmttError):
    pass


class IndexOutOfRange(CmttError):
    pass


class MalformedSubstitution(CmttError):
    pass


class UnboundVariable(CmttError):
    pass


class EvalError(CmttError):
    """Raised when evaluation meets a value of an impossible shape."""


class TypeCheckError(CmttError):
    pass


class UnknownVariable(TypeCheckError):
    pass


class LockMismatch(TypeCheckError):
    pass


class NotAFunction(TypeCheckError):
    pass


class NotAPath(TypeCheckError):
    pass


class NotModal(TypeCheckError):
    pass


class CoverNotTotal(TypeCheckError):
    pass


class OverlapMismatch(TypeCheckError):
    pass


class BoundaryMismatch(TypeCheckError):
    pass


class ConversionError(TypeCheckError):
    pass


class DuplicateName(TypeCheckError):
    pass
