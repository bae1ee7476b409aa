from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}-{self.end_line}:{self.end_col}"


class LangError(Exception):
    """Base class for object-language errors; carries an optional source span."""

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self):
        if self.span is not None:
            return f"{self.span}: {self.message}"
        return self.message


class TypeMismatch(LangError):
    pass


class UnboundVariable(LangError):
    pass


class ConstructorArityMismatch(LangError):
    pass


class NonExhaustiveMatch(LangError):
    pass


class InterfaceMismatch(LangError):
    pass


class FuelExhausted(LangError):
    """Evaluation ran out of its step budget; the program may diverge."""


class MatchFailure(LangError):
    pass


class SizeOfClosure(LangError):
    pass
