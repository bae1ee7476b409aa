from __future__ import annotations

from dataclasses import dataclass

from ..lang.errors import LangError, Span


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    span: Span | None
    message: str
    hint: str | None = None

    def render(self, path: str = "<input>") -> str:
        where = f"{path}:{self.span.line}:{self.span.col}" if self.span else path
        text = f"{where}: {self.severity}: {self.message}"
        if self.hint:
            text += f"\n  hint: {self.hint}"
        return text


class DiagnosticError(Exception):
    """Raised by the frontend; carries one or more diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic], kind: type | None = None):
        self.diagnostics = diagnostics
        self.kind = kind
        super().__init__("; ".join(d.message for d in diagnostics))

    @classmethod
    def single(cls, message: str, span: Span | None = None, hint: str | None = None, kind=None):
        return cls([Diagnostic("error", span, message, hint)], kind)

    @classmethod
    def from_lang(cls, err: LangError):
        return cls([Diagnostic("error", err.span, err.message)], type(err))

    def render(self, path: str = "<input>") -> str:
        return "\n".join(d.render(path) for d in self.diagnostics)
