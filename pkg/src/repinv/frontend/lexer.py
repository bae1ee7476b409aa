from __future__ import annotations

import re
from dataclasses import dataclass

from ..lang.errors import Span
from .diagnostics import DiagnosticError

KEYWORDS = {
    "type", "of", "let", "rec", "in", "fun", "match", "with", "if", "then", "else",
    "module", "struct", "sig", "end", "val", "spec", "forall", "not", "fst", "snd",
    "true", "false",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<int>[0-9]+)
  | (?P<lident>[a-z_][A-Za-z0-9_']*)
  | (?P<uident>[A-Z][A-Za-z0-9_']*)
  | (?P<op>==>|->|&&|\|\||<>|[=|*:,.()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # int, lident, uident, kw, op, eof
    text: str
    span: Span


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1
    n = len(src)

    def advance(text):
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while i < n:
        if src.startswith("(*", i):
            depth = 0
            j = i
            start = (line, col)
            while j < n:
                if src.startswith("(*", j):
                    depth += 1
                    j += 2
                elif src.startswith("*)", j):
                    depth -= 1
                    j += 2
                    if depth == 0:
                        break
                else:
                    j += 1
            if depth != 0:
                raise DiagnosticError.single("unterminated comment", Span(*start, line, col))
            advance(src[i:j])
            i = j
            continue
        m = _TOKEN.match(src, i)
        if m is None:
            raise DiagnosticError.single(f"unexpected character {src[i]!r}", Span(line, col, line, col + 1))
        text = m.group()
        kind = m.lastgroup
        start_line, start_col = line, col
        advance(text)
        i = m.end()
        if kind == "ws":
            continue
        if kind == "lident" and text in KEYWORDS:
            kind = "kw"
        tokens.append(Token(kind, text, Span(start_line, start_col, line, col)))
    tokens.append(Token("eof", "", Span(line, col, line, col)))
    return tokens


def annotations(src: str) -> dict[str, str]:
    """``(* @key value *)`` comments, used by the corpus for expectations."""
    out = {}
    for m in re.finditer(r"\(\*\s*@(\w[\w-]*)\s*(.*?)\s*\*\)", src, re.S):
        out[m.group(1)] = m.group(2)
    return out
