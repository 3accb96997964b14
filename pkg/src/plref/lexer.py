"""Tokenizer for ISO-style Prolog source.

Tokens carry the exact source slice and its offset span, so concatenating
token texts with the skipped whitespace/comment slices reproduces the
input.  Comments are collected separately with their own spans.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import IllegalCharacter, UnterminatedBlockComment, UnterminatedString
from .terms import Comment, Span

SYMBOL_CHARS = set("#$&*+-./:<=>?@^~\\")
SOLO_ATOMS = {"!", ";"}

_NAME_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_VAR_RE = re.compile(r"[A-Z_][a-zA-Z0-9_]*")
_FLOAT_RE = re.compile(r"\d+\.\d+(?:[eE][+-]?\d+)?")
_INT_RE = re.compile(r"0x[0-9a-fA-F]+|0o[0-7]+|0b[01]+|\d+")
_CHARCODE_RE = re.compile(r"0'(?:\\(?:x[0-9a-fA-F]+\\?|[0-7]+\\?|[abfnrtv\\'\"`])|''|[^\\])")


@dataclass(frozen=True)
class Token:
    kind: str  # atom | variable | integer | float | string | punct | open | close | comma | bar | end
    text: str
    span: Span

    @property
    def start(self) -> int:
        return self.span[0]

    @property
    def end(self) -> int:
        return self.span[1]


def tokenize(text: str) -> tuple[list[Token], list[Comment]]:
    """Split source text into tokens and comments.

    Raises UnterminatedString, UnterminatedBlockComment or IllegalCharacter
    with the offending offset.
    """
    tokens: list[Token] = []
    comments: list[Comment] = []
    i = 0
    n = len(text)

    def emit(kind: str, start: int, end: int):
        tokens.append(Token(kind, text[start:end], (start, end)))

    while i < n:
        c = text[i]

        if c in " \t\r\n":
            i += 1
            continue

        if c == "%":
            j = text.find("\n", i)
            j = n if j < 0 else j
            comments.append(Comment((i, j), text[i:j]))
            i = j
            continue

        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise UnterminatedBlockComment("unterminated block comment", i)
            comments.append(Comment((i, j + 2), text[i:j + 2]))
            i = j + 2
            continue

        if c == "(":
            emit("open", i, i + 1)
            i += 1
            continue
        if c in "[{":
            emit("open", i, i + 1)
            i += 1
            continue
        if c in ")]}":
            emit("close", i, i + 1)
            i += 1
            continue
        if c == ",":
            emit("comma", i, i + 1)
            i += 1
            continue
        if c == "|":
            emit("bar", i, i + 1)
            i += 1
            continue
        if c in SOLO_ATOMS:
            emit("atom", i, i + 1)
            i += 1
            continue

        if c == "'":
            j = _scan_quoted(text, i, "'")
            emit("atom", i, j)
            i = j
            continue
        if c == '"':
            j = _scan_quoted(text, i, '"')
            emit("string", i, j)
            i = j
            continue

        if c.isdigit():
            m = _CHARCODE_RE.match(text, i)
            if m and text.startswith("0'", i):
                emit("integer", i, m.end())
                i = m.end()
                continue
            m = _FLOAT_RE.match(text, i)
            if m:
                emit("float", i, m.end())
                i = m.end()
                continue
            m = _INT_RE.match(text, i)
            emit("integer", i, m.end())
            i = m.end()
            continue

        m = _VAR_RE.match(text, i)
        if m:
            emit("variable", i, m.end())
            i = m.end()
            continue

        m = _NAME_RE.match(text, i)
        if m:
            emit("atom", i, m.end())
            i = m.end()
            continue

        if c in SYMBOL_CHARS:
            j = i + 1
            while j < n and text[j] in SYMBOL_CHARS:
                j += 1
            tok = text[i:j]
            # A lone `.` followed by layout, a comment, or EOF terminates a term.
            if tok == "." and (j >= n or text[j] in " \t\r\n%"):
                emit("end", i, j)
            else:
                emit("atom", i, j)
            i = j
            continue

        raise IllegalCharacter(f"illegal character {c!r}", i)

    return tokens, comments


def _scan_quoted(text: str, start: int, quote: str) -> int:
    """Scan a quoted atom/string from its opening quote; returns end offset."""
    i = start + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            if i + 1 >= n:
                break
            i += 2
            continue
        if c == quote:
            if i + 1 < n and text[i + 1] == quote:  # doubled quote escape
                i += 2
                continue
            return i + 1
        i += 1
    raise UnterminatedString(f"unterminated {quote} quote", start)


def reconstruct(text: str, tokens: list[Token], comments: list[Comment]) -> str:
    """Rebuild source from tokens plus the skipped slices (round-trip check)."""
    pieces = []
    pos = 0
    slices = sorted([t.span for t in tokens] + [c.span for c in comments])
    for start, end in slices:
        pieces.append(text[pos:start])
        pieces.append(text[start:end])
        pos = end
    pieces.append(text[pos:])
    return "".join(pieces)
