"""Operator-precedence parser producing terms, clauses and parsed files."""

from __future__ import annotations

import dataclasses
from typing import Optional

from .errors import OperatorClash, PrologSyntaxError
from .lexer import Token, tokenize
from .operators import OperatorTable, argument_priorities
from .terms import (
    Atom,
    Clause,
    ClauseItem,
    Compound,
    Directive,
    Float,
    Goal,
    Int,
    ParsedFile,
    Str,
    Term,
    TRUE,
    Var,
    goal_tree,
)

_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "a": "\a", "b": "\b", "f": "\f",
    "v": "\v", "\\": "\\", "'": "'", '"': '"', "`": "`", "0": "\0",
}


def unquote_atom(text: str) -> str:
    """Name of an atom token (strip quotes and decode escapes)."""
    if not text.startswith("'"):
        return text
    return _decode_quoted(text[1:-1], "'")


def _decode_quoted(inner: str, quote: str) -> str:
    out = []
    i = 0
    while i < len(inner):
        c = inner[i]
        if c == quote and i + 1 < len(inner) and inner[i + 1] == quote:
            out.append(quote)
            i += 2
        elif c == "\\" and i + 1 < len(inner):
            nxt = inner[i + 1]
            if nxt == "x":
                j = inner.find("\\", i + 2)
                j = j if j > 0 else len(inner)
                out.append(chr(int(inner[i + 2:j], 16)))
                i = j + 1
            elif nxt.isdigit():
                j = inner.find("\\", i + 1)
                j = j if j > 0 else len(inner)
                out.append(chr(int(inner[i + 1:j], 8)))
                i = j + 1
            elif nxt == "\n":  # line continuation
                i += 2
            else:
                out.append(_ESCAPES.get(nxt, nxt))
                i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _integer_value(text: str) -> int:
    if text.startswith("0'"):
        rest = text[2:]
        if rest == "''":
            return ord("'")
        if rest.startswith("\\"):
            body = rest[1:].rstrip("\\")
            if body.startswith("x"):
                return int(body[1:], 16)
            if body and body[0].isdigit():
                return int(body, 8)
            return ord(_ESCAPES.get(body, body))
        return ord(rest)
    if text.startswith(("0x", "0X")):
        return int(text, 16)
    if text.startswith(("0o", "0O")):
        return int(text[2:], 8)
    if text.startswith(("0b", "0B")):
        return int(text[2:], 2)
    return int(text)


_TERM_START_KINDS = {"atom", "variable", "integer", "float", "string", "open"}


class _Parser:
    def __init__(self, tokens: list[Token], table: OperatorTable):
        self.tokens = tokens
        self.table = table
        self.pos = 0

    def peek(self, ahead: int = 0) -> Optional[Token]:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1].span if self.tokens else (0, 0)
            raise PrologSyntaxError("unexpected end of input", (last[1], last[1]))
        self.pos += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (text is not None and tok.text != text):
            what = text or kind
            at = tok.span if tok else (self.tokens[-1].end,) * 2 if self.tokens else (0, 0)
            got = tok.text if tok else "end of input"
            raise PrologSyntaxError(f"expected {what!r}, found {got!r}", at)
        return self.advance()

    # -- grammar ------------------------------------------------------------

    def parse(self, maxprec: int) -> Term:
        left, left_prec = self._primary(maxprec)
        while True:
            tok = self.peek()
            if tok is None:
                return left
            name = None
            if tok.kind == "atom":
                name = unquote_atom(tok.text)
            elif tok.kind == "comma":
                name = ","
            elif tok.kind == "bar":
                name = ";"
            if name is None:
                return left

            entry = self.table.infix_of(name)
            if entry:
                prio, optype = entry
                lmax, rmax = argument_priorities(prio, optype)
                if prio <= maxprec and left_prec <= lmax:
                    self.advance()
                    right = self.parse(rmax)
                    left = Compound(name, (left, right),
                                    span=(left.span[0], right.span[1]),
                                    name_span=tok.span)
                    left_prec = prio
                    continue
            post = self.table.postfix_of(name)
            if post:
                prio, optype = post
                (amax,) = argument_priorities(prio, optype)
                if prio <= maxprec and left_prec <= amax:
                    self.advance()
                    left = Compound(name, (left,),
                                    span=(left.span[0], tok.end),
                                    name_span=tok.span)
                    left_prec = prio
                    continue
            return left

    def _primary(self, maxprec: int) -> tuple[Term, int]:
        tok = self.advance()
        kind = tok.kind

        if kind == "integer":
            return Int(_integer_value(tok.text), span=tok.span, raw=tok.text), 0
        if kind == "float":
            return Float(float(tok.text), span=tok.span, raw=tok.text), 0
        if kind == "string":
            return Str(_decode_quoted(tok.text[1:-1], '"'), span=tok.span, raw=tok.text), 0
        if kind == "variable":
            return Var(tok.text, span=tok.span), 0

        if kind == "open" and tok.text == "(":
            inner = self.parse(1200)
            close = self.expect("close", ")")
            return dataclasses.replace(inner, span=(tok.start, close.end)), 0
        if kind == "open" and tok.text == "[":
            return self._list(tok), 0
        if kind == "open" and tok.text == "{":
            return self._curly(tok), 0

        if kind == "atom":
            name = unquote_atom(tok.text)
            raw = tok.text if tok.text.startswith("'") else None
            nxt = self.peek()

            if nxt is not None and nxt.kind == "open" and nxt.text == "(" \
                    and nxt.start == tok.end:
                self.advance()
                args = self._arglist()
                close = self.expect("close", ")")
                return Compound(name, tuple(args), span=(tok.start, close.end),
                                name_span=tok.span), 0

            pre = self.table.prefix_of(name)
            if pre and raw is None and self._can_start_term(nxt):
                # A sign directly applied to a number literal folds into a
                # negative constant irrespective of operator priorities.
                if name in ("-", "+") and nxt.kind in ("integer", "float"):
                    self.advance()
                    if nxt.kind == "integer":
                        v = _integer_value(nxt.text)
                        value = -v if name == "-" else v
                        return Int(value, span=(tok.start, nxt.end)), 0
                    value = -float(nxt.text) if name == "-" else float(nxt.text)
                    return Float(value, span=(tok.start, nxt.end)), 0
                prio, optype = pre
                if prio <= maxprec:
                    (amax,) = argument_priorities(prio, optype)
                    operand = self.parse(amax)
                    return Compound(name, (operand,),
                                    span=(tok.start, operand.span[1]),
                                    name_span=tok.span), prio
            return Atom(name, span=tok.span, raw=raw), 0

        raise PrologSyntaxError(f"expected a term, found {tok.text!r}", tok.span)

    def _can_start_term(self, tok: Optional[Token]) -> bool:
        if tok is None or tok.kind not in _TERM_START_KINDS:
            return False
        if tok.kind == "atom":
            name = unquote_atom(tok.text)
            # An infix-only operator cannot begin an operand (e.g. `p(- , x)`).
            if self.table.infix_of(name) and not self.table.prefix_of(name):
                follow = self.peek(1)
                if follow is None or follow.kind in ("comma", "close", "end", "bar"):
                    return False
        return True

    def _arglist(self) -> list[Term]:
        args = [self.parse(999)]
        while self.peek() is not None and self.peek().kind == "comma":
            self.advance()
            args.append(self.parse(999))
        return args

    def _list(self, open_tok: Token) -> Term:
        nxt = self.peek()
        if nxt is not None and nxt.kind == "close" and nxt.text == "]":
            close = self.advance()
            return Atom("[]", span=(open_tok.start, close.end))
        elems = self._arglist()
        tail: Term = Atom("[]")
        if self.peek() is not None and self.peek().kind == "bar":
            self.advance()
            tail = self.parse(999)
        close = self.expect("close", "]")
        result = tail
        for e in reversed(elems):
            result = Compound(".", (e, result), span=(e.span[0], close.end))
        return dataclasses.replace(result, span=(open_tok.start, close.end))

    def _curly(self, open_tok: Token) -> Term:
        nxt = self.peek()
        if nxt is not None and nxt.kind == "close" and nxt.text == "}":
            close = self.advance()
            return Atom("{}", span=(open_tok.start, close.end))
        inner = self.parse(1200)
        close = self.expect("close", "}")
        return Compound("{}", (inner,), span=(open_tok.start, close.end))


def parse_term(text: str, table: Optional[OperatorTable] = None) -> Term:
    """Parse a single term, optionally terminated by `.`."""
    table = table or OperatorTable.iso()
    tokens, _ = tokenize(text)
    parser = _Parser(tokens, table)
    term = parser.parse(1200)
    tok = parser.peek()
    if tok is not None and tok.kind == "end":
        parser.advance()
        tok = parser.peek()
    if tok is not None:
        raise PrologSyntaxError(f"unexpected trailing {tok.text!r}", tok.span)
    return term


def parse_goal(text: str, table: Optional[OperatorTable] = None):
    """Parse a term and interpret it as a goal tree."""
    return goal_tree(parse_term(text, table))


def parse_program(text: str, table: Optional[OperatorTable] = None,
                  path: str = "<string>") -> ParsedFile:
    """Parse a whole source file into directives and clauses.

    `:- op/3` directives take effect for subsequent items of this file.
    """
    table = (table or OperatorTable.iso()).copy()
    tokens, comments = tokenize(text)
    parser = _Parser(tokens, table)
    items = []
    while parser.peek() is not None:
        start_tok = parser.peek()
        term = parser.parse(1200)
        tok = parser.peek()
        if tok is None or tok.kind != "end":
            if tok is not None and tok.kind in ("atom", "comma") \
                    and parser.table.is_operator(
                        unquote_atom(tok.text) if tok.kind == "atom" else ","):
                raise OperatorClash(
                    f"operator priority clash at {tok.text!r}", tok.span)
            at = tok.span if tok else (tokens[-1].end,) * 2
            got = tok.text if tok else "end of input"
            raise PrologSyntaxError(f"expected '.', found {got!r}", at)
        end_tok = parser.advance()
        span = (start_tok.start, end_tok.end)
        items.append(_build_item(term, span, table))
    return ParsedFile(path=path, text=text, items=items, comments=comments)


def _build_item(term: Term, span, table: OperatorTable):
    if isinstance(term, Compound) and term.arity == 1 and term.name in (":-", "?-"):
        inner = term.args[0]
        if isinstance(inner, Compound) and inner.name == "op" and inner.arity == 3:
            _apply_op_directive(inner, table)
        return Directive(inner, span)
    if isinstance(term, Compound) and term.arity == 2 and term.name == ":-":
        head, body = term.args
        if not isinstance(head, (Atom, Compound)):
            raise PrologSyntaxError("clause head must be callable", span)
        return ClauseItem(Clause(head, goal_tree(body), span=span,
                                 head_span=head.span, body_span=body.span))
    if not isinstance(term, (Atom, Compound)):
        raise PrologSyntaxError("clause head must be callable", span)
    return ClauseItem(Clause(term, Goal(TRUE), span=span,
                             head_span=term.span, body_span=None))


def _apply_op_directive(term: Compound, table: OperatorTable):
    prio, optype, names = term.args
    if not isinstance(prio, Int) or not isinstance(optype, Atom):
        return
    name_terms = [names]
    if isinstance(names, Compound) and names.name == ".":
        name_terms = _iter_list(names)
    for nt in name_terms:
        if isinstance(nt, Atom):
            try:
                table.add(prio.value, optype.name, nt.name)
            except ValueError:
                pass


def _iter_list(term: Term) -> list[Term]:
    out = []
    while isinstance(term, Compound) and term.name == "." and term.arity == 2:
        out.append(term.args[0])
        term = term.args[1]
    return out
