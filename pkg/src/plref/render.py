"""Term and clause rendering with minimal parentheses.

Rendered output re-parses to a structurally identical term.  Clause bodies
use the classic one-goal-per-line layout with an 8-space indent and the
hanging if-then-else shape:

    p(X) :-
            ( X == a ->
                    q(X)
            ;
                    r(X)
            ).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .lexer import SYMBOL_CHARS
from .operators import OperatorTable, argument_priorities
from .terms import (
    Atom,
    Clause,
    Compound,
    Conj,
    Cut,
    Disj,
    Float,
    Goal,
    GoalTree,
    IfThenElse,
    Int,
    Naf,
    Str,
    Term,
    TRUE,
    Var,
    conjunction_list,
    goal_term,
)

_PLAIN_ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
_SOLO_ATOMS = {"!", ";", "[]", "{}"}


@dataclass(frozen=True)
class Style:
    indent: int = 8        # clause body indent
    branch_indent: int = 8  # extra indent for then/else branches
    cond_hang: int = 2     # continuation indent inside `( cond,` lines


DEFAULT_STYLE = Style()


def atom_text(name: str) -> str:
    """Quote an atom name if its spelling requires it."""
    if name in _SOLO_ATOMS:
        return name
    if _PLAIN_ATOM_RE.match(name):
        return name
    if name and all(c in SYMBOL_CHARS for c in name) and name != ".":
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
    return f"'{escaped}'"


def _float_text(value: float) -> str:
    s = repr(value)
    if "e" in s or "E" in s:
        mantissa, _, exp = s.partition("e")
        if "." not in mantissa:
            mantissa += ".0"
        return f"{mantissa}e{exp}" if exp else mantissa
    if "." not in s:
        s += ".0"
    return s


def _join(left: str, right: str) -> str:
    """Concatenate two renderings, spacing when tokens would fuse."""
    if not left or not right:
        return left + right
    a, b = left[-1], right[0]
    if a in SYMBOL_CHARS and b in SYMBOL_CHARS:
        return f"{left} {right}"
    if (a.isalnum() or a == "_") and (b.isalnum() or b == "_"):
        return f"{left} {right}"
    return left + right


def term_priority(term: Term, table: OperatorTable) -> int:
    if isinstance(term, Compound):
        if term.arity == 2:
            entry = table.infix_of(term.name)
            if entry:
                return entry[0]
        elif term.arity == 1:
            entry = table.prefix_of(term.name)
            if entry and not _is_sugar(term):
                return entry[0]
            entry = table.postfix_of(term.name)
            if entry:
                return entry[0]
    return 0


def _is_sugar(term: Compound) -> bool:
    return term.name in (".", "{}")


def render_term(term: Term, table: Optional[OperatorTable] = None,
                style: Optional[Style] = None, maxprec: int = 1200) -> str:
    """Single-line rendering with minimal parentheses."""
    table = table or OperatorTable.iso()
    text = _render(term, table, maxprec)
    return text


def _render(term: Term, table: OperatorTable, maxprec: int,
            as_operand: bool = False) -> str:
    # A bare atom that is an operator cannot be the immediate operand of
    # another operator; bracket it (quoted spellings are unambiguous).
    if as_operand and isinstance(term, Atom) and term.raw is None \
            and table.is_operator(term.name):
        return f"({atom_text(term.name)})"
    prio = term_priority(term, table)
    text = _render_free(term, table)
    if prio > maxprec:
        return f"({text})"
    return text


def _render_free(term: Term, table: OperatorTable) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Int):
        if term.raw is not None:
            return term.raw
        return str(term.value)
    if isinstance(term, Float):
        return term.raw if term.raw is not None else _float_text(term.value)
    if isinstance(term, Str):
        if term.raw is not None:
            return term.raw
        inner = term.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{inner}"'
    if isinstance(term, Atom):
        if term.raw is not None:
            return term.raw
        return atom_text(term.name)

    assert isinstance(term, Compound)
    if term.name == "." and term.arity == 2:
        return _render_list(term, table)
    if term.name == "{}" and term.arity == 1:
        return "{" + _render(term.args[0], table, 1200) + "}"

    if term.arity == 2:
        entry = table.infix_of(term.name)
        if entry:
            prio, optype = entry
            lmax, rmax = argument_priorities(prio, optype)
            left = _render(term.args[0], table, lmax, as_operand=True)
            right = _render(term.args[1], table, rmax, as_operand=True)
            op = atom_text(term.name)
            if term.name == ",":
                return f"{left},{right}"
            if prio >= 700 or op[0].isalpha():
                return f"{left} {op} {right}"
            return _join(_join(left, op), right)
    if term.arity == 1:
        entry = table.prefix_of(term.name)
        if entry:
            prio, optype = entry
            arg = term.args[0]
            if term.name in ("-", "+") and isinstance(arg, (Int, Float)):
                return f"{term.name}({_render(arg, table, 999)})"
            (amax,) = argument_priorities(prio, optype)
            inner = _render(arg, table, amax, as_operand=True)
            op = atom_text(term.name)
            if op[-1].isalpha():
                return f"{op} {inner}"
            if inner.startswith("("):
                # keep `\+ (a, b)` from reading back as a compound call
                return f"{op} {inner}"
            if term.name in ("-", "+") and inner[0].isdigit():
                # `-34:Zed` would re-read as a negative literal
                return f"{op}({_render(arg, table, 999)})"
            return _join(op, inner)
        entry = table.postfix_of(term.name)
        if entry:
            prio, optype = entry
            (amax,) = argument_priorities(prio, optype)
            return _join(_render(term.args[0], table, amax, as_operand=True),
                         atom_text(term.name))

    args = ",".join(_render(a, table, 999) for a in term.args)
    return f"{atom_text(term.name)}({args})"


def _render_list(term: Term, table: OperatorTable) -> str:
    elems = []
    while isinstance(term, Compound) and term.name == "." and term.arity == 2:
        elems.append(_render(term.args[0], table, 999))
        term = term.args[1]
    if isinstance(term, Atom) and term.name == "[]":
        return "[" + ",".join(elems) + "]"
    return "[" + ",".join(elems) + "|" + _render(term, table, 999) + "]"


# --- clause layout ----------------------------------------------------------

def render_clause(clause: Clause, table: Optional[OperatorTable] = None,
                  style: Optional[Style] = None) -> str:
    """Render a clause (or fact) terminated by `.`."""
    table = table or OperatorTable.iso()
    style = style or DEFAULT_STYLE
    head = render_term(clause.head, table, style, maxprec=1199)
    if clause.is_fact:
        return head + "."
    lines = render_goal_lines(clause.body, style.indent, table, style)
    return head + " :-\n" + "\n".join(lines) + "."


def render_directive(term: Term, table: Optional[OperatorTable] = None) -> str:
    table = table or OperatorTable.iso()
    return ":- " + render_term(term, table, maxprec=1199) + "."


def render_body(tree: GoalTree, indent: int,
                table: Optional[OperatorTable] = None,
                style: Optional[Style] = None) -> str:
    table = table or OperatorTable.iso()
    style = style or DEFAULT_STYLE
    return "\n".join(render_goal_lines(tree, indent, table, style))


def render_goal_lines(tree: GoalTree, indent: int, table: OperatorTable,
                      style: Style) -> list[str]:
    """Lines for a goal tree at the given indent (no trailing period)."""
    goals = conjunction_list(tree)
    lines: list[str] = []
    for i, g in enumerate(goals):
        glines = _goal_node_lines(g, indent, table, style)
        if i < len(goals) - 1:
            glines[-1] += ","
        lines.extend(glines)
    return lines


def _goal_node_lines(node: GoalTree, indent: int, table: OperatorTable,
                     style: Style) -> list[str]:
    pad = " " * indent
    if isinstance(node, Goal):
        return [pad + render_term(node.term, table, style, maxprec=999)]
    if isinstance(node, Cut):
        return [pad + "!"]
    if isinstance(node, Naf):
        inner = goal_term(node.inner)
        return [pad + "\\+ " + render_term(inner, table, style, maxprec=900)]
    if isinstance(node, IfThenElse):
        return _ite_lines(node, indent, table, style)
    if isinstance(node, Disj):
        return _disj_lines(node, indent, table, style)
    raise TypeError(node)


def _cond_lines(cond: GoalTree, indent: int, table: OperatorTable,
                style: Style) -> list[str]:
    """Condition goals: first on the `(` line, the rest hanging under it."""
    pad = " " * indent
    hang = " " * (indent + style.cond_hang)
    goals = conjunction_list(cond)
    simple = all(isinstance(g, (Goal, Cut, Naf)) for g in goals)
    if not simple:
        text = render_term(goal_term(cond), table, style, maxprec=1049)
        return [pad + "( " + text + " ->"]
    lines = []
    for i, g in enumerate(goals):
        body = _goal_node_lines(g, 0, table, style)[0]
        prefix = pad + "( " if i == 0 else hang
        suffix = "," if i < len(goals) - 1 else " ->"
        lines.append(prefix + body + suffix)
    return lines


def _ite_lines(node: IfThenElse, indent: int, table: OperatorTable,
               style: Style) -> list[str]:
    pad = " " * indent
    inner = indent + style.branch_indent
    lines = _cond_lines(node.cond, indent, table, style)
    lines.extend(render_goal_lines(node.then, inner, table, style))
    current = node
    while not current.implicit_else:
        orelse = current.orelse
        if isinstance(orelse, IfThenElse):
            cond_ls = _cond_lines(orelse.cond, indent, table, style)
            cond_ls[0] = pad + ";" + cond_ls[0][len(pad) + 1:]
            lines.extend(cond_ls)
            lines.extend(render_goal_lines(orelse.then, inner, table, style))
            current = orelse
            continue
        lines.append(pad + ";")
        lines.extend(render_goal_lines(orelse, inner, table, style))
        break
    lines.append(pad + ")")
    return lines


def _disj_lines(node: Disj, indent: int, table: OperatorTable,
                style: Style) -> list[str]:
    pad = " " * indent
    inner = indent + style.branch_indent
    branches = []
    tree: GoalTree = node
    while isinstance(tree, Disj):
        branches.append(tree.left)
        tree = tree.right
    branches.append(tree)
    lines = [pad + "("]
    for i, b in enumerate(branches):
        if i > 0:
            lines.append(pad + ";")
        lines.extend(render_goal_lines(b, inner, table, style))
    lines.append(pad + ")")
    return lines
