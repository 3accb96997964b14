"""Prolog term and clause representations with source spans.

Terms keep the offsets of the source slice they were parsed from so that
refactorings can splice replacement text back into the original file.
Synthesized terms carry no span.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

Span = tuple[int, int]

_anon_counter = itertools.count(1)


@dataclass(frozen=True)
class Var:
    """A logic variable.

    Anonymous variables (`_`) are pairwise distinct as binding sites: each
    carries a fresh uid and `key()` never matches another `_`.  Structural
    equality (`==`) compares by spelling only, so re-parsing rendered text
    yields equal terms.
    """

    name: str
    uid: int = field(default=0, compare=False)
    span: Optional[Span] = field(default=None, compare=False)

    def __post_init__(self):
        if self.name == "_" and self.uid == 0:
            object.__setattr__(self, "uid", next(_anon_counter))

    @property
    def is_anonymous(self) -> bool:
        return self.name == "_"

    def key(self):
        """Hashable identity: named vars share by name, `_` never shares."""
        return (self.name, self.uid) if self.name == "_" else self.name

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True)
class Atom:
    name: str
    span: Optional[Span] = field(default=None, compare=False)
    # Raw source slice for quoted atoms, kept so renders preserve escapes.
    raw: Optional[str] = field(default=None, compare=False)

    def __repr__(self):
        return f"Atom({self.name})"


@dataclass(frozen=True)
class Int:
    value: int
    span: Optional[Span] = field(default=None, compare=False)
    raw: Optional[str] = field(default=None, compare=False)

    def __repr__(self):
        return f"Int({self.value})"


@dataclass(frozen=True)
class Float:
    value: float
    span: Optional[Span] = field(default=None, compare=False)
    raw: Optional[str] = field(default=None, compare=False)

    def __repr__(self):
        return f"Float({self.value})"


@dataclass(frozen=True)
class Str:
    value: str
    span: Optional[Span] = field(default=None, compare=False)
    raw: Optional[str] = field(default=None, compare=False)

    def __repr__(self):
        return f"Str({self.value!r})"


@dataclass(frozen=True)
class Compound:
    name: str
    args: tuple["Term", ...]
    span: Optional[Span] = field(default=None, compare=False)
    # Span of the functor atom itself (or the operator token), for renames.
    name_span: Optional[Span] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.args:
            raise ValueError("Compound requires arity >= 1; use Atom instead")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self):
        return f"Compound({self.name}/{len(self.args)})"


Term = Union[Var, Atom, Int, Float, Str, Compound]

TRUE = Atom("true")
FAIL = Atom("fail")
NIL = Atom("[]")


def mk(name: str, *args: Term) -> Term:
    """Build an atom or compound from a functor name and args."""
    return Compound(name, tuple(args)) if args else Atom(name)


def functor_of(term: Term) -> Optional[tuple[str, int]]:
    """(name, arity) of an atom or compound; None for other node types."""
    if isinstance(term, Atom):
        return (term.name, 0)
    if isinstance(term, Compound):
        return (term.name, term.arity)
    return None


def is_callable(term: Term) -> bool:
    return isinstance(term, (Atom, Compound))


def subterms(term: Term) -> Iterator[Term]:
    """Pre-order walk over a term tree, the term itself included."""
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, Compound):
            stack.extend(reversed(t.args))


def term_vars(term: Term) -> list[Var]:
    """All variable occurrences in pre-order (duplicates included)."""
    out = []
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.append(t)
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))
    return out


def term_var_names(term: Term) -> list[str]:
    """Distinct named (non-anonymous) variables in first-occurrence order."""
    seen = []
    for v in term_vars(term):
        if not v.is_anonymous and v.name not in seen:
            seen.append(v.name)
    return seen


def substitute(term: Term, mapping: dict) -> Term:
    """Replace variables by terms; keys are Var.key() values."""
    if isinstance(term, Var):
        return mapping.get(term.key(), term)
    if isinstance(term, Compound):
        new_args = tuple(substitute(a, mapping) for a in term.args)
        if all(n is o for n, o in zip(new_args, term.args)):
            return term
        return Compound(term.name, new_args, span=term.span, name_span=term.name_span)
    return term


def rename_functor_term(term: Term, name: str, arity: int, new_name: str) -> Term:
    """Rename every occurrence of name/arity in a term tree."""
    if isinstance(term, Atom) and arity == 0 and term.name == name:
        return Atom(new_name)
    if isinstance(term, Compound):
        args = tuple(rename_functor_term(a, name, arity, new_name) for a in term.args)
        nm = new_name if (term.name == name and term.arity == arity) else term.name
        return Compound(nm, args, span=term.span, name_span=term.name_span)
    return term


def variant(a: Term, b: Term, mapping: Optional[dict] = None) -> Optional[dict]:
    """Check a and b are equal up to a consistent variable bijection.

    Returns the (extended) bijection on success, None on mismatch.
    Constants and functors must match exactly.
    """
    if mapping is None:
        mapping = {}
    inverse = {v: k for k, v in mapping.items()}

    def walk(x: Term, y: Term) -> bool:
        if isinstance(x, Var) and isinstance(y, Var):
            kx, ky = x.key(), y.key()
            if kx in mapping:
                return mapping[kx] == ky
            if ky in inverse:
                return False
            mapping[kx] = ky
            inverse[ky] = kx
            return True
        if isinstance(x, Atom) and isinstance(y, Atom):
            return x.name == y.name
        if isinstance(x, Int) and isinstance(y, Int):
            return x.value == y.value
        if isinstance(x, Float) and isinstance(y, Float):
            return x.value == y.value
        if isinstance(x, Str) and isinstance(y, Str):
            return x.value == y.value
        if isinstance(x, Compound) and isinstance(y, Compound):
            if x.name != y.name or x.arity != y.arity:
                return False
            return all(walk(xa, ya) for xa, ya in zip(x.args, y.args))
        return False

    return mapping if walk(a, b) else None


# --- Goal trees ------------------------------------------------------------

@dataclass(frozen=True)
class Conj:
    left: "GoalTree"
    right: "GoalTree"
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Disj:
    left: "GoalTree"
    right: "GoalTree"
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class IfThenElse:
    cond: "GoalTree"
    then: "GoalTree"
    orelse: "GoalTree"
    # True when the source had a bare (C -> T) with no else branch.
    implicit_else: bool = field(default=False, compare=False)
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Naf:
    inner: "GoalTree"
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Cut:
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Goal:
    term: Term
    span: Optional[Span] = field(default=None, compare=False)


GoalTree = Union[Conj, Disj, IfThenElse, Naf, Cut, Goal]


def goal_tree(term: Term) -> GoalTree:
    """Interpret a body term as a control tree.

    `(C -> T ; E)` becomes IfThenElse, never a Disj over an `->` goal;
    a bare `(C -> T)` gets an implicit `fail` else branch.
    """
    if isinstance(term, Compound) and term.arity == 2:
        if term.name == ",":
            return Conj(goal_tree(term.args[0]), goal_tree(term.args[1]),
                        span=term.span)
        if term.name == ";":
            left = term.args[0]
            if isinstance(left, Compound) and left.name == "->" and left.arity == 2:
                return IfThenElse(goal_tree(left.args[0]), goal_tree(left.args[1]),
                                  goal_tree(term.args[1]), span=term.span)
            return Disj(goal_tree(term.args[0]), goal_tree(term.args[1]),
                        span=term.span)
        if term.name == "->":
            return IfThenElse(goal_tree(term.args[0]), goal_tree(term.args[1]),
                              Goal(FAIL), implicit_else=True, span=term.span)
    if isinstance(term, Compound) and term.arity == 1 and term.name == "\\+":
        return Naf(goal_tree(term.args[0]), span=term.span)
    if isinstance(term, Atom) and term.name == "!":
        return Cut(span=term.span)
    return Goal(term, span=term.span)


def goal_term(tree: GoalTree) -> Term:
    """Inverse of goal_tree; rebuilds a plain body term."""
    if isinstance(tree, Conj):
        return Compound(",", (goal_term(tree.left), goal_term(tree.right)),
                        span=tree.span)
    if isinstance(tree, Disj):
        return Compound(";", (goal_term(tree.left), goal_term(tree.right)),
                        span=tree.span)
    if isinstance(tree, IfThenElse):
        ite = Compound("->", (goal_term(tree.cond), goal_term(tree.then)))
        if tree.implicit_else:
            return Compound("->", (goal_term(tree.cond), goal_term(tree.then)),
                            span=tree.span)
        return Compound(";", (ite, goal_term(tree.orelse)), span=tree.span)
    if isinstance(tree, Naf):
        return Compound("\\+", (goal_term(tree.inner),), span=tree.span)
    if isinstance(tree, Cut):
        return Atom("!", span=tree.span)
    return tree.term


def conjunction_list(tree: GoalTree) -> list[GoalTree]:
    """Flatten nested Conj nodes into an ordered goal list."""
    if isinstance(tree, Conj):
        return conjunction_list(tree.left) + conjunction_list(tree.right)
    return [tree]


def conjoin(goals: list[GoalTree]) -> GoalTree:
    """Right-nested conjunction of goals; `true` for the empty list."""
    if not goals:
        return Goal(TRUE)
    tree = goals[-1]
    for g in reversed(goals[:-1]):
        tree = Conj(g, tree)
    return tree


def walk_goals(tree: GoalTree) -> Iterator[GoalTree]:
    """All nodes of a goal tree, pre-order."""
    yield tree
    if isinstance(tree, Conj) or isinstance(tree, Disj):
        yield from walk_goals(tree.left)
        yield from walk_goals(tree.right)
    elif isinstance(tree, IfThenElse):
        yield from walk_goals(tree.cond)
        yield from walk_goals(tree.then)
        yield from walk_goals(tree.orelse)
    elif isinstance(tree, Naf):
        yield from walk_goals(tree.inner)


def leaf_goals(tree: GoalTree) -> Iterator[Goal]:
    """Only the Goal leaves (calls), skipping cuts and control nodes."""
    for node in walk_goals(tree):
        if isinstance(node, Goal):
            yield node


def goal_count(tree: GoalTree) -> int:
    """Number of executable leaves (goals and cuts) in a branch."""
    return sum(1 for n in walk_goals(tree) if isinstance(n, (Goal, Cut)))


def map_goal_terms(tree: GoalTree, fn) -> GoalTree:
    """Rebuild a goal tree applying fn to every leaf Goal term."""
    if isinstance(tree, Conj):
        return Conj(map_goal_terms(tree.left, fn), map_goal_terms(tree.right, fn))
    if isinstance(tree, Disj):
        return Disj(map_goal_terms(tree.left, fn), map_goal_terms(tree.right, fn))
    if isinstance(tree, IfThenElse):
        return IfThenElse(map_goal_terms(tree.cond, fn),
                          map_goal_terms(tree.then, fn),
                          map_goal_terms(tree.orelse, fn),
                          implicit_else=tree.implicit_else)
    if isinstance(tree, Naf):
        return Naf(map_goal_terms(tree.inner, fn))
    if isinstance(tree, Cut):
        return tree
    return Goal(fn(tree.term))


# --- Clauses and files ------------------------------------------------------

@dataclass(frozen=True)
class Clause:
    head: Term
    body: GoalTree
    span: Optional[Span] = field(default=None, compare=False)
    head_span: Optional[Span] = field(default=None, compare=False)
    body_span: Optional[Span] = field(default=None, compare=False)

    @property
    def is_fact(self) -> bool:
        return self.body_span is None and self.body == Goal(TRUE)

    def vars(self) -> list[Var]:
        return term_vars(self.head) + term_vars(goal_term(self.body))


@dataclass(frozen=True)
class Directive:
    term: Term
    span: Span


@dataclass(frozen=True)
class ClauseItem:
    clause: Clause

    @property
    def span(self) -> Span:
        return self.clause.span


Item = Union[Directive, ClauseItem]


@dataclass(frozen=True)
class Comment:
    span: Span
    text: str


@dataclass
class ParsedFile:
    path: str
    text: str
    items: list[Item]
    comments: list[Comment]


def clause_variant(a: Clause, b: Clause, mapping: Optional[dict] = None) -> Optional[dict]:
    """Clause-level variant check: head and body, one consistent renaming."""
    m = variant(a.head, b.head, mapping)
    if m is None:
        return None
    return variant(goal_term(a.body), goal_term(b.body), m)
