"""Reference SLD interpreter for a Prolog subset.

Used as the semantics-preservation oracle for refactorings: leftmost
selection, textual clause order, depth-first search with chronological
backtracking, ISO if-then-else commit, and cut local to the defining
predicate.  Deliberately slow and simple.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import PrologRuntimeError, UnsupportedBuiltin
from .model import PredId, Program, Resolution, resolve
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
    Var,
    goal_term,
    goal_tree,
    term_var_names,
    term_vars,
)

SUPPORTED_BUILTINS = {
    ("true", 0), ("fail", 0), ("false", 0),
    ("=", 2), ("==", 2), ("\\==", 2),
    ("=:=", 2), ("=\\=", 2), ("<", 2), (">", 2), ("=<", 2), (">=", 2),
    ("is", 2), ("var", 1), ("nonvar", 1), ("atom", 1), ("number", 1),
    ("call", 1),
}

DEFAULT_MAX_STEPS = 100_000
DEFAULT_MAX_ANSWERS = 32

# Resolution depth is bounded separately from the step budget: each level
# costs a handful of Python generator frames, and ~12k nested frames is
# what an 8 MB C stack tolerates.  Exceeding the cap is truncation, the
# same terminal as running out of steps.
MAX_DEPTH = 1800
_RECURSION_LIMIT = 14_000


@dataclass(frozen=True)
class Query:
    goal: Term
    module: str = "user"
    var_names: Optional[tuple[str, ...]] = None

    def names(self) -> tuple[str, ...]:
        if self.var_names is not None:
            return self.var_names
        return tuple(term_var_names(self.goal))


@dataclass(frozen=True)
class Limits:
    max_steps: int = DEFAULT_MAX_STEPS
    max_answers: int = DEFAULT_MAX_ANSWERS


@dataclass
class Outcome:
    answers: list[dict[str, Term]]
    terminal: str                    # exhausted | depth_limited | error
    error_kind: Optional[str] = None

    def __repr__(self):
        return f"Outcome({len(self.answers)} answers, {self.terminal}" + (
            f"({self.error_kind})" if self.error_kind else "") + ")"


StubTable = dict[tuple[str, int], list[tuple[Term, ...]]]


class _StepLimit(Exception):
    pass


class _CutFlag:
    __slots__ = ("cut",)

    def __init__(self):
        self.cut = False


class _Solver:
    def __init__(self, program: Program, limits: Limits,
                 stubs: Optional[StubTable] = None):
        self.program = program
        self.limits = limits
        self.stubs = stubs or {}
        self.bindings: dict = {}
        self.trail: list = []
        self.steps = limits.max_steps
        self.max_depth = MAX_DEPTH
        self.fresh = itertools.count(1)

    # -- substitution machinery ----------------------------------------------

    def walk(self, term: Term) -> Term:
        while isinstance(term, Var):
            bound = self.bindings.get(term.key())
            if bound is None:
                return term
            term = bound
        return term

    def bind(self, var: Var, value: Term):
        self.bindings[var.key()] = value
        self.trail.append(var.key())

    def undo(self, mark: int):
        while len(self.trail) > mark:
            del self.bindings[self.trail.pop()]

    def unify(self, a: Term, b: Term) -> bool:
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x, y = self.walk(x), self.walk(y)
            if isinstance(x, Var):
                if isinstance(y, Var) and y.key() == x.key():
                    continue
                self.bind(x, y)
                continue
            if isinstance(y, Var):
                self.bind(y, x)
                continue
            if isinstance(x, Atom) and isinstance(y, Atom):
                if x.name != y.name:
                    return False
                continue
            if isinstance(x, Int) and isinstance(y, Int):
                if x.value != y.value:
                    return False
                continue
            if isinstance(x, Float) and isinstance(y, Float):
                if x.value != y.value:
                    return False
                continue
            if isinstance(x, Str) and isinstance(y, Str):
                if x.value != y.value:
                    return False
                continue
            if isinstance(x, Compound) and isinstance(y, Compound):
                if x.name != y.name or x.arity != y.arity:
                    return False
                stack.extend(zip(x.args, y.args))
                continue
            return False
        return True

    def rename_clause(self, clause: Clause) -> tuple[Term, GoalTree]:
        mapping: dict = {}
        body_term = goal_term(clause.body)
        for v in term_vars(clause.head) + term_vars(body_term):
            if v.key() not in mapping:
                mapping[v.key()] = Var(f"_G{next(self.fresh)}")
        head = _apply_renaming(clause.head, mapping)
        body = _apply_renaming(body_term, mapping)
        return head, goal_tree(body)

    def tick(self):
        self.steps -= 1
        if self.steps <= 0:
            raise _StepLimit()

    # -- resolution -----------------------------------------------------------

    def solve(self, tree: GoalTree, module: str, cf: _CutFlag,
              depth: int = 0) -> Iterator[None]:
        if isinstance(tree, Conj):
            for _ in self.solve(tree.left, module, cf, depth):
                yield from self.solve(tree.right, module, cf, depth)
                if cf.cut:
                    return
            return
        if isinstance(tree, Disj):
            mark = len(self.trail)
            yield from self.solve(tree.left, module, cf, depth)
            self.undo(mark)
            if cf.cut:
                return
            yield from self.solve(tree.right, module, cf, depth)
            return
        if isinstance(tree, IfThenElse):
            mark = len(self.trail)
            committed = False
            for _ in self.solve(tree.cond, module, _CutFlag(), depth):
                committed = True
                break
            if committed:
                yield from self.solve(tree.then, module, cf, depth)
                self.undo(mark)
            else:
                self.undo(mark)
                yield from self.solve(tree.orelse, module, cf, depth)
            return
        if isinstance(tree, Naf):
            mark = len(self.trail)
            succeeded = False
            for _ in self.solve(tree.inner, module, _CutFlag(), depth):
                succeeded = True
                break
            self.undo(mark)
            if not succeeded:
                yield None
            return
        if isinstance(tree, Cut):
            yield None
            cf.cut = True
            return
        assert isinstance(tree, Goal)
        yield from self.solve_goal(tree.term, module, cf, depth)

    def solve_goal(self, term: Term, module: str, cf: _CutFlag,
                   depth: int = 0) -> Iterator[None]:
        term = self.walk(term)
        if isinstance(term, Var):
            raise PrologRuntimeError("instantiation_error", "call through variable")
        if not isinstance(term, (Atom, Compound)):
            raise PrologRuntimeError("type_error", "callable expected")
        name = term.name
        arity = term.arity if isinstance(term, Compound) else 0

        if (name, arity) == (":", 2):
            qual, inner = term.args
            qual = self.walk(qual)
            if not isinstance(qual, Atom):
                raise PrologRuntimeError("instantiation_error", "module prefix")
            yield from self.solve_goal(inner, qual.name, cf, depth)
            return

        if (name, arity) in (( ",", 2), (";", 2), ("->", 2), ("\\+", 1), ("!", 0)):
            yield from self.solve(goal_tree(term), module, cf, depth)
            return

        res = resolve(self.program, module, term)
        if res.is_pred:
            yield from self.call_pred(res.pred, term, depth)
            return

        if (name, arity) in self.stubs:
            yield from self.call_stub((name, arity), term)
            return

        if (name, arity) in SUPPORTED_BUILTINS:
            yield from self.call_builtin(name, arity, term, module, depth)
            return

        raise UnsupportedBuiltin(f"{name}/{arity}")

    def call_pred(self, pid: PredId, goal: Term, depth: int) -> Iterator[None]:
        if depth >= self.max_depth:
            raise _StepLimit()
        pdef = self.program.predicates[pid]
        cf = _CutFlag()
        args = goal.args if isinstance(goal, Compound) else ()
        for clause in pdef.clauses:
            self.tick()
            mark = len(self.trail)
            head, body = self.rename_clause(clause)
            head_args = head.args if isinstance(head, Compound) else ()
            if self.unify(_tuple_term(args), _tuple_term(head_args)):
                yield from self.solve(body, pid.module, cf, depth + 1)
            self.undo(mark)
            if cf.cut:
                return

    def call_stub(self, key: tuple[str, int], goal: Term) -> Iterator[None]:
        rows = self.stubs[key]
        args = goal.args if isinstance(goal, Compound) else ()
        for row in rows:
            self.tick()
            mark = len(self.trail)
            renamed = self._rename_row(row)
            if self.unify(_tuple_term(args), _tuple_term(renamed)):
                yield None
            self.undo(mark)

    def _rename_row(self, row: tuple[Term, ...]) -> tuple[Term, ...]:
        mapping: dict = {}
        for t in row:
            for v in term_vars(t):
                if v.key() not in mapping:
                    mapping[v.key()] = Var(f"_G{next(self.fresh)}")
        return tuple(_apply_renaming(t, mapping) for t in row)

    # -- builtins --------------------------------------------------------------

    def call_builtin(self, name: str, arity: int, term: Term,
                     module: str, depth: int = 0) -> Iterator[None]:
        self.tick()
        args = term.args if isinstance(term, Compound) else ()

        if (name, arity) in (("true", 0),):
            yield None
        elif (name, arity) in (("fail", 0), ("false", 0)):
            return
        elif (name, arity) == ("=", 2):
            mark = len(self.trail)
            if self.unify(args[0], args[1]):
                yield None
            self.undo(mark)
        elif (name, arity) == ("==", 2):
            if self.struct_equal(args[0], args[1]):
                yield None
        elif (name, arity) == ("\\==", 2):
            if not self.struct_equal(args[0], args[1]):
                yield None
        elif (name, arity) == ("is", 2):
            value = self.eval_arith(args[1])
            mark = len(self.trail)
            lit: Term = Int(value) if isinstance(value, int) else Float(value)
            if self.unify(args[0], lit):
                yield None
            self.undo(mark)
        elif name in ("=:=", "=\\=", "<", ">", "=<", ">=") and arity == 2:
            lhs = self.eval_arith(args[0])
            rhs = self.eval_arith(args[1])
            ok = {
                "=:=": lhs == rhs, "=\\=": lhs != rhs,
                "<": lhs < rhs, ">": lhs > rhs,
                "=<": lhs <= rhs, ">=": lhs >= rhs,
            }[name]
            if ok:
                yield None
        elif (name, arity) == ("var", 1):
            if isinstance(self.walk(args[0]), Var):
                yield None
        elif (name, arity) == ("nonvar", 1):
            if not isinstance(self.walk(args[0]), Var):
                yield None
        elif (name, arity) == ("atom", 1):
            if isinstance(self.walk(args[0]), Atom):
                yield None
        elif (name, arity) == ("number", 1):
            if isinstance(self.walk(args[0]), (Int, Float)):
                yield None
        elif (name, arity) == ("call", 1):
            yield from self.solve_goal(args[0], module, _CutFlag(), depth)
        else:  # pragma: no cover - guarded by SUPPORTED_BUILTINS
            raise UnsupportedBuiltin(f"{name}/{arity}")

    def struct_equal(self, a: Term, b: Term) -> bool:
        seen: set[tuple[int, int]] = set()
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x, y = self.walk(x), self.walk(y)
            pair = (id(x), id(y))
            if pair in seen:
                continue
            seen.add(pair)
            if isinstance(x, Var) or isinstance(y, Var):
                if not (isinstance(x, Var) and isinstance(y, Var)
                        and x.key() == y.key()):
                    return False
                continue
            if type(x) is not type(y):
                return False
            if isinstance(x, Atom):
                if x.name != y.name:
                    return False
            elif isinstance(x, (Int, Float, Str)):
                if x.value != y.value:
                    return False
            elif isinstance(x, Compound):
                if x.name != y.name or x.arity != y.arity:
                    return False
                stack.extend(zip(x.args, y.args))
        return True

    def eval_arith(self, term: Term):
        term = self.walk(term)
        if isinstance(term, Int):
            return term.value
        if isinstance(term, Float):
            return term.value
        if isinstance(term, Var):
            raise PrologRuntimeError("instantiation_error", "unbound in arithmetic")
        if isinstance(term, Compound):
            if term.arity == 2 and term.name in ("+", "-", "*", "//", "mod"):
                lhs = self.eval_arith(term.args[0])
                rhs = self.eval_arith(term.args[1])
                if term.name == "+":
                    return lhs + rhs
                if term.name == "-":
                    return lhs - rhs
                if term.name == "*":
                    return lhs * rhs
                if not (isinstance(lhs, int) and isinstance(rhs, int)):
                    raise PrologRuntimeError("type_error", "integer expected")
                if rhs == 0:
                    raise PrologRuntimeError("evaluation_error", "zero_divisor")
                if term.name == "//":
                    q = abs(lhs) // abs(rhs)
                    return q if (lhs >= 0) == (rhs >= 0) else -q
                return lhs - rhs * (lhs // rhs)  # mod follows sign of divisor
            if term.arity == 1 and term.name == "-":
                return -self.eval_arith(term.args[0])
            if term.arity == 1 and term.name == "+":
                return self.eval_arith(term.args[0])
        raise PrologRuntimeError("type_error", "arithmetic expression expected")

    # -- answers ----------------------------------------------------------------

    def reify(self, term: Term) -> Term:
        return self._reify(term, set())

    def _reify(self, term: Term, on_path: set) -> Term:
        term = self.walk(term)
        if isinstance(term, Var):
            return term
        if isinstance(term, Compound):
            if id(term) in on_path:
                raise PrologRuntimeError("cyclic_term")
            on_path = on_path | {id(term)}
            return Compound(term.name, tuple(self._reify(a, on_path)
                                             for a in term.args))
        return term


def _tuple_term(args) -> Term:
    """Pack an argument vector for one-shot unification."""
    if not args:
        return Atom("()")
    return Compound("args", tuple(args))


def _apply_renaming(term: Term, mapping: dict) -> Term:
    if isinstance(term, Var):
        return mapping.get(term.key(), term)
    if isinstance(term, Compound):
        return Compound(term.name, tuple(_apply_renaming(a, mapping)
                                         for a in term.args))
    return term


def solve(program: Program, query: Query | Term | str,
          limits: Optional[Limits] = None,
          stubs: Optional[StubTable] = None) -> Outcome:
    """Run a query; answers are substitutions over its named variables."""
    if isinstance(query, str):
        from .parser import parse_term
        query = Query(parse_term(query))
    elif not isinstance(query, Query):
        query = Query(query)
    limits = limits or Limits()

    solver = _Solver(program, limits, stubs)
    names = query.names()
    name_vars = {n: Var(n) for n in names}
    answers: list[dict[str, Term]] = []
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, _RECURSION_LIMIT))
    try:
        for _ in solver.solve(goal_tree(query.goal), query.module, _CutFlag()):
            answers.append({n: solver.reify(v) for n, v in name_vars.items()})
            if len(answers) >= limits.max_answers:
                return Outcome(answers, "depth_limited")
    except (_StepLimit, RecursionError):
        return Outcome(answers, "depth_limited")
    except (PrologRuntimeError, UnsupportedBuiltin) as exc:
        kind = exc.kind if isinstance(exc, PrologRuntimeError) else "unsupported_builtin"
        return Outcome(answers, "error", error_kind=kind)
    finally:
        sys.setrecursionlimit(old_limit)
    return Outcome(answers, "exhausted")


@dataclass
class QueryVerdict:
    query: str
    status: str      # equal | equal-within-limit | different
    detail: str = ""

    @property
    def equal(self) -> bool:
        return self.status in ("equal", "equal-within-limit")


def _answers_match(a: list[dict[str, Term]], b: list[dict[str, Term]]) -> bool:
    from .terms import variant

    if len(a) != len(b):
        return False
    for ans_a, ans_b in zip(a, b):
        if sorted(ans_a) != sorted(ans_b):
            return False
        names = sorted(ans_a)
        packed_a = Compound("a", tuple(ans_a[n] for n in names)) if names else Atom("a")
        packed_b = Compound("a", tuple(ans_b[n] for n in names)) if names else Atom("a")
        if variant(packed_a, packed_b) is None:
            return False
    return True


def equivalent(prog_a: Program, prog_b: Program,
               queries: list[Query | str],
               limits: Optional[Limits] = None,
               stubs: Optional[StubTable] = None) -> list[QueryVerdict]:
    """Compare answer sequences of two programs query by query."""
    from .parser import parse_term
    from .render import render_term

    limits = limits or Limits()
    verdicts = []
    for q in queries:
        if isinstance(q, str):
            query = Query(parse_term(q))
            label = q
        else:
            query = q
            label = render_term(q.goal)
        out_a = solve(prog_a, query, limits, stubs)
        out_b = solve(prog_b, query, limits, stubs)
        same_answers = _answers_match(out_a.answers, out_b.answers)
        if out_a.terminal == out_b.terminal and same_answers \
                and out_a.error_kind == out_b.error_kind:
            status = "equal-within-limit" if out_a.terminal == "depth_limited" \
                else "equal"
            verdicts.append(QueryVerdict(label, status))
        else:
            verdicts.append(QueryVerdict(
                label, "different",
                detail=f"{out_a!r} vs {out_b!r}"))
    return verdicts


def parse_query_battery(text: str) -> list[Query]:
    """Query battery files: one `?- Goal.` per line."""
    from .parser import parse_term

    queries = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        term = parse_term(line)
        if isinstance(term, Compound) and term.name == "?-" and term.arity == 1:
            term = term.args[0]
        queries.append(Query(term))
    return queries
