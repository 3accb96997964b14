"""Clause-scope transforms: cut elimination, if-then-else inversion,
unification weakening, and moving output bindings after the commit."""

from __future__ import annotations

from typing import Optional

from .. import builtins
from ..editset import CHANGING, CONDITIONAL, Edit, EditSet, PRESERVING
from ..errors import (
    MultipleCuts,
    NoCutInClause,
    NotAnIte,
    NotApplicable,
    NotAUnification,
)
from ..model import PredId, Program
from ..render import render_clause
from ..terms import (
    Atom,
    Clause,
    Compound,
    Conj,
    Cut,
    Disj,
    Goal,
    GoalTree,
    IfThenElse,
    Naf,
    Span,
    Term,
    Var,
    conjoin,
    conjunction_list,
    goal_term,
    leaf_goals,
    map_goal_terms,
    substitute,
    term_vars,
    walk_goals,
)
from .base import (
    call_sites,
    clause_var_names,
    deletion_span,
    find_pred,
    first_occurrence_positions,
    head_args,
    new_editset,
    synthesize_head_names,
)

TRUE_GOAL = Goal(Atom("true"))


def _count_cuts(tree: GoalTree) -> int:
    return sum(1 for n in walk_goals(tree) if isinstance(n, Cut))


def _split_at_cut(body: GoalTree) -> Optional[tuple[list[GoalTree], list[GoalTree]]]:
    goals = conjunction_list(body)
    for i, g in enumerate(goals):
        if isinstance(g, Cut):
            return goals[:i], goals[i + 1:]
    return None


def _branch(clause: Clause, names: list[str], goals: list[GoalTree]) \
        -> tuple[list[GoalTree], list[GoalTree]]:
    """Unifications `Vi = t_i` plus the renamed goals for one clause.

    First-occurrence head variables are renamed to the fresh head variable;
    non-variable or repeated arguments become explicit unifications.
    Anonymous `_` arguments contribute nothing.
    """
    renaming: dict = {}
    unifications: list[GoalTree] = []
    firsts = first_occurrence_positions(clause.head)
    for i, (arg, name) in enumerate(zip(head_args(clause), names), start=1):
        fresh = Var(name)
        if isinstance(arg, Var) and arg.is_anonymous:
            continue
        if isinstance(arg, Var) and firsts.get(arg.key()) == i:
            renaming[arg.key()] = fresh
            continue
        unifications.append((i, fresh, arg))

    def rename(term: Term) -> Term:
        return substitute(term, renaming)

    unif_goals = [Goal(Compound("=", (fresh, rename(arg))))
                  for _, fresh, arg in unifications]
    body_goals = [map_goal_terms(g, rename) for g in goals]
    return unif_goals, body_goals


def replace_cut_by_ite(program: Program, pred: PredId) -> EditSet:
    """Fold a 2-clause neck-cut predicate into one if-then-else clause."""
    if pred not in program.predicates:
        pred = find_pred(program, None, pred.name, pred.arity)
    pdef = program.predicates[pred]
    clauses = pdef.clauses
    if len(clauses) != 2:
        raise NotApplicable(
            f"{pred} has {len(clauses)} clauses; the rewrite needs exactly 2")
    first, second = clauses
    split = _split_at_cut(first.body)
    if split is None:
        raise NotApplicable(f"first clause of {pred} has no top-level cut")
    if _count_cuts(first.body) != 1:
        raise MultipleCuts(f"first clause of {pred} has more than one cut")
    if _count_cuts(second.body) != 0:
        raise NotApplicable(f"second clause of {pred} is not cut-free")
    guard, committed = split

    names = synthesize_head_names(program, pred, clauses)
    unif1, guard_renamed = _branch(first, names, guard)
    _, committed_renamed = _branch(first, names, committed)
    unif2, body2_renamed = _branch(second, names, conjunction_list(second.body))

    cond = conjoin(unif1 + guard_renamed)
    then = conjoin([g for g in committed_renamed if g != TRUE_GOAL]) \
        if committed_renamed else TRUE_GOAL
    else_goals = unif2 + [g for g in body2_renamed if g != TRUE_GOAL]
    orelse = conjoin(else_goals) if else_goals else TRUE_GOAL

    if pred.arity:
        head: Term = Compound(pred.name, tuple(Var(n) for n in names))
    else:
        head = Atom(pred.name)
    new_clause = Clause(head, IfThenElse(cond, then, orelse),
                        body_span=(0, 0))
    text = render_clause(new_clause, program.optable)

    editset = new_editset(program)
    file = pdef.file
    file_text = program.files[file].text
    gap = file_text[first.span[1]:second.span[0]]
    if gap.strip() == "":
        editset.edits.append(Edit(file, first.span[0], second.span[1], text,
                                  note=f"replace cut in {pred} by if-then-else"))
    else:
        editset.edits.append(Edit(file, first.span[0], first.span[1], text,
                                  note=f"replace cut in {pred} by if-then-else"))
        start, end = deletion_span(file_text, second.span)
        editset.edits.append(Edit(file, start, end, "",
                                  note=f"fold second clause of {pred}"))
    return editset


# --- invert if-then-else -----------------------------------------------------

def _binding_free(tree: GoalTree) -> bool:
    for node in walk_goals(tree):
        if isinstance(node, Cut):
            return False
        if isinstance(node, Goal):
            term = node.term
            if isinstance(term, Atom):
                key = (term.name, 0)
            elif isinstance(term, Compound):
                key = (term.name, term.arity)
            else:
                return False
            if key not in builtins.BINDING_FREE:
                return False
    return True


def _negate(cond: GoalTree) -> GoalTree:
    if isinstance(cond, Naf):
        if _binding_free(cond.inner):
            return cond.inner
        return Naf(cond)
    if isinstance(cond, Goal):
        term = cond.term
        if isinstance(term, Atom) and term.name in builtins.NEGATIONS:
            return Goal(Atom(builtins.NEGATIONS[term.name]))
        if isinstance(term, Compound) and term.arity in (1, 2) \
                and term.name in builtins.NEGATIONS \
                and builtins.is_builtin(term.name, term.arity):
            return Goal(Compound(builtins.NEGATIONS[term.name], term.args))
    return Naf(cond)


def _find_ite(program: Program, file: str, span: Span) \
        -> Optional[tuple[PredId, Clause, IfThenElse]]:
    for pid, _, clause in program.iter_clauses():
        if program.predicates[pid].file != file:
            continue
        for node in walk_goals(clause.body):
            if isinstance(node, IfThenElse) and node.span == span:
                return pid, clause, node
    return None


def invert_ite(program: Program, file: str, span: Span) -> EditSet:
    """Swap branches: (P -> Q ; R) becomes (\\+ P -> R ; P, Q), with the
    negation specialized for test builtins and P dropped from the else
    branch when it cannot bind."""
    found = _find_ite(program, file, span)
    if found is None:
        raise NotAnIte(f"no if-then-else at {file}:{span[0]}..{span[1]}")
    pid, clause, ite = found

    test_only = _binding_free(ite.cond)
    negated = _negate(ite.cond)
    if test_only:
        orelse: GoalTree = ite.then
        flag = PRESERVING
        annotations = []
    else:
        orelse = Conj(ite.cond, ite.then)
        flag = CONDITIONAL
        annotations = [
            "the condition may bind variables: it is re-run in the else "
            "branch, so backtracking into it may differ from the committed "
            "original"]

    replacement = IfThenElse(negated, ite.orelse, orelse)
    new_body = _swap_node(clause.body, ite, replacement)
    new_clause = Clause(clause.head, new_body, body_span=(0, 0))
    editset = new_editset(program, semantics_flag=flag)
    editset.annotations.extend(annotations)
    editset.edits.append(Edit(file, clause.span[0], clause.span[1],
                              render_clause(new_clause, program.optable),
                              note=f"invert if-then-else in {pid}"))
    return editset


def _swap_node(tree: GoalTree, old: GoalTree, new: GoalTree) -> GoalTree:
    if tree is old:
        return new
    if isinstance(tree, Conj):
        return Conj(_swap_node(tree.left, old, new),
                    _swap_node(tree.right, old, new))
    if isinstance(tree, Disj):
        return Disj(_swap_node(tree.left, old, new),
                    _swap_node(tree.right, old, new))
    if isinstance(tree, IfThenElse):
        return IfThenElse(_swap_node(tree.cond, old, new),
                          _swap_node(tree.then, old, new),
                          _swap_node(tree.orelse, old, new),
                          implicit_else=tree.implicit_else)
    if isinstance(tree, Naf):
        return Naf(_swap_node(tree.inner, old, new))
    return tree


# --- unification to test -------------------------------------------------------

def unification_to_test(program: Program, file: str, span: Span,
                        test: str = "==") -> EditSet:
    """Replace `L = R` by `L == R` or `L =:= R`; narrows the mode on purpose."""
    if test not in ("==", "=:="):
        raise NotAUnification(f"replacement test must be == or =:=, got {test}")
    target = None
    for pid, _, clause in program.iter_clauses():
        if program.predicates[pid].file != file:
            continue
        for goal in leaf_goals(clause.body):
            term = goal.term
            if term.span is not None and tuple(term.span) == tuple(span):
                target = (pid, term)
                break
    if target is None:
        raise NotAUnification(f"no goal at {file}:{span[0]}..{span[1]}")
    pid, term = target
    if not (isinstance(term, Compound) and term.name == "="
            and term.arity == 2):
        raise NotAUnification(f"goal at {file}:{span[0]} is not a unification")

    editset = new_editset(program, semantics_flag=CHANGING)
    editset.annotations.append(
        "a test only succeeds for the intended instantiation, where `=` "
        "would bind; steadfast callers are unaffected, others now fail or "
        "raise")
    editset.edits.append(Edit(file, term.name_span[0], term.name_span[1], test,
                              note=f"weaken unification to {test} in {pid}"))
    return editset


# --- produce output after commit ------------------------------------------------

def output_after_commit(program: Program, pred: PredId,
                        positions: list[int]) -> EditSet:
    """Move head bindings at the given positions to after the first cut."""
    if pred not in program.predicates:
        pred = find_pred(program, None, pred.name, pred.arity)
    pdef = program.predicates[pred]
    bad = [i for i in positions if not 1 <= i <= pred.arity]
    if bad:
        raise NotApplicable(f"positions {bad} out of range for {pred}")
    cut_clauses = [c for c in pdef.clauses
                   if _split_at_cut(c.body) is not None]
    if not cut_clauses:
        raise NoCutInClause(f"no clause of {pred} contains a cut")

    editset = new_editset(program)
    for clause in cut_clauses:
        edit = _push_outputs(program, pred, pdef.clauses, clause,
                             sorted(positions))
        if edit is not None:
            editset.edits.append(edit)
    return editset


def _push_outputs(program: Program, pred: PredId, all_clauses: list[Clause],
                  clause: Clause, positions: list[int]) -> Optional[Edit]:
    args = list(head_args(clause))
    firsts = first_occurrence_positions(clause.head)
    taken = clause_var_names(clause)
    fallback_names = synthesize_head_names(program, pred, all_clauses)

    new_unifications: list[GoalTree] = []
    for i in positions:
        arg = args[i - 1]
        if isinstance(arg, Var) and (arg.is_anonymous
                                     or firsts.get(arg.key()) == i):
            continue  # already a fresh output variable
        name = fallback_names[i - 1]
        counter = 0
        while name in taken:
            counter += 1
            name = f"{fallback_names[i - 1]}{counter}"
        taken.add(name)
        fresh = Var(name)
        args[i - 1] = fresh
        new_unifications.append(Goal(Compound("=", (fresh, arg))))

    if not new_unifications:
        return None

    before, after = _split_at_cut(clause.body)
    new_body = conjoin(before + [Cut()] + new_unifications
                       + [g for g in after if g != TRUE_GOAL])
    new_head: Term = Compound(pred.name, tuple(args)) if args else clause.head
    new_clause = Clause(new_head, new_body, body_span=(0, 0))
    file = program.predicates[pred].file
    return Edit(file, clause.span[0], clause.span[1],
                render_clause(new_clause, program.optable),
                note=f"produce output after commit in {pred}")
