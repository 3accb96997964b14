"""Predicate-interface transforms: drop, thread, and reorder arguments."""

from __future__ import annotations

from typing import Optional

from ..analysis import ArgPos, far
from ..editset import Edit, EditSet
from ..errors import (
    ArityCollision,
    NoPath,
    NotAPermutation,
    NotApplicable,
    NotErasable,
    VariableNotFound,
)
from ..model import Indicator, PredId, Program
from ..pdg import build_pdg
from ..render import render_term
from ..terms import (
    Atom,
    Compound,
    Goal,
    Int,
    Term,
    Var,
    leaf_goals,
    term_vars,
)
from .base import (
    call_sites,
    clause_var_names,
    find_pred,
    indicator_of_term,
    list_elements,
    module_directive,
    new_editset,
)


def _rewrite_indicator_arity(program: Program, pred: PredId,
                             new_arity: int, editset: EditSet):
    """Patch `name/arity` mentions in export and import lists."""
    targets: list[tuple[str, Term]] = []
    moddef = program.modules[pred.module]
    if moddef.directive_index is not None:
        path, item = module_directive(program, pred.module)
        targets.extend((path, t) for t in list_elements(item.term.args[1]))
    for modname in program.module_order:
        for entry in program.modules[modname].imports:
            if entry.source != pred.module or entry.indicators is None:
                continue
            item = program.files[entry.file].items[entry.item_index]
            targets.extend((entry.file, t)
                           for t in list_elements(item.term.args[1]))
    for file, term in targets:
        if indicator_of_term(term) == pred.indicator:
            arity_term = term.args[1]
            editset.edits.append(Edit(
                file, arity_term.span[0], arity_term.span[1], str(new_arity),
                note=f"arity of {pred.name} is now {new_arity}"))


def _replace_call(program: Program, file: str, goal_term: Term,
                  new_inner: Term, editset: EditSet, note: str):
    """Replace a call term, preserving an `M:` qualification prefix."""
    if isinstance(goal_term, Compound) and goal_term.name == ":" \
            and goal_term.arity == 2:
        inner_span = goal_term.args[1].span
        editset.edits.append(Edit(
            file, inner_span[0], inner_span[1],
            render_term(new_inner, program.optable, maxprec=199), note=note))
    else:
        editset.edits.append(Edit(
            file, goal_term.span[0], goal_term.span[1],
            render_term(new_inner, program.optable, maxprec=999), note=note))


def remove_arguments(program: Program, positions: set[ArgPos],
                     override: bool = False) -> EditSet:
    """Drop erasable argument positions from heads, calls, and indicators."""
    editset = new_editset(program)
    if not positions:
        return editset
    if not override:
        allowed = far(program)
        refused = sorted(p for p in positions if p not in allowed)
        if refused:
            raise NotErasable(
                f"{', '.join(str(p) for p in refused)} not marked erasable; "
                f"pass override to drop anyway")

    drops: dict[PredId, list[int]] = {}
    for pos in positions:
        if pos.pred not in program.predicates:
            raise NotApplicable(f"{pos.pred} is not defined")
        drops.setdefault(pos.pred, []).append(pos.index)

    new_indicators: set[tuple[str, Indicator]] = set()
    for pred, indexes in drops.items():
        new_arity = pred.arity - len(set(indexes))
        target = (pred.module, (pred.name, new_arity))
        if program.defined(pred.module, pred.name, new_arity):
            raise ArityCollision(
                f"{pred.module}:{pred.name}/{new_arity} already exists")
        if target in new_indicators:
            raise ArityCollision(
                f"two predicates would collapse onto "
                f"{pred.module}:{pred.name}/{new_arity}")
        new_indicators.add(target)

    def narrow(term: Term, indexes: list[int]) -> Term:
        keep = [a for i, a in enumerate(term.args, start=1)
                if i not in indexes]
        return Compound(term.name, tuple(keep)) if keep else Atom(term.name)

    # Heads first: a dropped head variable may survive at call slots whose
    # own position was not dropped; those occurrences lose their binder and
    # become anonymous.
    dangling_by_clause: dict[int, set] = {}
    for pred, indexes in sorted(drops.items()):
        indexes = sorted(set(indexes))
        drops[pred] = indexes
        pdef = program.predicates[pred]
        for clause in pdef.clauses:
            new_head = narrow(clause.head, indexes)
            editset.edits.append(Edit(
                pdef.file, clause.head_span[0], clause.head_span[1],
                render_term(new_head, program.optable, maxprec=1199),
                note=f"drop arguments {indexes} from {pred}"))
            dangling_by_clause[id(clause)] = {
                clause.head.args[i - 1].key()
                for i in indexes
                if isinstance(clause.head.args[i - 1], Var)}
        _rewrite_indicator_arity(program, pred, pred.arity - len(indexes),
                                 editset)

    # One pass per body goal: narrow dropped callee positions and anonymize
    # dangling variables together, so each goal gets at most one edit.
    for pid, _, clause in program.iter_clauses():
        file = program.predicates[pid].file
        dangling = dangling_by_clause.get(id(clause), set())
        for goal in leaf_goals(clause.body):
            term = goal.term
            inner = term
            if isinstance(term, Compound) and term.name == ":" \
                    and term.arity == 2:
                inner = term.args[1]
            if not isinstance(inner, Compound):
                continue
            res = program.resolve(pid.module, term)
            goal_drops = drops.get(res.pred, []) if res.is_pred else []
            new_args = []
            changed = bool(goal_drops)
            for j, arg in enumerate(inner.args, start=1):
                if j in goal_drops:
                    continue
                if isinstance(arg, Var) and arg.key() in dangling:
                    new_args.append(Var("_"))
                    changed = True
                else:
                    new_args.append(arg)
            if not changed:
                continue
            new_inner = Compound(inner.name, tuple(new_args)) if new_args \
                else Atom(inner.name)
            _replace_call(program, file, term, new_inner, editset,
                          note=f"update call to {inner.name}")
    return editset


def reorder_arguments(program: Program, pred: PredId,
                      permutation: list[int]) -> EditSet:
    """Permute head and call-site arguments; new position i holds what was
    at permutation[i-1]."""
    if pred not in program.predicates:
        pred = find_pred(program, None, pred.name, pred.arity)
    if sorted(permutation) != list(range(1, pred.arity + 1)):
        raise NotAPermutation(
            f"{permutation} is not a permutation of 1..{pred.arity}")
    editset = new_editset(program)
    if permutation == list(range(1, pred.arity + 1)):
        return editset

    def permute(term: Compound) -> Term:
        return Compound(term.name,
                        tuple(term.args[i - 1] for i in permutation))

    pdef = program.predicates[pred]
    for clause in pdef.clauses:
        editset.edits.append(Edit(
            pdef.file, clause.head_span[0], clause.head_span[1],
            render_term(permute(clause.head), program.optable, maxprec=1199),
            note=f"reorder arguments of {pred}"))
    for caller, _, _, goal, inner in call_sites(program, pred):
        file = program.predicates[caller].file
        _replace_call(program, file, goal.term, permute(inner), editset,
                      note=f"reorder arguments of {pred} at call")
    return editset


def add_argument(program: Program, caller: PredId, callee: PredId,
                 seed_name: str, insert_position: Optional[int] = None) -> EditSet:
    """Thread a new argument along every dependency path caller -> callee.

    Every predicate on such a path (callee included, caller excluded) gains
    a fresh head variable; calls into the path pass it along.  Call sites
    outside the paths receive `_` with a warning annotation.
    """
    for pid in (caller, callee):
        if pid not in program.predicates:
            raise NotApplicable(f"{pid} is not defined")

    pdg = build_pdg(program)
    descendants = pdg.reachable_from(pdg.successors(caller))
    ancestors = {callee}
    changed = True
    while changed:
        changed = False
        for a, b in pdg.edges:
            if b in ancestors and a not in ancestors:
                ancestors.add(a)
                changed = True
    path_preds = (descendants & ancestors) - {caller}
    if callee in descendants:
        path_preds.add(callee)
    if callee not in path_preds:
        raise NoPath(f"no dependency path from {caller} to {callee}")

    selected = [c for c in program.predicates[caller].clauses
                if seed_name in clause_var_names(c)]
    if not selected:
        raise VariableNotFound(
            f"{seed_name} does not occur in any clause body of {caller}")

    editset = new_editset(program)

    def insert(args: tuple, extra: Term, arity: int) -> tuple:
        pos = insert_position if insert_position is not None else arity + 1
        if not 1 <= pos <= arity + 1:
            raise NotApplicable(f"insert position {pos} out of range")
        return args[:pos - 1] + (extra,) + args[pos - 1:]

    # Heads of path predicates gain a fresh variable.
    head_var_by_clause: dict[int, str] = {}
    for pid in sorted(path_preds):
        pdef = program.predicates[pid]
        for clause in pdef.clauses:
            taken = clause_var_names(clause)
            name = seed_name
            counter = 0
            while name in taken:
                counter += 1
                name = f"{seed_name}{counter}"
            head_var_by_clause[id(clause)] = name
            old_args = clause.head.args if isinstance(clause.head, Compound) \
                else ()
            new_head = Compound(pid.name,
                                insert(old_args, Var(name), pid.arity))
            editset.edits.append(Edit(
                pdef.file, clause.head_span[0], clause.head_span[1],
                render_term(new_head, program.optable, maxprec=1199),
                note=f"thread {seed_name} through {pid}"))

    # Call sites into the path.
    warned = False
    for target in sorted(path_preds):
        for from_pid, _, clause, goal, inner in call_sites(program, target):
            file = program.predicates[from_pid].file
            if from_pid == caller and any(clause is c for c in selected):
                passed: Term = Var(seed_name)
            elif from_pid in path_preds:
                passed = Var(head_var_by_clause[id(clause)])
            else:
                passed = Var("_")
                warned = True
            new_args = insert(inner.args if isinstance(inner, Compound) else (),
                              passed, target.arity)
            _replace_call(program, file, goal.term,
                          Compound(target.name, new_args), editset,
                          note=f"pass {seed_name} into {target}")
        _rewrite_indicator_arity(program, target, target.arity + 1, editset)

    if warned:
        editset.annotations.append(
            "call sites outside the propagation paths now pass `_`; review "
            "whether they should supply a real value")
    return editset
