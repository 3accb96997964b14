"""Extract common goal sequences (or a single selected run) into a new predicate."""

from __future__ import annotations

from typing import Optional

from ..analysis import _conjunction_runs, _sequence_params
from ..editset import Edit, EditSet
from ..errors import (
    CutInSelection,
    NameClash,
    NonContiguousSelection,
    NotApplicable,
    OccurrenceMismatch,
)
from ..model import PredId, Program
from ..render import render_clause, render_term
from ..terms import (
    Atom,
    Clause,
    Compound,
    Cut,
    Goal,
    Span,
    Term,
    Var,
    conjoin,
    variant,
    walk_goals,
)
from .base import (
    append_text,
    export_list_edit,
    insert_directive_edit,
    new_editset,
    use_module_text,
)


def _locate_run(program: Program, file: str, span: Span) \
        -> tuple[PredId, int, Clause, list[Goal]]:
    """The goal run covered exactly by a selection span."""
    start, end = span
    for pid, ci, clause in program.iter_clauses():
        if program.predicates[pid].file != file:
            continue
        if not (clause.span[0] <= start and end <= clause.span[1]):
            continue
        for run in _conjunction_runs(clause.body):
            indexes = [i for i, g in enumerate(run)
                       if start <= g.term.span[0] and g.term.span[1] <= end]
            if not indexes:
                continue
            contiguous = indexes == list(range(indexes[0], indexes[-1] + 1))
            covered = (run[indexes[0]].term.span[0],
                       run[indexes[-1]].term.span[1])
            if contiguous and covered == (start, end):
                return pid, ci, clause, [run[i] for i in indexes]
        for node in walk_goals(clause.body):
            if isinstance(node, Cut) and node.span is not None \
                    and start <= node.span[0] < end:
                raise CutInSelection(
                    f"selection {file}:{start}..{end} contains a cut")
        raise NonContiguousSelection(
            f"selection {file}:{start}..{end} is not a contiguous goal run")
    raise NonContiguousSelection(f"no clause covers {file}:{start}..{end}")


def extract_predicate(program: Program, occurrences: list[tuple[str, Span]],
                      name: str, target_module: str = "user",
                      expected_arity: Optional[int] = None) -> EditSet:
    """Replace each occurrence by a call to a new predicate defined by the
    selected goals; parameters are the sequence variables also used outside,
    ordered by first occurrence inside the sequence."""
    if not occurrences:
        raise NotApplicable("no occurrence spans given")
    if target_module not in program.modules:
        raise NotApplicable(f"unknown target module {target_module}")

    located = [_locate_run(program, file, span) for file, span in occurrences]
    first_pid, _, first_clause, first_window = located[0]
    first_terms = tuple(g.term for g in first_window)

    params = _sequence_params(first_terms, first_clause)
    arity = len(params)
    if expected_arity is not None and arity != expected_arity:
        raise OccurrenceMismatch(
            f"computed parameter count {arity} differs from expected "
            f"{expected_arity}")
    if program.defined(target_module, name, arity):
        raise NameClash(f"{target_module}:{name}/{arity} is already defined")

    editset = new_editset(program)
    needs_export = False
    importing_modules: list[str] = []
    for (file, span), (pid, _, clause, window) in zip(occurrences, located):
        terms = tuple(g.term for g in window)
        if variant(_pack(first_terms), _pack(terms)) is None:
            raise OccurrenceMismatch(
                f"occurrence at {file}:{span[0]} does not match the first "
                f"occurrence up to variable renaming")
        rename = _name_mapping(first_terms, terms)
        actuals = [Var(rename.get(p, p)) for p in params]
        call: Term = Compound(name, tuple(actuals)) if actuals else Atom(name)
        editset.edits.append(Edit(
            file, span[0], span[1],
            render_term(call, program.optable, maxprec=999),
            note=f"call {name}/{arity} instead of the extracted sequence"))
        if pid.module != target_module:
            needs_export = True
            if pid.module not in importing_modules:
                importing_modules.append(pid.module)

    head: Term = Compound(name, tuple(Var(p) for p in params)) if params \
        else Atom(name)
    body = conjoin([Goal(t) for t in first_terms])
    new_clause = Clause(head, body, body_span=(0, 0))
    target_file = program.modules[target_module].path
    editset.edits.append(append_text(
        program, target_file, render_clause(new_clause, program.optable),
        note=f"define {name}/{arity}"))

    if needs_export:
        edit = export_list_edit(program, target_module, add=[(name, arity)])
        if edit is not None:
            editset.edits.append(edit)
        for module in importing_modules:
            editset.edits.append(insert_directive_edit(
                program, module,
                use_module_text(target_module, [(name, arity)])))
        editset.annotations.append(
            f"{name}/{arity} is exported from {target_module} and imported "
            f"where the sequence occurred")
    return editset


def _pack(terms: tuple[Term, ...]) -> Term:
    return Compound("seq", terms) if terms else Atom("seq")


def _name_mapping(first: tuple[Term, ...], other: tuple[Term, ...]) -> dict:
    """Variable-name mapping from the first occurrence onto another."""
    mapping = variant(_pack(first), _pack(other)) or {}
    out = {}
    for k, v in mapping.items():
        k_name = k if isinstance(k, str) else k[0]
        v_name = v if isinstance(v, str) else v[0]
        out[k_name] = v_name
    return out
