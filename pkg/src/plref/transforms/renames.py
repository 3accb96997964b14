"""Renames: predicates (with interface updates), term functors, modules."""

from __future__ import annotations

from typing import Optional

from .. import builtins
from ..editset import Edit, EditSet, FileOp
from ..errors import NameClash, NotApplicable, RenamesBuiltin
from ..model import Indicator, PredId, Program
from ..render import atom_text
from ..terms import (
    Atom,
    Compound,
    Directive,
    Span,
    Term,
    Var,
    leaf_goals,
)
from .base import (
    call_sites,
    indicator_of_term,
    list_elements,
    module_directive,
    new_editset,
)


def _functor_span(term: Term) -> Span:
    if isinstance(term, Compound):
        return term.name_span
    return term.span


def rename_predicate(program: Program, pred: PredId, new_name: str) -> EditSet:
    """Rename a predicate: heads, resolved call sites, exports and imports."""
    if pred not in program.predicates:
        if builtins.is_builtin(pred.name, pred.arity):
            raise RenamesBuiltin(
                f"{pred.name}/{pred.arity} is a builtin and cannot be "
                f"renamed; extract it into a wrapper predicate with the "
                f"desired name instead")
        pred = _resolve_pred_arg(program, pred)
    if new_name == pred.name:
        return new_editset(program)

    affected = {pred.module}
    for modname in program.module_order:
        for entry in program.modules[modname].imports:
            if entry.source == pred.module and (
                    entry.indicators is None
                    or pred.indicator in entry.indicators):
                affected.add(modname)
    for caller, _, _, _, _ in call_sites(program, pred):
        affected.add(caller.module)
    for module in sorted(affected):
        if program.defined(module, new_name, pred.arity):
            raise NameClash(
                f"{module}:{new_name}/{pred.arity} is already defined")
        probe: Term = Compound(new_name, tuple(Var("_") for _ in
                                               range(pred.arity))) \
            if pred.arity else Atom(new_name)
        res = program.resolve(module, probe)
        if res.is_pred:
            raise NameClash(
                f"{new_name}/{pred.arity} already resolves in {module} "
                f"(to {res.pred})")

    editset = new_editset(program)
    new_text = atom_text(new_name)
    pdef = program.predicates[pred]
    for clause in pdef.clauses:
        span = _functor_span(clause.head)
        editset.edits.append(Edit(pdef.file, span[0], span[1], new_text,
                                  note=f"rename head of {pred}"))
    for caller, _, _, goal, inner in call_sites(program, pred):
        file = program.predicates[caller].file
        span = _functor_span(inner)
        editset.edits.append(Edit(file, span[0], span[1], new_text,
                                  note=f"rename call to {pred}"))
    _rename_indicator_entries(program, pred, new_text, editset)

    if pred in program.roots:
        old_entry = f"{pred.name}/{pred.arity}"
        qualified = f"{pred.module}:{old_entry}"
        editset.manifest_replace_lines.extend([
            (old_entry, f"{new_name}/{pred.arity}"),
            (qualified, f"{pred.module}:{new_name}/{pred.arity}"),
        ])
        editset.annotations.append(
            f"{pred} is a root; the manifest roots entry is updated too")
    return editset


def _resolve_pred_arg(program: Program, pred: PredId) -> PredId:
    matches = program.find_predicate(pred.name, pred.arity)
    if len(matches) == 1:
        return matches[0]
    raise NotApplicable(f"{pred} is not defined")


def _rename_indicator_entries(program: Program, pred: PredId, new_text: str,
                              editset: EditSet):
    lists: list[tuple[str, Term]] = []
    moddef = program.modules[pred.module]
    if moddef.directive_index is not None:
        path, item = module_directive(program, pred.module)
        lists.append((path, item.term.args[1]))
    for modname in program.module_order:
        for entry in program.modules[modname].imports:
            if entry.source != pred.module or entry.indicators is None:
                continue
            item = program.files[entry.file].items[entry.item_index]
            lists.append((entry.file, item.term.args[1]))
    for file, list_term in lists:
        for element in list_elements(list_term):
            if indicator_of_term(element) == pred.indicator:
                name_term = element.args[0]
                editset.edits.append(Edit(
                    file, name_term.span[0], name_term.span[1], new_text,
                    note=f"rename {pred.name}/{pred.arity} in interface"))


# --- functor renaming (data positions only) ------------------------------------

def _data_occurrences(program: Program, name: str, arity: int):
    """(file, term) for every non-call occurrence of name/arity."""

    def scan_data(file: str, term: Term, acc: list):
        if isinstance(term, Atom) and arity == 0 and term.name == name:
            acc.append((file, term))
        if isinstance(term, Compound):
            if term.name == name and term.arity == arity:
                acc.append((file, term))
            for arg in term.args:
                scan_data(file, arg, acc)

    def scan_goal(file: str, module: str, term: Term, acc: list):
        if not isinstance(term, (Atom, Compound)):
            return
        if isinstance(term, Compound) and term.name == ":" and term.arity == 2:
            scan_goal(file, module, term.args[1], acc)
            return
        if isinstance(term, Compound):
            key = (term.name, term.arity)
            meta_positions = program.meta.get(key, ())
            for i, arg in enumerate(term.args, start=1):
                if i in meta_positions:
                    scan_goal(file, module, arg, acc)
                else:
                    scan_data(file, arg, acc)

    occurrences: list[tuple[str, Term]] = []
    for pid, _, clause in program.iter_clauses():
        file = program.predicates[pid].file
        if isinstance(clause.head, Compound):
            for arg in clause.head.args:
                scan_data(file, arg, occurrences)
        for goal in leaf_goals(clause.body):
            scan_goal(file, pid.module, goal.term, occurrences)
    return occurrences


def rename_functor(program: Program, name: str, arity: int, new_name: str,
                   occurrence_spans: Optional[list[tuple[str, Span]]] = None) \
        -> EditSet:
    """Rename a data-term functor; call positions are left alone.

    occurrence_spans narrows the rewrite to user-selected occurrences when
    the functor has several meanings.
    """
    editset = new_editset(program)
    new_text = atom_text(new_name)
    seen: set[tuple[str, Span]] = set()
    for file, term in _data_occurrences(program, name, arity):
        span = _functor_span(term)
        if span is None or (file, span) in seen:
            continue
        if occurrence_spans is not None:
            full = term.span
            inside = any(f == file and s[0] <= full[0] and full[1] <= s[1]
                         for f, s in occurrence_spans)
            if not inside:
                continue
        seen.add((file, span))
        editset.edits.append(Edit(file, span[0], span[1], new_text,
                                  note=f"rename functor {name}/{arity}"))
    return editset


# --- module renaming --------------------------------------------------------------

def rename_module(program: Program, module: str, new_name: str,
                  rename_file: Optional[str] = None) -> EditSet:
    """Rename a module: its directive, every use_module reference, every
    `M:` qualification; optionally rename the file itself."""
    if module not in program.modules:
        raise NotApplicable(f"unknown module {module}")
    if new_name in program.modules:
        raise NameClash(f"module {new_name} already exists")
    editset = new_editset(program)
    new_text = atom_text(new_name)

    path, item = module_directive(program, module)
    name_term = item.term.args[0]
    editset.edits.append(Edit(path, name_term.span[0], name_term.span[1],
                              new_text, note=f"rename module {module}"))

    for modname in program.module_order:
        for entry in program.modules[modname].imports:
            if entry.source != module:
                continue
            directive = program.files[entry.file].items[entry.item_index]
            ref = directive.term.args[0]
            if isinstance(ref, Compound) and ref.name == "library":
                ref = ref.args[0]
            editset.edits.append(Edit(
                entry.file, ref.span[0], ref.span[1], new_text,
                note=f"update use_module in {modname}"))

    for pid, _, clause in program.iter_clauses():
        file = program.predicates[pid].file
        for goal in leaf_goals(clause.body):
            term = goal.term
            if isinstance(term, Compound) and term.name == ":" \
                    and term.arity == 2:
                qual = term.args[0]
                if isinstance(qual, Atom) and qual.name == module:
                    editset.edits.append(Edit(
                        file, qual.span[0], qual.span[1], new_text,
                        note=f"requalify {module}: call"))

    if rename_file:
        editset.file_ops.append(FileOp("rename", path, new_path=rename_file))
        editset.manifest_replace_lines.append((path, rename_file))
    return editset
