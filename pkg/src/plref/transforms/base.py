"""Shared machinery for the refactoring transforms.

Every transform is a pure function Program + parameters -> EditSet; nothing
here touches the file system.  Helpers cover span surgery (clause deletion,
list-entry removal), locating subterms, call-site enumeration, and fresh
variable name synthesis.
"""

from __future__ import annotations

from typing import Iterator, Optional

from ..editset import Edit, EditSet
from ..errors import NotApplicable
from ..model import Indicator, ModuleDef, PredId, Program
from ..render import atom_text, render_clause, render_term
from ..terms import (
    Atom,
    Clause,
    ClauseItem,
    Compound,
    Directive,
    Goal,
    Int,
    Span,
    Term,
    Var,
    leaf_goals,
    term_vars,
)


def new_editset(program: Program, **kw) -> EditSet:
    return EditSet(base_version=program.version, **kw)


def deletion_span(text: str, span: Span) -> Span:
    """Extend a deletion over trailing blanks so no empty lines pile up."""
    start, end = span
    n = len(text)
    while end < n and text[end] in " \t":
        end += 1
    if end < n and text[end] == "\n":
        end += 1
    while end < n and text[end] == "\n":
        end += 1
    return (start, end)


def delete_item(program: Program, file: str, span: Span, note: str = "") -> Edit:
    text = program.files[file].text
    start, end = deletion_span(text, span)
    return Edit(file, start, end, "", note=note)


def append_text(program: Program, file: str, block: str, note: str = "") -> Edit:
    """Insert a new top-level block at end of file, after a blank line."""
    text = program.files[file].text
    if not text:
        lead = ""
    elif text.endswith("\n\n"):
        lead = ""
    elif text.endswith("\n"):
        lead = "\n"
    else:
        lead = "\n\n"
    return Edit(file, len(text), len(text), lead + block + "\n", note=note)


def indicator_term(ind: Indicator) -> Term:
    return Compound("/", (Atom(ind[0]), Int(ind[1])))


def render_indicator(ind: Indicator) -> str:
    return f"{atom_text(ind[0])}/{ind[1]}"


def indicator_of_term(term: Term) -> Optional[Indicator]:
    if isinstance(term, Compound) and term.name == "/" and term.arity == 2:
        name, arity = term.args
        if isinstance(name, Atom) and isinstance(arity, Int):
            return (name.name, arity.value)
    return None


def list_elements(term: Term) -> list[Term]:
    out = []
    while isinstance(term, Compound) and term.name == "." and term.arity == 2:
        out.append(term.args[0])
        term = term.args[1]
    return out


def rebuild_indicator_list(term: Term, keep: list[Indicator]) -> str:
    """Fresh `[p/1,q/2]` text for an export/import list."""
    return "[" + ",".join(render_indicator(i) for i in keep) + "]"


def module_directive(program: Program, module: str) -> tuple[str, Directive]:
    moddef = program.modules[module]
    if moddef.directive_index is None:
        raise NotApplicable(f"module {module} has no module/2 directive")
    item = program.files[moddef.path].items[moddef.directive_index]
    assert isinstance(item, Directive)
    return moddef.path, item


def export_list_edit(program: Program, module: str,
                     remove: list[Indicator] = (),
                     add: list[Indicator] = ()) -> Optional[Edit]:
    """One edit rewriting a module's export list, or None when unchanged."""
    path, item = module_directive(program, module)
    list_term = item.term.args[1]
    current = [indicator_of_term(t) for t in list_elements(list_term)]
    new = [i for i in current if i is not None and i not in remove]
    for ind in add:
        if ind not in new:
            new.append(ind)
    if new == [i for i in current if i is not None]:
        return None
    return Edit(path, list_term.span[0], list_term.span[1],
                rebuild_indicator_list(list_term, new),
                note=f"update exports of {module}")


def import_entry_edit(program: Program, module: str, entry_index: int,
                      remove: list[Indicator]) -> Edit:
    """Remove indicators from one use_module entry; delete it when emptied."""
    moddef = program.modules[module]
    entry = moddef.imports[entry_index]
    item = program.files[entry.file].items[entry.item_index]
    assert isinstance(item, Directive)
    if entry.indicators is None:
        return delete_item(program, entry.file, item.span,
                           note=f"drop use_module({entry.source}) in {module}")
    keep = [i for i in entry.indicators if i not in remove]
    if not keep:
        return delete_item(program, entry.file, item.span,
                           note=f"drop use_module({entry.source}) in {module}")
    list_term = item.term.args[1]
    return Edit(entry.file, list_term.span[0], list_term.span[1],
                rebuild_indicator_list(list_term, keep),
                note=f"trim import of {entry.source} in {module}")


def insert_directive_edit(program: Program, module: str, directive: str) -> Edit:
    """Insert a directive line after the module header (or at file top)."""
    moddef = program.modules[module]
    file = moddef.path
    text = program.files[file].text
    offset = 0
    if moddef.directive_index is not None:
        item = program.files[file].items[moddef.directive_index]
        offset = item.span[1]
        while offset < len(text) and text[offset] in " \t":
            offset += 1
        if offset < len(text) and text[offset] == "\n":
            offset += 1
    return Edit(file, offset, offset, directive + "\n",
                note=f"add directive to {module}")


def use_module_text(source: str, indicators: Optional[list[Indicator]]) -> str:
    if indicators is None:
        return f":- use_module({atom_text(source)})."
    inds = ",".join(render_indicator(i) for i in indicators)
    return f":- use_module({atom_text(source)},[{inds}])."


def call_sites(program: Program, target: PredId) \
        -> Iterator[tuple[PredId, int, Clause, Goal, Term]]:
    """Resolved direct call sites: (caller, clause index, clause, goal, call-term).

    The call-term is the goal term itself, or the inner term for a
    module-qualified `M:G` call.
    """
    for pid, ci, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            term = goal.term
            res = program.resolve(pid.module, term)
            if not (res.is_pred and res.pred == target):
                continue
            inner = term
            if isinstance(term, Compound) and term.name == ":" and term.arity == 2:
                inner = term.args[1]
            yield pid, ci, clause, goal, inner


def clause_var_names(clause: Clause) -> set[str]:
    from ..terms import goal_term

    names = set()
    for v in term_vars(clause.head) + term_vars(goal_term(clause.body)):
        if not v.is_anonymous:
            names.add(v.name)
    return names


def head_args(clause: Clause) -> tuple[Term, ...]:
    return clause.head.args if isinstance(clause.head, Compound) else ()


def first_occurrence_positions(head: Term) -> dict:
    """Map var key -> argument index (1-based) where the variable's very
    first head occurrence is the entire argument; absent otherwise."""
    firsts: dict = {}
    seen: set = set()
    args = head.args if isinstance(head, Compound) else ()
    for i, arg in enumerate(args, start=1):
        if isinstance(arg, Var) and not arg.is_anonymous \
                and arg.key() not in seen:
            firsts[arg.key()] = i
        for v in term_vars(arg):
            seen.add(v.key())
    return firsts


def synthesize_head_names(program: Program, pred: PredId,
                          clauses: list[Clause]) -> list[str]:
    """Fresh head variable names, one per argument position.

    Borrow the name of a clause's own variable when that position is its
    first occurrence and the name cannot capture anything in other clauses;
    otherwise borrow from a call site; otherwise synthesize V<i>.
    """
    all_names = [clause_var_names(c) for c in clauses]
    chosen: list[str] = []

    def safe_from_clause(name: str, donor: int, index: int) -> bool:
        if name in chosen:
            return False
        for k, clause in enumerate(clauses):
            if k == donor:
                continue
            if name in all_names[k]:
                args = head_args(clause)
                arg = args[index - 1] if index <= len(args) else None
                firsts = first_occurrence_positions(clause.head)
                if not (isinstance(arg, Var)
                        and firsts.get(arg.key()) == index
                        and arg.name == name):
                    return False
        return True

    def safe_from_outside(name: str) -> bool:
        return name not in chosen and all(name not in names
                                          for names in all_names)

    sites = None
    for i in range(1, pred.arity + 1):
        name = None
        for k, clause in enumerate(clauses):
            args = head_args(clause)
            arg = args[i - 1]
            firsts = first_occurrence_positions(clause.head)
            if isinstance(arg, Var) and not arg.is_anonymous \
                    and firsts.get(arg.key()) == i \
                    and safe_from_clause(arg.name, k, i):
                name = arg.name
                break
        if name is None:
            if sites is None:
                sites = sorted(call_sites(program, pred),
                               key=lambda s: (s[2].span or (0, 0)))
            for _, _, _, _, inner in sites:
                if isinstance(inner, Compound) and i <= inner.arity:
                    actual = inner.args[i - 1]
                    if isinstance(actual, Var) and not actual.is_anonymous \
                            and safe_from_outside(actual.name):
                        name = actual.name
                        break
        if name is None:
            name = f"V{i}"
            counter = 0
            while not safe_from_outside(name):
                counter += 1
                name = f"V{i}_{counter}"
        chosen.append(name)
    return chosen


def replace_clause_edit(program: Program, file: str, clause: Clause,
                        new_clause: Clause, note: str = "") -> Edit:
    text = render_clause(new_clause, program.optable)
    return Edit(file, clause.span[0], clause.span[1], text, note=note)


def goal_replacement_edit(program: Program, file: str, span: Span,
                          term: Term, note: str = "") -> Edit:
    return Edit(file, span[0], span[1],
                render_term(term, program.optable, maxprec=999), note=note)


def module_of(program: Program, pred: PredId) -> ModuleDef:
    return program.modules[pred.module]


def find_pred(program: Program, module: Optional[str], name: str,
              arity: int) -> PredId:
    matches = program.find_predicate(name, arity, module=module)
    if not matches:
        raise NotApplicable(f"{module or '?'}:{name}/{arity} is not defined")
    if len(matches) > 1:
        raise NotApplicable(
            f"{name}/{arity} is ambiguous across modules "
            f"({', '.join(str(m) for m in matches)}); qualify it")
    return matches[0]
