"""System-scope removals: hide exports, delete dead code, merge duplicates."""

from __future__ import annotations

from ..analysis import dead_predicates, duplicate_groups, hideable_exports
from ..editset import Edit, EditSet, FileOp
from ..errors import ImportCycleCreated, NotApplicable, NotDead, NotExported
from ..model import Indicator, PredId, Program
from ..pdg import build_pdg, condensation
from ..render import atom_text
from .base import (
    delete_item,
    export_list_edit,
    import_entry_edit,
    insert_directive_edit,
    new_editset,
    render_indicator,
    use_module_text,
)


def hide_predicates(program: Program, targets: list[tuple[str, Indicator]],
                    override: bool = False) -> EditSet:
    """Remove export-list entries nobody imports."""
    editset = new_editset(program)
    if not targets:
        return editset
    hideable = set(hideable_exports(program))
    by_module: dict[str, list[Indicator]] = {}
    for module, ind in targets:
        moddef = program.modules.get(module)
        if moddef is None or ind not in moddef.exports:
            raise NotExported(f"{module} does not export {render_indicator(ind)}")
        if (module, ind) not in hideable and not override:
            pid = PredId(module, ind[0], ind[1])
            why = "a root" if pid in program.roots else "imported elsewhere"
            raise NotApplicable(
                f"{module}:{render_indicator(ind)} is {why}; "
                f"pass override to hide it anyway")
        by_module.setdefault(module, []).append(ind)
    for module, inds in by_module.items():
        edit = export_list_edit(program, module, remove=inds)
        if edit is not None:
            editset.edits.append(edit)
    return editset


def remove_dead(program: Program, targets: list[PredId],
                override: bool = False) -> EditSet:
    """Delete whole predicate definitions plus their interface entries."""
    editset = new_editset(program)
    if not targets:
        return editset
    if not override:
        dead = dead_predicates(program)
        alive = [t for t in targets if t not in dead]
        if alive:
            raise NotDead(
                f"{', '.join(str(p) for p in alive)} reachable from the "
                f"roots; pass override to remove anyway")

    for pid in targets:
        if pid not in program.predicates:
            raise NotApplicable(f"{pid} is not defined")

    export_removals: dict[str, list[Indicator]] = {}
    import_removals: dict[tuple[str, int], list[Indicator]] = {}
    for pid in sorted(set(targets)):
        pdef = program.predicates[pid]
        for clause in pdef.clauses:
            editset.edits.append(delete_item(program, pdef.file, clause.span,
                                             note=f"delete dead {pid}"))
        moddef = program.modules[pid.module]
        if pid.indicator in moddef.exports:
            export_removals.setdefault(pid.module, []).append(pid.indicator)
        for modname in program.module_order:
            for idx, entry in enumerate(program.modules[modname].imports):
                if entry.source == pid.module and entry.indicators \
                        and pid.indicator in entry.indicators:
                    import_removals.setdefault((modname, idx), []).append(
                        pid.indicator)

    for module, inds in export_removals.items():
        edit = export_list_edit(program, module, remove=inds)
        if edit is not None:
            editset.edits.append(edit)
    for (module, idx), inds in import_removals.items():
        editset.edits.append(import_entry_edit(program, module, idx, inds))
    return editset


def remove_unused_import(program: Program, module: str, source: str,
                         indicator: str) -> EditSet:
    """Drop one import entry previously reported unused ('all' drops a
    whole-module import)."""
    editset = new_editset(program)
    moddef = program.modules.get(module)
    if moddef is None:
        raise NotApplicable(f"unknown module {module}")
    for idx, entry in enumerate(moddef.imports):
        if entry.source != source:
            continue
        if indicator == "all" and entry.indicators is None:
            editset.edits.append(import_entry_edit(program, module, idx, []))
            return editset
        if entry.indicators is not None:
            name, arity = indicator.rsplit("/", 1)
            ind = (name, int(arity))
            if ind in entry.indicators:
                editset.edits.append(
                    import_entry_edit(program, module, idx, [ind]))
                return editset
    raise NotApplicable(
        f"{module} has no import of {indicator} from {source}")


# --- duplicates -----------------------------------------------------------------

def _module_import_graph(program: Program) -> set[tuple[str, str]]:
    edges = set()
    for modname in program.module_order:
        for entry in program.modules[modname].imports:
            edges.add((modname, entry.source))
    return edges


def _reaches(edges: set[tuple[str, str]], start: str, goal: str) -> bool:
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        if node == goal:
            return True
        for a, b in edges:
            if a == node and b not in seen:
                seen.add(b)
                frontier.append(b)
    return goal in seen


def _scc_indicator_set(program: Program, member: PredId) -> list[Indicator]:
    cond = condensation(build_pdg(program))
    scc = cond.sccs[cond.scc_of[member]]
    return sorted({p.indicator for p in scc})


def remove_duplicates(program: Program, group: list[PredId],
                      keep: PredId | None = None,
                      extract_to: tuple[str, str] | None = None) -> EditSet:
    """Keep one copy of a duplicate group, or extract it to a new module.

    keep: delete the other members and import the kept indicator instead.
    extract_to = (module name, file): move the defining SCC to a fresh
    module and point every member module at it.
    """
    groups = {tuple(g) for g in duplicate_groups(program)}
    group = sorted(group)
    if len(group) <= 1:
        return new_editset(program)
    if tuple(group) not in groups:
        raise NotApplicable(
            f"{', '.join(str(p) for p in group)} is not a detected "
            f"duplicate group")
    if (keep is None) == (extract_to is None):
        raise NotApplicable("choose exactly one strategy: keep or extract_to")

    if keep is not None:
        if keep not in group:
            raise NotApplicable(f"{keep} is not a member of the group")
        return _keep_one(program, group, keep)
    return _extract_shared(program, group, *extract_to)


def _keep_one(program: Program, group: list[PredId], keep: PredId) -> EditSet:
    editset = new_editset(program)
    ind = keep.indicator
    imports_graph = _module_import_graph(program)
    for member in group:
        if member == keep:
            continue
        if _reaches(imports_graph, keep.module, member.module):
            raise ImportCycleCreated(
                f"importing {keep.module} from {member.module} would close "
                f"an import cycle")
    edit = export_list_edit(program, keep.module, add=[ind])
    if edit is not None:
        editset.edits.append(edit)
    for member in group:
        if member == keep:
            continue
        pdef = program.predicates[member]
        for clause in pdef.clauses:
            editset.edits.append(delete_item(
                program, pdef.file, clause.span,
                note=f"drop duplicate {member}"))
        editset.edits.append(insert_directive_edit(
            program, member.module, use_module_text(keep.module, [ind])))
    return editset


def _extract_shared(program: Program, group: list[PredId],
                    new_module: str, new_file: str) -> EditSet:
    if new_module in program.modules:
        raise NotApplicable(f"module {new_module} already exists")
    editset = new_editset(program)

    first = group[0]
    indicators = _scc_indicator_set(program, first)

    # Collect the whole SCC's clauses from the first member's module, verbatim.
    chunks = [f":- module({atom_text(new_module)},"
              f"[{','.join(render_indicator(i) for i in indicators)}]).", ""]
    src_file = program.predicates[first].file
    text = program.files[src_file].text
    for ind in indicators:
        pid = PredId(first.module, ind[0], ind[1])
        pdef = program.predicates.get(pid)
        if pdef is None:
            raise NotApplicable(
                f"{first.module} does not define {render_indicator(ind)} "
                f"from the recursive group")
        for clause in pdef.clauses:
            chunks.append(text[clause.span[0]:clause.span[1]])
        chunks.append("")
    content = "\n".join(chunks).rstrip("\n") + "\n"
    editset.file_ops.append(FileOp("create", new_file, content=content))
    editset.manifest_add_files.append(new_file)

    # Delete every member (the full SCC in each module) and import instead.
    modules = sorted({p.module for p in group})
    for module in modules:
        for ind in indicators:
            pid = PredId(module, ind[0], ind[1])
            pdef = program.predicates.get(pid)
            if pdef is None:
                continue
            for clause in pdef.clauses:
                editset.edits.append(delete_item(
                    program, pdef.file, clause.span,
                    note=f"move duplicate {pid} to {new_module}"))
        editset.edits.append(insert_directive_edit(
            program, module, use_module_text(new_module, indicators)))
    return editset
