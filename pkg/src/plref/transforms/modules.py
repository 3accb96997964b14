"""Module-scope transforms: merge, split, and predicate relocation."""

from __future__ import annotations

from typing import Optional

from ..editset import Edit, EditSet, FileOp
from ..errors import DefinitionClash, NameClash, NotApplicable
from ..model import Indicator, PredId, Program
from ..pdg import build_pdg
from ..render import atom_text, render_term
from ..terms import Atom, ClauseItem, Compound, Directive, leaf_goals
from .base import (
    call_sites,
    delete_item,
    export_list_edit,
    import_entry_edit,
    insert_directive_edit,
    new_editset,
    render_indicator,
    use_module_text,
)


def _used_outside(program: Program, module: str, ind: Indicator,
                  inside: set[str]) -> bool:
    """Is an export consumed by any module outside `inside` (or a root)?"""
    pid = PredId(module, ind[0], ind[1])
    if pid in program.roots:
        return True
    for modname in program.module_order:
        if modname in inside:
            continue
        for entry in program.modules[modname].imports:
            if entry.source == module and (entry.indicators is None
                                           or ind in entry.indicators):
                return True
    for caller, _, _, goal, _ in call_sites(program, pid):
        if caller.module not in inside:
            term = goal.term
            if isinstance(term, Compound) and term.name == ":":
                return True
    return False


def merge_modules(program: Program, modules: list[str], new_name: str,
                  new_file: str) -> EditSet:
    """Fuse modules into one; internal imports disappear, external importers
    are re-pointed at the new module."""
    for m in modules:
        if m not in program.modules:
            raise NotApplicable(f"unknown module {m}")
    if new_name in program.modules and new_name not in modules:
        raise NameClash(f"module {new_name} already exists")
    merged = set(modules)

    defined: dict[Indicator, str] = {}
    for pid in program.predicates:
        if pid.module in merged:
            if pid.indicator in defined and defined[pid.indicator] != pid.module:
                raise DefinitionClash(
                    f"{render_indicator(pid.indicator)} is defined in both "
                    f"{defined[pid.indicator]} and {pid.module}")
            defined[pid.indicator] = pid.module

    exports: list[Indicator] = []
    for m in modules:
        for ind in program.modules[m].exports:
            if ind not in exports and _used_outside(program, m, ind, merged):
                exports.append(ind)

    # New file: module header, surviving external imports, then the clauses.
    header = [f":- module({atom_text(new_name)},"
              f"[{','.join(render_indicator(i) for i in exports)}])."]
    import_lines: list[str] = []
    body_chunks: list[str] = []
    for m in modules:
        pf = program.files[program.modules[m].path]
        for item in pf.items:
            text = pf.text[item.span[0]:item.span[1]]
            if isinstance(item, Directive):
                term = item.term
                if isinstance(term, Compound) and term.name == "module":
                    continue
                if isinstance(term, Compound) and term.name == "use_module":
                    entry = next((e for e in program.modules[m].imports
                                  if e.item_index == pf.items.index(item)
                                  and e.file == pf.path), None)
                    if entry is not None and entry.source in merged:
                        continue
                    if text not in import_lines:
                        import_lines.append(text)
                    continue
            body_chunks.append(_requalify(program, pf, item, merged))
    content = "\n".join(header + import_lines) + "\n\n" \
        + "\n\n".join(body_chunks) + "\n"

    editset = new_editset(program)
    editset.file_ops.append(FileOp("create", new_file, content=content))
    editset.manifest_add_files.append(new_file)
    for m in modules:
        path = program.modules[m].path
        editset.file_ops.append(FileOp("delete", path))
        editset.manifest_remove_files.append(path)

    # Re-point external importers and qualified calls.
    for modname in program.module_order:
        if modname in merged:
            continue
        for entry in program.modules[modname].imports:
            if entry.source in merged:
                directive = program.files[entry.file].items[entry.item_index]
                ref = directive.term.args[0]
                if isinstance(ref, Compound) and ref.name == "library":
                    ref = ref.args[0]
                editset.edits.append(Edit(
                    entry.file, ref.span[0], ref.span[1], atom_text(new_name),
                    note=f"re-point import of {entry.source} in {modname}"))
    for pid, _, clause in program.iter_clauses():
        if pid.module in merged:
            continue
        file = program.predicates[pid].file
        for goal in leaf_goals(clause.body):
            term = goal.term
            if isinstance(term, Compound) and term.name == ":" \
                    and term.arity == 2:
                qual = term.args[0]
                if isinstance(qual, Atom) and qual.name in merged:
                    editset.edits.append(Edit(
                        file, qual.span[0], qual.span[1], atom_text(new_name),
                        note=f"requalify {qual.name}: call"))
    return editset


def _requalify(program: Program, pf, item, merged: set[str]) -> str:
    """Item text with `m:` qualifications into the merged set made local."""
    text = pf.text[item.span[0]:item.span[1]]
    if not isinstance(item, ClauseItem):
        return text
    rewrites = []
    for goal in leaf_goals(item.clause.body):
        term = goal.term
        if isinstance(term, Compound) and term.name == ":" and term.arity == 2:
            qual, inner = term.args
            if isinstance(qual, Atom) and qual.name in merged:
                rewrites.append((term.span,
                                 render_term(inner, program.optable,
                                             maxprec=999)))
    base = item.span[0]
    for (start, end), replacement in sorted(rewrites, reverse=True):
        text = text[:start - base] + replacement + text[end - base:]
    return text


def split_module(program: Program, module: str,
                 partition: dict[Indicator, str],
                 names: tuple[str, str],
                 files: tuple[str, str]) -> EditSet:
    """Split one module in two along a total indicator partition.

    Cross-side calls induce exports and imports computed from the PDG;
    external importers are re-pointed per side.
    """
    if module not in program.modules:
        raise NotApplicable(f"unknown module {module}")
    sides = {"a", "b"}
    local_preds = [p for p in program.predicates if p.module == module]
    missing = [p.indicator for p in local_preds
               if p.indicator not in partition]
    if missing:
        raise NotApplicable(
            f"partition misses {', '.join(render_indicator(i) for i in missing)}")
    if not set(partition.values()) <= sides:
        raise NotApplicable("partition sides must be 'a' or 'b'")
    for new_name in names:
        if new_name in program.modules and new_name != module:
            raise NameClash(f"module {new_name} already exists")

    side_of = {p: partition[p.indicator] for p in local_preds}
    pdg = build_pdg(program)
    cross_needed: dict[str, set[Indicator]] = {"a": set(), "b": set()}
    mutual = False
    for a, b in pdg.edges:
        if a in side_of and b in side_of and side_of[a] != side_of[b]:
            cross_needed[side_of[b]].add(b.indicator)
            if (b, a) in pdg.edges and side_of[b] != side_of[a]:
                mutual = True

    moddef = program.modules[module]
    old_exports = {ind: side for ind, side in partition.items()
                   if ind in moddef.exports}

    editset = new_editset(program)
    if mutual:
        editset.annotations.append(
            "mutually recursive predicates were split apart; both sides "
            "import from each other")

    pf = program.files[moddef.path]
    side_preds = {s: sorted(p for p, sd in side_of.items() if sd == s)
                  for s in ("a", "b")}
    for idx, side in enumerate(("a", "b")):
        preds = side_preds[side]
        if not preds:
            continue
        name = names[idx]
        other = names[1 - idx]
        exports = [ind for ind, sd in old_exports.items() if sd == side]
        exports += [i for i in sorted(cross_needed[side]) if i not in exports]
        lines = [f":- module({atom_text(name)},"
                 f"[{','.join(render_indicator(i) for i in exports)}])."]

        used_entries = set()
        for p in preds:
            for _, _, clause in [(None, None, c)
                                 for c in program.predicates[p].clauses]:
                for goal in leaf_goals(clause.body):
                    for res, _, _ in program.call_targets(module, goal.term):
                        if res.is_pred and res.via_import:
                            used_entries.add(res.via_import[1])
        for entry_idx in sorted(used_entries):
            entry = moddef.imports[entry_idx]
            item = program.files[entry.file].items[entry.item_index]
            lines.append(pf.text[item.span[0]:item.span[1]])

        # Everything the other side must export exists because this side
        # calls it, so this side imports exactly that set.
        imported_from_other = sorted(cross_needed[side_other(side)])
        if imported_from_other and side_preds[side_other(side)]:
            lines.append(use_module_text(other, imported_from_other))

        chunks = []
        for p in preds:
            for clause in program.predicates[p].clauses:
                chunks.append(pf.text[clause.span[0]:clause.span[1]])
        content = "\n".join(lines) + "\n\n" + "\n\n".join(chunks) + "\n"
        editset.file_ops.append(FileOp("create", files[idx], content=content))
        editset.manifest_add_files.append(files[idx])

    editset.file_ops.append(FileOp("delete", moddef.path))
    editset.manifest_remove_files.append(moddef.path)

    # Re-point external importers per side of each indicator.
    for modname in program.module_order:
        if modname == module:
            continue
        for entry_idx, entry in enumerate(program.modules[modname].imports):
            if entry.source != module:
                continue
            inds = entry.indicators
            if inds is None:
                editset.edits.append(import_entry_edit(
                    program, modname, entry_idx, remove=[]))
                for idx, side in enumerate(("a", "b")):
                    if side_preds[side]:
                        editset.edits.append(insert_directive_edit(
                            program, modname, use_module_text(names[idx], None)))
                editset.annotations.append(
                    f"{modname} imported {module} wholesale; it now imports "
                    f"both halves")
                continue
            per_side: dict[str, list[Indicator]] = {"a": [], "b": []}
            for ind in inds:
                side = partition.get(ind)
                if side:
                    per_side[side].append(ind)
            editset.edits.append(import_entry_edit(
                program, modname, entry_idx, remove=list(inds)))
            for idx, side in enumerate(("a", "b")):
                if per_side[side]:
                    editset.edits.append(insert_directive_edit(
                        program, modname,
                        use_module_text(names[idx], per_side[side])))
    return editset


def side_other(side: str) -> str:
    return "b" if side == "a" else "a"


def move_predicate(program: Program, pred: PredId, target: str) -> EditSet:
    """Move a predicate's clauses to another module, recomputing the
    import/export entries both modules need."""
    if pred not in program.predicates:
        raise NotApplicable(f"{pred} is not defined")
    if target not in program.modules:
        raise NotApplicable(f"unknown module {target}")
    if target == pred.module:
        return new_editset(program)
    if program.defined(target, pred.name, pred.arity):
        raise NameClash(f"{target}:{pred.name}/{pred.arity} already exists")

    editset = new_editset(program)
    pdef = program.predicates[pred]
    source = pred.module
    src_moddef = program.modules[source]
    pf = program.files[pdef.file]

    chunks = [pf.text[c.span[0]:c.span[1]] for c in pdef.clauses]
    for clause in pdef.clauses:
        editset.edits.append(delete_item(program, pdef.file, clause.span,
                                         note=f"move {pred} to {target}"))
    from .base import append_text
    editset.edits.append(append_text(program, program.modules[target].path,
                                     "\n\n".join(chunks),
                                     note=f"define {pred.name} in {target}"))

    ind = pred.indicator
    exported_in_source = ind in src_moddef.exports
    callers_in_source = any(
        caller.module == source and caller != pred
        for caller, _, _, _, _ in call_sites(program, pred))
    external_importers = [
        modname for modname in program.module_order
        if modname not in (source, target)
        and any(e.source == source and (e.indicators is None
                                        or ind in e.indicators)
                for e in program.modules[modname].imports)]

    needs_export = callers_in_source or bool(external_importers) \
        or PredId(source, *ind) in program.roots
    if exported_in_source:
        edit = export_list_edit(program, source, remove=[ind])
        if edit is not None:
            editset.edits.append(edit)
    if needs_export:
        edit = export_list_edit(program, target, add=[ind])
        if edit is not None:
            editset.edits.append(edit)
    if callers_in_source:
        editset.edits.append(insert_directive_edit(
            program, source, use_module_text(target, [ind])))
    for modname in external_importers:
        for entry_idx, entry in enumerate(program.modules[modname].imports):
            if entry.source == source and entry.indicators \
                    and ind in entry.indicators:
                editset.edits.append(import_entry_edit(
                    program, modname, entry_idx, remove=[ind]))
        editset.edits.append(insert_directive_edit(
            program, modname, use_module_text(target, [ind])))

    # Entries for what the moved predicate itself calls.
    needed_imports: dict[str, set[Indicator]] = {}
    source_exports_to_add: list[Indicator] = []
    for clause in pdef.clauses:
        for goal in leaf_goals(clause.body):
            res = program.resolve(source, goal.term)
            if not res.is_pred or res.pred == pred:
                continue
            dep = res.pred
            if dep.module == target:
                continue
            if dep.module == source and res.via_import is None:
                if dep.indicator not in src_moddef.exports \
                        and dep.indicator not in source_exports_to_add:
                    source_exports_to_add.append(dep.indicator)
                    editset.annotations.append(
                        f"{dep} is now exported from {source} so {target} "
                        f"can import it")
                needed_imports.setdefault(source, set()).add(dep.indicator)
            elif res.via_import is not None:
                needed_imports.setdefault(dep.module, set()).add(dep.indicator)
    if source_exports_to_add:
        edit = export_list_edit(program, source, add=source_exports_to_add)
        if edit is not None:
            editset.edits.append(edit)
    target_moddef = program.modules[target]
    for dep_module, inds in sorted(needed_imports.items()):
        already = {i for e in target_moddef.imports
                   if e.source == dep_module and e.indicators
                   for i in e.indicators}
        whole = any(e.source == dep_module and e.indicators is None
                    for e in target_moddef.imports)
        missing = sorted(i for i in inds if i not in already) \
            if not whole else []
        if missing:
            editset.edits.append(insert_directive_edit(
                program, target, use_module_text(dep_module, missing)))
    return editset
