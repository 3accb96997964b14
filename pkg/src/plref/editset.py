"""Byte-range edit sets: validation, unified diffs, atomic application.

Edits are replacements of spans in the original files, applied right-to-left
per file so earlier offsets never shift.  apply() is all-or-nothing: files
are staged as siblings and committed with rename; any failure restores the
already-committed files from backups.
"""

from __future__ import annotations

import difflib
import os
import shutil
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConflictError
from .model import Program

PRESERVING = "preserving"
CHANGING = "changing"
CONDITIONAL = "conditional"


@dataclass(frozen=True)
class Edit:
    file: str
    start: int
    end: int
    replacement: str
    note: str = ""

    @property
    def span(self):
        return (self.start, self.end)


@dataclass(frozen=True)
class FileOp:
    kind: str                      # create | delete | rename
    path: str
    new_path: Optional[str] = None
    content: str = ""


@dataclass
class EditSet:
    edits: list[Edit] = field(default_factory=list)
    file_ops: list[FileOp] = field(default_factory=list)
    semantics_flag: str = PRESERVING
    annotations: list[str] = field(default_factory=list)
    base_version: int = 0
    # Project manifest upkeep so a reload sees created/removed files.
    manifest_add_files: list[str] = field(default_factory=list)
    manifest_remove_files: list[str] = field(default_factory=list)
    manifest_replace_lines: list[tuple[str, str]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (self.edits or self.file_ops or self.manifest_add_files
                    or self.manifest_remove_files or self.manifest_replace_lines)

    @property
    def touches_manifest(self) -> bool:
        return bool(self.manifest_add_files or self.manifest_remove_files
                    or self.manifest_replace_lines)

    def files(self) -> list[str]:
        seen = dict.fromkeys(e.file for e in self.edits)
        for op in self.file_ops:
            seen.setdefault(op.path)
        return list(seen)

    def sorted_edits(self, file: str) -> list[Edit]:
        return sorted((e for e in self.edits if e.file == file),
                      key=lambda e: (e.start, e.end))

    def to_json(self) -> dict:
        return {
            "semantics_flag": self.semantics_flag,
            "annotations": list(self.annotations),
            "base_version": self.base_version,
            "edits": [{"file": e.file, "start": e.start, "end": e.end,
                       "replacement": e.replacement, "note": e.note}
                      for e in self.edits],
            "file_ops": [{"kind": op.kind, "path": op.path,
                          "new_path": op.new_path}
                         for op in self.file_ops],
        }


def check(editset: EditSet, program: Program) -> list[str]:
    """Conflicts: overlapping spans, out-of-bounds spans, stale snapshot."""
    conflicts: list[str] = []
    if editset.base_version and editset.base_version != program.version:
        conflicts.append(
            f"stale: edit set computed for version {editset.base_version}, "
            f"program is at {program.version}")
    for file in editset.files():
        ordered = editset.sorted_edits(file)
        if not ordered:
            continue
        pf = program.files.get(file)
        if pf is None:
            if not any(op.kind == "create" and op.path == file
                       for op in editset.file_ops):
                conflicts.append(f"{file}: not part of the project")
            continue
        size = len(pf.text)
        prev = None
        for edit in ordered:
            if not (0 <= edit.start <= edit.end <= size):
                conflicts.append(
                    f"{file}: span {edit.start}..{edit.end} outside file "
                    f"(size {size}) [{edit.note}]")
            if prev is not None and edit.start < prev.end:
                conflicts.append(
                    f"{file}: overlapping edits [{prev.note}] and [{edit.note}]")
            prev = edit
    return conflicts


def new_text(editset: EditSet, original: str, file: str) -> str:
    """Apply this set's edits for one file to its original text."""
    out = original
    for edit in reversed(editset.sorted_edits(file)):
        out = out[:edit.start] + edit.replacement + out[edit.end:]
    return out


def unified_diff(editset: EditSet, program: Program, context: int = 3) -> str:
    """Standard unified diff over all affected files, manifest order."""
    conflicts = check(editset, program)
    if conflicts:
        raise ConflictError(conflicts)

    chunks: list[str] = []
    edited = set(editset.files())
    ordered_files = [f for f in program.file_order if f in edited]
    for file in ordered_files:
        pf = program.files[file]
        updated = new_text(editset, pf.text, file)
        deleted = any(op.kind == "delete" and op.path == file
                      for op in editset.file_ops)
        if deleted:
            chunks.append(_diff_one(pf.text, "", f"a/{file}", "/dev/null", context))
            continue
        if updated != pf.text:
            chunks.append(_diff_one(pf.text, updated, f"a/{file}", f"b/{file}",
                                    context))
    for op in editset.file_ops:
        if op.kind == "create":
            chunks.append(_diff_one("", op.content, "/dev/null",
                                    f"b/{op.path}", context))
        elif op.kind == "rename":
            chunks.append(f"rename {op.path} -> {op.new_path}\n")
    if editset.touches_manifest:
        with open(program.manifest.path, encoding="utf-8") as fh:
            old = fh.read()
        updated = updated_manifest_text(old, editset)
        if updated != old:
            rel = os.path.relpath(program.manifest.path,
                                  program.manifest.root_dir)
            chunks.append(_diff_one(old, updated, f"a/{rel}", f"b/{rel}",
                                    context))
    return "".join(chunks)


def _diff_one(old: str, new: str, fromfile: str, tofile: str,
              context: int) -> str:
    lines = difflib.unified_diff(
        old.splitlines(keepends=True), new.splitlines(keepends=True),
        fromfile=fromfile, tofile=tofile, n=context)
    out = []
    for line in lines:
        if not line.endswith("\n"):
            line += "\n\\ No newline at end of file\n"
        out.append(line)
    return "".join(out)


def preview_program(editset: EditSet, program: Program) -> Program:
    """The program as it would look after apply(), built without touching
    the file system.  Used for previews and re-parse checks."""
    from .model import build_program, parse_manifest_text
    from .parser import parse_program

    conflicts = check(editset, program)
    if conflicts:
        raise ConflictError(conflicts)

    texts = {rel: pf.text for rel, pf in program.files.items()}
    for rel in list(texts):
        texts[rel] = new_text(editset, texts[rel], rel)
    for op in editset.file_ops:
        if op.kind == "create":
            texts[op.path] = op.content
        elif op.kind == "delete":
            texts.pop(op.path, None)
        elif op.kind == "rename":
            texts[op.new_path] = texts.pop(op.path)

    with open(program.manifest.path, encoding="utf-8") as fh:
        manifest_text = fh.read()
    if editset.touches_manifest:
        manifest_text = updated_manifest_text(manifest_text, editset)
    manifest = parse_manifest_text(manifest_text, program.manifest.path)

    files = {}
    for rel in manifest.files:
        if rel not in texts:
            raise ConflictError([f"manifest lists {rel} but no content exists"])
        files[rel] = parse_program(texts[rel], path=rel)
    return build_program(manifest, files, version=program.version + 1)


def updated_manifest_text(text: str, editset: EditSet) -> str:
    """Apply file additions/removals and line replacements to manifest text."""
    replacements = dict(editset.manifest_replace_lines)
    removals = set(editset.manifest_remove_files)
    lines = text.splitlines()
    out: list[str] = []
    files_section_end = None
    section = None
    for line in lines:
        stripped = line.split("#", 1)[0].strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1]
            out.append(line)
            continue
        if section == "files" and stripped in removals:
            continue
        if stripped in replacements:
            out.append(replacements[stripped])
            continue
        out.append(line)
    if editset.manifest_add_files:
        insert_at = len(out)
        section = None
        for i, line in enumerate(out):
            stripped = line.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                if section == "files":
                    insert_at = i
                    break
                section = stripped[1:-1]
        else:
            if section != "files":
                out.append("[files]")
            insert_at = len(out)
        for f in editset.manifest_add_files:
            out.insert(insert_at, f)
            insert_at += 1
    return "\n".join(out) + ("\n" if out else "")


@dataclass
class ApplyReport:
    files_written: list[str]
    backup_dir: str
    new_version: int


BACKUP_DIR = ".plref-backup"


def apply(editset: EditSet, program: Program) -> ApplyReport:
    """Write all changes atomically; the caller must reload the program."""
    conflicts = check(editset, program)
    if conflicts:
        raise ConflictError(conflicts)

    root = program.manifest.root_dir
    backup_dir = os.path.join(root, BACKUP_DIR)

    staged: dict[str, str] = {}   # rel path -> new content
    for file in editset.files():
        pf = program.files.get(file)
        if pf is not None:
            updated = new_text(editset, pf.text, file)
            if updated != pf.text:
                staged[file] = updated
    creates = [op for op in editset.file_ops if op.kind == "create"]
    deletes = [op for op in editset.file_ops if op.kind == "delete"]
    renames = [op for op in editset.file_ops if op.kind == "rename"]
    for op in deletes:
        staged.pop(op.path, None)

    manifest_rel = None
    if editset.touches_manifest:
        manifest_rel = os.path.relpath(program.manifest.path, root)
        with open(program.manifest.path, encoding="utf-8") as fh:
            old_manifest = fh.read()
        updated = updated_manifest_text(old_manifest, editset)
        if updated != old_manifest:
            staged[manifest_rel] = updated

    # Stage phase: temp files next to their targets.
    temps: dict[str, str] = {}
    try:
        for rel, content in staged.items():
            tmp = os.path.join(root, rel + ".plref-tmp~")
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(content)
            temps[rel] = tmp
    except OSError:
        for tmp in temps.values():
            _silent_remove(tmp)
        raise

    # Backup phase.
    if os.path.isdir(backup_dir):
        shutil.rmtree(backup_dir)
    backed_up: dict[str, str] = {}
    for rel in list(staged) + [op.path for op in deletes + renames]:
        src = os.path.join(root, rel)
        if os.path.exists(src):
            dst = os.path.join(backup_dir, rel)
            os.makedirs(os.path.dirname(dst), exist_ok=True)
            shutil.copy2(src, dst)
            backed_up[rel] = dst

    # Commit phase with rollback.
    committed: list[str] = []
    created: list[str] = []
    renamed: list[tuple[str, str]] = []
    try:
        for rel in staged:
            os.replace(temps[rel], os.path.join(root, rel))
            committed.append(rel)
        for op in creates:
            target = os.path.join(root, op.path)
            os.makedirs(os.path.dirname(target) or root, exist_ok=True)
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(op.content)
            created.append(op.path)
        for op in deletes:
            os.remove(os.path.join(root, op.path))
            committed.append(op.path)
        for op in renames:
            os.rename(os.path.join(root, op.path),
                      os.path.join(root, op.new_path))
            renamed.append((op.path, op.new_path))
    except OSError:
        for old, new in reversed(renamed):
            _silent_rename(os.path.join(root, new), os.path.join(root, old))
        for rel in created:
            _silent_remove(os.path.join(root, rel))
        for rel in committed:
            backup = backed_up.get(rel)
            if backup is not None:
                shutil.copy2(backup, os.path.join(root, rel))
        for tmp in temps.values():
            _silent_remove(tmp)
        raise
    for tmp in temps.values():
        _silent_remove(tmp)

    written = committed + created + [new for _, new in renamed]
    return ApplyReport(files_written=written, backup_dir=backup_dir,
                       new_version=program.version + 1)


def _silent_remove(path: str):
    try:
        os.remove(path)
    except OSError:
        pass


def _silent_rename(src: str, dst: str):
    try:
        os.rename(src, dst)
    except OSError:
        pass
