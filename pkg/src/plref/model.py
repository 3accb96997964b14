"""Multi-module program model: predicate table, imports/exports, call resolution.

A Program is an immutable snapshot of the project at one version.  Reloading
after an edit produces a new snapshot with a bumped version number.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import builtins
from .errors import DuplicateModuleName, ManifestError, ParseError, PlrefError
from .operators import OperatorTable
from .parser import parse_program
from .terms import (
    Atom,
    Clause,
    ClauseItem,
    Compound,
    Directive,
    Goal,
    GoalTree,
    Int,
    ParsedFile,
    Term,
    Var,
    leaf_goals,
    walk_goals,
)

Indicator = tuple[str, int]


@dataclass(frozen=True, order=True)
class PredId:
    module: str
    name: str
    arity: int

    def __str__(self):
        return f"{self.module}:{self.name}/{self.arity}"

    @property
    def indicator(self) -> Indicator:
        return (self.name, self.arity)


_INDICATOR_RE = re.compile(r"(?:(?P<mod>[^:\s]+):)?(?P<name>[^:/\s]+)/(?P<arity>\d+)\Z")


def parse_indicator(text: str) -> tuple[Optional[str], str, int]:
    """Parse `[module:]name/arity`; returns (module|None, name, arity)."""
    m = _INDICATOR_RE.match(text.strip())
    if not m:
        raise ManifestError(f"bad predicate indicator: {text!r}")
    return m.group("mod"), m.group("name"), int(m.group("arity"))


@dataclass
class ImportEntry:
    source: str                      # module name as resolved
    indicators: Optional[list[Indicator]]  # None = whole-module import
    item_index: int                  # index of the use_module directive
    file: str


@dataclass
class ModuleDef:
    name: str
    path: str
    exports: list[Indicator] = field(default_factory=list)
    imports: list[ImportEntry] = field(default_factory=list)
    directive_index: Optional[int] = None  # module/2 directive item index


@dataclass
class PredDef:
    pred: PredId
    clauses: list[Clause] = field(default_factory=list)
    file: str = ""
    item_indexes: list[int] = field(default_factory=list)


@dataclass
class Manifest:
    path: str
    files: list[str]
    roots: list[str]
    meta: dict[Indicator, tuple[int, ...]]

    @property
    def root_dir(self) -> str:
        return os.path.dirname(os.path.abspath(self.path))


def parse_manifest(path: str) -> Manifest:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return parse_manifest_text(raw, path)


def parse_manifest_text(raw: str, path: str) -> Manifest:
    """Line-based manifest: bracketed section headers, `#` comments."""
    files: list[str] = []
    roots: list[str] = []
    meta: dict[Indicator, tuple[int, ...]] = {}
    section = None
    for lineno, line in enumerate(raw.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("files", "roots", "meta"):
                raise ManifestError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if section == "files":
            files.append(line)
        elif section == "roots":
            roots.append(line)
        elif section == "meta":
            parts = line.split()
            _, name, arity = parse_indicator(parts[0])
            try:
                positions = tuple(int(p) for p in parts[1:])
            except ValueError as exc:
                raise ManifestError(f"{path}:{lineno}: bad meta positions") from exc
            if not positions:
                raise ManifestError(f"{path}:{lineno}: meta entry needs positions")
            meta[(name, arity)] = positions
        else:
            raise ManifestError(f"{path}:{lineno}: entry outside any section")
    return Manifest(path=path, files=files, roots=roots, meta=meta)


@dataclass(frozen=True)
class Resolution:
    kind: str                       # pred | builtin | control | unresolved
    pred: Optional[PredId] = None
    via_import: Optional[tuple[str, int]] = None  # (module, import entry idx)

    @property
    def is_pred(self) -> bool:
        return self.kind == "pred"


BUILTIN = Resolution("builtin")
CONTROL = Resolution("control")
UNRESOLVED = Resolution("unresolved")


@dataclass
class Program:
    manifest: Manifest
    files: dict[str, ParsedFile]
    file_order: list[str]
    modules: dict[str, ModuleDef]
    module_order: list[str]
    predicates: dict[PredId, PredDef]
    roots: set[PredId]
    meta: dict[Indicator, tuple[int, ...]]
    warnings: list[str] = field(default_factory=list)
    version: int = 1
    optable: OperatorTable = field(default_factory=OperatorTable.iso)

    def abspath(self, file: str) -> str:
        return os.path.join(self.manifest.root_dir, file)

    def module_of_file(self, file: str) -> str:
        for mod in self.module_order:
            if self.modules[mod].path == file:
                return mod
        return "user"

    def defined(self, module: str, name: str, arity: int) -> bool:
        return PredId(module, name, arity) in self.predicates

    def find_predicate(self, name: str, arity: int,
                       module: Optional[str] = None) -> list[PredId]:
        if module is not None:
            pid = PredId(module, name, arity)
            return [pid] if pid in self.predicates else []
        return sorted(p for p in self.predicates
                      if p.name == name and p.arity == arity)

    def pred_file(self, pred: PredId) -> str:
        return self.predicates[pred].file

    # -- goal iteration ------------------------------------------------------

    def iter_clauses(self) -> Iterator[tuple[PredId, int, Clause]]:
        for pid in sorted(self.predicates):
            for i, clause in enumerate(self.predicates[pid].clauses):
                yield pid, i, clause

    def iter_goals(self) -> Iterator[tuple[PredId, int, Clause, Goal]]:
        """All leaf goals of every clause, including nested control branches."""
        for pid, i, clause in self.iter_clauses():
            for goal in leaf_goals(clause.body):
                yield pid, i, clause, goal

    def resolve(self, module: str, goal: Term) -> Resolution:
        return resolve(self, module, goal)

    def call_targets(self, module: str, goal: Term) -> list[tuple[Resolution, Term, bool]]:
        """Resolutions contributed by one goal: itself plus meta arguments.

        The third element flags entries that come from meta-argument
        positions (closures passed to call/1..8, findall/3, ...).
        """
        out = []
        res = resolve(self, module, goal)
        out.append((res, goal, False))
        if isinstance(goal, Compound):
            name, arity = _functor(goal)
            positions = self.meta.get((name, arity))
            if positions:
                for pos in positions:
                    if pos <= arity:
                        inner = _strip_caret(goal.args[pos - 1])
                        extension = arity - pos if name == "call" else 0
                        inner_res = _resolve_meta_arg(self, module, inner, extension)
                        out.append((inner_res, inner, True))
        return out


def _functor(term: Term) -> Indicator:
    if isinstance(term, Atom):
        return (term.name, 0)
    assert isinstance(term, Compound)
    return (term.name, term.arity)


def _strip_caret(term: Term) -> Term:
    while isinstance(term, Compound) and term.name == "^" and term.arity == 2:
        term = term.args[1]
    return term


def _resolve_meta_arg(program: Program, module: str, goal: Term,
                      extension: int) -> Resolution:
    if not isinstance(goal, (Atom, Compound)):
        return UNRESOLVED
    name, arity = _functor(goal)
    arity += extension
    probe: Term
    if arity == 0:
        probe = Atom(name)
    else:
        probe = Compound(name, tuple(Var("_") for _ in range(arity)))
    return resolve(program, module, probe)


def resolve(program: Program, module: str, goal: Term) -> Resolution:
    """Resolve a body goal to a defined predicate, builtin, or neither.

    Explicit `M:G` resolves into M; otherwise local definitions win over
    imports (first matching entry in file order), then the builtin table.
    """
    if isinstance(goal, Var):
        return UNRESOLVED
    if not isinstance(goal, (Atom, Compound)):
        return UNRESOLVED
    name, arity = _functor(goal)

    if (name, arity) == (":", 2):
        qual, inner = goal.args
        if isinstance(qual, Atom) and isinstance(inner, (Atom, Compound)):
            iname, iarity = _functor(inner)
            pid = PredId(qual.name, iname, iarity)
            if pid in program.predicates:
                return Resolution("pred", pid)
            if builtins.is_builtin(iname, iarity):
                return BUILTIN
            return UNRESOLVED
        return UNRESOLVED

    if builtins.is_control(name, arity):
        return CONTROL

    local = PredId(module, name, arity)
    if local in program.predicates:
        return Resolution("pred", local)

    moddef = program.modules.get(module)
    if moddef is not None:
        for idx, entry in enumerate(moddef.imports):
            source = program.modules.get(entry.source)
            if entry.indicators is not None:
                if (name, arity) not in entry.indicators:
                    continue
            else:
                if source is None or (name, arity) not in source.exports:
                    continue
            pid = PredId(entry.source, name, arity)
            if pid in program.predicates:
                return Resolution("pred", pid, via_import=(module, idx))
            return UNRESOLVED

    if builtins.is_builtin(name, arity):
        return BUILTIN
    return UNRESOLVED


# --- loading -----------------------------------------------------------------

def load_project(manifest: str | Manifest, version: int = 1) -> Program:
    """Parse every file in the manifest and build the program model.

    Undefined calls and unknown imports are collected as warnings, not
    errors; duplicate module names are fatal.
    """
    if isinstance(manifest, str):
        manifest = parse_manifest(manifest)
    root = manifest.root_dir

    files: dict[str, ParsedFile] = {}
    for rel in manifest.files:
        path = os.path.join(root, rel)
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ManifestError(f"cannot read source file {rel}: {exc}") from exc
        try:
            files[rel] = parse_program(text, path=rel)
        except PlrefError as exc:
            raise ParseError(rel, exc) from exc

    program = build_program(manifest, files, version=version)
    return program


def build_program(manifest: Manifest, files: dict[str, ParsedFile],
                  version: int = 1) -> Program:
    warnings: list[str] = []
    modules: dict[str, ModuleDef] = {}
    module_order: list[str] = []
    file_module: dict[str, str] = {}

    for rel in manifest.files:
        pf = files[rel]
        modname, directive_index, exports = _module_header(pf)
        if modname is None:
            modname = "user"
        if modname in modules and modname != "user":
            raise DuplicateModuleName(
                f"module {modname} defined in both {modules[modname].path} and {rel}")
        if modname not in modules:
            modules[modname] = ModuleDef(name=modname, path=rel,
                                         exports=exports,
                                         directive_index=directive_index)
            module_order.append(modname)
        else:
            modules[modname].exports.extend(exports)
        file_module[rel] = modname

    # use_module directives -> import entries
    for rel in manifest.files:
        pf = files[rel]
        modname = file_module[rel]
        for idx, item in enumerate(pf.items):
            if not isinstance(item, Directive):
                continue
            entry = _import_entry(item.term, idx, rel)
            if entry is not None:
                modules[modname].imports.append(entry)

    # predicate table
    predicates: dict[PredId, PredDef] = {}
    for rel in manifest.files:
        pf = files[rel]
        modname = file_module[rel]
        for idx, item in enumerate(pf.items):
            if not isinstance(item, ClauseItem):
                continue
            head = item.clause.head
            name, arity = _functor(head)
            pid = PredId(modname, name, arity)
            pdef = predicates.setdefault(pid, PredDef(pred=pid, file=rel))
            if pdef.file != rel:
                warnings.append(
                    f"warning: clauses of {pid} span files {pdef.file} and {rel}")
            pdef.clauses.append(item.clause)
            pdef.item_indexes.append(idx)

    meta = dict(builtins.DEFAULT_META)
    meta.update(manifest.meta)

    program = Program(
        manifest=manifest,
        files=files,
        file_order=list(manifest.files),
        modules=modules,
        module_order=module_order,
        predicates=predicates,
        roots=set(),
        meta=meta,
        warnings=warnings,
        version=version,
    )

    # roots: explicit entries, else every export of every module
    roots: set[PredId] = set()
    if manifest.roots:
        for entry in manifest.roots:
            mod, name, arity = parse_indicator(entry)
            matches = program.find_predicate(name, arity, module=mod)
            if not matches:
                warnings.append(f"warning: root {entry} is not defined")
            roots.update(matches)
    else:
        for modname in module_order:
            for name, arity in modules[modname].exports:
                pid = PredId(modname, name, arity)
                if pid in predicates:
                    roots.add(pid)
    program.roots = roots

    _collect_warnings(program)
    return program


def _module_header(pf: ParsedFile) -> tuple[Optional[str], Optional[int], list[Indicator]]:
    for idx, item in enumerate(pf.items):
        if isinstance(item, ClauseItem):
            break
        term = item.term
        if isinstance(term, Compound) and term.name == "module" and term.arity == 2:
            name_term, exports_term = term.args
            if isinstance(name_term, Atom):
                return name_term.name, idx, _indicator_list(exports_term)
    return None, None, []


def _indicator_list(term: Term) -> list[Indicator]:
    out = []
    while isinstance(term, Compound) and term.name == "." and term.arity == 2:
        head, term = term.args
        ind = _as_indicator(head)
        if ind is not None:
            out.append(ind)
    return out


def _as_indicator(term: Term) -> Optional[Indicator]:
    if isinstance(term, Compound) and term.name == "/" and term.arity == 2:
        name, arity = term.args
        if isinstance(name, Atom) and isinstance(arity, Int):
            return (name.name, arity.value)
    return None


def _import_entry(term: Term, item_index: int, file: str) -> Optional[ImportEntry]:
    if not (isinstance(term, Compound) and term.name == "use_module"):
        return None
    if term.arity == 1:
        return ImportEntry(source=_module_ref(term.args[0]),
                           indicators=None, item_index=item_index, file=file)
    if term.arity == 2:
        return ImportEntry(source=_module_ref(term.args[0]),
                           indicators=_indicator_list(term.args[1]),
                           item_index=item_index, file=file)
    return None


def _module_ref(term: Term) -> str:
    """Module name from a use_module argument (atom, path atom, library(..))."""
    if isinstance(term, Compound) and term.name == "library" and term.arity == 1:
        term = term.args[0]
    if isinstance(term, Atom):
        base = term.name.rsplit("/", 1)[-1]
        return base[:-3] if base.endswith(".pl") else base
    return "?"


def _collect_warnings(program: Program):
    for modname in program.module_order:
        moddef = program.modules[modname]
        for name, arity in moddef.exports:
            if PredId(modname, name, arity) not in program.predicates:
                program.warnings.append(
                    f"warning: {modname} exports undefined {name}/{arity}")
        for entry in moddef.imports:
            source = program.modules.get(entry.source)
            if source is None:
                program.warnings.append(
                    f"warning: {modname} imports from unknown module {entry.source}")
            elif entry.indicators is not None:
                for name, arity in entry.indicators:
                    if (name, arity) not in source.exports:
                        program.warnings.append(
                            f"warning: {modname} imports {name}/{arity} "
                            f"not exported by {entry.source}")

    seen_ambiguous: set[tuple[str, Indicator]] = set()
    for modname in program.module_order:
        moddef = program.modules[modname]
        offered: dict[Indicator, list[str]] = {}
        for entry in moddef.imports:
            inds = entry.indicators
            if inds is None:
                source = program.modules.get(entry.source)
                inds = list(source.exports) if source else []
            for ind in inds:
                offered.setdefault(ind, []).append(entry.source)
        for ind, sources in offered.items():
            if len(set(sources)) > 1 and (modname, ind) not in seen_ambiguous:
                seen_ambiguous.add((modname, ind))
                program.warnings.append(
                    f"warning: {modname} imports {ind[0]}/{ind[1]} from "
                    f"multiple modules ({', '.join(dict.fromkeys(sources))}); "
                    f"first declaration wins")

    for pid, _, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            for res, term, is_meta in program.call_targets(pid.module, goal.term):
                if res.kind != "unresolved":
                    continue
                if is_meta:
                    program.warnings.append(
                        f"warning: unresolved-meta argument in {pid}")
                elif isinstance(term, (Atom, Compound)):
                    name, arity = _functor(term)
                    program.warnings.append(
                        f"warning: undefined call {name}/{arity} in {pid}")
                else:
                    program.warnings.append(
                        f"warning: call through variable in {pid}")
