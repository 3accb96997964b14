"""plref command line: analyses with text/JSON reports, transforms with a
preview/confirm workflow, the reference interpreter, and the local service.

Exit codes: 0 success, 1 refactoring error, 2 usage error, 3 conflicts or
stale snapshot (including refusing to confirm without a terminal).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import transforms
from .analysis import (
    ArgPos,
    all_suggestions,
    clause_smells,
    dead_predicates,
    duplicate_groups,
    far,
)
from .editset import EditSet, apply as apply_edits, check, unified_diff
from .errors import (
    ConflictError,
    ManifestError,
    ParseError,
    PlrefError,
    TransformError,
)
from .model import PredId, Program, load_project, parse_indicator
from .oracle import Limits, Query, solve
from .parser import parse_term

EXIT_OK = 0
EXIT_REFACTOR = 1
EXIT_USAGE = 2
EXIT_CONFLICT = 3


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


class _CliUsage(Exception):
    pass


def _pred_arg(text: str) -> PredId:
    module, name, arity = parse_indicator(text)
    return PredId(module or "user", name, arity)


def _span_arg(text: str) -> tuple[str, tuple[int, int]]:
    try:
        file, rest = text.rsplit(":", 1)
        start, end = rest.split("-", 1)
        return file, (int(start), int(end))
    except ValueError as exc:
        raise _CliUsage(f"bad span {text!r}; expected file:start-end") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise _CliUsage(f"bad integer list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plref",
        description="Refactoring toolkit for ISO-style Prolog projects")
    parser.add_argument("-m", "--manifest",
                        default=os.environ.get("PLREF_MANIFEST"),
                        help="project manifest (or set PLREF_MANIFEST)")
    parser.add_argument("--format", choices=("text", "json", "diff"),
                        default="text")
    parser.add_argument("--yes", action="store_true",
                        help="apply without interactive confirmation")
    parser.add_argument("--dry-run", action="store_true",
                        help="preview only; never write files")
    parser.add_argument("--accept-semantics-change", action="store_true",
                        help="confirm transforms whose flag is not preserving")
    parser.add_argument("--no-color", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("check", help="report every suggestion")
    sub.add_parser("dead", help="predicates unreachable from the roots")
    sub.add_parser("dup", help="duplicate predicate groups")
    sub.add_parser("far", help="erasable argument positions")
    sub.add_parser("imports", help="unused import entries")
    sub.add_parser("smells", help="clause-level suggestions")

    p = sub.add_parser("apply", help="apply a suggestion by id")
    p.add_argument("suggestion_id")
    p.add_argument("--name", help="new predicate name (common-sequence)")
    p.add_argument("--keep", help="member to keep (duplicate-group)")
    p.add_argument("--test", choices=("==", "=:="), default="==")

    p = sub.add_parser("extract", help="extract goal runs into a predicate")
    p.add_argument("name")
    p.add_argument("occurrence", nargs="+", help="file:start-end")
    p.add_argument("--module", default="user")

    p = sub.add_parser("hide", help="remove export entries")
    p.add_argument("target", nargs="+", help="module:name/arity")
    p.add_argument("--override", action="store_true")

    p = sub.add_parser("rm-dead", help="delete dead predicates")
    p.add_argument("target", nargs="*", help="module:name/arity")
    p.add_argument("--all", action="store_true", dest="all_dead")
    p.add_argument("--override", action="store_true")

    p = sub.add_parser("rm-dup", help="remove a duplicate group")
    p.add_argument("member", help="any member, module:name/arity")
    p.add_argument("--keep", help="member to keep")
    p.add_argument("--extract-to", dest="extract_to",
                   help="newmodule:newfile.pl")

    p = sub.add_parser("rm-args", help="drop erasable argument positions")
    p.add_argument("pred", nargs="?", help="module:name/arity")
    p.add_argument("--positions", help="comma-separated 1-based positions")
    p.add_argument("--all", action="store_true", dest="all_marked")
    p.add_argument("--override", action="store_true")

    p = sub.add_parser("rename-pred")
    p.add_argument("pred", help="module:name/arity")
    p.add_argument("new_name")

    p = sub.add_parser("rename-functor")
    p.add_argument("functor", help="name/arity")
    p.add_argument("new_name")
    p.add_argument("--at", nargs="*", help="restrict to file:start-end spans")

    p = sub.add_parser("rename-module")
    p.add_argument("module")
    p.add_argument("new_name")
    p.add_argument("--rename-file")

    p = sub.add_parser("merge")
    p.add_argument("modules", nargs="+")
    p.add_argument("--name", required=True)
    p.add_argument("--file", required=True)

    p = sub.add_parser("split")
    p.add_argument("module")
    p.add_argument("--side-b", required=True,
                   help="comma-separated name/arity moved to the second half")
    p.add_argument("--names", required=True, help="nameA,nameB")
    p.add_argument("--files", required=True, help="fileA,fileB")

    p = sub.add_parser("move")
    p.add_argument("pred", help="module:name/arity")
    p.add_argument("target_module")

    p = sub.add_parser("add-arg")
    p.add_argument("caller", help="module:name/arity")
    p.add_argument("callee", help="module:name/arity")
    p.add_argument("variable")
    p.add_argument("--position", type=int)

    p = sub.add_parser("reorder")
    p.add_argument("pred", help="module:name/arity")
    p.add_argument("permutation", help="e.g. 2,1,3")

    p = sub.add_parser("cut2ite")
    p.add_argument("pred", help="module:name/arity")

    p = sub.add_parser("invert-ite")
    p.add_argument("at", help="file:start-end")

    p = sub.add_parser("unif2test")
    p.add_argument("at", help="file:start-end")
    p.add_argument("--test", choices=("==", "=:="), default="==")

    p = sub.add_parser("output-after-commit")
    p.add_argument("pred", help="module:name/arity")
    p.add_argument("--positions", required=True)

    p = sub.add_parser("oracle")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    q = oracle_sub.add_parser("run")
    q.add_argument("query", help="goal, optionally written ?- Goal.")
    q.add_argument("--module", default="user")
    q.add_argument("--max-steps", type=int, default=100_000)
    q.add_argument("--max-answers", type=int, default=32)

    p = sub.add_parser("serve")
    p.add_argument("--port", type=int, default=7171)

    return parser


ANALYSIS_COMMANDS = {"check", "dead", "dup", "far", "imports", "smells"}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        return _dispatch(args)
    except _CliUsage as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (ManifestError, ParseError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ConflictError as exc:
        for conflict in exc.conflicts:
            _err(f"conflict: {conflict}")
        return EXIT_CONFLICT
    except PlrefError as exc:
        _err(f"{exc.name}: {exc}")
        return EXIT_REFACTOR


def _load(args) -> Program:
    if not args.manifest:
        raise _CliUsage("no manifest given; use -m or set PLREF_MANIFEST")
    return load_project(args.manifest)


def _dispatch(args) -> int:
    if args.command == "serve":
        from .service import serve
        program = _load(args)
        serve(program, port=args.port)
        return EXIT_OK

    if args.command == "oracle":
        return _run_oracle(args)

    program = _load(args)
    if args.command in ANALYSIS_COMMANDS:
        return _run_analysis(args, program)
    editset = _run_transform(args, program)
    return _preview_and_apply(args, program, editset)


def _run_oracle(args) -> int:
    program = _load(args)
    text = args.query.strip()
    term = parse_term(text)
    from .terms import Compound
    if isinstance(term, Compound) and term.name == "?-" and term.arity == 1:
        term = term.args[0]
    outcome = solve(program, Query(term, module=args.module),
                    limits=Limits(args.max_steps, args.max_answers))
    from .render import render_term
    if args.format == "json":
        print(json.dumps({
            "answers": [{k: render_term(v) for k, v in a.items()}
                        for a in outcome.answers],
            "terminal": outcome.terminal,
            "error": outcome.error_kind,
        }, indent=2))
    else:
        for i, answer in enumerate(outcome.answers, 1):
            if answer:
                bindings = ", ".join(f"{k} = {render_term(v)}"
                                     for k, v in sorted(answer.items()))
            else:
                bindings = "true"
            print(f"answer {i}: {bindings}")
        print(f"terminal: {outcome.terminal}"
              + (f" ({outcome.error_kind})" if outcome.error_kind else ""))
    return EXIT_OK


def _run_analysis(args, program: Program) -> int:
    if args.command == "check":
        suggestions = all_suggestions(program)
    elif args.command == "dead":
        suggestions = [s for s in all_suggestions(program)
                       if s.kind == "dead-code"]
    elif args.command == "dup":
        suggestions = [s for s in all_suggestions(program)
                       if s.kind == "duplicate-group"]
    elif args.command == "far":
        suggestions = [s for s in all_suggestions(program)
                       if s.kind == "redundant-args"]
    elif args.command == "imports":
        suggestions = [s for s in all_suggestions(program)
                       if s.kind == "unused-import"]
    else:
        suggestions = clause_smells(program)

    if args.format == "json":
        print(json.dumps([s.to_json() for s in suggestions], indent=2))
    else:
        if not suggestions:
            print("no suggestions")
        for s in suggestions:
            span = f"{s.file}:{s.span[0]}-{s.span[1]}" if s.span else s.file
            print(f"{s.id}  {s.kind:<22} {s.target:<36} {span}")
            print(f"{'':14}{s.explanation}")
    for warning in program.warnings:
        print(warning, file=sys.stderr)
    return EXIT_OK


def _run_transform(args, program: Program) -> EditSet:
    cmd = args.command
    if cmd == "apply":
        from .dispatch import find_suggestion, suggestion_editset
        suggestion = find_suggestion(program, args.suggestion_id)
        if suggestion is None:
            raise _CliUsage(f"no suggestion with id {args.suggestion_id}")
        params = {"name": args.name, "keep": args.keep, "test": args.test}
        return suggestion_editset(program, suggestion,
                                  {k: v for k, v in params.items() if v})
    if cmd == "extract":
        occurrences = [_span_arg(o) for o in args.occurrence]
        return transforms.extract_predicate(program, occurrences, args.name,
                                            target_module=args.module)
    if cmd == "hide":
        targets = []
        for t in args.target:
            module, name, arity = parse_indicator(t)
            targets.append((module or "user", (name, arity)))
        return transforms.hide_predicates(program, targets,
                                          override=args.override)
    if cmd == "rm-dead":
        if args.all_dead:
            targets = sorted(dead_predicates(program))
        else:
            targets = [_pred_arg(t) for t in args.target]
            if not targets:
                raise _CliUsage("rm-dead needs targets or --all")
        return transforms.remove_dead(program, targets,
                                      override=args.override)
    if cmd == "rm-dup":
        member = _pred_arg(args.member)
        group = next((g for g in duplicate_groups(program) if member in g),
                     None)
        if group is None:
            raise TransformError(f"{member} is not in any duplicate group")
        if args.extract_to:
            module, file = args.extract_to.split(":", 1)
            return transforms.remove_duplicates(program, group,
                                                extract_to=(module, file))
        if not args.keep:
            raise _CliUsage("rm-dup needs --keep or --extract-to")
        return transforms.remove_duplicates(program, group,
                                            keep=_pred_arg(args.keep))
    if cmd == "rm-args":
        marked = far(program)
        if args.all_marked:
            positions = set(marked)
        else:
            if not args.pred:
                raise _CliUsage("rm-args needs a predicate or --all")
            pred = _pred_arg(args.pred)
            if args.positions:
                positions = {ArgPos(pred, i)
                             for i in _int_list(args.positions)}
            else:
                positions = {p for p in marked if p.pred == pred}
        return transforms.remove_arguments(program, positions,
                                           override=args.override)
    if cmd == "rename-pred":
        return transforms.rename_predicate(program, _pred_arg(args.pred),
                                           args.new_name)
    if cmd == "rename-functor":
        _, name, arity = parse_indicator(args.functor)
        spans = [_span_arg(a) for a in args.at] if args.at else None
        return transforms.rename_functor(program, name, arity, args.new_name,
                                         occurrence_spans=spans)
    if cmd == "rename-module":
        return transforms.rename_module(program, args.module, args.new_name,
                                        rename_file=args.rename_file)
    if cmd == "merge":
        return transforms.merge_modules(program, args.modules, args.name,
                                        args.file)
    if cmd == "split":
        names = tuple(args.names.split(","))
        files = tuple(args.files.split(","))
        if len(names) != 2 or len(files) != 2:
            raise _CliUsage("split needs --names nameA,nameB and "
                            "--files fileA,fileB")
        side_b = set()
        for ind in args.side_b.split(","):
            _, name, arity = parse_indicator(ind)
            side_b.add((name, arity))
        partition = {}
        for pid in program.predicates:
            if pid.module == args.module:
                partition[pid.indicator] = (
                    "b" if pid.indicator in side_b else "a")
        return transforms.split_module(program, args.module, partition,
                                       names=names, files=files)
    if cmd == "move":
        return transforms.move_predicate(program, _pred_arg(args.pred),
                                         args.target_module)
    if cmd == "add-arg":
        return transforms.add_argument(program, _pred_arg(args.caller),
                                       _pred_arg(args.callee), args.variable,
                                       insert_position=args.position)
    if cmd == "reorder":
        return transforms.reorder_arguments(program, _pred_arg(args.pred),
                                            _int_list(args.permutation))
    if cmd == "cut2ite":
        return transforms.replace_cut_by_ite(program, _pred_arg(args.pred))
    if cmd == "invert-ite":
        file, span = _span_arg(args.at)
        return transforms.invert_ite(program, file, span)
    if cmd == "unif2test":
        file, span = _span_arg(args.at)
        return transforms.unification_to_test(program, file, span, args.test)
    if cmd == "output-after-commit":
        return transforms.output_after_commit(program, _pred_arg(args.pred),
                                              _int_list(args.positions))
    raise _CliUsage(f"unknown command {cmd}")


def _use_color(args) -> bool:
    return (not args.no_color and "NO_COLOR" not in os.environ
            and sys.stdout.isatty())


def _print_diff(diff: str, color: bool):
    if not color:
        sys.stdout.write(diff)
        return
    for line in diff.splitlines(keepends=True):
        if line.startswith("+") and not line.startswith("+++"):
            sys.stdout.write(f"\x1b[32m{line}\x1b[0m")
        elif line.startswith("-") and not line.startswith("---"):
            sys.stdout.write(f"\x1b[31m{line}\x1b[0m")
        else:
            sys.stdout.write(line)


def _preview_and_apply(args, program: Program, editset: EditSet) -> int:
    if editset.empty:
        print("no changes")
        return EXIT_OK

    conflicts = check(editset, program)
    if conflicts:
        for conflict in conflicts:
            _err(f"conflict: {conflict}")
        return EXIT_CONFLICT

    if args.format == "json":
        print(json.dumps(editset.to_json(), indent=2))
    else:
        _print_diff(unified_diff(editset, program), _use_color(args))
    for note in editset.annotations:
        print(f"note: {note}", file=sys.stderr)

    if args.dry_run:
        return EXIT_OK

    if editset.semantics_flag != "preserving" \
            and not args.accept_semantics_change:
        _err(f"this transform is flagged '{editset.semantics_flag}'; "
             f"re-run with --accept-semantics-change to proceed")
        return EXIT_REFACTOR

    if not args.yes:
        if not sys.stdin.isatty():
            _err("refusing to write without --yes on a non-interactive run")
            return EXIT_CONFLICT
        answer = input("apply these changes? [y/N] ").strip().lower()
        if answer != "y":
            print("rejected")
            return EXIT_OK

    report = apply_edits(editset, program)
    print(f"applied; {len(report.files_written)} file(s) written, "
          f"backups in {report.backup_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
