"""Mapping from suggestions and wire-format transform requests to EditSets.

Shared by the CLI (`plref apply <id>`) and the HTTP service so both produce
byte-identical previews.
"""

from __future__ import annotations

from typing import Optional

from . import transforms
from .analysis import ArgPos, Suggestion, all_suggestions
from .editset import EditSet
from .errors import PlrefError, TransformError
from .model import PredId, Program, parse_indicator


class BadRequest(PlrefError):
    pass


def _pred(text: str) -> PredId:
    module, name, arity = parse_indicator(text)
    return PredId(module or "user", name, arity)


def find_suggestion(program: Program, suggestion_id: str) -> Optional[Suggestion]:
    for s in all_suggestions(program):
        if s.id == suggestion_id:
            return s
    return None


def suggestion_editset(program: Program, suggestion: Suggestion,
                       params: dict) -> EditSet:
    """Build the edit set a suggestion proposes; params supply the user
    decisions some kinds require (a name, a member to keep, a test)."""
    kind = suggestion.kind
    payload = suggestion.payload
    if kind == "dead-code":
        return transforms.remove_dead(program, [_pred(suggestion.target)])
    if kind == "hideable-export":
        module, ind = suggestion.target.split(":", 1)
        name, arity = ind.rsplit("/", 1)
        return transforms.hide_predicates(program,
                                          [(module, (name, int(arity)))])
    if kind == "unused-import":
        return transforms.remove_unused_import(
            program, suggestion.module, payload["source"],
            payload["indicator"])
    if kind == "duplicate-group":
        keep = params.get("keep")
        extract_to = params.get("extract_to")
        members = [_pred(m) for m in payload["members"]]
        if keep:
            return transforms.remove_duplicates(program, members,
                                                keep=_pred(keep))
        if extract_to:
            return transforms.remove_duplicates(
                program, members,
                extract_to=(extract_to["module"], extract_to["file"]))
        raise BadRequest("duplicate-group needs 'keep' or 'extract_to'")
    if kind == "common-sequence":
        name = params.get("name")
        if not name:
            raise BadRequest("common-sequence needs 'name'")
        occurrences = [(o["file"], (o["start"], o["end"]))
                       for o in payload["occurrences"]]
        return transforms.extract_predicate(program, occurrences, name,
                                            target_module=suggestion.module)
    if kind == "redundant-args":
        pred = _pred(suggestion.target)
        return transforms.remove_arguments(
            program, {ArgPos(pred, i) for i in payload["positions"]})
    if kind == "cut-replaceable":
        if not payload.get("eligible", False):
            raise TransformError(
                "this cut needs manual pre-normalization (not a 2-clause "
                "neck cut)")
        return transforms.replace_cut_by_ite(program, _pred(suggestion.target))
    if kind == "unification-as-test":
        return transforms.unification_to_test(
            program, suggestion.file, suggestion.span,
            params.get("test", "=="))
    if kind == "invertible-ite":
        return transforms.invert_ite(program, suggestion.file, suggestion.span)
    if kind == "output-before-commit":
        return transforms.output_after_commit(
            program, _pred(suggestion.target), payload["positions"])
    raise BadRequest(f"suggestion kind {kind} has no automatic application")


def transform_editset(program: Program, name: str, params: dict) -> EditSet:
    """Run a transform from wire-format parameters (service POST bodies)."""
    try:
        return _transform_editset(program, name, params)
    except KeyError as exc:
        raise BadRequest(f"missing parameter {exc.args[0]!r}") from exc


def _transform_editset(program: Program, name: str, params: dict) -> EditSet:
    if name == "extract":
        occurrences = [(o["file"], (o["start"], o["end"]))
                       for o in params["occurrences"]]
        return transforms.extract_predicate(
            program, occurrences, params["name"],
            target_module=params.get("module", "user"))
    if name == "hide":
        targets = []
        for t in params["targets"]:
            module, pname, arity = parse_indicator(t)
            targets.append((module or "user", (pname, arity)))
        return transforms.hide_predicates(program, targets,
                                          override=params.get("override", False))
    if name == "rm-dead":
        return transforms.remove_dead(
            program, [_pred(t) for t in params["targets"]],
            override=params.get("override", False))
    if name == "rm-dup":
        members = [_pred(m) for m in params["members"]]
        if "keep" in params:
            return transforms.remove_duplicates(program, members,
                                                keep=_pred(params["keep"]))
        extract_to = params["extract_to"]
        return transforms.remove_duplicates(
            program, members,
            extract_to=(extract_to["module"], extract_to["file"]))
    if name == "rm-args":
        positions = {ArgPos(_pred(p["pred"]), p["index"])
                     for p in params["positions"]}
        return transforms.remove_arguments(
            program, positions, override=params.get("override", False))
    if name == "rename-pred":
        return transforms.rename_predicate(program, _pred(params["pred"]),
                                           params["new_name"])
    if name == "rename-functor":
        _, fname, arity = parse_indicator(params["functor"])
        spans = None
        if params.get("occurrences"):
            spans = [(o["file"], (o["start"], o["end"]))
                     for o in params["occurrences"]]
        return transforms.rename_functor(program, fname, arity,
                                         params["new_name"],
                                         occurrence_spans=spans)
    if name == "rename-module":
        return transforms.rename_module(program, params["module"],
                                        params["new_name"],
                                        rename_file=params.get("rename_file"))
    if name == "merge":
        return transforms.merge_modules(program, params["modules"],
                                        params["new_name"], params["file"])
    if name == "split":
        partition = {}
        for ind, side in params["partition"].items():
            _, pname, arity = parse_indicator(ind)
            partition[(pname, arity)] = side
        return transforms.split_module(
            program, params["module"], partition,
            names=tuple(params["names"]), files=tuple(params["files"]))
    if name == "move":
        return transforms.move_predicate(program, _pred(params["pred"]),
                                         params["target_module"])
    if name == "add-arg":
        return transforms.add_argument(
            program, _pred(params["caller"]), _pred(params["callee"]),
            params["variable"], insert_position=params.get("position"))
    if name == "reorder":
        return transforms.reorder_arguments(program, _pred(params["pred"]),
                                            list(params["permutation"]))
    if name == "cut2ite":
        return transforms.replace_cut_by_ite(program, _pred(params["pred"]))
    if name == "invert-ite":
        return transforms.invert_ite(program, params["file"],
                                     tuple(params["span"]))
    if name == "unif2test":
        return transforms.unification_to_test(program, params["file"],
                                              tuple(params["span"]),
                                              params.get("test", "=="))
    if name == "output-after-commit":
        return transforms.output_after_commit(program, _pred(params["pred"]),
                                              list(params["positions"]))
    raise BadRequest(f"unknown transform {name!r}")
