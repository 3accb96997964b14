"""Program analyses: refactoring opportunity detection.

Each analysis reads an immutable Program snapshot and returns plain data;
all_suggestions() wraps the results as Suggestion records with stable ids
and a deterministic order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import NoRootsConfigured
from .model import Indicator, PredId, Program
from .pdg import build_pdg, condensation
from .render import render_term
from .terms import (
    Atom,
    Clause,
    Compound,
    Conj,
    Cut,
    Disj,
    Goal,
    GoalTree,
    IfThenElse,
    Naf,
    Span,
    Term,
    Var,
    clause_variant,
    conjunction_list,
    goal_count,
    goal_term,
    leaf_goals,
    term_vars,
    variant,
    walk_goals,
)


@dataclass(frozen=True)
class ArgPos:
    pred: PredId
    index: int  # 1-based

    def __str__(self):
        return f"{self.pred}#{self.index}"


@dataclass
class Suggestion:
    id: str
    kind: str
    module: str
    target: str
    file: str
    span: Optional[Span]
    explanation: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        start, end = self.span if self.span else (0, 0)
        return {
            "id": self.id,
            "kind": self.kind,
            "module": self.module,
            "target": self.target,
            "span": {"file": self.file, "start": start, "end": end},
            "explanation": self.explanation,
            "payload": self.payload,
        }


def _suggestion_id(kind: str, *key_parts) -> str:
    blob = json.dumps([kind, *key_parts], sort_keys=True, default=str)
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


# --- dead code ----------------------------------------------------------------

def dead_predicates(program: Program) -> set[PredId]:
    """Defined predicates unreachable from the configured roots in the PDG."""
    if not program.roots:
        raise NoRootsConfigured("no top-level predicates configured")
    pdg = build_pdg(program)
    reachable = pdg.reachable_from(program.roots)
    return set(pdg.nodes) - reachable


# --- import/export hygiene ------------------------------------------------------

@dataclass(frozen=True)
class UnusedImport:
    module: str
    source: str
    indicator: Optional[Indicator]  # None = entire use_module is unused
    item_index: int
    file: str


def unused_imports(program: Program) -> list[UnusedImport]:
    """Import entries never resolved-to by any goal of the importing module.

    Liveness of the calling predicate is irrelevant here on purpose: a dead
    caller still counts as a use (dead code removal is a separate concern).
    """
    used: dict[tuple[str, int], set[Indicator]] = {}
    for pid, _, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            for res, term, _ in program.call_targets(pid.module, goal.term):
                if res.is_pred and res.via_import is not None:
                    key = res.via_import
                    used.setdefault(key, set()).add(res.pred.indicator)
    out = []
    for modname in program.module_order:
        moddef = program.modules[modname]
        for idx, entry in enumerate(moddef.imports):
            used_here = used.get((modname, idx), set())
            if entry.indicators is None:
                if not used_here:
                    out.append(UnusedImport(modname, entry.source, None,
                                            entry.item_index, entry.file))
                continue
            for ind in entry.indicators:
                if ind not in used_here:
                    out.append(UnusedImport(modname, entry.source, ind,
                                            entry.item_index, entry.file))
    return out


def hideable_exports(program: Program) -> list[tuple[str, Indicator]]:
    """Exports no other module imports or calls module-qualified; roots excluded."""
    explicit: set[tuple[str, Indicator]] = set()
    whole: set[tuple[str, str]] = set()  # (importer, source)
    for modname in program.module_order:
        for entry in program.modules[modname].imports:
            if entry.indicators is None:
                whole.add((modname, entry.source))
            else:
                for ind in entry.indicators:
                    explicit.add((entry.source, ind))

    qualified: set[tuple[str, Indicator]] = set()
    for pid, _, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            term = goal.term
            if isinstance(term, Compound) and term.name == ":" and term.arity == 2:
                qual, inner = term.args
                if isinstance(qual, Atom) and isinstance(inner, (Atom, Compound)):
                    arity = inner.arity if isinstance(inner, Compound) else 0
                    if pid.module != qual.name:
                        qualified.add((qual.name, (inner.name, arity)))

    out = []
    for modname in program.module_order:
        moddef = program.modules[modname]
        imported_whole = any(imp == modname and importer != modname
                             for importer, imp in whole)
        for ind in moddef.exports:
            pid = PredId(modname, ind[0], ind[1])
            if pid in program.roots:
                continue
            if imported_whole:
                continue
            if (modname, ind) in explicit:
                continue
            if (modname, ind) in qualified:
                continue
            out.append((modname, ind))
    return out


# --- duplicate predicate groups ---------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def same(self, a, b) -> bool:
        return self.find(a) == self.find(b)


def duplicate_groups(program: Program) -> list[list[PredId]]:
    """Groups of same-name/arity predicates in different modules whose SCCs are
    structurally identical up to variable renaming, matched stratum by stratum
    upwards; lower-stratum dependencies must already be duplicates or shared.
    """
    pdg = build_pdg(program)
    cond = condensation(pdg)
    uf = _UnionFind()

    strata_levels = sorted(set(cond.strata))
    for level in strata_levels:
        sccs = [cond.sccs[i] for i in range(len(cond.sccs))
                if cond.strata[i] == level]
        buckets: dict[tuple, list[frozenset[PredId]]] = {}
        for scc in sccs:
            sig = tuple(sorted((p.name, p.arity) for p in scc))
            buckets.setdefault(sig, []).append(scc)
        for sig, group in buckets.items():
            if len(set(sig)) != len(sig):
                continue  # ambiguous bijection inside the SCC; skip
            group = sorted(group, key=min)
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    if _scc_match(program, group[i], group[j], uf):
                        for a in group[i]:
                            b = _counterpart(a, group[j])
                            uf.union(a, b)

    classes: dict[PredId, list[PredId]] = {}
    for pred in uf.parent:
        classes.setdefault(uf.find(pred), []).append(pred)
    groups = [sorted(members) for members in classes.values() if len(members) > 1]
    return sorted(groups, key=lambda g: g[0])


def _counterpart(pred: PredId, scc: frozenset[PredId]) -> Optional[PredId]:
    for cand in scc:
        if cand.indicator == pred.indicator:
            return cand
    return None


def _scc_match(program: Program, a: frozenset[PredId], b: frozenset[PredId],
               uf: _UnionFind) -> bool:
    if a == b:
        return False
    bijection = {}
    for pred in a:
        other = _counterpart(pred, b)
        if other is None or other == pred:
            return False
        bijection[pred] = other
    for pred, other in bijection.items():
        if not _defs_match(program, pred, other, bijection, uf):
            return False
    return True


def _defs_match(program: Program, a: PredId, b: PredId,
                bijection: dict, uf: _UnionFind) -> bool:
    ca = program.predicates[a].clauses
    cb = program.predicates[b].clauses
    if len(ca) != len(cb):
        return False
    for clause_a, clause_b in zip(ca, cb):
        if clause_variant(clause_a, clause_b) is None:
            return False
        goals_a = list(leaf_goals(clause_a.body))
        goals_b = list(leaf_goals(clause_b.body))
        if len(goals_a) != len(goals_b):
            return False
        for ga, gb in zip(goals_a, goals_b):
            targets_a = program.call_targets(a.module, ga.term)
            targets_b = program.call_targets(b.module, gb.term)
            if len(targets_a) != len(targets_b):
                return False
            for (ra, _, _), (rb, _, _) in zip(targets_a, targets_b):
                if ra.kind != rb.kind:
                    return False
                if ra.is_pred:
                    pa, pb = ra.pred, rb.pred
                    if pa == pb:
                        continue
                    if bijection.get(pa) == pb:
                        continue
                    if uf.same(pa, pb):
                        continue
                    return False
    return True


# --- common body subsequences -----------------------------------------------------

@dataclass(frozen=True)
class Occurrence:
    file: str
    pred: PredId
    clause_index: int
    start: int   # goal index within its conjunction run
    span: Span   # source span covering the goal run


@dataclass
class SequenceCandidate:
    goals: tuple[Term, ...]       # from the first occurrence
    occurrences: list[Occurrence]
    params: list[str]             # variable names from the first occurrence

    @property
    def length(self) -> int:
        return len(self.goals)

    def key(self) -> str:
        return _canonical_goals(self.goals)


def _canonical_goals(goals: tuple[Term, ...]) -> str:
    mapping: dict = {}

    def canon(term: Term) -> str:
        if isinstance(term, Var):
            k = term.key()
            if k not in mapping:
                mapping[k] = f"V{len(mapping)}"
            return mapping[k]
        if isinstance(term, Atom):
            return f"a({term.name})"
        if isinstance(term, Compound):
            inner = ",".join(canon(x) for x in term.args)
            return f"c({term.name}/{term.arity},{inner})"
        return repr(term)

    return ";".join(canon(g) for g in goals)


def _conjunction_runs(body: GoalTree) -> list[list[Goal]]:
    """Maximal runs of plain goals at conjunction level; control nodes and
    cuts break runs, and branches are scanned as their own chains."""
    runs: list[list[Goal]] = []

    def visit_chain(tree: GoalTree):
        current: list[Goal] = []
        for node in conjunction_list(tree):
            if isinstance(node, Goal):
                current.append(node)
                continue
            if current:
                runs.append(current)
                current = []
            if isinstance(node, IfThenElse):
                visit_chain(node.cond)
                visit_chain(node.then)
                if not node.implicit_else:
                    visit_chain(node.orelse)
            elif isinstance(node, Disj):
                visit_chain(node.left)
                visit_chain(node.right)
            elif isinstance(node, Naf):
                visit_chain(node.inner)
        if current:
            runs.append(current)

    visit_chain(body)
    return runs


def common_sequences(program: Program, min_len: int = 2,
                     min_occ: int = 2) -> list[SequenceCandidate]:
    """Repeated goal subsequences, equal up to consistent variable renaming."""
    if min_len < 2 or min_occ < 2:
        raise ValueError("min_len and min_occ must be at least 2")

    windows: dict[str, list[tuple[Occurrence, tuple[Term, ...], Clause]]] = {}
    for pid, ci, clause in program.iter_clauses():
        file = program.predicates[pid].file
        for run in _conjunction_runs(clause.body):
            n = len(run)
            for length in range(min_len, n + 1):
                for start in range(0, n - length + 1):
                    chunk = run[start:start + length]
                    terms = tuple(g.term for g in chunk)
                    key = _canonical_goals(terms)
                    span = (chunk[0].term.span[0], chunk[-1].term.span[1])
                    occ = Occurrence(file, pid, ci, start, span)
                    windows.setdefault(key, []).append((occ, terms, clause))

    candidates: list[SequenceCandidate] = []
    for key, occs in windows.items():
        # skip overlapping repeats of the same sequence within one clause
        kept: list[tuple[Occurrence, tuple[Term, ...], Clause]] = []
        for occ, terms, clause in occs:
            clash = any(o.pred == occ.pred and o.clause_index == occ.clause_index
                        and not (occ.span[1] <= o.span[0] or o.span[1] <= occ.span[0])
                        for o, _, _ in kept)
            if not clash:
                kept.append((occ, terms, clause))
        if len(kept) < min_occ:
            continue
        first_occ, first_terms, first_clause = kept[0]
        params = _sequence_params(first_terms, first_clause)
        candidates.append(SequenceCandidate(
            goals=first_terms,
            occurrences=[o for o, _, _ in kept],
            params=params,
        ))

    candidates = _drop_subwindows(candidates)
    candidates.sort(key=lambda c: (c.occurrences[0].file,
                                   c.occurrences[0].span[0], -c.length))
    return candidates


def _sequence_params(goals: tuple[Term, ...], clause: Clause) -> list[str]:
    """Variables of the sequence also used outside it, in order of first
    occurrence inside the sequence."""
    inside: list[str] = []
    inside_keys = set()
    for g in goals:
        for v in term_vars(g):
            if not v.is_anonymous and v.key() not in inside_keys:
                inside_keys.add(v.key())
                inside.append(v.name)

    goal_ids = {id(g) for g in goals}
    outside_keys = set()
    for v in term_vars(clause.head):
        outside_keys.add(v.key())
    for leaf in leaf_goals(clause.body):
        if id(leaf.term) in goal_ids:
            continue
        for v in term_vars(leaf.term):
            outside_keys.add(v.key())

    return [name for name in inside if name in outside_keys]


def _drop_subwindows(candidates: list[SequenceCandidate]) -> list[SequenceCandidate]:
    def contained(c: SequenceCandidate, d: SequenceCandidate) -> bool:
        if c.length >= d.length or len(c.occurrences) != len(d.occurrences):
            return False
        for occ in c.occurrences:
            if not any(o.pred == occ.pred and o.clause_index == occ.clause_index
                       and o.span[0] <= occ.span[0] and occ.span[1] <= o.span[1]
                       for o in d.occurrences):
                return False
        return True

    return [c for c in candidates
            if not any(contained(c, d) for d in candidates if d is not c)]


# --- redundant argument filtering (bottom-up, goal-independent) --------------------

def far(program: Program) -> set[ArgPos]:
    """Greatest fixpoint of erasable argument positions.

    A position stays erasable only if, in every clause, the head argument is
    a variable occurring once in the head whose body occurrences all sit as
    whole arguments of defined predicates at positions still erasable.
    Root predicates keep their interface; meta-closure targets are excluded
    wholesale.
    """
    erasable: set[ArgPos] = set()
    for pid, pdef in program.predicates.items():
        if pid in program.roots:
            continue
        for i in range(1, pid.arity + 1):
            erasable.add(ArgPos(pid, i))

    # Conservative: a predicate passed as a meta argument keeps all positions.
    for pid, _, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            for res, _, is_meta in program.call_targets(pid.module, goal.term):
                if is_meta and res.is_pred:
                    for i in range(1, res.pred.arity + 1):
                        erasable.discard(ArgPos(res.pred, i))

    changed = True
    while changed:
        changed = False
        for pos in sorted(erasable, key=lambda p: (p.pred, p.index)):
            if not _position_erasable(program, pos, erasable):
                erasable.discard(pos)
                changed = True
    return erasable


def _position_erasable(program: Program, pos: ArgPos,
                       erasable: set[ArgPos]) -> bool:
    pdef = program.predicates[pos.pred]
    for clause in pdef.clauses:
        head_args = clause.head.args if isinstance(clause.head, Compound) else ()
        arg = head_args[pos.index - 1]
        if not isinstance(arg, Var):
            return False
        key = arg.key()
        head_count = sum(1 for v in term_vars(clause.head) if v.key() == key)
        if head_count != 1:
            return False
        if not _body_occurrences_erasable(program, pos.pred.module, clause,
                                          key, erasable):
            return False
    return True


def _body_occurrences_erasable(program: Program, module: str, clause: Clause,
                               key, erasable: set[ArgPos]) -> bool:
    for goal in leaf_goals(clause.body):
        term = goal.term
        if not isinstance(term, Compound):
            continue
        res = program.resolve(module, term)
        for j, arg in enumerate(term.args, start=1):
            if isinstance(arg, Var) and arg.key() == key:
                if not res.is_pred:
                    return False
                if ArgPos(res.pred, j) not in erasable:
                    return False
            else:
                if any(v.key() == key for v in term_vars(arg)):
                    return False  # nested occurrence
    return True


# --- clause-level smells -------------------------------------------------------------

def clause_smells(program: Program) -> list[Suggestion]:
    out: list[Suggestion] = []
    out.extend(_cut_replaceable(program))
    out.extend(_output_before_commit(program))
    out.extend(_unification_as_test(program))
    out.extend(_invertible_ite(program))
    return out


def _top_level_cut_index(body: GoalTree) -> Optional[int]:
    goals = conjunction_list(body)
    for i, g in enumerate(goals):
        if isinstance(g, Cut):
            return i
    return None


def _count_cuts(body: GoalTree) -> int:
    return sum(1 for n in walk_goals(body) if isinstance(n, Cut))


def _cut_replaceable(program: Program) -> list[Suggestion]:
    out = []
    for pid in sorted(program.predicates):
        pdef = program.predicates[pid]
        clauses = pdef.clauses
        if len(clauses) < 2:
            continue
        first = clauses[0]
        if _top_level_cut_index(first.body) is None:
            continue
        if _count_cuts(first.body) != 1:
            continue
        if any(_count_cuts(c.body) > 0 for c in clauses[1:]):
            continue
        eligible = len(clauses) == 2
        explanation = (f"{pid.name}/{pid.arity} commits with a neck-level cut; "
                       f"an if-then-else makes the choice explicit")
        out.append(Suggestion(
            id=_suggestion_id("cut-replaceable", str(pid)),
            kind="cut-replaceable",
            module=pid.module,
            target=str(pid),
            file=pdef.file,
            span=first.span,
            explanation=explanation,
            payload={"eligible": eligible, "clause_count": len(clauses)},
        ))
    return out


def _call_sites(program: Program, target: PredId):
    """(caller, clause, goal) triples for every direct resolved call."""
    sites = []
    for pid, ci, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            res = program.resolve(pid.module, goal.term)
            if res.is_pred and res.pred == target:
                sites.append((pid, clause, goal))
    return sites


def _fresh_at_call(clause: Clause, goal: Goal, var: Var) -> bool:
    """True when the variable's first body occurrence is the call itself."""
    for leaf in leaf_goals(clause.body):
        if leaf is goal:
            return True
        if any(v.key() == var.key() for v in term_vars(leaf.term)):
            return False
    return True


def _output_before_commit(program: Program) -> list[Suggestion]:
    out = []
    for pid in sorted(program.predicates):
        pdef = program.predicates[pid]
        if pid.arity == 0:
            continue
        cut_clauses = [(i, c) for i, c in enumerate(pdef.clauses)
                       if _top_level_cut_index(c.body) is not None]
        if not cut_clauses:
            continue
        sites = _call_sites(program, pid)
        if not sites:
            continue
        positions: list[int] = []
        for i in range(1, pid.arity + 1):
            if not any(_head_arg_is_output_literal(c, i) for _, c in cut_clauses):
                continue
            ok = True
            for _, clause, goal in sites:
                actual = goal.term.args[i - 1] if isinstance(goal.term, Compound) \
                    else None
                if not isinstance(actual, Var) or actual.is_anonymous:
                    ok = False
                    break
                if not _fresh_at_call(clause, goal, actual):
                    ok = False
                    break
            if ok:
                positions.append(i)
        if positions:
            first = cut_clauses[0][1]
            out.append(Suggestion(
                id=_suggestion_id("output-before-commit", str(pid), positions),
                kind="output-before-commit",
                module=pid.module,
                target=str(pid),
                file=pdef.file,
                span=first.span,
                explanation=(f"{pid.name}/{pid.arity} binds output positions "
                             f"{positions} in the head before its cut commits"),
                payload={"positions": positions,
                         "clauses": [i for i, _ in cut_clauses]},
            ))
    return out


def _head_arg_is_output_literal(clause: Clause, index: int) -> bool:
    head = clause.head
    if not isinstance(head, Compound) or index > head.arity:
        return False
    arg = head.args[index - 1]
    if not isinstance(arg, Var):
        return True
    occurrences = sum(1 for v in term_vars(head) if v.key() == arg.key())
    return occurrences > 1


def _unification_as_test(program: Program) -> list[Suggestion]:
    out = []
    for pid, ci, clause in sorted_clauses(program):
        head_keys = {v.key() for v in term_vars(clause.head)}
        suspects: list[Goal] = []
        for node in walk_goals(clause.body):
            if isinstance(node, IfThenElse):
                for g in conjunction_list(node.cond):
                    if isinstance(g, Goal):
                        suspects.append(g)
        goals = conjunction_list(clause.body)
        cut_at = _top_level_cut_index(clause.body)
        if cut_at is not None:
            for g in goals[:cut_at]:
                if isinstance(g, Goal):
                    suspects.append(g)
        seen_spans = set()
        for g in suspects:
            term = g.term
            if not (isinstance(term, Compound) and term.name == "="
                    and term.arity == 2):
                continue
            if term.span in seen_spans:
                continue
            involved = [v for side in term.args for v in term_vars(side)]
            if not any(v.key() in head_keys for v in involved):
                continue
            seen_spans.add(term.span)
            pdef = program.predicates[pid]
            out.append(Suggestion(
                id=_suggestion_id("unification-as-test", str(pid), ci,
                                  render_term(term)),
                kind="unification-as-test",
                module=pid.module,
                target=str(pid),
                file=pdef.file,
                span=term.span,
                explanation=(f"`{render_term(term)}` guards a commit but binds; "
                             f"an equality test conveys the intended mode"),
                payload={"clause_index": ci, "goal": render_term(term)},
            ))
    return out


def _invertible_ite(program: Program) -> list[Suggestion]:
    out = []
    for pid, ci, clause in sorted_clauses(program):
        for node in walk_goals(clause.body):
            if not isinstance(node, IfThenElse) or node.implicit_else:
                continue
            reasons = []
            if isinstance(node.cond, Naf):
                reasons.append("negated-condition")
            if goal_count(node.then) > goal_count(node.orelse):
                reasons.append("longer-then")
            if not reasons:
                continue
            pdef = program.predicates[pid]
            out.append(Suggestion(
                id=_suggestion_id("invertible-ite", str(pid), ci, node.span),
                kind="invertible-ite",
                module=pid.module,
                target=str(pid),
                file=pdef.file,
                span=node.span,
                explanation=("inverting this if-then-else puts the shorter "
                             "branch first" if "longer-then" in reasons else
                             "inverting this if-then-else removes the negation"),
                payload={"clause_index": ci, "reasons": reasons},
            ))
    return out


def sorted_clauses(program: Program):
    for pid in sorted(program.predicates):
        for ci, clause in enumerate(program.predicates[pid].clauses):
            yield pid, ci, clause


# --- aggregate -----------------------------------------------------------------------

def all_suggestions(program: Program) -> list[Suggestion]:
    """Every analysis result as Suggestion records, deterministically ordered."""
    out: list[Suggestion] = []

    try:
        dead = dead_predicates(program)
    except NoRootsConfigured:
        dead = set()
    for pid in sorted(dead):
        pdef = program.predicates[pid]
        out.append(Suggestion(
            id=_suggestion_id("dead-code", str(pid)),
            kind="dead-code",
            module=pid.module,
            target=str(pid),
            file=pdef.file,
            span=pdef.clauses[0].span if pdef.clauses else None,
            explanation=f"{pid.name}/{pid.arity} is unreachable from the "
                        f"configured top-level predicates",
            payload={},
        ))

    for group in duplicate_groups(program):
        first = program.predicates[group[0]]
        out.append(Suggestion(
            id=_suggestion_id("duplicate-group", [str(p) for p in group]),
            kind="duplicate-group",
            module=group[0].module,
            target=", ".join(str(p) for p in group),
            file=first.file,
            span=first.clauses[0].span if first.clauses else None,
            explanation=f"{len(group)} structurally identical definitions of "
                        f"{group[0].name}/{group[0].arity} across modules",
            payload={"members": [str(p) for p in group]},
        ))

    for cand in common_sequences(program):
        first = cand.occurrences[0]
        out.append(Suggestion(
            id=_suggestion_id("common-sequence", cand.key(),
                              len(cand.occurrences)),
            kind="common-sequence",
            module=first.pred.module,
            target=f"{len(cand.occurrences)} occurrences of a "
                   f"{cand.length}-goal sequence",
            file=first.file,
            span=first.span,
            explanation="this goal sequence repeats; extracting it into a "
                        "predicate shares one copy",
            payload={
                "params": cand.params,
                "goals": [render_term(g) for g in cand.goals],
                "occurrences": [
                    {"file": o.file, "pred": str(o.pred),
                     "clause_index": o.clause_index,
                     "start": o.span[0], "end": o.span[1]}
                    for o in cand.occurrences
                ],
            },
        ))

    far_by_pred: dict[PredId, list[int]] = {}
    for pos in far(program):
        far_by_pred.setdefault(pos.pred, []).append(pos.index)
    for pid in sorted(far_by_pred):
        pdef = program.predicates[pid]
        positions = sorted(far_by_pred[pid])
        out.append(Suggestion(
            id=_suggestion_id("redundant-args", str(pid), positions),
            kind="redundant-args",
            module=pid.module,
            target=str(pid),
            file=pdef.file,
            span=pdef.clauses[0].head_span if pdef.clauses else None,
            explanation=f"argument positions {positions} of "
                        f"{pid.name}/{pid.arity} are never used",
            payload={"positions": positions},
        ))

    for unused in unused_imports(program):
        pf = program.files[unused.file]
        span = pf.items[unused.item_index].span
        ind = "all" if unused.indicator is None else \
            f"{unused.indicator[0]}/{unused.indicator[1]}"
        out.append(Suggestion(
            id=_suggestion_id("unused-import", unused.module, unused.source, ind),
            kind="unused-import",
            module=unused.module,
            target=f"{unused.source}:{ind}",
            file=unused.file,
            span=span,
            explanation=f"{unused.module} imports {ind} from {unused.source} "
                        f"but never calls it",
            payload={"source": unused.source, "indicator": ind,
                     "item_index": unused.item_index},
        ))

    for modname, ind in hideable_exports(program):
        moddef = program.modules[modname]
        span = None
        if moddef.directive_index is not None:
            span = program.files[moddef.path].items[moddef.directive_index].span
        out.append(Suggestion(
            id=_suggestion_id("hideable-export", modname, ind),
            kind="hideable-export",
            module=modname,
            target=f"{modname}:{ind[0]}/{ind[1]}",
            file=moddef.path,
            span=span,
            explanation=f"no other module imports {ind[0]}/{ind[1]}; the "
                        f"export can be hidden",
            payload={"indicator": f"{ind[0]}/{ind[1]}"},
        ))

    out.extend(clause_smells(program))

    out.sort(key=lambda s: (s.kind, s.file, s.span or (0, 0), s.target))
    return out
