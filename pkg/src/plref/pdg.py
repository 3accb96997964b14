"""Predicate dependency graph, SCC condensation and strata.

Edges run caller -> callee over resolved body goals (meta arguments
included); builtins are excluded from the node set.  Strata are the
longest-path levels of the acyclic condensation, callees below callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import PredId, Program
from .terms import leaf_goals


@dataclass
class Condensation:
    sccs: list[frozenset[PredId]]          # ordered by (stratum, least member)
    scc_of: dict[PredId, int]              # node -> scc index
    edges: set[tuple[int, int]]            # caller scc -> callee scc (no loops)
    strata: list[int]                      # stratum per scc index

    def stratum_of(self, pred: PredId) -> int:
        return self.strata[self.scc_of[pred]]


@dataclass
class Pdg:
    nodes: set[PredId]
    edges: set[tuple[PredId, PredId]]
    _condensation: Optional[Condensation] = field(default=None, repr=False)

    def successors(self, node: PredId) -> set[PredId]:
        return {b for a, b in self.edges if a == node}

    def predecessors(self, node: PredId) -> set[PredId]:
        return {a for a, b in self.edges if b == node}

    def adjacency(self) -> dict[PredId, list[PredId]]:
        adj: dict[PredId, list[PredId]] = {n: [] for n in self.nodes}
        for a, b in sorted(self.edges):
            adj[a].append(b)
        return adj

    def reachable_from(self, starts: set[PredId]) -> set[PredId]:
        adj = self.adjacency()
        seen = set()
        stack = [s for s in sorted(starts) if s in adj]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(adj[node])
        return seen


def build_pdg(program: Program) -> Pdg:
    nodes = set(program.predicates)
    edges: set[tuple[PredId, PredId]] = set()
    for pid, _, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            for res, _, _ in program.call_targets(pid.module, goal.term):
                if res.is_pred:
                    edges.add((pid, res.pred))
    return Pdg(nodes=nodes, edges=edges)


def condensation(pdg: Pdg) -> Condensation:
    """Tarjan SCC partition plus longest-path strata, deterministically ordered."""
    if pdg._condensation is not None:
        return pdg._condensation

    adj = pdg.adjacency()
    order = sorted(pdg.nodes)
    index: dict[PredId, int] = {}
    lowlink: dict[PredId, int] = {}
    on_stack: set[PredId] = set()
    stack: list[PredId] = []
    counter = [0]
    sccs: list[frozenset[PredId]] = []

    def strongconnect(root: PredId):
        # Iterative Tarjan: (node, iterator state) frames.
        work = [(root, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                index[node] = lowlink[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            succs = adj[node]
            while pi < len(succs):
                succ = succs[pi]
                pi += 1
                if succ not in index:
                    work[-1] = (node, pi)
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            work.pop()
            if lowlink[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                sccs.append(frozenset(comp))
            if work:
                parent, _ = work[-1]
                lowlink[parent] = min(lowlink[parent], lowlink[node])

    for node in order:
        if node not in index:
            strongconnect(node)

    scc_of = {n: i for i, comp in enumerate(sccs) for n in comp}
    cedges = {(scc_of[a], scc_of[b]) for a, b in pdg.edges
              if scc_of[a] != scc_of[b]}

    # Tarjan emits callees before callers, so successors are already done.
    strata = [0] * len(sccs)
    for i, _ in enumerate(sccs):
        succ_strata = [strata[j] for (a, j) in cedges if a == i]
        strata[i] = 1 + max(succ_strata) if succ_strata else 0

    # Re-order deterministically by (stratum, least member).
    perm = sorted(range(len(sccs)), key=lambda i: (strata[i], min(sccs[i])))
    renumber = {old: new for new, old in enumerate(perm)}
    result = Condensation(
        sccs=[sccs[i] for i in perm],
        scc_of={n: renumber[i] for n, i in scc_of.items()},
        edges={(renumber[a], renumber[b]) for a, b in cedges},
        strata=[strata[i] for i in perm],
    )
    pdg._condensation = result
    return result
