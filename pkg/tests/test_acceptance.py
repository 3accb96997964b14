"""Acceptance criteria, one test per criterion.

Each test prints `ACCEPTANCE <name>: PASS` when its criterion holds at the
stated tolerance; run with `pytest tests/test_acceptance.py -v -s`.
"""

import hashlib
import os
import random
import time

import pytest

from plref.analysis import (
    ArgPos,
    all_suggestions,
    common_sequences,
    dead_predicates,
    duplicate_groups,
    far,
)
from plref.editset import Edit, EditSet, apply as apply_edits, preview_program
from plref.lexer import reconstruct, tokenize
from plref.model import PredId, load_project, resolve
from plref.oracle import Limits, equivalent, solve
from plref.parser import parse_program
from plref.pdg import build_pdg, condensation
from plref.render import render_clause, render_directive
from plref.terms import ClauseItem, Directive, clause_variant, leaf_goals
from plref.transforms import (
    extract_predicate,
    hide_predicates,
    invert_ite,
    merge_modules,
    move_predicate,
    output_after_commit,
    remove_arguments,
    remove_dead,
    remove_duplicates,
    rename_functor,
    rename_module,
    rename_predicate,
    reorder_arguments,
    replace_cut_by_ite,
    split_module,
    unification_to_test,
)
from tests.conftest import READER_SOURCE, write_project

U = lambda n, a: PredId("user", n, a)

ORACLE_LIMITS = Limits(max_steps=100_000, max_answers=32)


def _pass(name):
    print(f"\nACCEPTANCE {name}: PASS")


# =============================================================================
# Criterion: reader pipeline golden test
# =============================================================================

PAPER_FINAL_LISTING = """\
reader_init(File,Stream,State) :-
        open(File,read,Stream),
        reader_next_state(Stream,State).

reader_next(reader(Term,Stream,Pos),Term,State) :-
        set_stream_position(Stream,Pos),
        reader_next_state(Stream,State).

reader_done(end_of_file).

reader_next_state(Stream,State) :-
        read(Stream,Term),
        build_reader_state(Term,Stream,State).

build_reader_state(Term,Stream,State) :-
        ( Term == end_of_file ->
                State = end_of_file
        ;
                State = reader(Term,Stream,Position),
                get_stream_position(Stream,Position)
        ).

set_stream_position(Stream,Position) :-
        stream_position(Stream,_,Position).

get_stream_position(Stream,Position) :-
        stream_position(Stream,Position).
"""


def _programs_structurally_equal(got, want):
    """Same predicates, clause-by-clause variant equality (parse level,
    whitespace and variable spelling free)."""
    by_pred = {}
    for item in want.items:
        clause = item.clause
        head = clause.head
        key = (head.name, getattr(head, "arity", 0))
        by_pred.setdefault(key, []).append(clause)
    got_preds = {}
    for pid, pdef in got.predicates.items():
        got_preds[(pid.name, pid.arity)] = pdef.clauses
    assert set(got_preds) == set(by_pred), (
        f"predicates differ: {sorted(set(got_preds) ^ set(by_pred))}")
    for key, want_clauses in by_pred.items():
        got_clauses = got_preds[key]
        assert len(got_clauses) == len(want_clauses), key
        for g, w in zip(got_clauses, want_clauses):
            assert clause_variant(g, w) is not None, (
                f"{key}: clause differs\n got: {render_clause(g)}\n "
                f"want: {render_clause(w)}")


def test_reader_pipeline_golden(tmp_path):
    started = time.monotonic()
    manifest = write_project(
        tmp_path, {"reader.pl": READER_SOURCE},
        roots=["make_reader/3", "reader_done/1", "reader_next/3"])
    program = load_project(manifest)

    def apply_step(editset):
        nonlocal program
        apply_edits(editset, program)
        program = load_project(manifest, version=program.version + 1)

    # 1. produce output after commit on the original cut clause
    apply_step(output_after_commit(program, U("reader_code", 3), [3]))
    # 2. replace the cut by if-then-else
    apply_step(replace_cut_by_ite(program, U("reader_code", 3)))
    # 3. the unification guarding the commit becomes an equality test
    text = program.files["reader.pl"].text
    at = text.index("Term = end_of_file")
    apply_step(unification_to_test(program, "reader.pl",
                                   (at, at + len("Term = end_of_file")), "=="))
    # 4. extract the common read/2 + reader_code/3 sequence
    cands = common_sequences(program)
    assert len(cands) == 1 and cands[0].params == ["Stream", "State"]
    occurrences = [(o.file, o.span) for o in cands[0].occurrences]
    apply_step(extract_predicate(program, occurrences, "read_next_state"))
    # 5. input argument first
    apply_step(reorder_arguments(program, U("reader_next", 3), [2, 1, 3]))
    # 6..8. consistent naming
    apply_step(rename_predicate(program, U("make_reader", 3), "reader_init"))
    apply_step(rename_predicate(program, U("read_next_state", 2),
                                "reader_next_state"))
    apply_step(rename_predicate(program, U("reader_code", 3),
                                "build_reader_state"))
    # 9. the read/3 data term stops shadowing the read/2 builtin
    apply_step(rename_functor(program, "read", 3, "reader"))
    # 10/11. builtins cannot be renamed: wrap them instead
    clause = program.predicates[U("reader_next", 3)].clauses[0]
    goal3 = next(g for g in leaf_goals(clause.body)
                 if getattr(g.term, "name", "") == "stream_position")
    apply_step(extract_predicate(program, [("reader.pl", goal3.term.span)],
                                 "set_stream_position"))
    clause = program.predicates[U("build_reader_state", 3)].clauses[0]
    goal2 = next(g for g in leaf_goals(clause.body)
                 if getattr(g.term, "name", "") == "stream_position")
    apply_step(extract_predicate(program, [("reader.pl", goal2.term.span)],
                                 "get_stream_position"))

    want = parse_program(PAPER_FINAL_LISTING)
    _programs_structurally_equal(program, want)

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"pipeline took {elapsed:.2f}s"
    _pass("reader-pipeline-golden")


# =============================================================================
# Criterion: cut -> if-then-else golden (GoalTree level)
# =============================================================================

PAPER_ITE_LISTING = """\
reader_code(Term,Stream,State) :-
        ( Term = end_of_file,
          State = end_of_file ->
                true
        ;
                State = read(Term,Stream,Position),
                stream_position(Stream,Position)
        ).
"""


def test_cut_to_ite_golden(tmp_path):
    manifest = write_project(
        tmp_path, {"reader.pl": READER_SOURCE},
        roots=["make_reader/3", "reader_done/1", "reader_next/3"])
    program = load_project(manifest)
    editset = replace_cut_by_ite(program, U("reader_code", 3))
    after = preview_program(editset, program)
    got = after.predicates[U("reader_code", 3)].clauses
    want = parse_program(PAPER_ITE_LISTING).items[0].clause
    assert len(got) == 1
    assert got[0].head == want.head
    assert got[0].body == want.body
    _pass("cut-to-ite-golden")


# =============================================================================
# Criterion: oracle preservation across the catalogue
# =============================================================================

def _fixtures_for_preservation():
    """(name, files, roots, transform builder, queries) tuples.

    Every fixture is <= 60 clauses and carries >= 10 queries; every
    transform used here is flagged preserving.
    """
    fixtures = []

    def cut2ite_fixture(name, src, pred, queries):
        fixtures.append((name, {"m.pl": src}, None,
                         lambda p: replace_cut_by_ite(p, pred), queries))

    cut2ite_fixture(
        "cut2ite-two-facts",
        "p(a) :- !.\np(b).\nwrap(X) :- p(X).\n",
        U("p", 1),
        ["p(a)", "p(b)", "p(c)", "p(X)", "wrap(a)", "wrap(b)", "wrap(c)",
         "wrap(X)", "p(d)", "wrap(Z), Z = a"])

    cut2ite_fixture(
        "cut2ite-guard",
        ("classify(N, R) :- check(N, R).\n"
         "check(0, zero) :- !.\n"
         "check(N, pos) :- N > 0.\n"),
        U("check", 2),
        ["classify(0, R)", "classify(1, R)", "classify(7, R)",
         "classify(0, zero)", "classify(0, pos)", "classify(2, pos)",
         "classify(3, zero)", "check(0, R)", "check(9, R)", "check(0, X)"])

    cut2ite_fixture(
        "cut2ite-max",
        ("maxof(X, Y, X) :- X >= Y, !.\n"
         "maxof(_, Y, Y).\n"
         "biggest(A, B, M) :- maxof(A, B, M).\n"),
        U("maxof", 3),
        ["maxof(3, 2, M)", "maxof(2, 3, M)", "maxof(2, 2, M)",
         "maxof(3, 2, 3)", "maxof(3, 2, 2)", "biggest(1, 9, M)",
         "biggest(9, 1, M)", "biggest(4, 4, M)", "maxof(0, 5, M)",
         "maxof(5, 0, M)"])

    cut2ite_fixture(
        "cut2ite-member-guard",
        ("lookup(K, [K-V|_], V) :- !.\n"
         "lookup(K, [_|T], V) :- lookup(K, T, V).\n"
         "fetch(K, V) :- lookup(K, [a-1, b-2, c-3], V).\n"),
        U("lookup", 3),
        ["fetch(a, V)", "fetch(b, V)", "fetch(c, V)", "fetch(d, V)",
         "fetch(a, 1)", "fetch(a, 2)", "lookup(x, [x-9], V)",
         "lookup(x, [], V)", "lookup(b, [a-1, b-2], V)", "fetch(K, 2)"])

    fixtures.append((
        "extract-shared-steps",
        {"m.pl": ("p(X, Y) :- step(X, T), scale(T, Y).\n"
                  "q(A, B) :- step(A, T), scale(T, B), check(B).\n"
                  "step(N, M) :- M is N + 1.\n"
                  "scale(N, M) :- M is N * 2.\n"
                  "check(N) :- N > 0.\n")},
        None,
        lambda p: extract_predicate(
            p, [(o.file, o.span)
                for o in common_sequences(p)[0].occurrences], "step_scale"),
        ["p(1, Y)", "p(2, Y)", "p(3, Y)", "p(0, Y)", "q(1, B)", "q(2, B)",
         "q(0, B)", "p(1, 4)", "p(1, 5)", "q(5, B)"]))

    fixtures.append((
        "extract-single-wrapper",
        {"m.pl": ("run(X, R) :- prologue(X), compute(X, R).\n"
                  "prologue(X) :- X > 0.\n"
                  "compute(X, R) :- R is X * 10.\n")},
        ["run/2"],
        lambda p: extract_predicate(
            p, [("m.pl", next(leaf_goals(
                p.predicates[U("run", 2)].clauses[0].body)).term.span)],
            "ensure_positive"),
        ["run(1, R)", "run(2, R)", "run(0, R)", "run(5, R)", "run(1, 10)",
         "run(1, 11)", "run(3, R)", "run(4, 40)", "run(9, R)", "run(10, R)"]))

    rename_src = {
        "m1.pl": ":- module(m1, [helper/2]).\nhelper(X, Y) :- Y is X + 1.\n",
        "m2.pl": (":- module(m2, [main/2, twice/2]).\n"
                  ":- use_module(m1, [helper/2]).\n"
                  "main(X, Y) :- helper(X, Y).\n"
                  "twice(X, Y) :- m1:helper(X, T), m1:helper(T, Y).\n"),
    }
    rename_queries = ["main(1, Y)", "main(2, Y)", "main(0, Y)", "twice(1, Y)",
                      "twice(5, Y)", "main(1, 2)", "main(1, 3)",
                      "twice(0, 2)", "twice(0, 3)", "main(9, Y)"]
    fixtures.append((
        "rename-pred-multi-module",
        dict(rename_src), ["m2:main/2", "m2:twice/2"],
        lambda p: rename_predicate(p, PredId("m1", "helper", 2), "succ_of"),
        rename_queries))
    fixtures.append((
        "rename-module",
        dict(rename_src), ["m2:main/2", "m2:twice/2"],
        lambda p: rename_module(p, "m1", "arith_util"),
        rename_queries))

    fixtures.append((
        "rename-functor-internal",
        {"m.pl": ("store(X, R) :- wrap(X, W), unwrap(W, R).\n"
                  "wrap(X, cell(X)).\n"
                  "unwrap(cell(X), X).\n")},
        ["store/2"],
        lambda p: rename_functor(p, "cell", 1, "box"),
        ["store(1, R)", "store(a, R)", "store(f(1), R)", "store(X, 1)",
         "store(1, 1)", "store(1, 2)", "store(b, b)", "store(b, c)",
         "store([], R)", "store(g(a,b), R)"]))

    fixtures.append((
        "reorder-walk",
        {"m.pl": ("run(L, R) :- walk(L, R).\n"
                  "walk([], none).\n"
                  "walk([X|_], found(X)) :- X > 10.\n"
                  "walk([_|T], R) :- walk(T, R).\n")},
        ["run/2"],
        lambda p: reorder_arguments(p, U("walk", 2), [2, 1]),
        ["run([], R)", "run([1], R)", "run([11], R)", "run([1, 20], R)",
         "run([1, 2, 3], R)", "run([30, 40], R)", "run([], none)",
         "run([5], none)", "run([11], found(11))", "run([11], none)"]))

    fixtures.append((
        "hide-export",
        {"m1.pl": (":- module(m1, [api/1, internal/1]).\n"
                   "api(X) :- internal(X).\n"
                   "internal(one).\ninternal(two).\n"),
         "m2.pl": (":- module(m2, [go/1]).\n"
                   ":- use_module(m1, [api/1]).\n"
                   "go(X) :- api(X).\n")},
        ["m2:go/1"],
        lambda p: hide_predicates(p, [("m1", ("internal", 1))]),
        ["go(X)", "go(one)", "go(two)", "go(three)", "api(X)",
         "m1:internal(X)", "m1:api(one)", "go(Z), Z = two", "m1:api(X)",
         "go(one), go(two)"]))

    fixtures.append((
        "remove-dead",
        {"m.pl": ("main(X) :- live(X).\n"
                  "live(a).\nlive(b).\n"
                  "corpse(X) :- fossil(X).\n"
                  "fossil(z).\n")},
        ["main/1"],
        lambda p: remove_dead(p, sorted(dead_predicates(p))),
        ["main(X)", "main(a)", "main(b)", "main(c)", "main(Z), Z = a",
         "live(X)", "live(a)", "live(q)", "main(b), main(a)", "live(b)"]))

    fixtures.append((
        "invert-ite-test",
        {"m.pl": ("grade(N, R) :-\n"
                  "        ( N >= 10 ->\n"
                  "                R = high\n"
                  "        ;\n"
                  "                R = low\n"
                  "        ).\n")},
        ["grade/2"],
        lambda p: invert_ite(p, "m.pl", _first_ite_span(p)),
        ["grade(10, R)", "grade(11, R)", "grade(9, R)", "grade(0, R)",
         "grade(10, high)", "grade(10, low)", "grade(3, low)",
         "grade(3, high)", "grade(100, R)", "grade(-5, R)"]))

    fixtures.append((
        "invert-ite-double-negation",
        {"m.pl": ("state(X, R) :-\n"
                  "        ( \\+ X == off ->\n"
                  "                R = running\n"
                  "        ;\n"
                  "                R = stopped\n"
                  "        ).\n")},
        ["state/2"],
        lambda p: invert_ite(p, "m.pl", _first_ite_span(p)),
        ["state(on, R)", "state(off, R)", "state(X, R)", "state(on, running)",
         "state(off, stopped)", "state(off, running)", "state(idle, R)",
         "state(on, stopped)", "state(0, R)", "state([], R)"]))

    fixtures.append((
        "output-after-commit-fac",
        {"m.pl": ("compute(X, F) :- fac(X, F).\n"
                  "fac(0, 1) :- !.\n"
                  "fac(N, F) :- N > 0, M is N - 1, fac(M, G), F is N * G.\n")},
        ["compute/2"],
        lambda p: output_after_commit(p, U("fac", 2), [2]),
        ["compute(0, F)", "compute(1, F)", "compute(2, F)", "compute(3, F)",
         "compute(4, F)", "compute(0, 1)", "compute(3, 6)", "compute(3, 7)",
         "compute(5, F)", "compute(2, 2)"]))

    dup_files = {
        "m1.pl": (":- module(m1, [evens/1]).\n"
                  "evens(z).\nevens(s(X)) :- odds(X).\n"
                  "odds(s(X)) :- evens(X).\n"),
        "m2.pl": (":- module(m2, [check/1]).\n"
                  "evens(z).\nevens(s(X)) :- odds(X).\n"
                  "odds(s(X)) :- evens(X).\n"
                  "check(X) :- evens(X).\n"),
        "main.pl": (":- module(main, [go/1, go2/1]).\n"
                    ":- use_module(m1, [evens/1]).\n"
                    ":- use_module(m2, [check/1]).\n"
                    "go(X) :- evens(X).\n"
                    "go2(X) :- check(X).\n"),
    }
    dup_queries = ["go(z)", "go(s(z))", "go(s(s(z)))", "go(s(s(s(z))))",
                   "go2(z)", "go2(s(z))", "go2(s(s(z)))", "go(X)",
                   "go2(X)", "go(s(s(s(s(z)))))"]
    fixtures.append((
        "duplicates-keep",
        dict(dup_files), ["main:go/1", "main:go2/1"],
        lambda p: remove_duplicates(
            p, next(g for g in duplicate_groups(p) if g[0].name == "evens"),
            keep=PredId("m1", "evens", 1)),
        dup_queries))

    fixtures.append((
        "merge-modules",
        {"m1.pl": (":- module(m1, [front/1]).\n"
                   ":- use_module(m2, [back/1]).\n"
                   "front(X) :- back(X).\n"),
         "m2.pl": (":- module(m2, [back/1]).\n"
                   "back(ok).\nback(fine).\n"),
         "main.pl": (":- module(main, [go/1]).\n"
                     ":- use_module(m1, [front/1]).\n"
                     "go(X) :- front(X).\n")},
        ["main:go/1"],
        lambda p: merge_modules(p, ["m1", "m2"], "core", "core.pl"),
        ["go(X)", "go(ok)", "go(fine)", "go(nope)", "go(Z), Z = ok",
         "front(X)", "go(ok), go(fine)", "go(A), go(B)", "go(fine)",
         "go(ok), go(nope)"]))

    fixtures.append((
        "split-module",
        {"big.pl": (":- module(big, [outer/1]).\n"
                    "outer(X) :- inner(X).\n"
                    "inner(X) :- base(X).\n"
                    "base(one).\nbase(two).\n"),
         "main.pl": (":- module(main, [go/1]).\n"
                     ":- use_module(big, [outer/1]).\n"
                     "go(X) :- outer(X).\n")},
        ["main:go/1"],
        lambda p: split_module(
            p, "big",
            {("outer", 1): "a", ("inner", 1): "b", ("base", 1): "b"},
            names=("shell", "kernel"), files=("shell.pl", "kernel.pl")),
        ["go(X)", "go(one)", "go(two)", "go(three)", "outer(X)",
         "go(one), go(two)", "go(Z), Z = two", "go(A)", "go(one), go(three)",
         "go(two)"]))

    fixtures.append((
        "move-predicate",
        {"m1.pl": (":- module(m1, [main/1]).\n"
                   ":- use_module(m2, [consume/1]).\n"
                   "main(X) :- helper(X).\n"
                   "helper(X) :- consume(X).\n"),
         "m2.pl": ":- module(m2, [consume/1]).\nconsume(ok).\nconsume(extra).\n"},
        ["m1:main/1"],
        lambda p: move_predicate(p, PredId("m1", "helper", 1), "m2"),
        ["main(X)", "main(ok)", "main(extra)", "main(no)", "helper(X)",
         "main(Z), Z = ok", "main(A), main(B)", "main(ok), main(extra)",
         "m2:consume(X)", "main(extra), main(no)"]))

    fixtures.append((
        "remove-arguments-chain",
        {"m.pl": ("main(X, R) :- p(X, R, unused_seed).\n"
                  "p(X, R, J) :- q(R, J), R is X + 1.\n"
                  "q(_, J) :- r(J).\n"
                  "r(_).\n")},
        ["main/2"],
        lambda p: remove_arguments(p, {pos for pos in far(p)}),
        ["main(1, R)", "main(2, R)", "main(0, R)", "main(1, 2)",
         "main(1, 3)", "main(5, R)", "main(9, 10)", "main(9, 11)",
         "main(3, R)", "main(7, 8)"]))

    cut2ite_fixture(
        "cut2ite-empty-guard",
        "first([X|_], X) :- !.\nfirst([], none).\npick(L, X) :- first(L, X).\n",
        U("first", 2),
        ["pick([], X)", "pick([a], X)", "pick([a,b], X)", "pick([], none)",
         "pick([c], c)", "pick([c], d)", "first([], X)", "first([q], X)",
         "pick([1,2,3], X)", "first([], none)"])

    return fixtures


def _first_ite_span(program):
    from plref.terms import IfThenElse, walk_goals
    for pid, _, clause in program.iter_clauses():
        for node in walk_goals(clause.body):
            if isinstance(node, IfThenElse):
                return node.span
    raise AssertionError("fixture has no if-then-else")


def test_oracle_preservation_suite(tmp_path):
    started = time.monotonic()
    fixtures = _fixtures_for_preservation()
    assert len(fixtures) >= 20, f"only {len(fixtures)} fixtures"
    failures = []
    for i, (name, files, roots, build, queries) in enumerate(fixtures):
        assert len(queries) >= 10, f"{name} has {len(queries)} queries"
        subdir = tmp_path / f"fx{i}"
        subdir.mkdir()
        manifest = write_project(subdir, files, roots=roots)
        program = load_project(manifest)
        clause_count = sum(len(d.clauses) for d in program.predicates.values())
        assert clause_count <= 60, name
        editset = build(program)
        assert not editset.empty, f"{name} produced no edits"
        assert editset.semantics_flag == "preserving", name
        after = preview_program(editset, program)
        for verdict in equivalent(program, after, queries, ORACLE_LIMITS):
            if not verdict.equal:
                failures.append((name, verdict.query, verdict.detail))
    assert not failures, failures
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"preservation suite took {elapsed:.1f}s"
    print(f"\n  {len(fixtures)} fixtures, "
          f"{sum(len(q) for *_, q in fixtures)} queries, {elapsed:.2f}s")
    _pass("oracle-preservation-suite")


# =============================================================================
# Criterion: FAR soundness on planted fixtures
# =============================================================================

def _planted_fixture(seed: int):
    """A chain program threading one junk argument along a known path."""
    rng = random.Random(seed)
    depth = rng.randint(2, 4)
    junk_pos = {}
    lines = []
    for level in range(1, depth + 1):
        pos = rng.choice([1, 2, 3])
        junk_pos[level] = pos

    def args_for(level, useful, junk):
        pos = junk_pos[level]
        base = list(useful)
        base.insert(pos - 1, junk)
        return ", ".join(base)

    lines.append(f"main(X, R) :- p1({args_for(1, ['X', 'R'], '_')}).")
    for level in range(1, depth + 1):
        k = rng.randint(1, 5)
        head = f"p{level}({args_for(level, ['X', 'R'], 'J')})"
        if level < depth:
            call = f"p{level + 1}({args_for(level + 1, ['X', 'T'], 'J')})"
            lines.append(f"{head} :- {call}, R is T + {k}.")
        else:
            lines.append(f"{head} :- R is X * {k}.")
    src = "\n".join(lines) + "\n"
    planted = {(f"p{level}", 3, junk_pos[level]) for level in junk_pos}
    queries = [f"main({n}, R)" for n in range(6)] + \
        [f"main({n}, 0)" for n in range(2)] + ["main(2, V)", "main(3, W)"]
    return src, planted, queries


def test_far_soundness_planted(tmp_path):
    for seed in range(10):
        subdir = tmp_path / f"far{seed}"
        subdir.mkdir()
        src, planted, queries = _planted_fixture(seed)
        manifest = write_project(subdir, {"m.pl": src}, roots=["main/2"])
        program = load_project(manifest)
        marked = far(program)
        marked_keys = {(p.pred.name, p.pred.arity, p.index) for p in marked}
        missing = planted - marked_keys
        assert not missing, f"seed {seed}: unmarked planted args {missing}"
        editset = remove_arguments(program, marked)
        after = preview_program(editset, program)
        for verdict in equivalent(program, after, queries, ORACLE_LIMITS):
            assert verdict.equal, (seed, verdict.query, verdict.detail)
    _pass("far-soundness-planted")


# =============================================================================
# Criterion: dead-code exactness vs naive reachability, 30 seeds
# =============================================================================

def test_dead_code_exactness_randomized(tmp_path):
    exact = 0
    for seed in range(30):
        rng = random.Random(1000 + seed)
        n = rng.randint(5, 50)
        lines = []
        for i in range(n):
            callees = [j for j in range(n) if j != i and rng.random() < 0.08]
            if callees:
                lines.append(f"p{i} :- " + ", ".join(f"p{j}" for j in callees)
                             + ".")
            else:
                lines.append(f"p{i}.")
        roots = sorted({f"p{rng.randrange(n)}/0"
                        for _ in range(rng.randint(1, 3))})
        subdir = tmp_path / f"dead{seed}"
        subdir.mkdir()
        manifest = write_project(subdir, {"m.pl": "\n".join(lines) + "\n"},
                                 roots=roots)
        program = load_project(manifest)

        edges = set()
        for pid, _, clause in program.iter_clauses():
            for goal in leaf_goals(clause.body):
                res = resolve(program, pid.module, goal.term)
                if res.is_pred:
                    edges.add((pid, res.pred))
        seen = set(program.roots)
        frontier = list(program.roots)
        while frontier:
            node = frontier.pop()
            for a, b in edges:
                if a == node and b not in seen:
                    seen.add(b)
                    frontier.append(b)
        expected = set(program.predicates) - seen
        if dead_predicates(program) == expected:
            exact += 1
    assert exact == 30, f"{exact}/30 seeds matched"
    _pass("dead-code-exactness-30-seeds")


# =============================================================================
# Criterion: duplicate detection on the crafted 3-module corpus
# =============================================================================

def test_duplicate_detection_crafted_corpus(tmp_path):
    files = {
        "m1.pl": (":- module(m1, [even/1]).\n"
                  "even(z).\neven(s(X)) :- odd(X).\n"
                  "odd(s(X)) :- even(X).\n"),
        "m2.pl": (":- module(m2, [even/1]).\n"
                  "even(z).\neven(s(X)) :- odd(X).\n"
                  "odd(s(X)) :- even(X).\n"),
        # near-duplicate: one changed constant in the base case
        "m3.pl": (":- module(m3, [even/1]).\n"
                  "even(zero).\neven(s(X)) :- odd(X).\n"
                  "odd(s(X)) :- even(X).\n"),
    }
    manifest = write_project(tmp_path, files,
                             roots=["m1:even/1", "m2:even/1", "m3:even/1"])
    program = load_project(manifest)
    groups = duplicate_groups(program)

    # group the indicator-level classes by SCC so the duplicated recursive
    # component counts once
    cond = condensation(build_pdg(program))
    scc_groups = {}
    for group in groups:
        key = frozenset(cond.scc_of[p] for p in group)
        scc_groups.setdefault(key, []).append(group)
    assert len(scc_groups) == 1, f"expected one duplicated SCC: {groups}"
    members = {p for group in groups for p in group}
    assert members == {
        PredId("m1", "even", 1), PredId("m2", "even", 1),
        PredId("m1", "odd", 1), PredId("m2", "odd", 1),
    }
    assert not any(p.module == "m3" for p in members)
    _pass("duplicate-detection-crafted-corpus")


# =============================================================================
# Criterion: parser round-trip over the corpus
# =============================================================================

SYNTAX_ZOO = """\
:- module(zoo, [run/1]).
:- use_module(other, [thing/1]).

% a line comment survives the corpus checks
run(X) :-
        thing(X),
        X == 'quoted atom',
        Y is X + 2 * 3 - -1,
        ( Y > 0 ->
                note(Y)
        ;
                fail
        ).

/* block comment */
note([H|T]) :- render([H|T], "chars", 0'a, 0x1F).
note([]).

render(A, B, C, D) :- \\+ broken(A, B, C, D).
broken(_, _, _, _) :- fail.

pairs([k1-v1, k2-v2]).
curly({a, b}).
deep(f(g(h(X)), [1, 2.5, -3], 'it''s')) :- X = "str".
"""


def _corpus(tmp_path):
    texts = [READER_SOURCE, PAPER_FINAL_LISTING, PAPER_ITE_LISTING, SYNTAX_ZOO]
    for _, files, _, _, _ in _fixtures_for_preservation():
        texts.extend(files.values())
    return texts


def test_parser_roundtrip_corpus(tmp_path):
    texts = _corpus(tmp_path)
    assert len(texts) >= 20
    for i, text in enumerate(texts):
        tokens, comments = tokenize(text)
        assert reconstruct(text, tokens, comments) == text, f"corpus[{i}]"

        parsed = parse_program(text)
        rendered_items = []
        for item in parsed.items:
            if isinstance(item, Directive):
                rendered_items.append(render_directive(item.term))
            else:
                rendered_items.append(render_clause(item.clause))
        rendered = "\n\n".join(rendered_items) + "\n"
        reparsed = parse_program(rendered)
        assert len(reparsed.items) == len(parsed.items), f"corpus[{i}]"
        for a, b in zip(parsed.items, reparsed.items):
            if isinstance(a, Directive):
                assert isinstance(b, Directive)
                assert a.term == b.term, f"corpus[{i}]"
            else:
                assert a.clause.head == b.clause.head, f"corpus[{i}]"
                assert a.clause.body == b.clause.body, f"corpus[{i}]"

        # span fidelity: every item's source slice re-parses to the same item
        for item in parsed.items:
            chunk = text[item.span[0]:item.span[1]]
            sub = parse_program(chunk)
            assert len(sub.items) == 1, f"corpus[{i}]"
            got = sub.items[0]
            if isinstance(item, Directive):
                assert got.term == item.term
            else:
                assert got.clause.head == item.clause.head
                assert got.clause.body == item.clause.body
    _pass("parser-roundtrip-corpus")


# =============================================================================
# Criterion: edit atomicity under injected failures
# =============================================================================

def _tree_digest(root):
    entries = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if not d.startswith(".plref")]
        for name in filenames:
            if not name.endswith(".plref-tmp~"):
                entries.append(os.path.join(dirpath, name))
    digest = hashlib.sha256()
    for path in sorted(entries):
        with open(path, "rb") as fh:
            digest.update(path.encode() + fh.read())
    return digest.hexdigest()


def test_edit_atomicity_fault_injection(tmp_path, monkeypatch):
    files = {
        "a.pl": "p(a).\np(b).\n",
        "b.pl": "q(c).\n",
        "c.pl": "r(d).\n",
    }
    manifest = write_project(tmp_path, files, roots=["p/1", "q/1", "r/1"])
    survived = 0
    for trial in range(10):
        program = load_project(manifest)
        before = _tree_digest(tmp_path)
        editset = EditSet(edits=[
            Edit("a.pl", 0, 5, f"p(x{trial})."),
            Edit("b.pl", 0, 5, f"q(y{trial})."),
            Edit("c.pl", 0, 5, f"r(z{trial})."),
        ], base_version=program.version)

        real_replace = os.replace
        calls = {"n": 0}
        fail_at = (trial % 3) + 1

        def failing(src, dst, *, _real=real_replace, _calls=calls,
                    _fail_at=fail_at):
            _calls["n"] += 1
            if _calls["n"] == _fail_at:
                raise OSError("injected failure")
            return _real(src, dst)

        monkeypatch.setattr(os, "replace", failing)
        with pytest.raises(OSError):
            apply_edits(editset, program)
        monkeypatch.undo()
        if _tree_digest(tmp_path) == before:
            survived += 1
    assert survived == 10, f"{survived}/10 injected failures left the tree intact"
    _pass("edit-atomicity-fault-injection")


# =============================================================================
# Criterion: semantics-changing guardrail for unif2test
# =============================================================================

def test_semantics_changing_guardrail(tmp_path, capsys):
    from plref.cli import main

    files = {"m.pl": ("check(T, R) :- "
                      "( T = stop -> R = halted ; R = running ).\n")}
    manifest = write_project(tmp_path, files, roots=["check/2"])
    program = load_project(manifest)

    text = program.files["m.pl"].text
    at = text.index("T = stop")
    span = (at, at + len("T = stop"))
    editset = unification_to_test(program, "m.pl", span, "==")
    assert editset.semantics_flag == "changing"
    after = preview_program(editset, program)

    # with the variable unbound the programs genuinely disagree
    verdicts = equivalent(program, after, ["check(T, R)"], ORACLE_LIMITS)
    assert verdicts[0].status == "different"
    # in the intended mode they agree
    verdicts = equivalent(program, after,
                          ["check(stop, R)", "check(go, R)"], ORACLE_LIMITS)
    assert all(v.equal for v in verdicts)

    # the CLI refuses without the explicit opt-in and leaves the tree alone
    before = _tree_digest(tmp_path)
    code = main(["-m", manifest, "--yes", "unif2test",
                 f"m.pl:{span[0]}-{span[1]}"])
    capsys.readouterr()
    assert code == 1
    assert _tree_digest(tmp_path) == before
    code = main(["-m", manifest, "--yes", "--accept-semantics-change",
                 "unif2test", f"m.pl:{span[0]}-{span[1]}"])
    capsys.readouterr()
    assert code == 0
    assert "T == stop" in (tmp_path / "m.pl").read_text()
    _pass("semantics-changing-guardrail")
