import pytest

from plref.errors import DuplicateModuleName, ManifestError
from plref.model import PredId, load_project, parse_indicator, resolve
from plref.parser import parse_term
from plref.pdg import build_pdg, condensation


def test_reader_project(reader_project):
    program = reader_project
    assert len(program.predicates) == 4
    assert PredId("user", "make_reader", 3) in program.predicates
    assert PredId("user", "reader_code", 3) in program.predicates
    assert program.roots == {
        PredId("user", "make_reader", 3),
        PredId("user", "reader_done", 1),
        PredId("user", "reader_next", 3),
    }


def test_empty_file_list(tmp_path):
    manifest = tmp_path / "p.plm"
    manifest.write_text("[files]\n")
    program = load_project(str(manifest))
    assert program.predicates == {}


def test_two_module_import_resolution(make_project):
    program = make_project({
        "m1.pl": """\
            :- module(m1, [p/1]).
            p(a).
        """,
        "m2.pl": """\
            :- module(m2, [q/1]).
            :- use_module(m1, [p/1]).
            q(X) :- p(X).
        """,
    }, roots=["m2:q/1"])
    goal = parse_term("p(X)")
    res = resolve(program, "m2", goal)
    assert res.is_pred
    assert res.pred == PredId("m1", "p", 1)
    assert res.via_import == ("m2", 0)


def test_builtin_resolution(reader_project):
    assert resolve(reader_project, "user", parse_term("read(S,T)")).kind == "builtin"
    assert resolve(reader_project, "user", parse_term("true")).kind == "builtin"


def test_qualified_resolution(make_project):
    program = make_project({
        "m1.pl": """\
            :- module(m1, [p/1]).
            p(a).
        """,
        "m2.pl": """\
            :- module(m2, [q/1]).
            q(X) :- m1:p(X).
        """,
    }, roots=["m2:q/1"])
    res = resolve(program, "m2", parse_term("m1:p(X)"))
    assert res.is_pred and res.pred == PredId("m1", "p", 1)


def test_control_constructs_not_preds(reader_project):
    assert resolve(reader_project, "user", parse_term("(a , b)")).kind == "control"
    assert resolve(reader_project, "user", parse_term("(a ; b)")).kind == "control"


def test_undefined_call_warning(make_project):
    program = make_project({
        "m.pl": """\
            main :- missing_thing(1).
        """,
    }, roots=["main/0"])
    assert any("undefined call missing_thing/1" in w for w in program.warnings)


def test_duplicate_module_name(tmp_path, make_project):
    with pytest.raises(DuplicateModuleName):
        make_project({
            "a.pl": ":- module(m, []).\np(a).\n",
            "b.pl": ":- module(m, []).\nq(b).\n",
        })


def test_manifest_errors(tmp_path):
    bad = tmp_path / "bad.plm"
    bad.write_text("[nosuch]\n")
    with pytest.raises(ManifestError):
        load_project(str(bad))
    with pytest.raises(ManifestError):
        parse_indicator("no-arity")


def test_meta_positions_from_manifest(make_project):
    program = make_project({
        "m.pl": """\
            main(L) :- maplist(helper, L).
            helper(_).
        """,
    }, roots=["main/1"], meta=["maplist/2 1"])
    pdg = build_pdg(program)
    # The closure atom `helper` resolves at its literal arity only; helper/0
    # is undefined so the unrecognized meta pattern is warned about.
    assert (PredId("user", "main", 1), PredId("user", "helper", 0)) not in pdg.edges
    assert any("unresolved-meta" in w for w in program.warnings)


def test_default_meta_call(make_project):
    program = make_project({
        "m.pl": """\
            main :- call(helper, 1).
            helper(_).
        """,
    }, roots=["main/0"])
    pdg = build_pdg(program)
    assert (PredId("user", "main", 0), PredId("user", "helper", 1)) in pdg.edges


def test_pdg_reader_edges(reader_project):
    pdg = build_pdg(reader_project)
    mk = PredId("user", "make_reader", 3)
    rc = PredId("user", "reader_code", 3)
    rn = PredId("user", "reader_next", 3)
    assert (mk, rc) in pdg.edges
    assert (rn, rc) in pdg.edges
    assert len(pdg.nodes) == 4


def test_single_fact_no_edges(make_project):
    program = make_project({"m.pl": "p(a).\n"}, roots=["p/1"])
    pdg = build_pdg(program)
    assert pdg.nodes == {PredId("user", "p", 1)}
    assert pdg.edges == set()


def test_mutual_recursion_one_scc(make_project):
    program = make_project({
        "m.pl": """\
            p(X) :- q(X).
            q(X) :- p(X).
        """,
    }, roots=["p/1"])
    cond = condensation(build_pdg(program))
    assert len(cond.sccs) == 1
    assert len(cond.sccs[0]) == 2


def test_condensation_strata(make_project):
    program = make_project({
        "m.pl": """\
            p(X) :- q(X), r(X).
            q(X) :- p(X).
            r(_).
        """,
    }, roots=["p/1"])
    cond = condensation(build_pdg(program))
    r = PredId("user", "r", 1)
    p = PredId("user", "p", 1)
    assert cond.stratum_of(r) == 0
    assert cond.stratum_of(p) == 1
    # callee strata strictly below callers
    for a, b in cond.edges:
        assert cond.strata[a] > cond.strata[b]


def test_condensation_empty(make_project):
    program = make_project({"m.pl": "% nothing here\n"})
    cond = condensation(build_pdg(program))
    assert cond.sccs == []


def test_reader_sccs_all_singletons(reader_project):
    cond = condensation(build_pdg(reader_project))
    assert all(len(s) == 1 for s in cond.sccs)


def test_pdg_edges_sound_and_complete(make_project):
    """Brute-force goal scan equals build_pdg output."""
    from plref.terms import leaf_goals

    program = make_project({
        "m.pl": """\
            a :- b, ( c -> d ; e ).
            b :- \\+ f.
            c. d. e. f.
        """,
    }, roots=["a/0"])
    pdg = build_pdg(program)
    brute = set()
    for pid, _, clause in program.iter_clauses():
        for goal in leaf_goals(clause.body):
            res = resolve(program, pid.module, goal.term)
            if res.is_pred:
                brute.add((pid, res.pred))
    assert brute == pdg.edges
    assert (PredId("user", "b", 0), PredId("user", "f", 0)) in pdg.edges


def test_whole_module_import(make_project):
    program = make_project({
        "m1.pl": """\
            :- module(m1, [p/1]).
            p(a).
        """,
        "m2.pl": """\
            :- module(m2, [q/1]).
            :- use_module(m1).
            q(X) :- p(X).
        """,
    }, roots=["m2:q/1"])
    res = resolve(program, "m2", parse_term("p(X)"))
    assert res.is_pred and res.pred == PredId("m1", "p", 1)


def test_ambiguous_import_warning(make_project):
    program = make_project({
        "m1.pl": ":- module(m1, [p/1]).\np(a).\n",
        "m2.pl": ":- module(m2, [p/1]).\np(b).\n",
        "m3.pl": """\
            :- module(m3, [q/1]).
            :- use_module(m1, [p/1]).
            :- use_module(m2, [p/1]).
            q(X) :- p(X).
        """,
    }, roots=["m3:q/1"])
    assert any("multiple modules" in w for w in program.warnings)
    res = resolve(program, "m3", parse_term("p(X)"))
    assert res.pred == PredId("m1", "p", 1)  # manifest/file order wins
