import hashlib
import json
import os

import pytest

from plref.cli import main
from tests.conftest import READER_SOURCE, write_project


@pytest.fixture
def reader_manifest(tmp_path):
    return write_project(
        tmp_path, {"reader.pl": READER_SOURCE},
        roots=["make_reader/3", "reader_done/1", "reader_next/3"])


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def tree_digest(root):
    entries = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if not d.startswith(".plref")]
        for f in filenames:
            entries.append(os.path.join(dirpath, f))
    digest = hashlib.sha256()
    for p in sorted(entries):
        with open(p, "rb") as fh:
            digest.update(p.encode() + fh.read())
    return digest.hexdigest()


def test_check_json_schema(capsys, reader_manifest):
    code, out, _ = run(capsys, "-m", reader_manifest, "--format", "json",
                       "check")
    assert code == 0
    suggestions = json.loads(out)
    assert isinstance(suggestions, list) and suggestions
    for s in suggestions:
        assert set(s) == {"id", "kind", "module", "target", "span",
                          "explanation", "payload"}
        assert set(s["span"]) == {"file", "start", "end"}
    kinds = {s["kind"] for s in suggestions}
    assert "cut-replaceable" in kinds
    assert "common-sequence" in kinds


def test_check_text_output(capsys, reader_manifest):
    code, out, _ = run(capsys, "-m", reader_manifest, "check")
    assert code == 0
    assert "cut-replaceable" in out
    assert "user:reader_code/3" in out


def test_cut2ite_dry_run_leaves_tree_untouched(capsys, reader_manifest,
                                               tmp_path):
    before = tree_digest(tmp_path)
    code, out, _ = run(capsys, "-m", reader_manifest, "--dry-run",
                       "cut2ite", "reader_code/3")
    assert code == 0
    assert "--- a/reader.pl" in out
    assert "( Term = end_of_file," in out
    assert tree_digest(tmp_path) == before


def test_cut2ite_yes_writes(capsys, reader_manifest, tmp_path):
    code, out, _ = run(capsys, "-m", reader_manifest, "--yes",
                       "cut2ite", "reader_code/3")
    assert code == 0
    text = (tmp_path / "reader.pl").read_text()
    assert "( Term = end_of_file," in text
    assert "!" not in text


def test_rename_pred_yes(capsys, reader_manifest, tmp_path):
    code, _, _ = run(capsys, "-m", reader_manifest, "--yes",
                     "rename-pred", "user:make_reader/3", "reader_init")
    assert code == 0
    assert "reader_init(File,Stream,State)" in (tmp_path / "reader.pl").read_text()


def test_usage_error_without_manifest(capsys):
    code, _, err = run(capsys, "check")
    assert code == 2
    assert err.startswith("error:")


def test_refactoring_error_exit_code(capsys, reader_manifest):
    code, _, err = run(capsys, "-m", reader_manifest, "--yes",
                       "rename-pred", "user:stream_position/2", "nope")
    assert code == 1
    assert "error: RenamesBuiltin" in err


def test_non_tty_without_yes_exits_3(capsys, reader_manifest, tmp_path,
                                     monkeypatch):
    import sys
    monkeypatch.setattr(sys.stdin, "isatty", lambda: False)
    before = tree_digest(tmp_path)
    code, _, err = run(capsys, "-m", reader_manifest,
                       "cut2ite", "reader_code/3")
    assert code == 3
    assert tree_digest(tmp_path) == before


def test_semantics_change_guardrail(capsys, tmp_path):
    manifest = write_project(tmp_path, {
        "m.pl": "check(T, R) :- ( T = stop -> R = halted ; R = running ).\n",
    }, roots=["check/2"])
    text = (tmp_path / "m.pl").read_text()
    start = text.index("T = stop")
    span = f"m.pl:{start}-{start + len('T = stop')}"
    code, out, err = run(capsys, "-m", manifest, "--yes", "unif2test", span)
    assert code == 1
    assert "accept-semantics-change" in err
    assert "T == stop" not in (tmp_path / "m.pl").read_text()

    code, out, err = run(capsys, "-m", manifest, "--yes",
                         "--accept-semantics-change", "unif2test", span)
    assert code == 0
    assert "T == stop" in (tmp_path / "m.pl").read_text()


def test_apply_suggestion_by_id(capsys, reader_manifest, tmp_path):
    code, out, _ = run(capsys, "-m", reader_manifest, "--format", "json",
                       "smells")
    suggestions = json.loads(out)
    cut = [s for s in suggestions if s["kind"] == "cut-replaceable"][0]
    code, out, _ = run(capsys, "-m", reader_manifest, "--yes",
                       "apply", cut["id"])
    assert code == 0
    assert "( Term = end_of_file," in (tmp_path / "reader.pl").read_text()
    # the applied suggestion disappears on re-analysis
    code, out, _ = run(capsys, "-m", reader_manifest, "--format", "json",
                       "smells")
    remaining = {s["id"] for s in json.loads(out)}
    assert cut["id"] not in remaining


def test_env_manifest(capsys, reader_manifest, monkeypatch):
    monkeypatch.setenv("PLREF_MANIFEST", reader_manifest)
    code, out, _ = run(capsys, "dead")
    assert code == 0


def test_oracle_run(capsys, tmp_path):
    manifest = write_project(tmp_path, {"m.pl": "p(a).\np(b).\n"},
                             roots=["p/1"])
    code, out, _ = run(capsys, "-m", manifest, "oracle", "run", "p(X)")
    assert code == 0
    assert "answer 1: X = a" in out
    assert "answer 2: X = b" in out
    assert "terminal: exhausted" in out


def test_oracle_run_json(capsys, tmp_path):
    manifest = write_project(tmp_path, {"m.pl": "p(a).\n"}, roots=["p/1"])
    code, out, _ = run(capsys, "-m", manifest, "--format", "json",
                       "oracle", "run", "?- p(X).")
    assert code == 0
    data = json.loads(out)
    assert data["answers"] == [{"X": "a"}]
    assert data["terminal"] == "exhausted"


def test_far_and_rm_args(capsys, tmp_path):
    manifest = write_project(tmp_path, {
        "m.pl": "main(Y) :- p(1, Y).\np(X, Y) :- q(Y).\nq(done).\n",
    }, roots=["main/1"])
    code, out, _ = run(capsys, "-m", manifest, "--format", "json", "far")
    marked = json.loads(out)
    assert any(s["target"] == "user:p/2" and s["payload"]["positions"] == [1]
               for s in marked)
    code, out, _ = run(capsys, "-m", manifest, "--yes",
                       "rm-args", "user:p/2")
    assert code == 0
    text = (tmp_path / "m.pl").read_text()
    assert "p(Y) :-" in text and "p(1, Y)" not in text


def test_dup_and_rm_dup(capsys, tmp_path):
    manifest = write_project(tmp_path, {
        "m1.pl": ":- module(m1,[p/1]).\np(X) :- length(X, 2).\n",
        "m2.pl": ":- module(m2,[p/1]).\np(Y) :- length(Y, 2).\n",
    }, roots=["m1:p/1", "m2:p/1"])
    code, out, _ = run(capsys, "-m", manifest, "--format", "json", "dup")
    groups = json.loads(out)
    assert len(groups) == 1
    code, out, _ = run(capsys, "-m", manifest, "--yes",
                       "rm-dup", "m2:p/1", "--keep", "m1:p/1")
    assert code == 0
    assert ":- use_module(m1,[p/1])." in (tmp_path / "m2.pl").read_text()


def test_extract_command(capsys, reader_manifest, tmp_path):
    code, out, _ = run(capsys, "-m", reader_manifest, "--format", "json",
                       "check")
    seq = [s for s in json.loads(out) if s["kind"] == "common-sequence"][0]
    occs = [f"{o['file']}:{o['start']}-{o['end']}"
            for o in seq["payload"]["occurrences"]]
    code, _, _ = run(capsys, "-m", reader_manifest, "--yes",
                     "extract", "read_next_state", *occs)
    assert code == 0
    text = (tmp_path / "reader.pl").read_text()
    assert "read_next_state(Stream,State) :-" in text


def test_interactive_confirmation_applies(capsys, reader_manifest, tmp_path,
                                          monkeypatch):
    import sys
    monkeypatch.setattr(sys.stdin, "isatty", lambda: True)
    monkeypatch.setattr("builtins.input", lambda prompt="": "y")
    code, out, _ = run(capsys, "-m", reader_manifest,
                       "cut2ite", "reader_code/3")
    assert code == 0
    assert "( Term = end_of_file," in (tmp_path / "reader.pl").read_text()


def test_interactive_rejection_leaves_tree(capsys, reader_manifest, tmp_path,
                                           monkeypatch):
    import sys
    monkeypatch.setattr(sys.stdin, "isatty", lambda: True)
    monkeypatch.setattr("builtins.input", lambda prompt="": "n")
    before = tree_digest(tmp_path)
    code, out, _ = run(capsys, "-m", reader_manifest,
                       "cut2ite", "reader_code/3")
    assert code == 0
    assert "rejected" in out
    assert tree_digest(tmp_path) == before
