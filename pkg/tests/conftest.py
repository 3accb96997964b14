import textwrap

import pytest

# The reader example: three operations on a sequential term reader.
READER_SOURCE = """\
make_reader(File,Stream,State) :-
        open(File,read,Stream),
        read(Stream,Term),
        reader_code(Term,Stream,State).

reader_code(end_of_file,_,end_of_file) :- ! .
reader_code(Term,Stream,read(Term,Stream,Position)) :-
        stream_position(Stream,Position).

reader_done(end_of_file).

reader_next(Term,read(Term,Stream,Pos),State) :-
        stream_position(Stream,_,Pos),
        read(Stream,Next),
        reader_code(Next,Stream,State).
"""


@pytest.fixture
def reader_source():
    return READER_SOURCE


@pytest.fixture
def reader_project(tmp_path):
    """A loaded single-file project for the reader example."""
    from plref.model import load_project

    src = tmp_path / "reader.pl"
    src.write_text(READER_SOURCE)
    manifest = tmp_path / "project.plm"
    manifest.write_text(textwrap.dedent("""\
        [files]
        reader.pl
        [roots]
        make_reader/3
        reader_done/1
        reader_next/3
    """))
    return load_project(str(manifest))


def write_project(tmp_path, files: dict, roots=None, meta=None):
    """Write source files plus a manifest; returns the manifest path."""
    for name, text in files.items():
        p = tmp_path / name
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(textwrap.dedent(text))
    lines = ["[files]"] + list(files)
    if roots:
        lines += ["[roots]"] + list(roots)
    if meta:
        lines += ["[meta]"] + list(meta)
    manifest = tmp_path / "project.plm"
    manifest.write_text("\n".join(lines) + "\n")
    return str(manifest)


@pytest.fixture
def make_project(tmp_path):
    from plref.model import load_project

    def build(files, roots=None, meta=None):
        return load_project(write_project(tmp_path, files, roots=roots, meta=meta))

    return build
