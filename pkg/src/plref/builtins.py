"""Curated builtin predicate knowledge.

The table lists ISO builtins plus the handful of classic stream predicates
(SICStus-era) that legacy code relies on.  It also records which test
builtins are binding-free and how to negate them.
"""

from __future__ import annotations

Indicator = tuple[str, int]

CONTROL = {(",", 2), (";", 2), ("->", 2), ("\\+", 1), ("!", 0), (":", 2)}

BUILTINS: set[Indicator] = {
    ("true", 0), ("fail", 0), ("false", 0),
    ("=", 2), ("\\=", 2), ("==", 2), ("\\==", 2),
    ("@<", 2), ("@>", 2), ("@=<", 2), ("@>=", 2), ("compare", 3),
    ("=..", 2), ("is", 2),
    ("=:=", 2), ("=\\=", 2), ("<", 2), (">", 2), ("=<", 2), (">=", 2),
    ("var", 1), ("nonvar", 1), ("atom", 1), ("number", 1), ("integer", 1),
    ("float", 1), ("atomic", 1), ("compound", 1), ("callable", 1),
    ("is_list", 1), ("ground", 1),
    ("functor", 3), ("arg", 3), ("copy_term", 2),
    ("atom_codes", 2), ("atom_chars", 2), ("atom_length", 2),
    ("atom_concat", 3), ("number_codes", 2), ("number_chars", 2),
    ("char_code", 2), ("sub_atom", 5),
    ("write", 1), ("write", 2), ("writeln", 1), ("print", 1), ("writeq", 1),
    ("nl", 0), ("nl", 1), ("tab", 1), ("put_char", 1), ("get_char", 1),
    ("read", 1), ("read", 2), ("read_term", 2), ("read_term", 3),
    ("open", 3), ("open", 4), ("close", 1),
    ("see", 1), ("seen", 0), ("tell", 1), ("told", 0),
    ("stream_position", 2), ("stream_position", 3),
    ("assert", 1), ("asserta", 1), ("assertz", 1), ("retract", 1),
    ("abolish", 1),
    ("findall", 3), ("bagof", 3), ("setof", 3), ("forall", 2),
    ("between", 3), ("succ", 2), ("length", 2), ("append", 3),
    ("member", 2), ("memberchk", 2), ("reverse", 2), ("nth0", 3),
    ("nth1", 3), ("last", 2), ("msort", 2), ("sort", 2), ("keysort", 2),
    ("throw", 1), ("catch", 3), ("halt", 0), ("halt", 1),
    ("format", 1), ("format", 2), ("format", 3),
} | {("call", n) for n in range(1, 9)}

# Default meta-predicate argument positions (1-based goal positions).
DEFAULT_META: dict[Indicator, tuple[int, ...]] = {
    ("findall", 3): (2,),
    ("bagof", 3): (2,),
    ("setof", 3): (2,),
    ("forall", 2): (1, 2),
    ("\\+", 1): (1,),
    **{("call", n): (1,) for n in range(1, 9)},
}

# Tests that cannot bind anything; safe to negate or to re-run.
BINDING_FREE: set[Indicator] = {
    ("true", 0), ("fail", 0), ("false", 0),
    ("==", 2), ("\\==", 2), ("=:=", 2), ("=\\=", 2),
    ("<", 2), (">", 2), ("=<", 2), (">=", 2),
    ("@<", 2), ("@>", 2), ("@=<", 2), ("@>=", 2),
    ("var", 1), ("nonvar", 1), ("atom", 1), ("atomic", 1),
    ("number", 1), ("integer", 1), ("float", 1), ("compound", 1),
    ("callable", 1), ("is_list", 1), ("ground", 1),
}

# Opposite test for each negatable builtin.
NEGATIONS: dict[str, str] = {
    "==": "\\==", "\\==": "==",
    "=:=": "=\\=", "=\\=": "=:=",
    "<": ">=", ">=": "<",
    ">": "=<", "=<": ">",
    "@<": "@>=", "@>=": "@<",
    "@>": "@=<", "@=<": "@>",
    "var": "nonvar", "nonvar": "var",
    "true": "fail", "fail": "true", "false": "true",
}


def is_builtin(name: str, arity: int) -> bool:
    return (name, arity) in BUILTINS


def is_control(name: str, arity: int) -> bool:
    return (name, arity) in CONTROL
