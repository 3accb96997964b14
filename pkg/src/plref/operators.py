"""Operator table with the ISO standard defaults.

Priorities run 1..1200; types are xfx, xfy, yfx (infix), fy, fx (prefix),
xf, yf (postfix).  `:- op/3` directives add or replace entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

INFIX_TYPES = {"xfx", "xfy", "yfx"}
PREFIX_TYPES = {"fy", "fx"}
POSTFIX_TYPES = {"xf", "yf"}

_ISO_DEFAULTS = [
    (1200, "xfx", [":-", "-->"]),
    (1200, "fx", [":-", "?-"]),
    (1100, "xfy", [";"]),
    (1050, "xfy", ["->"]),
    (1000, "xfy", [","]),
    (900, "fy", ["\\+"]),
    (700, "xfx", ["=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=",
                  "=..", "is", "=:=", "=\\=", "<", ">", "=<", ">="]),
    (500, "yfx", ["+", "-", "/\\", "\\/", "xor"]),
    (400, "yfx", ["*", "/", "//", "mod", "rem", "div", "<<", ">>"]),
    (200, "xfx", ["**"]),
    (200, "xfy", ["^", ":"]),
    (200, "fy", ["-", "+", "\\"]),
]


@dataclass
class OperatorTable:
    prefix: dict[str, tuple[int, str]] = field(default_factory=dict)
    infix: dict[str, tuple[int, str]] = field(default_factory=dict)
    postfix: dict[str, tuple[int, str]] = field(default_factory=dict)

    @classmethod
    def iso(cls) -> "OperatorTable":
        table = cls()
        for priority, optype, names in _ISO_DEFAULTS:
            for name in names:
                table.add(priority, optype, name)
        return table

    def add(self, priority: int, optype: str, name: str):
        if not 0 <= priority <= 1200:
            raise ValueError(f"operator priority out of range: {priority}")
        slot = self._slot(optype)
        if priority == 0:
            slot.pop(name, None)
        else:
            slot[name] = (priority, optype)

    def _slot(self, optype: str) -> dict:
        if optype in INFIX_TYPES:
            return self.infix
        if optype in PREFIX_TYPES:
            return self.prefix
        if optype in POSTFIX_TYPES:
            return self.postfix
        raise ValueError(f"unknown operator type {optype!r}")

    def copy(self) -> "OperatorTable":
        t = OperatorTable()
        t.prefix = dict(self.prefix)
        t.infix = dict(self.infix)
        t.postfix = dict(self.postfix)
        return t

    def infix_of(self, name: str) -> Optional[tuple[int, str]]:
        return self.infix.get(name)

    def prefix_of(self, name: str) -> Optional[tuple[int, str]]:
        return self.prefix.get(name)

    def postfix_of(self, name: str) -> Optional[tuple[int, str]]:
        return self.postfix.get(name)

    def is_operator(self, name: str) -> bool:
        return name in self.prefix or name in self.infix or name in self.postfix


def argument_priorities(priority: int, optype: str) -> tuple[int, ...]:
    """Max priority allowed for each argument of an operator."""
    if optype == "xfx":
        return (priority - 1, priority - 1)
    if optype == "xfy":
        return (priority - 1, priority)
    if optype == "yfx":
        return (priority, priority - 1)
    if optype == "fy":
        return (priority,)
    if optype == "fx":
        return (priority - 1,)
    if optype == "xf":
        return (priority - 1,)
    if optype == "yf":
        return (priority,)
    raise ValueError(optype)
