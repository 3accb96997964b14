"""Error types shared across the toolkit.

Every refactoring precondition failure has its own class so the CLI and
the HTTP service can report a stable error name.
"""

from __future__ import annotations

from typing import Optional


class PlrefError(Exception):
    """Base class; `name` is the stable machine-readable error identifier."""

    @property
    def name(self) -> str:
        return type(self).__name__


# --- lexing / parsing -------------------------------------------------------

class LexError(PlrefError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnterminatedString(LexError):
    pass


class UnterminatedBlockComment(LexError):
    pass


class IllegalCharacter(LexError):
    pass


class PrologSyntaxError(PlrefError):
    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} at {span[0]}..{span[1]}")
        self.reason = message
        self.span = span


class OperatorClash(PrologSyntaxError):
    pass


# --- project model ----------------------------------------------------------

class ManifestError(PlrefError):
    pass


class DuplicateModuleName(PlrefError):
    pass


class ParseError(PlrefError):
    def __init__(self, file: str, cause: PlrefError):
        super().__init__(f"{file}: {cause}")
        self.file = file
        self.cause = cause


class NoRootsConfigured(PlrefError):
    pass


# --- transforms -------------------------------------------------------------

class TransformError(PlrefError):
    pass


class NameClash(TransformError):
    pass


class NonContiguousSelection(TransformError):
    pass


class CutInSelection(TransformError):
    pass


class OccurrenceMismatch(TransformError):
    pass


class NotExported(TransformError):
    pass


class NotDead(TransformError):
    pass


class ImportCycleCreated(TransformError):
    pass


class NotErasable(TransformError):
    pass


class ArityCollision(TransformError):
    pass


class RenamesBuiltin(TransformError):
    pass


class DefinitionClash(TransformError):
    pass


class NoPath(TransformError):
    pass


class VariableNotFound(TransformError):
    pass


class NotAPermutation(TransformError):
    pass


class NotApplicable(TransformError):
    pass


class MultipleCuts(TransformError):
    pass


class NotAnIte(TransformError):
    pass


class NotAUnification(TransformError):
    pass


class NoCutInClause(TransformError):
    pass


# --- edit application -------------------------------------------------------

class ConflictError(PlrefError):
    def __init__(self, conflicts: list):
        super().__init__("; ".join(str(c) for c in conflicts))
        self.conflicts = conflicts


# --- oracle -----------------------------------------------------------------

class UnsupportedBuiltin(PlrefError):
    def __init__(self, indicator: str):
        super().__init__(f"unsupported builtin {indicator}")
        self.indicator = indicator


class PrologRuntimeError(PlrefError):
    """Runtime error inside the reference interpreter (kind is ISO-ish)."""

    def __init__(self, kind: str, detail: Optional[str] = None):
        super().__init__(f"{kind}" + (f": {detail}" if detail else ""))
        self.kind = kind
