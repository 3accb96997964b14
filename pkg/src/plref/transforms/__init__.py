"""The refactoring catalogue: pure Program -> EditSet functions."""

from .arguments import add_argument, remove_arguments, reorder_arguments
from .clauses import (
    invert_ite,
    output_after_commit,
    replace_cut_by_ite,
    unification_to_test,
)
from .extract import extract_predicate
from .modules import merge_modules, move_predicate, split_module
from .removal import (
    hide_predicates,
    remove_dead,
    remove_duplicates,
    remove_unused_import,
)
from .renames import rename_functor, rename_module, rename_predicate

__all__ = [
    "add_argument",
    "extract_predicate",
    "hide_predicates",
    "invert_ite",
    "merge_modules",
    "move_predicate",
    "output_after_commit",
    "remove_arguments",
    "remove_dead",
    "remove_duplicates",
    "remove_unused_import",
    "rename_functor",
    "rename_module",
    "rename_predicate",
    "reorder_arguments",
    "replace_cut_by_ite",
    "split_module",
    "unification_to_test",
]
