"""plref: a source-to-source refactoring toolkit for ISO-style Prolog."""

__version__ = "0.1.0"
