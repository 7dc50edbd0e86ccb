"""
Exception hierarchy for the semigroup membership toolkit.

Every failure raised by the library derives from SemigroupToolkitError so the
CLI and the desktop front end can catch one type.
"""

from typing import Any, Optional


class SemigroupToolkitError(Exception):
    """Base exception for all toolkit errors."""

    pass


class MalformedInput(SemigroupToolkitError):
    """A table, graph, DFA or identity file does not follow its format."""

    pass


class NotASemigroup(SemigroupToolkitError):
    """An operation that needs a total associative table got something else."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class NotIdempotent(SemigroupToolkitError):
    pass


class EmptySubset(SemigroupToolkitError):
    pass


class NotACongruence(SemigroupToolkitError):
    """Raised by quotient(verify=True); witness is the violating pair data."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class FormulaSyntaxError(SemigroupToolkitError):
    """Syntax error in a formula, identity or variety expression."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundVariable(SemigroupToolkitError):
    pass


class ArityMismatch(SemigroupToolkitError):
    pass


class UnknownVariety(SemigroupToolkitError):
    pass


class UnsupportedRealization(SemigroupToolkitError):
    pass


class NotAForest(SemigroupToolkitError):
    pass


class InvalidGraph(SemigroupToolkitError):
    pass


class SizeCap(SemigroupToolkitError):
    """A generated semigroup grew past the configured element cap."""

    pass
