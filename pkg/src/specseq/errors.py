"""Exception taxonomy shared across the engine.

The CLI maps these onto exit codes: ParseError -> 3, InvariantError and
its subclasses -> 4, EngineError -> 5.
"""


class SpecSeqError(Exception):
    """Base class for all engine errors."""


class ParseError(SpecSeqError):
    """Malformed input value or file; carries an optional location."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class InvariantError(SpecSeqError):
    """An input-level invariant failed; carries a witness when available."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ContainmentError(InvariantError):
    """A map failed to respect a required subspace containment."""


class EngineError(SpecSeqError):
    """Internal consistency failure: indicates an engine bug, not bad input."""
