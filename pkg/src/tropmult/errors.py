"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class TropMultError(Exception):
    """Base class for every error raised by :mod:`tropmult`."""

    exit_code = 2


class MalformedInput(TropMultError):
    """Input data could not be parsed into a curve document."""

    exit_code = 1


class PreconditionError(TropMultError):
    """An operation was called on data that violates its preconditions."""

    exit_code = 2


class InvariantViolation(TropMultError):
    """An internal consistency check failed; this indicates a bug."""

    exit_code = 3
