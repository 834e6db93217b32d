"""Exception types shared across the package.

The CLI maps each class to a process exit code.
"""


class NPSError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(NPSError, ValueError):
    """An argument lies outside the domain of an operation (bad shape, cell, tableau)."""

    exit_code = 2


class InvalidCallError(DomainError):
    """An operation was called in a state where it does not apply."""


class CapacityError(NPSError):
    """A requested exhaustive computation exceeds the configured size cap."""

    exit_code = 3


class InvariantViolation(NPSError, ArithmeticError):
    """A mathematical invariant failed to hold (non-exact division, unequal counts, ...)."""

    exit_code = 4
