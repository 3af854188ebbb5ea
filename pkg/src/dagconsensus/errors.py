"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed caller input: unknown labels, mismatched node sets, bad flags."""


class CycleError(InputError):
    """A directed cycle was found where a DAG was required.

    The message names at least one edge on the offending cycle.
    """


class StructuralError(RuntimeError):
    """An internal structural invariant failed, e.g. a PDAG with no
    consistent extension."""


class OperatorError(ValueError):
    """A delete operator was applied with an invalid H set."""


class StateError(RuntimeError):
    """An operation was requested in a state that cannot support it,
    e.g. asking for the best edge of an empty graph."""
