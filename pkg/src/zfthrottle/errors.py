"""Exception taxonomy shared by every module.

Capacity errors mark inputs beyond the documented exhaustive-search limits,
domain errors mark violated mathematical preconditions, usage errors mark
malformed calls, and internal errors flag states that a correct engine can
never reach (they indicate a bug, not bad input).
"""


class ZFError(Exception):
    """Base class for all package errors."""


class CapacityError(ZFError):
    """Input exceeds a documented size limit of an exhaustive algorithm."""


class DomainError(ZFError):
    """A mathematical precondition on the input is violated."""


class UsageError(ZFError):
    """The call itself is malformed (wrong rule, incomplete schedule, ...)."""


class Graph6ParseError(ZFError):
    """Malformed graph6 input; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ScriptError(ZFError):
    """A minor script references edges it is not allowed to touch."""


class InternalConsistencyError(ZFError):
    """An invariant the engine guarantees was violated; indicates a bug."""
