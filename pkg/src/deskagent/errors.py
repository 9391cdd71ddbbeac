"""Exception types shared across the package."""

from __future__ import annotations


class DeskAgentError(Exception):
    """Base class for every error raised by this package."""


class OutOfBounds(DeskAgentError):
    """A pixel coordinate fell outside the screen."""


class UnknownApp(DeskAgentError):
    """An action referenced an application that does not exist."""


class UnknownSheet(DeskAgentError):
    """A cell write referenced a sheet that does not exist."""


class UnknownEvaluator(DeskAgentError):
    """A task referenced a check that is not registered."""


class NoMatch(DeskAgentError):
    """Visual grounding found no element scoring above the threshold."""


class PhraseNotFound(DeskAgentError):
    """A boundary phrase does not occur in the visible text.

    ``which`` is ``"start"`` or ``"end"`` depending on which phrase failed.
    """

    def __init__(self, which: str, phrase: str):
        super().__init__(f"{which} phrase not found: {phrase!r}")
        self.which = which
        self.phrase = phrase


class OrderViolation(DeskAgentError):
    """The ending phrase occurs only before the starting phrase."""


class BadAddress(DeskAgentError):
    """A cell key is not valid A1 notation."""


class ParseError(DeskAgentError):
    """Model output did not contain a valid action call.

    ``position`` is the character offset of the offending call in the
    source text, or ``None`` when no call-shaped text was found at all.
    """

    def __init__(self, reason: str, position: int | None = None):
        at = f" at offset {position}" if position is not None else ""
        super().__init__(f"{reason}{at}")
        self.reason = reason
        self.position = position


class EmptyPlan(DeskAgentError):
    """The planner produced no subgoals."""


class NoRule(DeskAgentError):
    """No scripted rule matched a backend request."""


class TransportError(DeskAgentError):
    """A remote backend call failed after exhausting retries."""


class RateLimited(DeskAgentError):
    """A remote backend kept answering 429 until retries ran out."""


class MismatchedTask(DeskAgentError):
    """Two records passed to a diff belong to different tasks."""


class SuiteError(DeskAgentError):
    """A task suite file is malformed or violates state invariants."""
