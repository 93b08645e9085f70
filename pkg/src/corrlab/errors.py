"""Exception taxonomy shared by all corrlab modules.

The CLI maps these onto exit codes: precondition failures exit 2,
budget/scale guards exit 3, verification failures exit 4.
"""


class CorrlabError(Exception):
    """Base class for all corrlab errors."""


class PreconditionError(CorrlabError):
    """An operation was called outside its stated domain."""


class PrecisionError(PreconditionError):
    """A certified-error guard failed; rebuild alpha with more fractional bits."""


class AlphaParseError(PreconditionError):
    """Malformed alpha spec string; carries the offending position."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BudgetError(CorrlabError):
    """A scale, memory, or runtime budget guard was exceeded."""


class VerificationError(CorrlabError):
    """A cross-check between independent evaluation paths failed."""
