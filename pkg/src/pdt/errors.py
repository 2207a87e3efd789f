"""Exception hierarchy shared by the library and the command-line tool."""


class PdtError(Exception):
    """Base class for all errors raised by :mod:`pdt`."""


class InputError(PdtError, ValueError):
    """Malformed input: wrong shape, non-finite entries, bad parameters."""


class DomainError(PdtError, ValueError):
    """A map was evaluated outside the interval on which it is defined."""


class NotPositiveDefiniteError(PdtError, ValueError):
    """An operation required a positive definite argument and did not get one."""


class ScheduleExhausted(PdtError, RuntimeError):
    """The b-schedule of the cycle construction ran out before all checks passed.

    ``diagnostics`` holds a JSON-serializable description of the failing step.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
