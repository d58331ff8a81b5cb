"""Exception hierarchy shared across the package."""


class JsrkitError(Exception):
    """Base class for all package errors."""


class InputError(JsrkitError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class ResourceCapError(JsrkitError):
    """An enumeration or iteration budget was exceeded (CLI exit code 3)."""


class NumericalError(JsrkitError):
    """A numerical routine failed or produced an ambiguous answer (CLI exit code 4).

    Carries the offending operand when available so the caller can inspect it.
    """

    def __init__(self, message, operand=None):
        super().__init__(message)
        self.operand = operand


class InconsistencyError(NumericalError):
    """A construction that is guaranteed nonempty at exact values came out
    empty, signalling that the supplied growth rate or tolerance is off."""
