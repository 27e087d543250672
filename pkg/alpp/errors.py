"""
Exception hierarchy shared by every solver, reduction and the CLI.

Verdicts about packings are returned as data; exceptions are reserved for
inputs that cannot be interpreted, exhausted budgets and broken contracts.
"""

from typing import Optional


class AlppError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(AlppError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceLimitError(AlppError):
    """A budget or size cap was hit before an exact answer was reached."""


class ContractViolation(AlppError):
    """A caller broke a precondition (wrong ell, non-maximum matching, ...)."""


class ConstructionError(AlppError, ValueError):
    """A reduction's construction precondition does not hold for the input."""


class DisagreementError(AlppError):
    def __init__(self, message: str, instance=None, answers=None):
        super().__init__(message)
        self.instance = instance
        self.answers = answers or {}
