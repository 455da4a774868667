"""Exception types shared across the package."""


class BcinvError(Exception):
    """Base class for all package-specific errors."""


class BoundTooSmallError(BcinvError):
    """A truncation bound is too small to decide the question asked.

    Carries the bound that failed so callers can escalate.
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class UnstabilizedBoundError(BcinvError):
    """A construction requires a stabilized truncation window and got less."""


class PrecisionError(BcinvError):
    """A residue computation cannot be carried out at the given precision."""


class IngestionError(BcinvError):
    """A field description file is malformed or internally inconsistent."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class IncompleteRepresentativesError(BcinvError):
    """A coset-representative family does not cover every coset."""


class InternalCheckError(BcinvError):
    """An internal consistency certificate failed; indicates a bug, not bad input."""


class UsageError(BcinvError):
    """Bad command-line arguments."""

    def __init__(self, message, usage=None):
        super().__init__(message)
        self.usage = usage
