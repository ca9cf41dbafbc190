"""Exception types shared across the toolkit."""


class MediffError(Exception):
    """Base class for all toolkit errors."""


class UsageError(MediffError, ValueError):
    """A caller violated an argument contract (bad parameter, misaligned input)."""


class InsufficientDataError(MediffError):
    """The input series is too short for the requested operation.

    The message always names the binding constraint (which window or test
    needs how many samples).
    """
