"""Shared exception types."""


class NumericFailure(RuntimeError):
    """A numerical routine produced a non-finite or otherwise unusable value."""


class DegenerateModelError(ValueError):
    """Model parameters carry no signal (e.g. equal within/cross rates)."""
