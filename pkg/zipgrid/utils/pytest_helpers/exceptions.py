"""Exceptions raised by the numerical oracles of the test suites."""
__all__ = ["IncorrectResultError", "InvalidTestError"]


class IncorrectResultError(AssertionError):
    """
    An analytic derivative disagrees with its finite-difference estimate
    by more than the tolerance.

    Derived from `AssertionError` so that pytest reports it as a failed
    assertion.
    """


class InvalidTestError(ValueError):
    """A finite-difference oracle was called with an unusable point."""
