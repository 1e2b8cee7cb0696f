"""Helpers for the zipgrid test suites."""
__all__ = ['assert_gradient_close', 'call_string', 'central_gradient', 'central_jacobian',
           'IncorrectResultError', 'InvalidTestError', 'mismatch_string', 'relative_error']

from zipgrid.utils.pytest_helpers.pytest_helpers import (
    assert_gradient_close,
    central_gradient,
    central_jacobian,
    relative_error,
)

from .error_messages import call_string, mismatch_string

from .exceptions import (
    IncorrectResultError,
    InvalidTestError,
)
