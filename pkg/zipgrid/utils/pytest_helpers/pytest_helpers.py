"""
Numerical oracles shared by the zipgrid test suites.
"""
__all__ = ["central_gradient", "central_jacobian", "relative_error",
           "assert_gradient_close"]

import numpy as np

from typing import Callable, Optional

from zipgrid.utils.pytest_helpers.error_messages import call_string, mismatch_string
from zipgrid.utils.pytest_helpers.exceptions import IncorrectResultError, InvalidTestError


def _steps(x: np.ndarray, rel_step: float) -> np.ndarray:
    return rel_step * np.maximum(1.0, np.abs(x))


def central_gradient(f: Callable, x, rel_step: float = 1e-4) -> np.ndarray:
    """
    Fourth-order central finite-difference gradient of a scalar function.

    Parameters
    ----------
    f : callable
        Maps a 1D array to a float.

    x : array_like
        Point of evaluation.

    rel_step : float
        Step size relative to ``max(1, |x_i|)``.

    Examples
    --------
    >>> import numpy as np
    >>> central_gradient(lambda x: x[0] ** 2 + 3 * x[1], np.array([2.0, 1.0]))
    array([4., 3.])
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidTestError("central_gradient expects a 1D point.")

    h = _steps(x, rel_step)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        grad[i] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h[i])
    return grad


def central_jacobian(f: Callable, x, rel_step: float = 1e-4) -> np.ndarray:
    """
    Fourth-order central finite-difference Jacobian of a vector function.

    Row ``i`` holds the derivatives of ``f(x)[i]``.
    """
    x = np.asarray(x, dtype=float)
    h = _steps(x, rel_step)
    columns = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        fp1, fm1 = np.asarray(f(x + e)), np.asarray(f(x - e))
        fp2, fm2 = np.asarray(f(x + 2 * e)), np.asarray(f(x - 2 * e))
        columns.append((-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h[i]))
    return np.stack(columns, axis=-1)


def relative_error(actual, expected, floor: float = 1e-12) -> float:
    """
    Norm-wise relative error ``‖actual − expected‖ / max(‖expected‖, floor)``.
    """
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    return float(np.linalg.norm(actual - expected)
                 / max(np.linalg.norm(expected), floor))


def assert_gradient_close(f: Callable, grad: Callable, x, rtol: float = 1e-6,
                          rel_step: float = 1e-4, label: Optional[str] = None):
    """
    Check an analytic gradient against `central_gradient`.

    Parameters
    ----------
    f : callable
        Scalar function of a 1D array.

    grad : callable
        Its analytic gradient.

    x : array_like
        Point of evaluation.

    rtol : float
        Largest allowed norm-wise relative error.

    Raises
    ------
    ~zipgrid.utils.pytest_helpers.IncorrectResultError
        If the two gradients differ by more than ``rtol``.
    """
    x = np.asarray(x, dtype=float)
    analytic = np.asarray(grad(x), dtype=float)
    numeric = central_gradient(f, x, rel_step=rel_step)
    error = relative_error(analytic, numeric)
    if not error <= rtol:
        raise IncorrectResultError(
            mismatch_string(call_string(grad, label or ""), analytic, numeric, error, rtol)
        )
