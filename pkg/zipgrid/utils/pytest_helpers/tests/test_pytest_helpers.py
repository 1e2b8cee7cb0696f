import numpy as np
import pytest

from zipgrid.utils.pytest_helpers import (assert_gradient_close,
                                          call_string,
                                          central_gradient,
                                          central_jacobian,
                                          IncorrectResultError,
                                          InvalidTestError,
                                          mismatch_string,
                                          relative_error)


def quadratic(x):
    return x[0] ** 2 + 3 * x[0] * x[1] - x[1] ** 3


def quadratic_gradient(x):
    return np.array([2 * x[0] + 3 * x[1], 3 * x[0] - 3 * x[1] ** 2])


def test_central_gradient():
    x = np.array([1.5, -0.5])
    assert np.allclose(central_gradient(quadratic, x), quadratic_gradient(x), rtol=1e-9)


def test_central_gradient_needs_vector():
    with pytest.raises(InvalidTestError):
        central_gradient(quadratic, np.ones((2, 2)))


def test_central_jacobian():
    A = np.array([[1.0, 2.0], [0.0, -3.0], [4.0, 1.0]])
    x = np.array([0.3, 380.0])
    assert np.allclose(central_jacobian(lambda y: A @ y, x), A)


def test_relative_error():
    assert relative_error([1.0, 1.0], [1.0, 1.0]) == 0
    assert np.isclose(relative_error([2.0], [1.0]), 1.0)
    assert np.isclose(relative_error([1e-13], [0.0]), 0.1)


class TestAssertGradientClose:

    def test_passes(self):
        assert_gradient_close(quadratic, quadratic_gradient, [0.2, 0.7])

    def test_fails_with_message(self):
        with pytest.raises(IncorrectResultError, match='wrong_gradient'):
            assert_gradient_close(quadratic, lambda x: 2 * quadratic_gradient(x), [0.2, 0.7],
                                  label='wrong_gradient')


def test_messages_without_color():
    assert call_string(quadratic, color=False) == 'quadratic'
    message = mismatch_string('f', [1.0], [2.0], 0.5, 1e-6, color=False)
    assert message.startswith('f returned [1.]')
    assert '5.000e-01' in message
