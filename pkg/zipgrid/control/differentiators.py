"""
Robust exact differentiation of the measured node voltages.

The first-order sliding-mode differentiator tracks a signal ``f`` with
the internal states ``z₀ ≈ f`` and ``z₁ ≈ ḟ``:

.. math::

    \\dot{z}_0 &= v, \\qquad
    v = z_1 − λ_0 L^{1/2} |z_0 − f|^{1/2} \\operatorname{sign}(z_0 − f) \\\\
    \\dot{z}_1 &= −λ_1 L \\operatorname{sign}(z_1 − v)

It converges in finite time whenever ``L`` bounds ``|f̈|``.  The
recursion is discretized with explicit Euler, one update per call.
"""
__all__ = ['LevantGains', 'LevantState', 'levant_step',
           'DEFAULT_LAMBDA0', 'DEFAULT_LAMBDA1']

import numpy as np

from astropy import units as u
from dataclasses import dataclass
from typing import Tuple

from zipgrid.utils.decorators import check_values, to_si

DEFAULT_LAMBDA0 = 1.5
DEFAULT_LAMBDA1 = 1.1


@dataclass(frozen=True, eq=False)
class LevantGains:
    """
    Gains of the differentiator, one set per node.

    Parameters
    ----------
    L : array_like
        Lipschitz constant of the differentiated signal's derivative, i.e. a
        bound on ``|V̈|`` (V/s²).  Must be sized for the application.

    lambda0, lambda1 : array_like
        Dimensionless gains; the defaults are the classical values 1.5 and
        1.1.
    """
    L: np.ndarray
    lambda0: np.ndarray = DEFAULT_LAMBDA0
    lambda1: np.ndarray = DEFAULT_LAMBDA1

    def __post_init__(self):
        for name, unit in (('L', u.V / u.s ** 2),
                           ('lambda0', u.dimensionless_unscaled),
                           ('lambda1', u.dimensionless_unscaled)):
            value = np.atleast_1d(to_si(getattr(self, name), unit, name))
            check_values(value, name, where='LevantGains', can_be_negative=False,
                         can_be_zero=False, can_be_inf=False, can_be_nan=False)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __eq__(self, other):
        if not isinstance(other, LevantGains):
            return NotImplemented
        return all(np.array_equal(getattr(self, name), getattr(other, name))
                   for name in ('L', 'lambda0', 'lambda1'))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LevantState:
    """
    Internal states ``(z₀, z₁)`` of the differentiator, one pair per node.

    A fresh differentiator is obtained with `LevantState.initial`.
    """
    z0: np.ndarray
    z1: np.ndarray

    @classmethod
    def initial(cls, v0) -> "LevantState":
        """Start tracking at the measurement ``v0`` with a zero derivative."""
        v0 = np.array(v0, dtype=float, ndmin=1)
        return cls(v0, np.zeros_like(v0))


def levant_step(levant: LevantState, measured_v, dt: float,
                gains: LevantGains) -> Tuple[LevantState, np.ndarray]:
    """
    Advance the differentiator by one explicit Euler step.

    Parameters
    ----------
    levant : LevantState
        Current internal states.

    measured_v : array_like
        The newest measurement of the signal.

    dt : float
        Time step (s), positive.

    gains : LevantGains

    Returns
    -------
    updated : LevantState

    estimate : `~numpy.ndarray`
        The derivative estimate ``z₁`` after the update.

    Examples
    --------
    >>> gains = LevantGains(L=100.0)
    >>> state, estimate = levant_step(LevantState.initial(5.0), 5.0, 1e-3, gains)
    >>> estimate
    array([0.])
    """
    if not dt > 0:
        raise ValueError(f"The time step must be positive, got {dt}.")
    f = np.asarray(measured_v, dtype=float)
    error = levant.z0 - f
    v = levant.z1 - gains.lambda0 * np.sqrt(gains.L * np.abs(error)) * np.sign(error)
    z0 = levant.z0 + v * dt
    z1 = levant.z1 - gains.lambda1 * gains.L * np.sign(levant.z1 - v) * dt
    return LevantState(z0, z1), z1
