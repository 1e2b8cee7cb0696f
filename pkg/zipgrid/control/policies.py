"""
Input policies driven by the integrator.

A policy turns the local measurements of each DGU into its converter
voltage.  The integrator calls `InputPolicy.advance` once at the start of
every step (this is where a differentiator digests the newest voltage
measurement) and `InputPolicy.evaluate` at every stage of the step, with
the measured ``V̇`` (capacitor currents over ``C_s``) as an argument.
"""
__all__ = ['InputPolicy', 'ConstantInput', 'PassivityBasedController',
           'ComparisonController', 'as_policy']

import abc
import numpy as np

from typing import Any, Tuple

from zipgrid.classes import FilterBank
from zipgrid.control.differentiators import LevantState, levant_step
from zipgrid.control.pbc import (ControllerConfig, Measurement, comparison_controller,
                                 control_input)


class InputPolicy(abc.ABC):
    """
    Abstract base class for the inputs of a simulation.

    Implementations keep no run state on the instance: whatever changes
    during a run lives in the ``memory`` object returned by `start`, so
    one policy can drive several runs.
    """

    def start(self, filters: FilterBank, V0: np.ndarray) -> Any:
        """Return the run-local memory for a run starting at voltages ``V0``."""
        return None

    def advance(self, memory: Any, V: np.ndarray, dt: float) -> Any:
        """Digest the voltage measurement taken ``dt`` after the previous one."""
        return memory

    @abc.abstractmethod
    def evaluate(self, filters: FilterBank, I_s: np.ndarray, V: np.ndarray,
                 v_dot: np.ndarray, memory: Any) -> Tuple[np.ndarray, np.ndarray]:
        """
        Return the converter voltages and the ``V̇`` the policy used.

        Parameters
        ----------
        filters : `~zipgrid.classes.FilterBank`

        I_s, V : `~numpy.ndarray`
            Local filter currents (A) and voltages (V).

        v_dot : `~numpy.ndarray`
            Measured voltage derivatives (V/s).

        memory
            As returned by `start` or `advance`.
        """


class ConstantInput(InputPolicy):
    """Open loop: a constant converter voltage ``u`` (V) at every node."""

    def __init__(self, u):
        self.u = np.array(u, dtype=float, ndmin=1)
        self.u.setflags(write=False)

    def evaluate(self, filters, I_s, V, v_dot, memory):
        return np.broadcast_to(self.u, V.shape), v_dot


class PassivityBasedController(InputPolicy):
    """
    The decentralized passivity-based law of `~zipgrid.control.pbc`.

    Parameters
    ----------
    ctrl : `~zipgrid.control.pbc.ControllerConfig`

    mu : array_like, optional
        Constant extra input on the closed-loop port (V/H); zero by default.
    """

    def __init__(self, ctrl: ControllerConfig, mu=None):
        self.ctrl = ctrl
        self.mu = None if mu is None else np.array(mu, dtype=float, ndmin=1)

    @property
    def uses_levant(self) -> bool:
        return self.ctrl.derivative_mode == 'levant'

    def start(self, filters, V0):
        return LevantState.initial(V0) if self.uses_levant else None

    def advance(self, memory, V, dt):
        if not self.uses_levant:
            return memory
        memory, _ = levant_step(memory, V, dt, self.ctrl.levant_gains)
        return memory

    def evaluate(self, filters, I_s, V, v_dot, memory):
        if self.uses_levant:
            v_dot = memory.z1
        return control_input(filters, Measurement(I_s, V), self.ctrl, v_dot, self.mu), v_dot


class ComparisonController(InputPolicy):
    """
    The baseline law ``u = R_sI_s + V* − L_sK₁(V − V*)`` of
    `~zipgrid.control.pbc.comparison_controller`.
    """

    def __init__(self, ctrl: ControllerConfig):
        self.ctrl = ctrl

    def evaluate(self, filters, I_s, V, v_dot, memory):
        return comparison_controller(filters, Measurement(I_s, V), self.ctrl), v_dot


def as_policy(controller) -> InputPolicy:
    """
    Interpret ``controller`` as an input policy.

    A `~zipgrid.control.pbc.ControllerConfig` becomes a
    `PassivityBasedController`; numbers or arrays become a `ConstantInput`.
    """
    if isinstance(controller, InputPolicy):
        return controller
    if isinstance(controller, ControllerConfig):
        return PassivityBasedController(controller)
    return ConstantInput(controller)
