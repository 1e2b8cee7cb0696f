"""
Decentralized passivity-based voltage control of DC networks.

Every DGU applies

.. math::

    u = \\underbrace{R_s I_s − L_s Π [V]^{-2} \\dot{V}}_{u_{PBC}}
        \\underbrace{− L_s K_1 (V − V^*) − L_s K_2 \\dot{V} + V^*}_{u_{Stab}}
        + L_s μ

using only its own filter current, voltage and voltage derivative.  The
bound ``Π`` on the power of the (unknown) local P-load is the only load
information the controller needs; ``V̇`` is either measured (the capacitor
current divided by ``C_s``) or estimated with the sliding-mode
differentiator of `~zipgrid.control.differentiators`.
"""
__all__ = ['ControllerConfig', 'ControlOutput', 'Measurement',
           'u_pbc', 'u_stab', 'control_input', 'control_law', 'comparison_controller']

import numpy as np
import warnings

from astropy import units as u
from dataclasses import dataclass
from typing import NamedTuple, Optional

from zipgrid.classes import FilterBank, NetworkState
from zipgrid.control.differentiators import LevantGains, LevantState, levant_step
from zipgrid.formulary.loads import check_voltage
from zipgrid.utils.decorators import check_values, to_si
from zipgrid.utils.exceptions import AssumptionWarning, NonPositiveParameter

_DERIVATIVE_MODES = ('oracle', 'levant')


@dataclass(frozen=True, eq=False)
class ControllerConfig:
    """
    Tuning of the decentralized voltage controllers.

    Parameters
    ----------
    K1 : array_like
        Proportional voltage gains (H⁻¹), non-negative.

    K2 : array_like
        Derivative gains (s/H), positive for the stability guarantee.  A zero
        entry is accepted with an `~zipgrid.utils.exceptions.AssumptionWarning`.

    Pi : array_like
        Bounds ``Π`` (W) on the power drawn by each node's P-load,
        non-negative.  The guarantees need ``Π ⪰ [P*]``, which only a caller
        who knows the loads can check.

    V_star : array_like
        Voltage references (V), positive.

    derivative_mode : {'oracle', 'levant'}
        Where ``V̇`` comes from.

    levant_gains : `~zipgrid.control.differentiators.LevantGains`, optional
        Required in ``'levant'`` mode.

    Notes
    -----
    Scalars broadcast against the longest of the per-node arguments.
    """
    K1: np.ndarray
    K2: np.ndarray
    Pi: np.ndarray
    V_star: np.ndarray
    derivative_mode: str = 'oracle'
    levant_gains: Optional[LevantGains] = None

    def __post_init__(self):
        values = {
            'K1': to_si(self.K1, 1 / u.H, 'K1'),
            'K2': to_si(self.K2, u.s / u.H, 'K2'),
            'Pi': to_si(self.Pi, u.W, 'Pi'),
            'V_star': to_si(self.V_star, u.V, 'V_star'),
        }
        n = max(np.size(value) for value in values.values())
        for name, value in values.items():
            try:
                value = np.array(np.broadcast_to(value, (n,)), dtype=float)
            except ValueError:
                raise NonPositiveParameter(
                    f"The argument '{name}' must have one entry per node ({n}).") from None
            check_values(value, name, where='ControllerConfig', can_be_negative=False,
                         can_be_zero=(name != 'V_star'), can_be_inf=False,
                         can_be_nan=False)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

        if np.any(self.K2 == 0):
            warnings.warn("K2 has zero entries: the closed loop is not guaranteed to be "
                          "stable.", AssumptionWarning)

        if self.derivative_mode not in _DERIVATIVE_MODES:
            raise ValueError(f"derivative_mode must be one of {_DERIVATIVE_MODES}, "
                             f"got {self.derivative_mode!r}.")
        if self.derivative_mode == 'levant':
            if self.levant_gains is None:
                raise ValueError("The 'levant' derivative mode needs levant_gains.")
            gains = LevantGains(*(np.broadcast_to(value, (n,)) for value in
                                  (self.levant_gains.L, self.levant_gains.lambda0,
                                   self.levant_gains.lambda1)))
            object.__setattr__(self, 'levant_gains', gains)

    def __eq__(self, other):
        if not isinstance(other, ControllerConfig):
            return NotImplemented
        same_arrays = all(np.array_equal(getattr(self, name), getattr(other, name))
                          for name in ('K1', 'K2', 'Pi', 'V_star'))
        return (same_arrays and self.derivative_mode == other.derivative_mode
                and self.levant_gains == other.levant_gains)

    __hash__ = None

    @property
    def n(self) -> int:
        """Number of controlled nodes."""
        return self.V_star.size

    @classmethod
    def from_scalar(cls, n: int, K1, K2, Pi, V_star, **kwargs) -> "ControllerConfig":
        """Build a configuration with the same settings at all ``n`` nodes."""
        return cls(*(np.full(n, to_si(value, unit)) for value, unit in
                     ((K1, 1 / u.H), (K2, u.s / u.H), (Pi, u.W), (V_star, u.V))),
                   **kwargs)

    def covers(self, P_const) -> bool:
        """`True` if ``Π ⪰ [P*]`` for the given load powers."""
        return bool(np.all(self.Pi >= np.asarray(P_const)))


class ControlOutput(NamedTuple):
    """Output of `control_law`."""
    u: np.ndarray
    levant: Optional[LevantState]
    v_dot_used: np.ndarray


class Measurement(NamedTuple):
    """
    What the controllers measure: filter currents ``I_s`` (A) and node
    voltages ``V`` (V).

    Unlike `~zipgrid.classes.NetworkState` it is not validated and may
    stack several operating points in front of the node axis, which is
    always the last one.
    """
    I_s: np.ndarray
    V: np.ndarray


def _local(filters: FilterBank, state, ctrl: ControllerConfig, v_dot):
    nodes = np.shape(state.V)[-1]
    if not (filters.n == ctrl.n == nodes):
        raise ValueError(f"Controller for {ctrl.n} nodes cannot drive {filters.n} filters "
                         f"and a state with {nodes} nodes.")
    check_voltage(state.V)
    return np.broadcast_to(np.asarray(v_dot, dtype=float), np.shape(state.V))


def u_pbc(filters: FilterBank, state: NetworkState, ctrl: ControllerConfig, v_dot):
    """
    The passifying input ``u_PBC = R_sI_s − L_sΠ[V]⁻²V̇``.

    Parameters
    ----------
    filters : `~zipgrid.classes.FilterBank`
        The local filter constants.

    state : `~zipgrid.classes.NetworkState` or Measurement
        Only ``I_s`` and ``V`` are read.

    ctrl : ControllerConfig

    v_dot : array_like
        Node voltage derivatives (V/s).

    Returns
    -------
    `~numpy.ndarray`
        Per-node converter voltage (V).
    """
    v_dot = _local(filters, state, ctrl, v_dot)
    return filters.R_s * state.I_s - filters.L_s * ctrl.Pi / state.V ** 2 * v_dot


def u_stab(filters: FilterBank, state: NetworkState, ctrl: ControllerConfig, v_dot):
    """
    The stabilizing input ``u_Stab = −L_sK₁(V − V*) − L_sK₂V̇ + V*``.

    Examples
    --------
    >>> from zipgrid.classes import FilterBank, NetworkState
    >>> ctrl = ControllerConfig(50.0, 200.0, 25e3, 380.0)
    >>> state = NetworkState([0.0], [], [381.0])
    >>> u_stab(FilterBank([0.01], [1.8e-3]), state, ctrl, 0.0)
    array([379.91])
    """
    v_dot = _local(filters, state, ctrl, v_dot)
    return (-filters.L_s * ctrl.K1 * (state.V - ctrl.V_star)
            - filters.L_s * ctrl.K2 * v_dot + ctrl.V_star)


def control_input(filters: FilterBank, state: NetworkState, ctrl: ControllerConfig,
                  v_dot, mu=None) -> np.ndarray:
    """
    The combined law ``u = u_PBC + u_Stab + L_sμ`` for a given ``V̇``.

    Equivalently
    ``u = R_sI_s + V* − L_sK₁(V − V*) − L_s(Π[V]⁻² + K₂)V̇ + L_sμ``.
    """
    u_total = u_pbc(filters, state, ctrl, v_dot) + u_stab(filters, state, ctrl, v_dot)
    if mu is not None:
        u_total = u_total + filters.L_s * np.asarray(mu, dtype=float)
    return u_total


def control_law(filters: FilterBank, state: NetworkState, ctrl: ControllerConfig,
                levant: Optional[LevantState] = None, dt: Optional[float] = None,
                v_dot=None, mu=None) -> ControlOutput:
    """
    Evaluate the decentralized controllers.

    Parameters
    ----------
    filters : `~zipgrid.classes.FilterBank`
        Filter constants ``R_s`` and ``L_s``.  No load parameter is ever
        passed to the controller.

    state : `~zipgrid.classes.NetworkState`
        Only ``I_s`` and ``V`` are read.

    ctrl : ControllerConfig

    levant : `~zipgrid.control.differentiators.LevantState`, optional
        Differentiator states; required in ``'levant'`` mode.

    dt : float, optional
        Time since the previous call (s); required in ``'levant'`` mode.

    v_dot : array_like, optional
        The measured ``V̇`` (capacitor currents over ``C_s``); required in
        ``'oracle'`` mode.

    mu : array_like, optional
        Extra input port of the closed loop; zero by default.

    Returns
    -------
    ControlOutput
        The input ``u``, the updated differentiator states (``None`` in
        oracle mode) and the ``V̇`` that was used.

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If a node voltage is not positive.
    """
    if ctrl.derivative_mode == 'oracle':
        if v_dot is None:
            raise ValueError("The 'oracle' derivative mode needs the measured v_dot.")
        v_dot_used = np.array(np.broadcast_to(np.asarray(v_dot, dtype=float), (ctrl.n,)))
        updated = levant
    else:
        if levant is None or dt is None:
            raise ValueError("The 'levant' derivative mode needs the differentiator "
                             "state and dt.")
        check_voltage(state.V)
        updated, v_dot_used = levant_step(levant, state.V, dt, ctrl.levant_gains)

    return ControlOutput(control_input(filters, state, ctrl, v_dot_used, mu),
                         updated, v_dot_used)


def comparison_controller(filters: FilterBank, state: NetworkState,
                          ctrl: ControllerConfig) -> np.ndarray:
    """
    Baseline law without the derivative terms,
    ``u = R_sI_s + V* − L_sK₁(V − V*)``.

    It equals `control_input` with ``Π = 0`` and ``K₂ = 0`` and is known to
    lose stability when the P-loads are large enough.
    """
    _local(filters, state, ctrl, 0.0)
    return (filters.R_s * state.I_s + ctrl.V_star
            - filters.L_s * ctrl.K1 * (state.V - ctrl.V_star))
