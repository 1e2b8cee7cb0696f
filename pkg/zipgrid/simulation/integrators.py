"""
Time integration of DC networks under open- or closed-loop inputs.

The closed loop is an explicit ODE: ``V̇`` is a function of the state
(the capacitor currents), the controllers turn it into ``u`` and ``u``
drives the filter currents.  `simulate` integrates it with fixed-step RK4
(or scipy's adaptive RK45), splits steps at timed load events and records
states together with the applied inputs.
"""
__all__ = ['SimConfig', 'Event', 'Trajectory', 'VectorField', 'simulate',
           'closed_loop_rhs', 'vector_field_grid']

import dataclasses
import numpy as np
import scipy.integrate

from astropy import units as u
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

from zipgrid.classes import Network, NetworkState, V_MIN
from zipgrid.control.policies import InputPolicy, PassivityBasedController, as_policy
from zipgrid.formulary.loads import check_voltage
from zipgrid.utils.decorators import check_values, to_si
from zipgrid.utils.exceptions import (DomainExit,
                                      NetworkNotScalar,
                                      NonFiniteState,
                                      SimulationError)

_METHODS = ('rk4', 'rk45')


@dataclass(frozen=True)
class SimConfig:
    """
    Integration settings.

    Parameters
    ----------
    t_end : float or `~astropy.units.Quantity`
        Final time (s), positive.

    dt : float or `~astropy.units.Quantity`
        Step of the fixed-step method (s).  The default resolves the fast
        line modes (``L_t/R_t`` of a few tens of µs) with several steps.

    method : {'rk4', 'rk45'}
        Classical fixed-step Runge-Kutta, or scipy's adaptive
        Dormand-Prince pair.

    rel_tol, abs_tol : float
        Tolerances of the adaptive method.

    record_stride : int
        Record every ``record_stride``-th step.  Event times and ``t_end``
        are always recorded.
    """
    t_end: float
    dt: float = 1e-5
    method: str = 'rk4'
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    record_stride: int = 1

    def __post_init__(self):
        for name, unit in (('t_end', u.s), ('dt', u.s),
                           ('rel_tol', u.dimensionless_unscaled),
                           ('abs_tol', u.dimensionless_unscaled)):
            value = float(to_si(getattr(self, name), unit, name))
            check_values(value, name, where='SimConfig', can_be_negative=False,
                         can_be_zero=False, can_be_inf=False, can_be_nan=False)
            object.__setattr__(self, name, value)
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}.")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer, "
                             f"got {self.record_stride!r}.")
        object.__setattr__(self, 'record_stride', int(self.record_stride))


@dataclass(frozen=True, eq=False)
class Event:
    """
    A step change of the loads at ``time``.

    Parameters
    ----------
    time : float or `~astropy.units.Quantity`
        When the change happens (s).

    dZ_inv, dI_const, dP_const : array_like
        Per-node increments of the load conductances (S), currents (A)
        and powers (W); scalars apply to every node.
    """
    time: float
    dZ_inv: np.ndarray = 0.0
    dI_const: np.ndarray = 0.0
    dP_const: np.ndarray = 0.0

    def __post_init__(self):
        time = float(to_si(self.time, u.s, 'time'))
        check_values(time, 'time', where='Event', can_be_negative=False, can_be_inf=False,
                     can_be_nan=False)
        object.__setattr__(self, 'time', time)
        for name, unit in (('dZ_inv', u.S), ('dI_const', u.A), ('dP_const', u.W)):
            value = np.atleast_1d(np.array(to_si(getattr(self, name), unit, name),
                                           dtype=float))
            check_values(value, name, where='Event', can_be_inf=False, can_be_nan=False)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self.time == other.time and all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ('dZ_inv', 'dI_const', 'dP_const'))

    __hash__ = None

    def apply(self, net: Network) -> Network:
        """
        The network after the load change.

        Raises
        ------
        ~zipgrid.utils.exceptions.NonPositiveParameter
            If a load component becomes negative.
        """
        return net.with_load_delta(self.dZ_inv, self.dI_const, self.dP_const)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    A recorded simulation.

    Attributes
    ----------
    t : `~numpy.ndarray`
        Strictly increasing sample times (s), shape ``(k,)``.

    x : `~numpy.ndarray`
        Stacked states ``[I_s, I_t, V]``, shape ``(k, 2n + m)``.

    u : `~numpy.ndarray`
        Converter voltages applied from each sample on (V), shape ``(k, n)``.

    v_dot_used : `~numpy.ndarray`
        The ``V̇`` the input policy used at each sample (V/s), shape
        ``(k, n)``.

    segment : `~numpy.ndarray`
        Index into ``networks`` of the load set active at each sample.

    networks : tuple of `~zipgrid.classes.Network`
        The network before the first event and after every event.

    event_times : tuple of float
        Times of the applied events (s).
    """
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    v_dot_used: np.ndarray
    segment: np.ndarray
    networks: Tuple[Network, ...]
    event_times: Tuple[float, ...] = ()

    def __post_init__(self):
        for name in ('t', 'x', 'u', 'v_dot_used', 'segment'):
            value = np.array(getattr(self, name))
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, 'networks', tuple(self.networks))
        object.__setattr__(self, 'event_times', tuple(float(t) for t in self.event_times))

    def __len__(self):
        return self.t.size

    @property
    def n(self) -> int:
        return self.networks[0].n

    @property
    def m(self) -> int:
        return self.networks[0].m

    @property
    def I_s(self) -> np.ndarray:
        """Filter currents (A), shape ``(k, n)``."""
        return self.x[:, :self.n]

    @property
    def I_t(self) -> np.ndarray:
        """Line currents (A), shape ``(k, m)``."""
        return self.x[:, self.n:self.n + self.m]

    @property
    def V(self) -> np.ndarray:
        """Node voltages (V), shape ``(k, n)``."""
        return self.x[:, self.n + self.m:]

    def state(self, i: int) -> NetworkState:
        """The recorded state with index ``i``."""
        return NetworkState.from_vector(self.x[i], self.n, self.m)

    def network_at(self, i: int) -> Network:
        """The network active at sample ``i``."""
        return self.networks[self.segment[i]]

    def segment_slices(self) -> List[slice]:
        """One slice per load set, covering the samples recorded under it."""
        bounds = np.flatnonzero(np.diff(self.segment)) + 1
        starts = np.concatenate(([0], bounds))
        stops = np.concatenate((bounds, [self.t.size]))
        return [slice(int(a), int(b)) for a, b in zip(starts, stops)]


class VectorField(NamedTuple):
    """Closed-loop phase portrait of a single node on an ``(I_s, V)`` grid."""
    I_s: np.ndarray
    V: np.ndarray
    dI_s: np.ndarray
    dV: np.ndarray


class _DomainLeft(Exception):
    def __init__(self, node: int):
        self.node = node


class _Field:
    """The explicit closed-loop field of one load set, on stacked vectors."""

    def __init__(self, net: Network, policy: InputPolicy):
        self.net = net
        self.policy = policy
        self.filters = net.filters
        self.n, self.m = net.n, net.m
        self.incidence = np.array(net.incidence)
        self.incidence_T = np.array(net.incidence.T)

    def evaluate(self, x, memory):
        n, m, net = self.n, self.m, self.net
        I_s, I_t, V = x[:n], x[n:n + m], x[n + m:]
        if V.min() <= V_MIN:
            raise _DomainLeft(int(np.argmin(V)))
        load = net.Z_inv * V + net.I_const + net.P_const / V
        v_dot = (I_s + self.incidence @ I_t - load) / net.C_s
        u_now, v_dot_used = self.policy.evaluate(self.filters, I_s, V, v_dot, memory)
        dI_s = (-net.R_s * I_s - V + u_now) / net.L_s
        dI_t = (-net.R_t * I_t - self.incidence_T @ V) / net.L_t
        return np.concatenate((dI_s, dI_t, v_dot)), u_now, v_dot_used

    def __call__(self, x, memory):
        return self.evaluate(x, memory)[0]


def _rk4_step(field: _Field, x, h, memory):
    k1 = field(x, memory)
    k2 = field(x + 0.5 * h * k1, memory)
    k3 = field(x + 0.5 * h * k2, memory)
    k4 = field(x + h * k3, memory)
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class _Recorder:

    def __init__(self, networks):
        self.networks = networks
        self.t, self.x, self.u, self.v_dot, self.segment = [], [], [], [], []
        self.event_times = []

    def add(self, t, x, u_now, v_dot_used, segment):
        self.t.append(t)
        self.x.append(np.array(x))
        self.u.append(np.array(u_now, dtype=float))
        self.v_dot.append(np.array(v_dot_used, dtype=float))
        self.segment.append(segment)

    def trajectory(self, n: int, m: int) -> Trajectory:
        k = len(self.t)
        return Trajectory(np.array(self.t, dtype=float),
                          np.array(self.x).reshape(k, 2 * n + m),
                          np.array(self.u).reshape(k, n),
                          np.array(self.v_dot).reshape(k, n),
                          np.array(self.segment, dtype=int),
                          self.networks[:max(self.segment, default=0) + 1],
                          self.event_times)


def _networks_after(net: Network, events: Sequence[Event], t_end: float):
    events = sorted(events, key=lambda event: event.time)
    networks = [net]
    for event in events:
        if not 0 < event.time < t_end:
            raise ValueError(f"Event time {event.time} s is outside (0, {t_end}) s.")
        networks.append(event.apply(networks[-1]))
    return events, tuple(networks)


class _Run:
    """State shared by both integration methods."""

    def __init__(self, net, policy, x0, sim, events):
        x0.check_shape(net)
        check_voltage(x0.V, 'x0.V')
        self.sim = sim
        self.policy = policy
        self.n, self.m = net.n, net.m
        self.events, networks = _networks_after(net, events, sim.t_end)
        self.fields = [_Field(network, policy) for network in networks]
        self.recorder = _Recorder(networks)
        self.segment = 0
        self.memory = policy.start(net.filters, x0.V)
        self.t_measured = 0.0

    @property
    def field(self) -> _Field:
        return self.fields[self.segment]

    def measure(self, t, x):
        """Let the policy digest the voltages at ``t`` (once per time)."""
        if t > self.t_measured:
            self.memory = self.policy.advance(self.memory, x[self.n + self.m:],
                                              t - self.t_measured)
            self.t_measured = t

    def record(self, t, x):
        self.measure(t, x)
        _, u_now, v_dot_used = self.field.evaluate(x, self.memory)
        self.recorder.add(t, x, u_now, v_dot_used, self.segment)

    def apply_event(self):
        self.recorder.event_times.append(self.events[self.segment].time)
        self.segment += 1

    def domain_exit(self, t, node) -> DomainExit:
        return DomainExit(f"Voltage at node {node} fell to {V_MIN} V or below near "
                          f"t = {t:.6g} s.", time=t, node=node,
                          trajectory=self.trajectory())

    def check_finite(self, t, x):
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(f"The state is not finite at t = {t:.6g} s.", time=t,
                                 trajectory=self.trajectory())

    def trajectory(self) -> Trajectory:
        return self.recorder.trajectory(self.n, self.m)


def _simulate_rk4(run: _Run, x):
    sim = run.sim
    dt, t_end = sim.dt, sim.t_end
    event_times = [event.time for event in run.events]
    snap = 1e-9 * dt

    t, k = 0.0, 0
    run.record(t, x)
    while t < t_end:
        t_grid = min((k + 1) * dt, t_end)
        if t_end - t_grid < snap:
            t_grid = t_end
        target = t_grid
        pending = event_times[run.segment] if run.segment < len(event_times) else None
        if pending is not None and pending < t_grid + snap:
            target = pending

        run.measure(t, x)
        try:
            x = _rk4_step(run.field, x, target - t, run.memory)
        except _DomainLeft as exc:
            raise run.domain_exit(t, exc.node) from None
        run.check_finite(target, x)
        t = target
        on_grid = abs(t - t_grid) < snap
        if on_grid:
            t = t_grid
            k += 1

        applied = False
        while run.segment < len(event_times) and abs(event_times[run.segment] - t) < snap:
            run.apply_event()
            applied = True
        try:
            if applied or (on_grid and (k % sim.record_stride == 0 or t >= t_end)):
                run.record(t, x)
        except _DomainLeft as exc:
            raise run.domain_exit(t, exc.node) from None
    return run.trajectory()


def _simulate_rk45(run: _Run, x):
    sim = run.sim
    bounds = [event.time for event in run.events] + [sim.t_end]
    run.record(0.0, x)
    t0 = 0.0
    left_domain = []

    def fun(t, y):
        try:
            return run.field(y, run.memory)
        except _DomainLeft as exc:
            left_domain.append((t, exc.node))
            return np.full_like(y, np.nan)

    for t_bound in bounds:
        solver = scipy.integrate.RK45(fun, t0, x, t_bound, rtol=sim.rel_tol,
                                      atol=sim.abs_tol)
        steps = 0
        while solver.status == 'running':
            run.measure(solver.t, solver.y)
            left_domain.clear()
            solver.step()
            if solver.status == 'failed':
                if left_domain:
                    raise run.domain_exit(*left_domain[-1])
                raise SimulationError(f"RK45 failed at t = {solver.t:.6g} s: "
                                      f"{solver.message}")
            run.check_finite(solver.t, solver.y)
            steps += 1
            if steps % sim.record_stride == 0 and solver.t < t_bound:
                run.record(solver.t, solver.y)
        t0, x = t_bound, solver.y
        if t_bound < sim.t_end:
            run.apply_event()
        try:
            run.record(t0, x)
        except _DomainLeft as exc:
            raise run.domain_exit(t0, exc.node) from None
    return run.trajectory()


def simulate(net: Network, controller, x0: NetworkState, sim: SimConfig,
             events: Sequence[Event] = ()) -> Trajectory:
    """
    Integrate the network from ``x0`` under an input policy.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`
        The network before the first event.

    controller : ControllerConfig, InputPolicy or array_like
        A controller configuration (the passivity-based law), any input
        policy, or constant converter voltages (V) for an open-loop run.

    x0 : `~zipgrid.classes.NetworkState`
        Initial state, with positive voltages.

    sim : SimConfig

    events : Sequence[Event]
        Load changes, at times in ``(0, t_end)``.

    Returns
    -------
    Trajectory
        Samples at ``t = 0``, every ``record_stride`` steps, at every event
        (the state after the change) and at ``t_end``.

    Raises
    ------
    ~zipgrid.utils.exceptions.DomainExit
        If a node voltage reaches `~zipgrid.classes.V_MIN`; the exception
        carries the exit time, the node and the trajectory recorded so far.

    ~zipgrid.utils.exceptions.NonFiniteState
        If the state overflows.

    Notes
    -----
    Fixed steps sit on the grid ``t = k·dt``; a step containing an event is
    split so that the load change happens exactly at its time.  A
    differentiator in the policy digests one measurement per step and its
    estimate is held through the RK4 stages.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> from zipgrid.formulary import equilibrium_from_vstar
    >>> net = build_network([DguParams(0.01, 1.12e-3, 6.8e-3)], [],
    ...                     [ZipLoad(0.04, 10, 5000)])
    >>> eq = equilibrium_from_vstar(net, 380)
    >>> traj = simulate(net, eq.u_bar, eq.state, SimConfig(t_end=1e-3, dt=1e-4))
    >>> len(traj), traj.V[-1]
    (11, array([380.]))
    """
    policy = as_policy(controller)
    run = _Run(net, policy, x0, sim, events)
    x = x0.as_vector()
    if sim.method == 'rk4':
        return _simulate_rk4(run, x)
    return _simulate_rk45(run, x)


def _oracle(controller) -> InputPolicy:
    policy = as_policy(controller)
    if isinstance(policy, PassivityBasedController) and policy.uses_levant:
        policy = PassivityBasedController(
            dataclasses.replace(policy.ctrl, derivative_mode='oracle', levant_gains=None),
            policy.mu)
    return policy


def closed_loop_rhs(net: Network, state: NetworkState, controller) -> NetworkState:
    """
    The closed-loop time derivative at ``state``, with ``V̇`` measured
    exactly (oracle mode regardless of the controller's setting).

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    state : `~zipgrid.classes.NetworkState`

    controller : ControllerConfig, InputPolicy or array_like

    Returns
    -------
    `~zipgrid.classes.NetworkState`
        ``(İ_s, İ_t, V̇)``.
    """
    state.check_shape(net)
    check_voltage(state.V)
    field = _Field(net, _oracle(controller))
    return NetworkState.from_vector(field(state.as_vector(), None), net.n, net.m)


def vector_field_grid(net: Network, controller, is_range: Tuple[float, float],
                      v_range: Tuple[float, float], resolution=25) -> VectorField:
    """
    Closed-loop ``(İ_s, V̇)`` of a single node on a regular grid.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`
        A single node without lines.

    controller : ControllerConfig, InputPolicy or array_like
        Evaluated in oracle mode.

    is_range : tuple of float
        Filter current interval (A).

    v_range : tuple of float
        Voltage interval (V), positive.

    resolution : int or tuple of int
        Grid points along ``I_s`` and ``V``.

    Returns
    -------
    VectorField
        Arrays of shape ``(n_V, n_I)`` as from `numpy.meshgrid`.

    Raises
    ------
    ~zipgrid.utils.exceptions.NetworkNotScalar
        If ``net`` is not a single node.
    """
    if not net.is_scalar:
        raise NetworkNotScalar(f"The phase portrait needs a single node without lines, "
                               f"got n={net.n}, m={net.m}.")
    n_i, n_v = np.broadcast_to(np.asarray(resolution, dtype=int), (2,))
    I_s, V = np.meshgrid(np.linspace(*is_range, n_i), np.linspace(*v_range, n_v))
    check_voltage(V, 'v_range')

    policy = _oracle(controller)
    filters = net.filters
    v_dot = (I_s - (net.Z_inv * V + net.I_const + net.P_const / V)) / net.C_s
    # the policies expect the node axis last
    I_node, V_node, v_dot_node = (grid[..., np.newaxis] for grid in (I_s, V, v_dot))
    u_grid, _ = policy.evaluate(filters, I_node, V_node, v_dot_node,
                                policy.start(filters, V_node))
    u_grid = np.broadcast_to(u_grid, V_node.shape)[..., 0]
    dI_s = (-net.R_s * I_s - V + u_grid) / net.L_s
    return VectorField(I_s, V, dI_s, v_dot)
