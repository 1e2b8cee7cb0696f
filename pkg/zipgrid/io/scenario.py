"""
Scenario files: a network, its controller, the integration settings, load
events and the requested outputs, stored as JSON.

Physical values may be written as numbers (taken as SI), as strings with
units (``"1.8 mH"``) or as ``{"value": 1.8, "unit": "mH"}`` objects; lists
give one value per node.
"""
__all__ = ['Scenario', 'CONTROLLER_KINDS', 'load_scenario', 'scenario_from_dict',
           'dump_scenario', 'save_scenario', 'bundled_scenario', 'list_bundled_scenarios',
           'resolve_scenario_path']

import dataclasses
import json
import numpy as np
import os

from astropy import units as u
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

from zipgrid.classes import DguParams, LineParams, Network, NetworkState, ZipLoad
from zipgrid.control import (ComparisonController,
                             ConstantInput,
                             ControllerConfig,
                             LevantGains,
                             PassivityBasedController)
from zipgrid.diagnostics.storages import STORAGE_IDS
from zipgrid.formulary.steady_state import closed_loop_equilibrium, equilibrium_from_ustar
from zipgrid.simulation import Event, SimConfig
from zipgrid.utils.exceptions import (InvariantViolation,
                                      IoError,
                                      NetworkError,
                                      ParseError,
                                      SchemaViolation)

#: Accepted values of the ``controller.kind`` field.
CONTROLLER_KINDS = ('passivity-based', 'comparison', 'constant')

_LOAD_FIELDS = (('Z_inv', u.S), ('I_const', u.A), ('P_const', u.W))


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    Everything needed to reproduce a run.

    Attributes
    ----------
    name : str

    network : `~zipgrid.classes.Network`
        The network before the first event.

    controller : `~zipgrid.control.ControllerConfig` or None
        Gains and references; `None` only for constant-input scenarios.

    simulation : `~zipgrid.simulation.SimConfig`

    events : tuple of `~zipgrid.simulation.Event`

    controller_kind : {'passivity-based', 'comparison', 'constant'}

    constant_input : `~numpy.ndarray` or None
        Converter voltages (V) of a constant-input scenario.

    initial : `~zipgrid.classes.NetworkState` or None
        Initial state; `None` starts from the equilibrium of the first
        load set (see `initial_state`).

    outputs : dict
        Requested outputs: ``plots`` (bool), ``diagnostics`` (storage ids)
        and an optional ``vector_field`` grid.

    node_ids, edge_ids : tuple
        Identifiers used in the file, in network order.

    description : str
    """
    name: str
    network: Network
    controller: Optional[ControllerConfig]
    simulation: SimConfig
    events: Tuple[Event, ...] = ()
    controller_kind: str = 'passivity-based'
    constant_input: Optional[np.ndarray] = None
    initial: Optional[NetworkState] = None
    outputs: Mapping[str, Any] = field(default_factory=dict)
    node_ids: Tuple = ()
    edge_ids: Tuple = ()
    description: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'events', tuple(self.events))
        if not self.node_ids:
            object.__setattr__(self, 'node_ids', tuple(range(1, self.network.n + 1)))
        if not self.edge_ids:
            object.__setattr__(self, 'edge_ids', tuple(range(1, self.network.m + 1)))
        if self.controller_kind not in CONTROLLER_KINDS:
            raise InvariantViolation(f"Unknown controller kind {self.controller_kind!r}.")
        if self.controller_kind == 'constant':
            if self.constant_input is None:
                raise InvariantViolation("A constant-input scenario needs the input 'u'.")
        elif self.controller is None:
            raise InvariantViolation(f"A '{self.controller_kind}' scenario needs a "
                                     f"controller configuration.")
        if self.controller is not None and self.controller.n != self.network.n:
            raise InvariantViolation(f"The controller drives {self.controller.n} nodes, the "
                                     f"network has {self.network.n}.")

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return dump_scenario(self) == dump_scenario(other)

    __hash__ = None

    @property
    def parts(self) -> Tuple[Network, Optional[ControllerConfig], SimConfig,
                             Tuple[Event, ...]]:
        """``(network, controller, simulation, events)``."""
        return self.network, self.controller, self.simulation, self.events

    def policy(self):
        """The input policy selected by `controller_kind`."""
        if self.controller_kind == 'constant':
            return ConstantInput(self.constant_input)
        if self.controller_kind == 'comparison':
            return ComparisonController(self.controller)
        return PassivityBasedController(self.controller)

    def initial_state(self) -> NetworkState:
        """
        `initial`, or the equilibrium of the first load set: at the
        voltage references under a controller, reached by Newton's method
        under a constant input.
        """
        if self.initial is not None:
            return self.initial
        if self.controller_kind == 'constant':
            return equilibrium_from_ustar(self.network, self.constant_input).state
        return closed_loop_equilibrium(self.network, self.controller).state

    def with_controller_kind(self, kind: str) -> "Scenario":
        """A copy driven by another controller kind."""
        return dataclasses.replace(self, controller_kind=kind)

    def with_derivative_mode(self, mode: str, levant_gains: Optional[LevantGains] = None
                             ) -> "Scenario":
        """A copy whose controller obtains ``V̇`` in another way."""
        ctrl = self.controller
        if ctrl is None:
            raise InvariantViolation(f"Scenario {self.name!r} has no controller.")
        if mode == 'levant' and levant_gains is None:
            levant_gains = ctrl.levant_gains
        controller = dataclasses.replace(ctrl, derivative_mode=mode,
                                         levant_gains=levant_gains if mode == 'levant' else None)
        return dataclasses.replace(self, controller=controller)


def _path(parent: str, key) -> str:
    if isinstance(key, int):
        return f"{parent}[{key}]"
    return f"{parent}.{key}" if parent else str(key)


def _get(block: Mapping, key: str, path: str, default=...):
    if not isinstance(block, Mapping):
        raise SchemaViolation(path, "expected an object")
    if key not in block:
        if default is ...:
            raise SchemaViolation(_path(path, key), "required field is missing")
        return default
    return block[key]


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaViolation(path, "expected a list")
    return value


def _one_value(value, unit, path):
    if isinstance(value, bool):
        raise SchemaViolation(path, "expected a number or a quantity")
    if isinstance(value, Mapping):
        value = (_get(value, 'value', path), _get(value, 'unit', path))
        try:
            return float(u.Quantity(value[0], value[1]).to_value(unit))
        except (TypeError, ValueError, u.UnitsError) as exc:
            raise SchemaViolation(path, f"invalid quantity: {exc}") from None
    if isinstance(value, str):
        try:
            quantity = u.Quantity(value)
        except (TypeError, ValueError) as exc:
            raise SchemaViolation(path, f"invalid quantity {value!r}: {exc}") from None
        if quantity.unit == u.dimensionless_unscaled and unit != u.dimensionless_unscaled:
            return float(quantity.value)
        try:
            return float(quantity.to_value(unit))
        except u.UnitsError:
            raise SchemaViolation(path, f"expected units of {unit}, got "
                                        f"{quantity.unit}") from None
    if isinstance(value, (int, float)):
        return float(value)
    raise SchemaViolation(path, "expected a number or a quantity")


def _quantity(value, unit, path: str):
    """SI float, or float array for a list."""
    if isinstance(value, list):
        return np.array([_one_value(item, unit, _path(path, i)) for i, item in enumerate(value)])
    return _one_value(value, unit, path)


def _network(block, path: str):
    nodes = _list(_get(block, 'nodes', path), _path(path, 'nodes'))
    edges = _list(_get(block, 'edges', path, []), _path(path, 'edges'))
    if not nodes:
        raise SchemaViolation(_path(path, 'nodes'), "a network needs at least one node")

    node_ids, dgus, loads = [], [], []
    for i, node in enumerate(nodes):
        node_path = _path(_path(path, 'nodes'), i)
        node_id = _get(node, 'id', node_path)
        if node_id in node_ids:
            raise InvariantViolation(f"{_path(node_path, 'id')}: duplicate node id "
                                     f"{node_id!r}")
        node_ids.append(node_id)
        values = [_quantity(_get(node, key, node_path), unit, _path(node_path, key))
                  for key, unit in (('R_s', u.ohm), ('L_s', u.H), ('C_s', u.F))]
        load_block = _get(node, 'load', node_path, {})
        load_path = _path(node_path, 'load')
        load = [_quantity(_get(load_block, key, load_path, 0.0), unit, _path(load_path, key))
                for key, unit in _LOAD_FIELDS]
        try:
            dgus.append(DguParams(*values))
            loads.append(ZipLoad(*load))
        except NetworkError as exc:
            raise InvariantViolation(f"{node_path}: {exc}") from None

    edge_ids, lines = [], []
    for k, edge in enumerate(edges):
        edge_path = _path(_path(path, 'edges'), k)
        edge_id = _get(edge, 'id', edge_path)
        if edge_id in edge_ids:
            raise InvariantViolation(f"{_path(edge_path, 'id')}: duplicate edge id "
                                     f"{edge_id!r}")
        edge_ids.append(edge_id)
        endpoints = []
        for key in ('from', 'to'):
            ref = _get(edge, key, edge_path)
            if ref not in node_ids:
                raise InvariantViolation(f"{_path(edge_path, key)}: unknown node id {ref!r}")
            endpoints.append(node_ids.index(ref))
        values = [_quantity(_get(edge, key, edge_path), unit, _path(edge_path, key))
                  for key, unit in (('R_t', u.ohm), ('L_t', u.H))]
        try:
            lines.append(LineParams(*values, endpoints=tuple(endpoints)))
        except NetworkError as exc:
            raise InvariantViolation(f"{edge_path}: {exc}") from None

    try:
        network = Network(tuple(dgus), tuple(lines), tuple(loads))
    except NetworkError as exc:
        raise InvariantViolation(f"{path}: {exc}") from None
    return network, tuple(node_ids), tuple(edge_ids)


def _per_node(value, n: int, path: str) -> np.ndarray:
    try:
        return np.array(np.broadcast_to(value, (n,)), dtype=float)
    except ValueError:
        raise InvariantViolation(f"{path}: expected one value per node ({n})") from None


def _controller(block, path: str, n: int):
    kind = _get(block, 'kind', path, 'passivity-based')
    if kind not in CONTROLLER_KINDS:
        raise SchemaViolation(_path(path, 'kind'), f"expected one of {CONTROLLER_KINDS}")
    constant_input = None
    if kind == 'constant':
        constant_input = _per_node(_quantity(_get(block, 'u', path), u.V, _path(path, 'u')),
                                   n, _path(path, 'u'))
        if 'V_star' not in block:
            return kind, None, constant_input

    values = {key: _per_node(_quantity(_get(block, key, path), unit, _path(path, key)),
                             n, _path(path, key))
              for key, unit in (('K1', 1 / u.H), ('K2', u.s / u.H), ('Pi', u.W),
                                ('V_star', u.V))}
    mode = _get(block, 'derivative_mode', path, 'oracle')
    gains = None
    if mode == 'levant' or 'levant' in block:
        levant = _get(block, 'levant', path)
        levant_path = _path(path, 'levant')
        gains = {key: _quantity(_get(levant, key, levant_path, default), unit,
                                _path(levant_path, key))
                 for key, unit, default in (('L', u.V / u.s ** 2, ...),
                                            ('lambda0', u.dimensionless_unscaled, 1.5),
                                            ('lambda1', u.dimensionless_unscaled, 1.1))}
    try:
        if gains is not None:
            gains = LevantGains(**gains)
        ctrl = ControllerConfig(**values, derivative_mode=mode, levant_gains=gains)
    except (NetworkError, ValueError) as exc:
        raise InvariantViolation(f"{path}: {exc}") from None
    return kind, ctrl, constant_input


def _simulation(block, path: str) -> SimConfig:
    values = {}
    for key, unit in (('t_end', u.s), ('dt', u.s), ('rel_tol', u.dimensionless_unscaled),
                      ('abs_tol', u.dimensionless_unscaled)):
        if key in block or key == 't_end':
            values[key] = _quantity(_get(block, key, path), unit, _path(path, key))
    for key in ('method', 'record_stride'):
        if key in block:
            values[key] = block[key]
    try:
        return SimConfig(**values)
    except (NetworkError, ValueError) as exc:
        raise InvariantViolation(f"{path}: {exc}") from None


def _events(block, path: str, network: Network, t_end: float) -> Tuple[Event, ...]:
    events = []
    current = network
    for i, entry in enumerate(_list(block, path)):
        event_path = _path(path, i)
        time = _quantity(_get(entry, 'time', event_path), u.s, _path(event_path, 'time'))
        delta = _get(entry, 'delta', event_path)
        delta_path = _path(event_path, 'delta')
        if not isinstance(delta, Mapping):
            raise SchemaViolation(delta_path, "expected an object")
        unknown = set(delta) - {key for key, _ in _LOAD_FIELDS}
        if unknown:
            raise SchemaViolation(_path(delta_path, sorted(unknown)[0]), "unknown load field")
        values = {f"d{key}": _quantity(delta.get(key, 0.0), unit, _path(delta_path, key))
                  for key, unit in _LOAD_FIELDS}
        for key, value in values.items():
            if np.size(value) not in (1, network.n):
                raise InvariantViolation(f"{_path(delta_path, key[1:])}: expected one value "
                                         f"per node ({network.n})")
        if not 0 < time < t_end:
            raise InvariantViolation(f"{_path(event_path, 'time')}: {time} s is outside "
                                     f"(0, {t_end}) s")
        try:
            event = Event(time, **values)
            current = event.apply(current)
        except NetworkError as exc:
            raise InvariantViolation(f"{event_path}: {exc}") from None
        events.append(event)
    times = [event.time for event in events]
    if times != sorted(times):
        raise InvariantViolation(f"{path}: events must be listed in time order")
    return tuple(events)


def _initial(block, path: str, network: Network) -> NetworkState:
    values = {key: np.atleast_1d(_quantity(_get(block, key, path, default), unit,
                                           _path(path, key)))
              for key, unit, default in (('I_s', u.A, ...), ('I_t', u.A, []),
                                         ('V', u.V, ...))}
    try:
        state = NetworkState(**values)
        state.check_shape(network)
    except ValueError as exc:
        raise InvariantViolation(f"{path}: {exc}") from None
    if not state.in_domain():
        raise InvariantViolation(f"{_path(path, 'V')}: voltages must be positive")
    return state


def _outputs(block, path: str) -> Dict[str, Any]:
    outputs = {'plots': bool(_get(block, 'plots', path, False))}
    diagnostics = _list(_get(block, 'diagnostics', path, []), _path(path, 'diagnostics'))
    for i, which in enumerate(diagnostics):
        if which not in STORAGE_IDS:
            raise SchemaViolation(_path(_path(path, 'diagnostics'), i),
                                  f"expected one of {STORAGE_IDS}")
    outputs['diagnostics'] = tuple(diagnostics)
    if 'vector_field' in block:
        grid = block['vector_field']
        grid_path = _path(path, 'vector_field')
        outputs['vector_field'] = {
            'I_s': tuple(_quantity(_get(grid, 'I_s', grid_path), u.A, _path(grid_path, 'I_s'))),
            'V': tuple(_quantity(_get(grid, 'V', grid_path), u.V, _path(grid_path, 'V'))),
            'resolution': int(_get(grid, 'resolution', grid_path, 25)),
        }
    return outputs


def scenario_from_dict(data: Mapping, name: Optional[str] = None) -> Scenario:
    """
    Build a `Scenario` from parsed JSON.

    Raises
    ------
    ~zipgrid.utils.exceptions.SchemaViolation
        If a field is missing or has the wrong type; the exception names
        the dotted path of the field.

    ~zipgrid.utils.exceptions.InvariantViolation
        If the values are well-formed but inconsistent, e.g. an edge refers
        to an unknown node, a parameter is not positive or an event time
        is outside the simulated interval.
    """
    if not isinstance(data, Mapping):
        raise SchemaViolation('', "expected a JSON object at the top level")
    network, node_ids, edge_ids = _network(_get(data, 'network', ''), 'network')
    kind, ctrl, constant_input = _controller(_get(data, 'controller', ''), 'controller',
                                             network.n)
    simulation = _simulation(_get(data, 'simulation', ''), 'simulation')
    events = _events(_get(data, 'events', '', []), 'events', network, simulation.t_end)
    initial = None
    if data.get('initial') is not None:
        initial = _initial(data['initial'], 'initial', network)
    outputs = _outputs(_get(data, 'outputs', '', {}), 'outputs')
    try:
        return Scenario(name=str(data.get('name', name or 'scenario')), network=network,
                        controller=ctrl, simulation=simulation, events=events,
                        controller_kind=kind, constant_input=constant_input,
                        initial=initial, outputs=outputs, node_ids=node_ids,
                        edge_ids=edge_ids, description=str(data.get('description', '')))
    except InvariantViolation as exc:
        raise InvariantViolation(f"controller: {exc}") from None


def bundled_scenario(name: str) -> str:
    """
    Path of a scenario file shipped with zipgrid.

    Examples
    --------
    >>> import os
    >>> os.path.basename(bundled_scenario('scenario1'))
    'scenario1.json'
    """
    from zipgrid.data import rootdir

    filename = name if name.endswith('.json') else f"{name}.json"
    path = os.path.join(rootdir, filename)
    if not os.path.isfile(path):
        raise IoError(f"No bundled scenario named {name!r}; available: "
                      f"{', '.join(list_bundled_scenarios())}.")
    return path


def list_bundled_scenarios() -> Tuple[str, ...]:
    """Names of the bundled scenario files, without extension."""
    from zipgrid.data import file_list

    return tuple(os.path.splitext(os.path.basename(path))[0] for path in file_list)


def resolve_scenario_path(path) -> str:
    """``path`` if it exists, otherwise the bundled scenario of that name."""
    path = os.fspath(path)
    if os.path.exists(path):
        return path
    name = os.path.basename(path)
    if os.path.splitext(name)[0] in list_bundled_scenarios():
        return bundled_scenario(name)
    raise IoError(f"Scenario file {path!r} does not exist.")


def load_scenario(path) -> Scenario:
    """
    Read and validate a scenario file.

    Parameters
    ----------
    path : str or path-like
        A JSON file, or the name of a bundled scenario
        (see `list_bundled_scenarios`).

    Returns
    -------
    Scenario
        `Scenario.parts` gives ``(network, controller, simulation, events)``.

    Raises
    ------
    ~zipgrid.utils.exceptions.IoError
        If the file cannot be read.

    ~zipgrid.utils.exceptions.ParseError
        If the file is not valid JSON.

    ~zipgrid.utils.exceptions.SchemaViolation
        If a field is missing or malformed.

    ~zipgrid.utils.exceptions.InvariantViolation
        If the values are inconsistent.

    Examples
    --------
    >>> scenario = load_scenario(bundled_scenario('scenario1'))
    >>> scenario.network.n, scenario.network.m, scenario.controller.K1
    (4, 4, array([50., 50., 50., 50.]))
    """
    path = resolve_scenario_path(path)
    try:
        with open(path, encoding='utf-8') as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"Cannot read scenario file {path!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return scenario_from_dict(data, name=os.path.splitext(os.path.basename(path))[0])


def _floats(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else [float(item) for item in value]


def dump_scenario(scenario: Scenario) -> Dict[str, Any]:
    """
    The scenario as a JSON-compatible dictionary with all values in SI
    units; `scenario_from_dict` inverts it.
    """
    net = scenario.network
    nodes = [{'id': node_id, 'R_s': dgu.R_s, 'L_s': dgu.L_s, 'C_s': dgu.C_s,
              'load': {key: getattr(load, key) for key, _ in _LOAD_FIELDS}}
             for node_id, dgu, load in zip(scenario.node_ids, net.dgus, net.loads)]
    edges = [{'id': edge_id,
              'from': scenario.node_ids[line.endpoints[0]],
              'to': scenario.node_ids[line.endpoints[1]],
              'R_t': line.R_t, 'L_t': line.L_t}
             for edge_id, line in zip(scenario.edge_ids, net.lines)]

    controller: Dict[str, Any] = {'kind': scenario.controller_kind}
    if scenario.constant_input is not None:
        controller['u'] = _floats(scenario.constant_input)
    ctrl = scenario.controller
    if ctrl is not None:
        controller.update({key: _floats(getattr(ctrl, key))
                           for key in ('K1', 'K2', 'Pi', 'V_star')})
        controller['derivative_mode'] = ctrl.derivative_mode
        if ctrl.levant_gains is not None:
            controller['levant'] = {key: _floats(getattr(ctrl.levant_gains, key))
                                    for key in ('L', 'lambda0', 'lambda1')}

    sim = scenario.simulation
    data = {
        'name': scenario.name,
        'description': scenario.description,
        'network': {'nodes': nodes, 'edges': edges},
        'controller': controller,
        'simulation': {'t_end': sim.t_end, 'dt': sim.dt, 'method': sim.method,
                       'rel_tol': sim.rel_tol, 'abs_tol': sim.abs_tol,
                       'record_stride': sim.record_stride},
        'events': [{'time': event.time,
                    'delta': {key: _floats(getattr(event, f"d{key}"))
                              for key, _ in _LOAD_FIELDS}}
                   for event in scenario.events],
        'outputs': {'plots': bool(scenario.outputs.get('plots', False)),
                    'diagnostics': list(scenario.outputs.get('diagnostics', ()))},
    }
    if 'vector_field' in scenario.outputs:
        grid = scenario.outputs['vector_field']
        data['outputs']['vector_field'] = {'I_s': _floats(grid['I_s']),
                                           'V': _floats(grid['V']),
                                           'resolution': int(grid['resolution'])}
    if scenario.initial is not None:
        data['initial'] = {key: _floats(getattr(scenario.initial, key))
                           for key in ('I_s', 'I_t', 'V')}
    return data


def save_scenario(scenario: Scenario, path) -> str:
    """
    Write ``scenario`` as JSON to ``path``.

    Raises
    ------
    ~zipgrid.utils.exceptions.IoError
        If the file cannot be written.
    """
    path = os.fspath(path)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as fh:
            json.dump(dump_scenario(scenario), fh, indent=2)
            fh.write('\n')
    except OSError as exc:
        raise IoError(f"Cannot write scenario file {path!r}: {exc}") from exc
    return path
