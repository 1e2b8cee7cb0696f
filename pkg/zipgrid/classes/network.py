"""
Value objects describing a DC network of distributed generation units
(DGUs) interconnected by RL lines and feeding ZIP loads.

All parameters are stored as plain SI floats.  Constructors also accept
`~astropy.units.Quantity` objects, which are converted on the way in.
"""
__all__ = ["DguParams", "LineParams", "ZipLoad", "Network", "NetworkState",
           "FilterBank", "build_network", "V_MIN", "NOMINAL_VOLTAGE"]

import numpy as np

from astropy import units as u
from dataclasses import dataclass, field
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from typing import Optional, Sequence, Tuple

from zipgrid.utils.decorators import check_values, to_si
from zipgrid.utils.exceptions import (DisconnectedGraph,
                                      NetworkError,
                                      NonPositiveParameter,
                                      SelfLoop)

#: Voltages at or below this value (V) are outside the model's domain.
V_MIN = 1e-6

#: Operating voltage (V) used when no reference is available.
NOMINAL_VOLTAGE = 380.0


def _scalar_parameter(obj, name, unit, *, can_be_zero):
    value = to_si(getattr(obj, name), unit, name)
    if not isinstance(value, float):
        raise NetworkError(f"The argument '{name}' of {type(obj).__name__} must be a scalar.")
    check_values(value, name, where=type(obj).__name__,
                 can_be_negative=False, can_be_zero=can_be_zero,
                 can_be_inf=False, can_be_nan=False)
    object.__setattr__(obj, name, value)


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DguParams:
    """
    Output-filter parameters of one DGU (buck converter with RLC filter).

    Parameters
    ----------
    R_s : float or `~astropy.units.Quantity`
        Filter resistance (Ω), strictly positive.

    L_s : float or `~astropy.units.Quantity`
        Filter inductance (H), strictly positive.

    C_s : float or `~astropy.units.Quantity`
        Shunt capacitance (F), strictly positive.

    Examples
    --------
    >>> from astropy import units as u
    >>> DguParams(10 * u.mohm, 1.8 * u.mH, 2.2 * u.mF).R_s
    0.01
    """
    R_s: float
    L_s: float
    C_s: float

    def __post_init__(self):
        _scalar_parameter(self, 'R_s', u.ohm, can_be_zero=False)
        _scalar_parameter(self, 'L_s', u.H, can_be_zero=False)
        _scalar_parameter(self, 'C_s', u.F, can_be_zero=False)


@dataclass(frozen=True)
class LineParams:
    """
    A transmission line modelled as a series RL branch.

    Parameters
    ----------
    R_t : float or `~astropy.units.Quantity`
        Line resistance (Ω), strictly positive.

    L_t : float or `~astropy.units.Quantity`
        Line inductance (H), strictly positive.

    endpoints : Tuple[int, int], optional
        Zero-based indices ``(i⁺, i⁻)`` of the nodes the line connects.  The
        positive line current flows from ``i⁺`` to ``i⁻``.  May be left out
        when the endpoints are supplied through the edge list of
        `build_network`.
    """
    R_t: float
    L_t: float
    endpoints: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        _scalar_parameter(self, 'R_t', u.ohm, can_be_zero=False)
        _scalar_parameter(self, 'L_t', u.H, can_be_zero=False)
        if self.endpoints is not None:
            if len(self.endpoints) != 2:
                raise NetworkError(f"Line endpoints {self.endpoints} must be a node pair.")
            start, end = (int(node) for node in self.endpoints)
            if start == end:
                raise SelfLoop(f"Line connects node {start} to itself.")
            object.__setattr__(self, 'endpoints', (start, end))


@dataclass(frozen=True)
class ZipLoad:
    """
    Parallel combination of a constant-impedance, a constant-current and a
    constant-power load.

    Parameters
    ----------
    Z_inv : float or `~astropy.units.Quantity`
        Conductance of the Z component (S), non-negative.

    I_const : float or `~astropy.units.Quantity`
        Current of the I component (A), non-negative.

    P_const : float or `~astropy.units.Quantity`
        Power of the P component (W), non-negative.
    """
    Z_inv: float = 0.0
    I_const: float = 0.0
    P_const: float = 0.0

    def __post_init__(self):
        _scalar_parameter(self, 'Z_inv', u.S, can_be_zero=True)
        _scalar_parameter(self, 'I_const', u.A, can_be_zero=True)
        _scalar_parameter(self, 'P_const', u.W, can_be_zero=True)


@dataclass(frozen=True)
class FilterBank:
    """
    The per-node filter constants a decentralized controller may use.

    Load parameters are deliberately absent: the voltage controller only
    knows its own converter.
    """
    R_s: np.ndarray
    L_s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'R_s', _frozen_array(self.R_s))
        object.__setattr__(self, 'L_s', _frozen_array(self.L_s))

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.R_s.size


@dataclass(frozen=True, eq=False)
class Network:
    """
    A connected DC network of ``n`` DGUs, ``m`` lines and ``n`` ZIP loads.

    The incidence matrix ``ℬ`` (n×m) has ``+1`` in row ``i⁺`` and ``-1``
    in row ``i⁻`` of every line column.  Per-node and per-line parameters
    are additionally exposed as read-only arrays (``R_s``, ``L_s``,
    ``C_s``, ``R_t``, ``L_t``, ``Z_inv``, ``I_const``, ``P_const``), which
    are what the numerical routines use.

    Parameters
    ----------
    dgus : Sequence[DguParams]
        One entry per node.

    lines : Sequence[LineParams]
        One entry per line, endpoints set.

    loads : Sequence[ZipLoad]
        One entry per node.

    Raises
    ------
    ~zipgrid.utils.exceptions.DisconnectedGraph
        If the lines do not connect all nodes.

    ~zipgrid.utils.exceptions.NetworkError
        If the parameter lists are inconsistent.

    See Also
    --------
    build_network
    """
    dgus: Tuple[DguParams, ...]
    lines: Tuple[LineParams, ...]
    loads: Tuple[ZipLoad, ...]

    n: int = field(init=False)
    m: int = field(init=False)
    incidence: np.ndarray = field(init=False, repr=False)
    R_s: np.ndarray = field(init=False, repr=False)
    L_s: np.ndarray = field(init=False, repr=False)
    C_s: np.ndarray = field(init=False, repr=False)
    R_t: np.ndarray = field(init=False, repr=False)
    L_t: np.ndarray = field(init=False, repr=False)
    Z_inv: np.ndarray = field(init=False, repr=False)
    I_const: np.ndarray = field(init=False, repr=False)
    P_const: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dgus, lines, loads = tuple(self.dgus), tuple(self.lines), tuple(self.loads)
        n, m = len(dgus), len(lines)
        if n == 0:
            raise NetworkError("A network needs at least one node.")
        if len(loads) != n:
            raise NetworkError(f"Expected {n} loads, got {len(loads)}.")

        incidence = np.zeros((n, m))
        for k, line in enumerate(lines):
            if line.endpoints is None:
                raise NetworkError(f"Line {k} has no endpoints.")
            start, end = line.endpoints
            if not (0 <= start < n and 0 <= end < n):
                raise NetworkError(f"Line {k} refers to a node outside 0..{n - 1}.")
            incidence[start, k] = 1.0
            incidence[end, k] = -1.0

        if n > 1:
            rows = [line.endpoints[0] for line in lines]
            cols = [line.endpoints[1] for line in lines]
            adjacency = coo_matrix((np.ones(m), (rows, cols)), shape=(n, n))
            n_components, _ = connected_components(adjacency, directed=False)
            if n_components != 1:
                raise DisconnectedGraph(
                    f"The lines split the {n} nodes into {n_components} islands.")

        values = {
            'dgus': dgus, 'lines': lines, 'loads': loads, 'n': n, 'm': m,
            'incidence': _frozen_array(incidence),
            'R_s': _frozen_array([d.R_s for d in dgus]),
            'L_s': _frozen_array([d.L_s for d in dgus]),
            'C_s': _frozen_array([d.C_s for d in dgus]),
            'R_t': _frozen_array([line.R_t for line in lines]),
            'L_t': _frozen_array([line.L_t for line in lines]),
            'Z_inv': _frozen_array([load.Z_inv for load in loads]),
            'I_const': _frozen_array([load.I_const for load in loads]),
            'P_const': _frozen_array([load.P_const for load in loads]),
        }
        for name, value in values.items():
            object.__setattr__(self, name, value)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (self.dgus, self.lines, self.loads) == (other.dgus, other.lines, other.loads)

    __hash__ = None

    @property
    def state_size(self) -> int:
        """Length ``2n + m`` of the stacked state vector."""
        return 2 * self.n + self.m

    @property
    def is_scalar(self) -> bool:
        """`True` for a single node without lines."""
        return self.n == 1 and self.m == 0

    @property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        """Endpoints of every line, in line order."""
        return tuple(line.endpoints for line in self.lines)

    @property
    def laplacian(self) -> np.ndarray:
        """Weighted Laplacian ``ℬ R_t⁻¹ ℬᵀ`` (S)."""
        return self.incidence @ (self.incidence.T / self.R_t[:, np.newaxis])

    @property
    def filters(self) -> FilterBank:
        """The DGU constants available to the local controllers."""
        return FilterBank(self.R_s, self.L_s)

    def with_loads(self, loads: Sequence[ZipLoad]) -> "Network":
        """Return a copy of the network with ``loads`` replacing its loads."""
        return Network(self.dgus, self.lines, tuple(loads))

    def with_load_delta(self, dZ_inv=0.0, dI_const=0.0, dP_const=0.0) -> "Network":
        """
        Return a copy of the network with every load shifted by the given
        per-node increments (scalars broadcast to all nodes).

        Raises
        ------
        ~zipgrid.utils.exceptions.NonPositiveParameter
            If a shifted load component becomes negative.
        """
        dZ_inv, dI_const, dP_const = (
            np.broadcast_to(to_si(value, unit, name), (self.n,))
            for value, unit, name in ((dZ_inv, u.S, 'dZ_inv'),
                                      (dI_const, u.A, 'dI_const'),
                                      (dP_const, u.W, 'dP_const'))
        )
        loads = [ZipLoad(self.Z_inv[i] + dZ_inv[i],
                         self.I_const[i] + dI_const[i],
                         self.P_const[i] + dP_const[i]) for i in range(self.n)]
        return self.with_loads(loads)


@dataclass(frozen=True, eq=False)
class NetworkState:
    """
    The state ``x = [I_sᵀ, I_tᵀ, Vᵀ]ᵀ`` of a network.

    Parameters
    ----------
    I_s : array_like
        Filter currents (A), one per node.

    I_t : array_like
        Line currents (A), one per line; may be empty.

    V : array_like
        Capacitor (node) voltages (V), one per node.
    """
    I_s: np.ndarray
    I_t: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        for name, unit in (('I_s', u.A), ('I_t', u.A), ('V', u.V)):
            value = np.atleast_1d(to_si(getattr(self, name), unit, name))
            if value.ndim != 1:
                raise ValueError(f"'{name}' must be one-dimensional.")
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        if self.I_s.size != self.V.size:
            raise ValueError("'I_s' and 'V' must have one entry per node.")

    def __eq__(self, other):
        if not isinstance(other, NetworkState):
            return NotImplemented
        return (np.array_equal(self.I_s, other.I_s) and np.array_equal(self.I_t, other.I_t)
                and np.array_equal(self.V, other.V))

    __hash__ = None

    @property
    def n(self) -> int:
        return self.V.size

    @property
    def m(self) -> int:
        return self.I_t.size

    def as_vector(self) -> np.ndarray:
        """The stacked state as a new writeable array."""
        return np.concatenate((self.I_s, self.I_t, self.V))

    @classmethod
    def from_vector(cls, x, n: int, m: int) -> "NetworkState":
        """
        Split a stacked ``(2n + m)`` vector into a state.

        Examples
        --------
        >>> NetworkState.from_vector([1.0, 2.0, 380.0], n=1, m=1).I_t
        array([2.])
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (2 * n + m,):
            raise ValueError(f"Expected a vector of length {2 * n + m}, got shape {x.shape}.")
        return cls(x[:n], x[n:n + m], x[n + m:])

    def in_domain(self, v_min: float = V_MIN) -> bool:
        """`True` if every voltage exceeds ``v_min`` (membership in 𝒳)."""
        return bool(np.all(self.V > v_min))

    def check_shape(self, net: Network):
        """Raise `ValueError` if the state does not fit ``net``."""
        if self.n != net.n or self.m != net.m:
            raise ValueError(f"State with n={self.n}, m={self.m} does not fit a network "
                             f"with n={net.n}, m={net.m}.")


def build_network(node_params: Sequence[DguParams],
                  line_params: Sequence[LineParams],
                  load_params: Optional[Sequence[ZipLoad]] = None,
                  edge_list: Optional[Sequence[Tuple[int, int]]] = None) -> Network:
    """
    Assemble a `Network` and its incidence matrix.

    Parameters
    ----------
    node_params : Sequence[DguParams]
        DGU filter parameters, one per node.

    line_params : Sequence[LineParams]
        Line parameters in edge order.

    load_params : Sequence[ZipLoad], optional
        One ZIP load per node.  Defaults to no load at all.

    edge_list : Sequence[Tuple[int, int]], optional
        Zero-based node pairs, one per line.  The first node of each pair
        is taken as the positive end of the line.  Needed only when the
        lines were created without endpoints.

    Returns
    -------
    Network

    Raises
    ------
    ~zipgrid.utils.exceptions.DisconnectedGraph
        If the edges do not connect every node.

    ~zipgrid.utils.exceptions.SelfLoop
        If an edge joins a node to itself.

    ~zipgrid.utils.exceptions.NonPositiveParameter
        If a parameter is outside its admissible range.

    TypeError
        If an entry of ``node_params`` is not a `DguParams`.

    Examples
    --------
    >>> dgu = DguParams(0.01, 1.8e-3, 2.2e-3)
    >>> ring = build_network([dgu] * 4, [LineParams(0.07, 2.1e-6)] * 4,
    ...                      edge_list=[(0, 1), (1, 2), (2, 3), (3, 0)])
    >>> ring.incidence.sum(axis=0)
    array([0., 0., 0., 0.])
    """
    node_params = tuple(node_params)
    for dgu in node_params:
        if not isinstance(dgu, DguParams):
            raise TypeError(f"Expected DguParams, got {dgu!r}.")

    if load_params is None:
        load_params = [ZipLoad() for _ in node_params]

    lines = list(line_params)
    if edge_list is not None:
        edge_list = list(edge_list)
        if len(edge_list) != len(lines):
            raise NetworkError(f"{len(lines)} lines but {len(edge_list)} edges were given.")
        for k, (line, edge) in enumerate(zip(lines, edge_list)):
            edge = tuple(int(node) for node in edge)
            if line.endpoints is not None and line.endpoints != edge:
                raise NetworkError(f"Line {k} endpoints {line.endpoints} disagree with "
                                   f"edge {edge}.")
            lines[k] = LineParams(line.R_t, line.L_t, edge)

    return Network(node_params, tuple(lines), tuple(load_params))
