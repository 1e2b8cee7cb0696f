"""
Open-loop dynamics of a DC network with ZIP loads.

With the state ``x = [I_sᵀ, I_tᵀ, Vᵀ]ᵀ`` and the converter voltages ``u``
as input, the averaged network model reads

.. math::

    L_s \\dot{I}_s &= -R_s I_s - V + u \\\\
    L_t \\dot{I}_t &= -R_t I_t - ℬ^T V \\\\
    C_s \\dot{V} &= I_s + ℬ I_t - I_l(V)

where all parameter matrices are diagonal and stored as vectors.
"""
__all__ = ['open_loop_rhs', 'open_loop_field', 'voltage_derivative',
           'equation_residual', 'state_jacobian']

import numpy as np

from zipgrid.classes import NetworkState
from zipgrid.formulary.loads import check_voltage


def _split(net, x):
    n, m = net.n, net.m
    return x[:n], x[n:n + m], x[n + m:]


def _load_current(net, V):
    return net.Z_inv * V + net.I_const + net.P_const / V


def open_loop_field(net, x, u) -> np.ndarray:
    """
    Open-loop vector field on the stacked state vector.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    x : `~numpy.ndarray`
        Stacked state of length ``2n + m``.

    u : array_like
        Converter voltages (V), one per node.

    Returns
    -------
    `~numpy.ndarray`
        ``ẋ`` of length ``2n + m``.

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If a node voltage is not positive.
    """
    I_s, I_t, V = _split(net, np.asarray(x, dtype=float))
    check_voltage(V)
    u = np.broadcast_to(np.asarray(u, dtype=float), (net.n,))

    dI_s = (-net.R_s * I_s - V + u) / net.L_s
    dI_t = (-net.R_t * I_t - net.incidence.T @ V) / net.L_t
    dV = (I_s + net.incidence @ I_t - _load_current(net, V)) / net.C_s
    return np.concatenate((dI_s, dI_t, dV))


def open_loop_rhs(net, state: NetworkState, u) -> NetworkState:
    """
    Time derivative of ``state`` under the constant input ``u``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    state : `~zipgrid.classes.NetworkState`
        Must have positive voltages.

    u : array_like
        Converter voltages (V), one per node.

    Returns
    -------
    `~zipgrid.classes.NetworkState`
        ``(İ_s, İ_t, V̇)`` packed in a state object.

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If a node voltage is not positive.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(0.5, 1e-3, 1e-3)], [], [ZipLoad(0.1)])
    >>> open_loop_rhs(net, NetworkState([10.0], [], [100.0]), [105.0]).as_vector()
    array([0., 0.])
    """
    state.check_shape(net)
    x_dot = open_loop_field(net, state.as_vector(), u)
    return NetworkState.from_vector(x_dot, net.n, net.m)


def voltage_derivative(net, state: NetworkState) -> np.ndarray:
    """
    Node voltage derivative ``V̇ = C_s⁻¹(I_s + ℬI_t − I_l(V))``.

    This is the capacitor current divided by the capacitance, i.e. what a
    DGU measures locally; it does not depend on the input.
    """
    check_voltage(state.V)
    return (state.I_s + net.incidence @ state.I_t - _load_current(net, state.V)) / net.C_s


def equation_residual(net, state: NetworkState, u) -> np.ndarray:
    """
    The model equations written without the storage elements,
    ``[−R_sI_s − V + u; −R_tI_t − ℬᵀV; I_s + ℬI_t − I_l(V)]``.

    The first ``n + m`` entries are voltages (V), the last ``n`` are
    currents (A).  They all vanish at an equilibrium.
    """
    check_voltage(state.V)
    u = np.broadcast_to(np.asarray(u, dtype=float), (net.n,))
    return np.concatenate((
        -net.R_s * state.I_s - state.V + u,
        -net.R_t * state.I_t - net.incidence.T @ state.V,
        state.I_s + net.incidence @ state.I_t - _load_current(net, state.V),
    ))


def state_jacobian(net, state: NetworkState) -> np.ndarray:
    """
    Jacobian ``∂ẋ/∂x`` of the open-loop vector field (independent of ``u``).

    Returns
    -------
    `~numpy.ndarray`
        A ``(2n + m)×(2n + m)`` matrix.
    """
    check_voltage(state.V)
    n, m = net.n, net.m
    B = net.incidence
    J = np.zeros((2 * n + m, 2 * n + m))
    i_s, i_t, v = slice(0, n), slice(n, n + m), slice(n + m, 2 * n + m)

    J[i_s, i_s] = np.diag(-net.R_s / net.L_s)
    J[i_s, v] = np.diag(-1.0 / net.L_s)
    J[i_t, i_t] = np.diag(-net.R_t / net.L_t)
    J[i_t, v] = -B.T / net.L_t[:, np.newaxis]
    J[v, i_s] = np.diag(1.0 / net.C_s)
    J[v, i_t] = B / net.C_s[:, np.newaxis]
    J[v, v] = np.diag(-(net.Z_inv - net.P_const / state.V ** 2) / net.C_s)
    return J
