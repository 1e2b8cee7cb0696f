"""
Storage functions of DC networks and the rates at which they change.

Every storage comes with its dissipation identity: the time derivative
along the network dynamics written as (negative) dissipation plus a
supply.  The kernels here work on stacked states of shape ``(..., 2n + m)``
so that whole trajectories are evaluated at once; the public
single-state functions wrap them.

=============  ==============================================  ===================
id             storage                                         supply
=============  ==============================================  ===================
``energy``     ``½‖I_s‖²_{L_s} + ½‖I_t‖²_{L_t} + ½‖V‖²_{C_s}``   ``uᵀI_s``
``bregman``    the same, shifted to an equilibrium              ``(u − ū)ᵀ(I_s − Ī_s)``
``kras``       the same, evaluated on ``ẋ``                     ``u̇ᵀİ_s``
``pa``         `~zipgrid.formulary.passivating_storage`         ``υᵀV̇``
``sd``         ``𝒫_A + S_a``                                    ``μᵀV̇``
=============  ==============================================  ===================
"""
__all__ = ['STORAGE_IDS', 'energy_storage', 'bregman_storage', 'krasovskii_storage',
           'shaping_storage', 'closed_loop_storage', 'storage_series', 'storage_rate_series']

import numpy as np

from typing import Optional, Tuple

from zipgrid.classes import Network, NetworkState
from zipgrid.formulary.loads import check_voltage
from zipgrid.formulary.steady_state import Equilibrium

#: Identifiers accepted by `storage_series` and the dissipation audit.
STORAGE_IDS = ('energy', 'bregman', 'kras', 'pa', 'sd')


def _split(net: Network, x):
    n, m = net.n, net.m
    return x[..., :n], x[..., n:n + m], x[..., n + m:]


def _load_current(net, V):
    return net.Z_inv * V + net.I_const + net.P_const / V


def _x_dot(net, x, u):
    I_s, I_t, V = _split(net, x)
    dI_s = (-net.R_s * I_s - V + u) / net.L_s
    dI_t = (-net.R_t * I_t - V @ net.incidence) / net.L_t
    dV = (I_s + I_t @ net.incidence.T - _load_current(net, V)) / net.C_s
    return dI_s, dI_t, dV


def _energy(net, I_s, I_t, V):
    return 0.5 * (np.sum(net.L_s * I_s ** 2, axis=-1) + np.sum(net.L_t * I_t ** 2, axis=-1)
                  + np.sum(net.C_s * V ** 2, axis=-1))


def _passivating(net, x):
    I_s, I_t, V = _split(net, x)
    line_drop = net.R_t * I_t + V @ net.incidence
    capacitor_current = I_s + I_t @ net.incidence.T - _load_current(net, V)
    return 0.5 * (np.sum(V ** 2 / net.L_s, axis=-1)
                  + np.sum(line_drop ** 2 / net.L_t, axis=-1)
                  + np.sum(capacitor_current ** 2 / net.C_s, axis=-1))


def _shaping(net, V, ctrl):
    return (0.5 * np.sum(ctrl.K1 * (V - ctrl.V_star) ** 2, axis=-1)
            - np.sum(V * ctrl.V_star / net.L_s, axis=-1)
            + 0.5 * np.sum(ctrl.V_star ** 2 / net.L_s))


def _closed_loop(net, x, ctrl):
    I_s, I_t, V = _split(net, x)
    line_drop = net.R_t * I_t + V @ net.incidence
    capacitor_current = I_s + I_t @ net.incidence.T - _load_current(net, V)
    return 0.5 * (np.sum((1 / net.L_s + ctrl.K1) * (V - ctrl.V_star) ** 2, axis=-1)
                  + np.sum(line_drop ** 2 / net.L_t, axis=-1)
                  + np.sum(capacitor_current ** 2 / net.C_s, axis=-1))


def _checked(net: Network, state: NetworkState):
    state.check_shape(net)
    check_voltage(state.V)
    return state.as_vector()


def energy_storage(net: Network, state: NetworkState) -> float:
    """
    Total energy ``½‖I_s‖²_{L_s} + ½‖I_t‖²_{L_t} + ½‖V‖²_{C_s}`` (J) stored in
    the inductors and capacitors.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(0.01, 2e-3, 1e-3)], [], [ZipLoad()])
    >>> energy_storage(net, NetworkState([10.0], [], [100.0]))
    5.1
    """
    state.check_shape(net)
    return float(_energy(net, state.I_s, state.I_t, state.V))


def bregman_storage(net: Network, state: NetworkState, eq: Equilibrium) -> float:
    """
    Energy of the deviation from the equilibrium ``eq`` (J),
    ``½‖I_s − Ī_s‖²_{L_s} + ½‖I_t − Ī_t‖²_{L_t} + ½‖V − V̄‖²_{C_s}``.
    """
    state.check_shape(net)
    return float(_energy(net, state.I_s - eq.I_s_bar, state.I_t - eq.I_t_bar,
                         state.V - eq.V_bar))


def krasovskii_storage(net: Network, state: NetworkState, u) -> float:
    """
    Energy evaluated on the state derivative,
    ``½‖İ_s‖²_{L_s} + ½‖İ_t‖²_{L_t} + ½‖V̇‖²_{C_s}``, with ``ẋ`` the
    open-loop field under the input ``u`` (V).
    """
    x = _checked(net, state)
    u = np.broadcast_to(np.asarray(u, dtype=float), (net.n,))
    return float(_energy(net, *_x_dot(net, x, u)))


def shaping_storage(net: Network, V, ctrl) -> float:
    """
    The shaping term
    ``S_a = ½‖V − V*‖²_{K₁} − VᵀL_s⁻¹V* + ½‖V*‖²_{L_s⁻¹}``
    that moves the minimum of the closed-loop storage to ``V*``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    V : array_like
        Node voltages (V).

    ctrl : `~zipgrid.control.ControllerConfig`
    """
    V = np.broadcast_to(np.asarray(V, dtype=float), (net.n,))
    check_voltage(V)
    return float(_shaping(net, V, ctrl))


def closed_loop_storage(net: Network, state: NetworkState, ctrl) -> float:
    """
    The closed-loop storage ``S_d = 𝒫_A + S_a``,

    .. math::

        ½‖V − V^*‖²_{L_s^{-1} + K_1} + ½‖R_tI_t + ℬ^TV‖²_{L_t^{-1}}
        + ½‖I_s + ℬI_t − I_l(V)‖²_{C_s^{-1}} ,

    which is non-negative and vanishes only at the closed-loop
    equilibrium.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> from zipgrid.control import ControllerConfig
    >>> from zipgrid.formulary import equilibrium_from_vstar
    >>> net = build_network([DguParams(0.01, 1.12e-3, 6.8e-3)], [],
    ...                     [ZipLoad(0.04, 10, 5000)])
    >>> ctrl = ControllerConfig(1.0, 5.0, 1e4, 380.0)
    >>> closed_loop_storage(net, equilibrium_from_vstar(net, 380).state, ctrl)
    0.0
    """
    return float(_closed_loop(net, _checked(net, state), ctrl))


def storage_series(net: Network, which: str, x, u, *, ctrl=None,
                   eq: Optional[Equilibrium] = None) -> np.ndarray:
    """
    Evaluate the storage ``which`` on stacked states.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    which : {'energy', 'bregman', 'kras', 'pa', 'sd'}

    x : `~numpy.ndarray`
        States, shape ``(k, 2n + m)``.

    u : `~numpy.ndarray`
        Inputs (V), shape ``(k, n)``; used by ``'kras'``.

    ctrl : `~zipgrid.control.ControllerConfig`, optional
        Required by ``'sd'``.

    eq : `~zipgrid.formulary.Equilibrium`, optional
        Required by ``'bregman'``.

    Returns
    -------
    `~numpy.ndarray`
        Shape ``(k,)``.
    """
    x = np.asarray(x, dtype=float)
    I_s, I_t, V = _split(net, x)
    if which == 'energy':
        return _energy(net, I_s, I_t, V)
    if which == 'bregman':
        _require(eq, 'eq', which)
        return _energy(net, I_s - eq.I_s_bar, I_t - eq.I_t_bar, V - eq.V_bar)
    if which == 'kras':
        return _energy(net, *_x_dot(net, x, np.asarray(u, dtype=float)))
    if which == 'pa':
        return _passivating(net, x)
    if which == 'sd':
        _require(ctrl, 'ctrl', which)
        return _closed_loop(net, x, ctrl)
    raise ValueError(f"Unknown storage {which!r}; expected one of {STORAGE_IDS}.")


def storage_rate_series(net: Network, which: str, x, u, *, ctrl=None,
                        eq: Optional[Equilibrium] = None,
                        u_dot=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    The rate of change of a storage predicted by its dissipation identity.

    Parameters are as for `storage_series`; ``'kras'`` additionally needs
    the input derivative ``u_dot`` (V/s) and ``'pa'`` and ``'sd'`` need
    ``ctrl`` for ``Π`` and the gains.

    Returns
    -------
    rate : `~numpy.ndarray`
        Predicted ``dS/dt``, shape ``(k,)``.

    supply : `~numpy.ndarray`
        The supply-rate part of ``rate``.

    Notes
    -----
    For ``'pa'`` and ``'sd'`` the port variables are recovered from the
    recorded input with the exact ``V̇``: ``υ = L_s⁻¹(u − u_PBC)`` and
    ``μ = L_s⁻¹(u − u_PBC − u_Stab)``, so the identities hold whatever
    input was applied.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    I_s, I_t, V = _split(net, x)
    dI_s, dI_t, dV = _x_dot(net, x, u)
    line_loss = np.sum(net.R_t * dI_t ** 2, axis=-1)

    if which == 'energy':
        supply = np.sum(u * I_s, axis=-1)
        dissipation = (np.sum(net.R_t * I_t ** 2, axis=-1) + np.sum(net.R_s * I_s ** 2, axis=-1)
                       + np.sum(net.Z_inv * V ** 2, axis=-1) + np.sum(net.P_const)
                       + np.sum(net.I_const * V, axis=-1))
    elif which == 'bregman':
        _require(eq, 'eq', which)
        dI, dV_bar = I_s - eq.I_s_bar, V - eq.V_bar
        G_B = net.Z_inv - net.P_const / (V * eq.V_bar)
        supply = np.sum((u - eq.u_bar) * dI, axis=-1)
        dissipation = (np.sum(net.R_t * (I_t - eq.I_t_bar) ** 2, axis=-1)
                       + np.sum(net.R_s * dI ** 2, axis=-1) + np.sum(G_B * dV_bar ** 2, axis=-1))
    elif which == 'kras':
        _require(u_dot, 'u_dot', which)
        G_K = net.Z_inv - net.P_const / V ** 2
        supply = np.sum(np.asarray(u_dot, dtype=float) * dI_s, axis=-1)
        dissipation = (line_loss + np.sum(net.R_s * dI_s ** 2, axis=-1)
                       + np.sum(G_K * dV ** 2, axis=-1))
    elif which in ('pa', 'sd'):
        _require(ctrl, 'ctrl', which)
        G_Pi = net.Z_inv + (ctrl.Pi - net.P_const) / V ** 2
        port = (u - net.R_s * I_s) / net.L_s + ctrl.Pi / V ** 2 * dV
        if which == 'sd':
            G_Pi = G_Pi + ctrl.K2
            port = port + ctrl.K1 * (V - ctrl.V_star) + ctrl.K2 * dV - ctrl.V_star / net.L_s
        supply = np.sum(port * dV, axis=-1)
        dissipation = line_loss + np.sum(G_Pi * dV ** 2, axis=-1)
    else:
        raise ValueError(f"Unknown storage {which!r}; expected one of {STORAGE_IDS}.")
    return supply - dissipation, supply


def _require(value, name, which):
    if value is None:
        raise ValueError(f"The '{which}' storage needs '{name}'.")
