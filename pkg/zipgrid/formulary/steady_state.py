"""
Equilibria of DC networks with ZIP loads.

At an equilibrium ``(Ī_s, Ī_t, V̄, ū)`` the line currents follow from the
voltages, ``Ī_t = −R_t⁻¹ℬᵀV̄``; the filter currents balance the nodes,
``Ī_s = −ℬĪ_t + I_l(V̄)``; and the input covers the filter drop,
``ū = V̄ + R_sĪ_s``.  Given the voltages everything else is explicit.
Given the input, the voltages solve the nonlinear system

.. math::

    V + R_s (L V + I_l(V)) − u^* = 0, \\qquad L = ℬ R_t^{-1} ℬ^T ,

which is what `equilibrium_from_ustar` iterates on.
"""
__all__ = ['Equilibrium', 'equilibrium_from_vstar', 'equilibrium_from_ustar',
           'closed_loop_equilibrium', 'scalar_equilibrium_roots']

import numpy as np
import scipy.linalg
import warnings

from dataclasses import dataclass
from typing import Optional

from zipgrid.classes import NOMINAL_VOLTAGE, Network, NetworkState, V_MIN
from zipgrid.formulary.dynamics import equation_residual
from zipgrid.formulary.loads import check_voltage
from zipgrid.utils.exceptions import (EquilibriumBranchWarning,
                                      NetworkNotScalar,
                                      NewtonDivergence,
                                      NonPositiveVoltage)


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """
    A steady state of the open-loop network.

    Attributes
    ----------
    I_s_bar : `~numpy.ndarray`
        Filter currents (A).

    I_t_bar : `~numpy.ndarray`
        Line currents (A).

    V_bar : `~numpy.ndarray`
        Node voltages (V).

    u_bar : `~numpy.ndarray`
        Converter voltages that hold the equilibrium (V).

    residual : float
        Largest absolute entry of the model equations at the equilibrium
        (see `~zipgrid.formulary.dynamics.equation_residual`).
    """
    I_s_bar: np.ndarray
    I_t_bar: np.ndarray
    V_bar: np.ndarray
    u_bar: np.ndarray
    residual: float

    @property
    def state(self) -> NetworkState:
        """The equilibrium as a `~zipgrid.classes.NetworkState`."""
        return NetworkState(self.I_s_bar, self.I_t_bar, self.V_bar)


def _complete(net: Network, V_bar: np.ndarray) -> Equilibrium:
    I_t_bar = -(net.incidence.T @ V_bar) / net.R_t
    I_s_bar = (-net.incidence @ I_t_bar
               + net.Z_inv * V_bar + net.I_const + net.P_const / V_bar)
    u_bar = V_bar + net.R_s * I_s_bar
    state = NetworkState(I_s_bar, I_t_bar, V_bar)
    residual = float(np.max(np.abs(equation_residual(net, state, u_bar))))
    return Equilibrium(state.I_s, state.I_t, state.V, u_bar, residual)


def equilibrium_from_vstar(net: Network, V_star) -> Equilibrium:
    """
    The equilibrium with prescribed node voltages.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    V_star : array_like
        Desired node voltages (V), positive.

    Returns
    -------
    Equilibrium

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If a voltage is not positive.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(0.01, 1.12e-3, 6.8e-3)], [],
    ...                     [ZipLoad(0.04, 10, 5000)])
    >>> equilibrium_from_vstar(net, 380).I_s_bar
    array([38.358])
    """
    V_bar = np.array(np.broadcast_to(np.asarray(V_star, dtype=float), (net.n,)))
    check_voltage(V_bar, 'V_star')
    return _complete(net, V_bar)


def closed_loop_equilibrium(net: Network, ctrl) -> Equilibrium:
    """
    The unique equilibrium of the network under the voltage controller
    ``ctrl`` (a `~zipgrid.control.ControllerConfig`): the node voltages sit
    at ``ctrl.V_star`` and ``ū = R_sĪ_s + V*``.
    """
    return equilibrium_from_vstar(net, ctrl.V_star)


def equilibrium_from_ustar(net: Network, u_star, V_init=None, *,
                           tol: float = 1e-10, max_iter: int = 100) -> Equilibrium:
    """
    The equilibrium reached under a constant input, by Newton's method on
    the node voltages.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    u_star : array_like
        Constant converter voltages (V).

    V_init : array_like, optional
        Initial voltage guess (V), positive.  Defaults to
        `~zipgrid.classes.NOMINAL_VOLTAGE` at every node.  With P-loads
        there are in general several equilibria; the one returned is the
        one Newton's method reaches from ``V_init``.

    tol : float
        Convergence threshold on the largest equation residual (V).  It is
        raised to a few ulps of ``u_star`` when that is larger.

    max_iter : int
        Iteration budget.

    Returns
    -------
    Equilibrium

    Raises
    ------
    ~zipgrid.utils.exceptions.NewtonDivergence
        If the residual is not below ``tol`` after ``max_iter`` iterations.

    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If ``V_init`` is not positive or the step cannot be damped enough to
        keep the voltages positive.

    Warns
    -----
    ~zipgrid.utils.exceptions.EquilibriumBranchWarning
        For a single node, when the low-voltage root was reached.
    """
    n = net.n
    u_star = np.array(np.broadcast_to(np.asarray(u_star, dtype=float), (n,)))
    if V_init is None:
        V = np.full(n, NOMINAL_VOLTAGE)
    else:
        V = np.array(np.broadcast_to(np.asarray(V_init, dtype=float), (n,)))
    check_voltage(V, 'V_init')

    laplacian = net.laplacian
    tol = max(tol, 64 * np.finfo(float).eps * np.max(np.abs(u_star)))

    def residual(V):
        load = net.Z_inv * V + net.I_const + net.P_const / V
        return V + net.R_s * (laplacian @ V + load) - u_star

    F = residual(V)
    for _ in range(max_iter):
        if np.max(np.abs(F)) < tol:
            break

        jacobian = (np.eye(n) + net.R_s[:, np.newaxis]
                    * (laplacian + np.diag(net.Z_inv - net.P_const / V ** 2)))
        step = scipy.linalg.solve(jacobian, -F)

        # halve the step until the voltages stay positive and the residual drops
        alpha = 1.0
        for _ in range(60):
            candidate = V + alpha * step
            if np.all(candidate > V_MIN):
                F_candidate = residual(candidate)
                if np.max(np.abs(F_candidate)) < np.max(np.abs(F)) or alpha < 1e-3:
                    break
            alpha /= 2
        else:
            raise NonPositiveVoltage(
                "Newton step could not be damped to keep the voltages positive.")
        V, F = candidate, F_candidate
    else:
        if not np.max(np.abs(F)) < tol:
            raise NewtonDivergence(
                f"Newton iteration did not converge in {max_iter} iterations "
                f"(residual {np.max(np.abs(F)):.3e} V).")

    eq = _complete(net, V)

    if net.is_scalar and net.P_const[0] > 0:
        roots = scalar_equilibrium_roots(net, u_star[0])
        if roots.size == 2 and abs(V[0] - roots[0]) < abs(V[0] - roots[1]):
            warnings.warn(
                f"The equilibrium reached from V_init is the low-voltage root "
                f"{roots[0]:.6g} V; the high-voltage root is {roots[1]:.6g} V.",
                EquilibriumBranchWarning)
    return eq


def scalar_equilibrium_roots(net: Network, u_star: float) -> np.ndarray:
    """
    Both open-loop equilibrium voltages of a single node.

    They are the positive roots of
    ``(1 + R_sZ⁻¹)V² − (u* − R_sI*)V + R_sP* = 0``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`
        A network with one node and no lines.

    u_star : float
        Constant converter voltage (V).

    Returns
    -------
    `~numpy.ndarray`
        The positive roots in increasing order: none when the load cannot
        be supplied, one without a P-load, two otherwise.

    Raises
    ------
    ~zipgrid.utils.exceptions.NetworkNotScalar
        If ``net`` has more than one node.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(1.0, 1e-3, 1e-3)], [], [ZipLoad(0, 0, 2)])
    >>> scalar_equilibrium_roots(net, 3.0)
    array([1., 2.])
    """
    if not net.is_scalar:
        raise NetworkNotScalar(f"Expected a single node without lines, got n={net.n}, "
                               f"m={net.m}.")
    R_s, Z_inv = net.R_s[0], net.Z_inv[0]
    I_const, P_const = net.I_const[0], net.P_const[0]
    a = 1.0 + R_s * Z_inv
    b = float(u_star) - R_s * I_const
    c = R_s * P_const

    if c == 0:
        roots = np.array([b / a])
    else:
        discriminant = b ** 2 - 4 * a * c
        if discriminant < 0:
            return np.array([])
        sqrt_disc = np.sqrt(discriminant)
        # numerically stable pair of roots
        q = 0.5 * (b + np.copysign(sqrt_disc, b))
        roots = np.sort(np.array([q / a, c / q]))
    return roots[roots > 0]
