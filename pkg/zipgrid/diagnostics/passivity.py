"""
Numerical passivity analysis of DC networks.

`storage_report` evaluates every storage function at one state and tells
in which of the sets ``𝒳`` (positive voltages), ``𝒳_B`` (``G_B(V) ⪰ 0``)
and ``𝒳_K`` (``G_K(V) ⪰ 0``) the state lies.  `dissipation_audit`
compares, along a simulated trajectory, the numerical derivative of a
storage with the rate its dissipation identity predicts.
"""
__all__ = ['StorageReport', 'DissipationSample', 'DissipationSeries', 'MembershipRegion',
           'SecondOrderCoefficients', 'SecondOrderFit',
           'storage_report', 'dissipation_audit', 'audit_passed', 'set_membership_region',
           'node_second_order_coefficients', 'fit_second_order']

import collections.abc
import numpy as np
import scipy.linalg
import scipy.ndimage
import warnings

from dataclasses import dataclass
from typing import NamedTuple, Optional

from zipgrid.classes import Network, NetworkState
from zipgrid.control.pbc import ControllerConfig, control_input
from zipgrid.diagnostics.storages import (STORAGE_IDS,
                                          bregman_storage,
                                          closed_loop_storage,
                                          energy_storage,
                                          krasovskii_storage,
                                          shaping_storage,
                                          storage_rate_series,
                                          storage_series)
from zipgrid.formulary.brayton_moser import passivating_storage
from zipgrid.formulary.dynamics import voltage_derivative
from zipgrid.formulary.loads import check_voltage, conductance_matrices
from zipgrid.formulary.steady_state import Equilibrium, equilibrium_from_vstar
from zipgrid.utils.exceptions import AssumptionWarning, AuditWarning, InsufficientSamples

#: Multiple of ``h²·|d²P/dt²|`` accepted as truncation error of the
#: central differences.
TRUNCATION_FACTOR = 10.0

#: Multiple of the rounding error of the stored states accepted on top.
ROUNDOFF_FACTOR = 32.0


class StorageReport(NamedTuple):
    """
    Storage values and set memberships at one state.

    Attributes
    ----------
    S_energy, S_bregman, S_krasovskii : float
        Total energy, its Bregman distance to the equilibrium and its
        Krasovskii form (J).

    P_A : float
        The passivating generalized mixed potential.

    S_a, S_d : float
        The shaping term and the closed-loop storage ``S_d = 𝒫_A + S_a``.

    in_X, in_X_B, in_X_K : bool
        Set memberships.

    min_G_B, min_G_K, min_G_Pi : float
        Smallest eigenvalues (S) of the conductance matrices at the state.
    """
    S_energy: float
    S_bregman: float
    S_krasovskii: float
    P_A: float
    S_a: float
    S_d: float
    in_X: bool
    in_X_B: bool
    in_X_K: bool
    min_G_B: float
    min_G_K: float
    min_G_Pi: float


class DissipationSample(NamedTuple):
    """One sample of a dissipation audit."""
    t: float
    S: float
    dS_dt_numeric: float
    dS_dt_predicted: float
    supply: float
    residual: float
    bound: float


@dataclass(frozen=True, eq=False)
class DissipationSeries(collections.abc.Sequence):
    """
    The samples of a dissipation audit, stored column-wise.

    Indexing yields `DissipationSample` objects; the columns are available
    as arrays under the same names.  ``residual`` is
    ``dS_dt_numeric − dS_dt_predicted`` and passes when its magnitude is
    at most ``bound``.
    """
    which: str
    t: np.ndarray
    S: np.ndarray
    dS_dt_numeric: np.ndarray
    dS_dt_predicted: np.ndarray
    supply: np.ndarray
    residual: np.ndarray
    bound: np.ndarray

    def __len__(self):
        return self.t.size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return DissipationSample(*(float(getattr(self, name)[i])
                                   for name in DissipationSample._fields))


class MembershipRegion(NamedTuple):
    """
    Per-node membership of a voltage grid in ``𝒳_B`` and ``𝒳_K``.

    The flags have shape ``(len(v_grid), n)``.  Both sets are bounded from
    below in ``V``; ``boundary_B`` and ``boundary_K`` are those bounds (V),
    ``inf`` where the set is empty.
    """
    v_grid: np.ndarray
    in_X_B: np.ndarray
    in_X_K: np.ndarray
    G_Pi_nonnegative: np.ndarray
    boundary_B: np.ndarray
    boundary_K: np.ndarray


class SecondOrderCoefficients(NamedTuple):
    """``V̈ + αV̇ + βV = γ`` of the controlled nodes."""
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray


class SecondOrderFit(NamedTuple):
    """Least-squares estimate of `SecondOrderCoefficients` from samples."""
    alpha: float
    beta: float
    gamma: float
    rms_residual: float


def storage_report(net: Network, state: NetworkState, eq: Equilibrium,
                   ctrl: ControllerConfig, u=None) -> StorageReport:
    """
    Evaluate every storage function at ``state``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    state : `~zipgrid.classes.NetworkState`
        Must have positive voltages.

    eq : `~zipgrid.formulary.Equilibrium`
        The closed-loop equilibrium, with ``V̄ = ctrl.V_star``.

    ctrl : `~zipgrid.control.ControllerConfig`

    u : array_like, optional
        Input used for the Krasovskii storage (V).  Defaults to the
        control law with the exact ``V̇``.

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If a voltage of ``state`` is not positive.

    ValueError
        If ``eq`` does not sit at the voltage references.

    Warns
    -----
    ~zipgrid.utils.exceptions.AssumptionWarning
        If ``Π ⪰ [P*]`` does not hold for the network's loads.
    """
    state.check_shape(net)
    check_voltage(state.V)
    if not np.allclose(eq.V_bar, ctrl.V_star, rtol=1e-12, atol=0):
        raise ValueError("The equilibrium does not sit at the controller's voltage "
                         "references.")
    if not ctrl.covers(net.P_const):
        warnings.warn("Pi does not bound the P-load powers; the passivity guarantees "
                      "do not apply.", AssumptionWarning)
    if u is None:
        u = control_input(net.filters, state, ctrl, voltage_derivative(net, state))

    P_A = passivating_storage(net, state)
    S_a = shaping_storage(net, state.V, ctrl)
    G_B, G_K, G_Pi = (np.diag(G) for G in
                      conductance_matrices(net, state.V, ctrl.Pi, ctrl.V_star))
    return StorageReport(
        S_energy=energy_storage(net, state),
        S_bregman=bregman_storage(net, state, eq),
        S_krasovskii=krasovskii_storage(net, state, u),
        P_A=P_A,
        S_a=S_a,
        S_d=closed_loop_storage(net, state, ctrl),
        in_X=state.in_domain(),
        in_X_B=bool(np.all(G_B >= 0)),
        in_X_K=bool(np.all(G_K >= 0)),
        min_G_B=float(G_B.min()),
        min_G_K=float(G_K.min()),
        min_G_Pi=float(G_Pi.min()),
    )


def _roundoff_sensitivity(net, which, x, u, **context):
    """``Σ_j |∂S/∂x_j|·|x_j|`` per sample, by forward differences."""
    base = storage_series(net, which, x, u, **context)
    total = np.zeros_like(base)
    for columns, other in ((x, u), (u, x)):
        for j in range(columns.shape[1]):
            magnitude = np.abs(columns[:, j])
            step = 1e-7 * np.maximum(magnitude, 1.0)
            shifted = np.array(columns)
            shifted[:, j] += step
            args = (shifted, other) if columns is x else (other, shifted)
            value = storage_series(net, which, *args, **context)
            total += np.abs(value - base) / step * magnitude
        if which != 'kras':
            break
    return total


def _spacings(t):
    h = np.diff(t)
    before = np.concatenate(([h[0]], h))
    after = np.concatenate((h, [h[-1]]))
    return np.maximum(before, after), np.minimum(before, after)


def dissipation_audit(net: Network, trajectory, which: str,
                      ctrl: Optional[ControllerConfig] = None, *,
                      V_ref=None) -> DissipationSeries:
    """
    Check a dissipation identity along a recorded trajectory.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`
        The network the trajectory started from.

    trajectory : `~zipgrid.simulation.Trajectory`
        A recorded run, including its inputs.

    which : {'energy', 'bregman', 'kras', 'pa', 'sd'}
        The storage to audit.

    ctrl : `~zipgrid.control.ControllerConfig`, optional
        Needed for ``'pa'`` and ``'sd'`` (``Π`` and the gains) and supplies
        the default Bregman reference.

    V_ref : array_like, optional
        Voltages (V) of the equilibrium the Bregman storage is shifted to;
        defaults to ``ctrl.V_star``.  The reference equilibrium is
        recomputed for every load set, so the Bregman series jumps at
        events.

    Returns
    -------
    DissipationSeries
        ``dS_dt_numeric`` comes from second-order finite differences of the
        storage series within each load set.  ``bound`` combines the
        truncation error of those differences, estimated as
        ``10·h²`` times the local magnitude of ``d²(dS/dt)/dt²``, with
        the effect of rounding the stored states.

    Raises
    ------
    ~zipgrid.utils.exceptions.InsufficientSamples
        If the trajectory has fewer than three samples.

    Warns
    -----
    ~zipgrid.utils.exceptions.AuditWarning
        For load sets recorded with fewer than three samples, which are
        skipped.
    """
    if which not in STORAGE_IDS:
        raise ValueError(f"Unknown storage {which!r}; expected one of {STORAGE_IDS}.")
    if len(trajectory) < 3:
        raise InsufficientSamples(f"A dissipation audit needs at least 3 samples, "
                                  f"got {len(trajectory)}.")
    if trajectory.networks[0] != net:
        raise ValueError("The trajectory was not recorded on this network.")
    if which in ('pa', 'sd') and ctrl is None:
        raise ValueError(f"The '{which}' storage needs the controller configuration.")
    if which == 'bregman':
        if V_ref is None:
            if ctrl is None:
                raise ValueError("The 'bregman' storage needs V_ref or a controller.")
            V_ref = ctrl.V_star

    columns = {name: [] for name in DissipationSample._fields}
    eps = np.finfo(float).eps
    for sl in trajectory.segment_slices():
        t = trajectory.t[sl]
        if t.size < 3:
            warnings.warn(f"Skipped {t.size} sample(s) at t = {t[0]:.6g} s: too few "
                          f"samples between events for central differences.", AuditWarning)
            continue
        seg_net = trajectory.network_at(sl.start)
        x, u = trajectory.x[sl], trajectory.u[sl]
        context = {'ctrl': ctrl}
        if which == 'bregman':
            context['eq'] = equilibrium_from_vstar(seg_net, V_ref)

        S = storage_series(seg_net, which, x, u, **context)
        u_dot = np.gradient(u, t, axis=0, edge_order=2) if which == 'kras' else None
        predicted, supply = storage_rate_series(seg_net, which, x, u, u_dot=u_dot, **context)
        numeric = np.gradient(S, t, edge_order=2)

        h_max, h_min = _spacings(t)
        curvature = np.abs(np.gradient(np.gradient(predicted, t, edge_order=2), t,
                                       edge_order=2))
        if which == 'kras':
            # finite-difference error of u̇ enters through the supply
            u_curvature = np.abs(np.gradient(np.gradient(u_dot, t, axis=0, edge_order=2), t,
                                             axis=0, edge_order=2))
            dI_s = np.abs((-seg_net.R_s * x[:, :seg_net.n] - x[:, -seg_net.n:] + u)
                           / seg_net.L_s)
            curvature = curvature + np.sum(u_curvature * dI_s, axis=-1)
        curvature = scipy.ndimage.maximum_filter1d(curvature, size=5, mode='nearest')
        sensitivity = _roundoff_sensitivity(seg_net, which, x, u, **context)
        bound = (TRUNCATION_FACTOR * h_max ** 2 * curvature
                 + ROUNDOFF_FACTOR * eps * sensitivity / h_min)

        for name, value in (('t', t), ('S', S), ('dS_dt_numeric', numeric),
                            ('dS_dt_predicted', predicted), ('supply', supply),
                            ('residual', numeric - predicted), ('bound', bound)):
            columns[name].append(value)

    if not columns['t']:
        raise InsufficientSamples("No load set was recorded with at least 3 samples.")
    return DissipationSeries(which, *(np.concatenate(columns[name])
                                      for name in DissipationSample._fields))


def audit_passed(series: DissipationSeries) -> bool:
    """`True` if every residual of the audit is within its bound."""
    return bool(np.all(np.abs(series.residual) <= series.bound))


def set_membership_region(net: Network, ctrl: ControllerConfig, v_grid) -> MembershipRegion:
    """
    Where on a voltage grid each node's load satisfies ``G_B ⪰ 0`` and
    ``G_K ⪰ 0``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`
        Supplies the loads.

    ctrl : `~zipgrid.control.ControllerConfig`
        Supplies ``Π`` and ``V*``.

    v_grid : array_like
        Positive voltages (V).

    Returns
    -------
    MembershipRegion

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(0.01, 1.12e-3, 6.8e-3)], [],
    ...                     [ZipLoad(0.04, 10, 5000)])
    >>> region = set_membership_region(net, ControllerConfig(1, 5, 5500, 380), [300, 400])
    >>> region.boundary_K
    array([353.55339059])
    >>> region.in_X_K[:, 0]
    array([False,  True])
    """
    v_grid = np.asarray(v_grid, dtype=float).ravel()
    check_voltage(v_grid, 'v_grid')
    V = v_grid[:, np.newaxis]
    Z_inv, P_const = net.Z_inv, net.P_const

    G_B = Z_inv - P_const / (V * ctrl.V_star)
    G_K = Z_inv - P_const / V ** 2
    G_Pi = Z_inv + (ctrl.Pi - P_const) / V ** 2

    with np.errstate(divide='ignore', invalid='ignore'):
        boundary_B = np.where(P_const == 0, 0.0,
                              np.where(Z_inv > 0, P_const / (Z_inv * ctrl.V_star), np.inf))
        boundary_K = np.where(P_const == 0, 0.0,
                              np.where(Z_inv > 0, np.sqrt(P_const / Z_inv), np.inf))
    return MembershipRegion(v_grid, G_B >= 0, G_K >= 0, G_Pi >= 0, boundary_B, boundary_K)


def node_second_order_coefficients(net: Network, ctrl: ControllerConfig,
                                   V) -> SecondOrderCoefficients:
    """
    Coefficients of the voltage dynamics of each node under the control
    law, neglecting the line currents:

    .. math::

        \\ddot{V} + α(V)\\dot{V} + βV = γ, \\qquad
        α = \\frac{Z^{-1} − P^*/V^2 + Π/V^2 + K_2}{C_s}, \\quad
        β = \\frac{K_1L_s + 1}{L_sC_s}, \\quad γ = βV^* .

    The control term ``Π/V² + K₂`` acts as a virtual conductance in
    parallel with the load.
    """
    V = np.broadcast_to(np.asarray(V, dtype=float), (net.n,))
    check_voltage(V)
    alpha = (net.Z_inv - net.P_const / V ** 2 + ctrl.Pi / V ** 2 + ctrl.K2) / net.C_s
    beta = (ctrl.K1 * net.L_s + 1) / (net.L_s * net.C_s)
    return SecondOrderCoefficients(alpha, beta, beta * ctrl.V_star)


def fit_second_order(t, V) -> SecondOrderFit:
    """
    Fit ``V̈ + αV̇ + βV = γ`` with constant coefficients to a voltage series
    by linear least squares, with derivatives from finite differences.

    Parameters
    ----------
    t : array_like
        Sample times (s), increasing.

    V : array_like
        Voltage samples of one node (V).

    Raises
    ------
    ~zipgrid.utils.exceptions.InsufficientSamples
        With fewer than five samples.
    """
    t = np.asarray(t, dtype=float)
    V = np.asarray(V, dtype=float)
    if t.size < 5:
        raise InsufficientSamples(f"Fitting needs at least 5 samples, got {t.size}.")
    V_dot = np.gradient(V, t, edge_order=2)
    V_ddot = np.gradient(V_dot, t, edge_order=2)
    # edges carry one-sided differences of the one-sided differences
    inner = slice(2, -2)
    A = np.column_stack((-V_dot[inner], -V[inner], np.ones(V[inner].size)))
    coefficients, _, _, _ = scipy.linalg.lstsq(A, V_ddot[inner])
    rms = float(np.sqrt(np.mean((A @ coefficients - V_ddot[inner]) ** 2)))
    return SecondOrderFit(*(float(c) for c in coefficients), rms)
