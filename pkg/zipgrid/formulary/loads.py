"""
ZIP load currents and the equivalent conductances derived from them.

A ZIP load draws ``I_l(V) = Z⁻¹V + I* + P*/V``.  Its P component has a
negative incremental conductance ``−P*/V²``, which is what makes constant
power loads destabilizing.
"""
__all__ = ['zip_current', 'zip_conductance', 'conductance_matrices',
           'conductance_curves', 'equivalent_conductance', 'check_voltage']

import numpy as np

from astropy import units as u
from typing import Tuple

from zipgrid.classes import V_MIN
from zipgrid.utils.decorators import validate_quantities
from zipgrid.utils.exceptions import NonPositiveVoltage


def check_voltage(V, name: str = 'V'):
    """
    Raise `~zipgrid.utils.exceptions.NonPositiveVoltage` if any entry of
    ``V`` is at or below `~zipgrid.classes.V_MIN` (or is NaN).
    """
    V = np.asarray(V)
    bad = ~(V > V_MIN)
    if np.any(bad):
        node = int(np.flatnonzero(bad.ravel())[0])
        raise NonPositiveVoltage(
            f"The argument '{name}' must be above {V_MIN} V, "
            f"got {V.ravel()[node]} V at index {node}.", node=node)


def _load_arrays(load):
    return (np.asarray(load.Z_inv), np.asarray(load.I_const), np.asarray(load.P_const))


@validate_quantities(v={'units': u.V, 'error': NonPositiveVoltage})
def zip_current(load, v):
    """
    Current drawn by a ZIP load.

    Parameters
    ----------
    load : `~zipgrid.classes.ZipLoad` or `~zipgrid.classes.Network`
        The load.  A network evaluates all of its loads at once, in which
        case ``v`` holds one voltage per node.

    v : float, array_like, or `~astropy.units.Quantity`
        Load voltage (V).

    Returns
    -------
    float or `~numpy.ndarray`
        ``Z_inv·v + I_const + P_const/v`` in A.

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If ``v`` is not above `~zipgrid.classes.V_MIN`.

    Examples
    --------
    >>> from zipgrid.classes import ZipLoad
    >>> zip_current(ZipLoad(0.04, 10, 5000), 380)
    38.358
    >>> zip_current(ZipLoad(0, 0, 1000), 100)
    10.0
    """
    check_voltage(v, 'v')
    Z_inv, I_const, P_const = _load_arrays(load)
    current = Z_inv * v + I_const + P_const / v
    return float(current) if np.ndim(current) == 0 else current


@validate_quantities(v={'units': u.V, 'error': NonPositiveVoltage})
def zip_conductance(load, v):
    """
    Incremental conductance ``dI_l/dV = Z⁻¹ − P*/V²`` of a ZIP load (S).

    Examples
    --------
    >>> from zipgrid.classes import ZipLoad
    >>> zip_conductance(ZipLoad(0.04, 10, 5000), 380)
    0.005374
    """
    check_voltage(v, 'v')
    Z_inv, _, P_const = _load_arrays(load)
    conductance = Z_inv - P_const / v ** 2
    return float(conductance) if np.ndim(conductance) == 0 else conductance


def equivalent_conductance(net, V_star) -> np.ndarray:
    """
    Per-node equivalent conductance ``Z⁻¹ − P*/V*²`` (S) of a network at its
    voltage references.

    A negative entry means the node's load has a net negative incremental
    conductance at the operating point.
    """
    V_star = np.broadcast_to(np.asarray(V_star, dtype=float), (net.n,))
    check_voltage(V_star, 'V_star')
    return net.Z_inv - net.P_const / V_star ** 2


def conductance_matrices(net, V, Pi, V_star) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Diagonal conductance matrices of the Bregman, Krasovskii and passifying
    storage functions.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`
        Supplies the loads.

    V : array_like
        Node voltages (V).

    Pi : array_like
        Per-node power bounds ``Π`` (W), non-negative.

    V_star : array_like
        Voltage references (V).

    Returns
    -------
    G_B, G_K, G_Pi : `~numpy.ndarray`
        ``n×n`` diagonal matrices

        * ``G_B = Z⁻¹ − [P*][V]⁻¹[V*]⁻¹``
        * ``G_K = Z⁻¹ − [P*][V]⁻²``
        * ``G_Π = Z⁻¹ + (Π − [P*])[V]⁻²``

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If ``V`` or ``V_star`` is not positive.
    """
    V = np.broadcast_to(np.asarray(V, dtype=float), (net.n,))
    V_star = np.broadcast_to(np.asarray(V_star, dtype=float), (net.n,))
    Pi = np.broadcast_to(np.asarray(Pi, dtype=float), (net.n,))
    check_voltage(V)
    check_voltage(V_star, 'V_star')

    G_B = net.Z_inv - net.P_const / (V * V_star)
    G_K = net.Z_inv - net.P_const / V ** 2
    G_Pi = net.Z_inv + (Pi - net.P_const) / V ** 2
    return np.diag(G_B), np.diag(G_K), np.diag(G_Pi)


def conductance_curves(load, Pi, V_star, v_grid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ``G_B``, ``G_K`` and ``G_Π`` of a single load over a grid of voltages.

    Parameters
    ----------
    load : `~zipgrid.classes.ZipLoad`

    Pi : float
        Power bound ``Π`` (W).

    V_star : float
        Voltage reference (V).

    v_grid : array_like
        Positive voltages (V).

    Returns
    -------
    G_B, G_K, G_Pi : `~numpy.ndarray`
        One value per grid point.
    """
    v_grid = np.asarray(v_grid, dtype=float)
    check_voltage(v_grid, 'v_grid')
    check_voltage(V_star, 'V_star')
    G_B = load.Z_inv - load.P_const / (v_grid * V_star)
    G_K = load.Z_inv - load.P_const / v_grid ** 2
    G_Pi = load.Z_inv + (Pi - load.P_const) / v_grid ** 2
    return G_B, G_K, G_Pi
