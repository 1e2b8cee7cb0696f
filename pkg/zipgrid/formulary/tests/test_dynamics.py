"""Tests for the open-loop network model in `zipgrid.formulary.dynamics`."""
import numpy as np
import pytest

from zipgrid.classes import NetworkState
from zipgrid.formulary.dynamics import (equation_residual,
                                        open_loop_field,
                                        open_loop_rhs,
                                        state_jacobian,
                                        voltage_derivative)
from zipgrid.formulary.steady_state import equilibrium_from_vstar
from zipgrid.io import bundled_scenario, load_scenario
from zipgrid.utils.exceptions import NonPositiveVoltage
from zipgrid.utils.pytest_helpers import central_jacobian, relative_error


@pytest.fixture(scope='module')
def ring():
    return load_scenario(bundled_scenario('scenario1')).network


@pytest.fixture(scope='module')
def state():
    return NetworkState([30.0, 40.0, 35.0, 50.0], [2.0, -1.0, 0.5, -3.0],
                        [381.0, 378.0, 383.0, 376.0])


def test_equilibrium_is_at_rest(ring):
    eq = equilibrium_from_vstar(ring, [379.5, 379.75, 380.0, 380.25])
    rest = open_loop_rhs(ring, eq.state, eq.u_bar)
    assert np.allclose(rest.I_s, 0, atol=1e-9)
    assert np.allclose(rest.I_t, 0, atol=1e-6)
    assert np.allclose(rest.V, 0, atol=1e-9)


def test_rhs_is_residual_over_storage(ring, state):
    u = np.full(4, 385.0)
    x_dot = open_loop_rhs(ring, state, u).as_vector()
    storage = np.concatenate((ring.L_s, ring.L_t, ring.C_s))
    assert np.allclose(x_dot, equation_residual(ring, state, u) / storage)


def test_kirchhoff_current_law(ring, state):
    # the line currents only move charge between nodes
    x_dot = open_loop_rhs(ring, state, 380.0)
    load = ring.Z_inv * state.V + ring.I_const + ring.P_const / state.V
    assert np.isclose(np.sum(ring.C_s * x_dot.V), np.sum(state.I_s - load))


def test_voltage_derivative_is_input_free(ring, state):
    v_dot = voltage_derivative(ring, state)
    for u in (0.0, 380.0, [400.0, 390.0, 380.0, 370.0]):
        assert np.allclose(open_loop_rhs(ring, state, u).V, v_dot)


def test_jacobian(ring, state):
    u = np.full(4, 385.0)
    numeric = central_jacobian(lambda x: open_loop_field(ring, x, u), state.as_vector())
    assert relative_error(state_jacobian(ring, state), numeric) < 1e-8


def test_scalar_doctest_network():
    from zipgrid.classes import DguParams, ZipLoad, build_network

    net = build_network([DguParams(0.5, 1e-3, 1e-3)], [], [ZipLoad(0.1)])
    rhs = open_loop_rhs(net, NetworkState([10.0], [], [100.0]), [106.0])
    assert np.isclose(rhs.I_s[0], 1.0 / 1e-3)
    assert rhs.I_t.size == 0


def test_non_positive_voltage(ring):
    state = NetworkState(np.zeros(4), np.zeros(4), [380.0, 0.0, 380.0, 380.0])
    with pytest.raises(NonPositiveVoltage):
        open_loop_rhs(ring, state, 380.0)
    with pytest.raises(NonPositiveVoltage):
        state_jacobian(ring, state)


def test_shape_mismatch(ring):
    with pytest.raises(ValueError):
        open_loop_rhs(ring, NetworkState([1.0], [], [380.0]), 380.0)
