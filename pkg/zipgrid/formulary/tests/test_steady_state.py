"""Tests for `zipgrid.formulary.steady_state`."""
import numpy as np
import pytest

from zipgrid.classes import DguParams, LineParams, ZipLoad, build_network
from zipgrid.control import ControllerConfig
from zipgrid.formulary.dynamics import equation_residual
from zipgrid.formulary.steady_state import (closed_loop_equilibrium,
                                            equilibrium_from_ustar,
                                            equilibrium_from_vstar,
                                            scalar_equilibrium_roots)
from zipgrid.io import bundled_scenario, load_scenario
from zipgrid.utils.exceptions import (EquilibriumBranchWarning,
                                      NetworkNotScalar,
                                      NewtonDivergence,
                                      NonPositiveVoltage)


@pytest.fixture(scope='module')
def scenario1():
    return load_scenario(bundled_scenario('scenario1'))


def random_network(seed):
    """A connected network on 2 to 6 nodes: a random tree plus a few extra lines."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    tree = [(int(rng.integers(0, k)), k) for k in range(1, n)]
    extra = [(i, j) for i in range(n) for j in range(i + 1, n)
             if (i, j) not in tree and rng.random() < 0.3]
    edges = tree + extra
    dgus = [DguParams(rng.uniform(0.01, 0.03), rng.uniform(1e-3, 3e-3), rng.uniform(1e-3, 7e-3))
            for _ in range(n)]
    lines = [LineParams(rng.uniform(0.04, 0.1), rng.uniform(1e-6, 3e-6)) for _ in edges]
    loads = [ZipLoad(rng.uniform(0.0, 0.1), rng.uniform(0.0, 15.0), rng.uniform(0.0, 10e3))
             for _ in range(n)]
    return build_network(dgus, lines, loads, edge_list=edges)


@pytest.mark.parametrize('name, I_s_bar', [('illustrative', 38.358),
                                           ('illustrative_case2', 42.305)])
def test_illustrative_equilibria(name, I_s_bar):
    scenario = load_scenario(bundled_scenario(name))
    eq = equilibrium_from_vstar(scenario.network, 380.0)
    assert np.isclose(eq.I_s_bar[0], I_s_bar, atol=5e-4)
    assert np.isclose(eq.u_bar[0], 380.0 + 0.01 * I_s_bar, atol=1e-5)
    assert eq.I_t_bar.size == 0


class TestFromVstar:

    def test_residual(self, scenario1):
        eq = closed_loop_equilibrium(scenario1.network, scenario1.controller)
        assert eq.residual < 1e-9
        assert np.array_equal(eq.V_bar, scenario1.controller.V_star)
        assert np.max(np.abs(equation_residual(scenario1.network, eq.state, eq.u_bar))) < 1e-9

    def test_line_currents_follow_voltage_differences(self, scenario1):
        net = scenario1.network
        eq = equilibrium_from_vstar(net, scenario1.controller.V_star)
        # edge 1 runs from node 1 (379.50 V) to node 2 (379.75 V)
        assert eq.I_t_bar[0] < 0
        assert np.isclose(eq.I_t_bar[0], -0.25 / 0.07)
        # the line currents add no net power
        assert np.isclose(np.sum(net.incidence @ eq.I_t_bar), 0, atol=1e-12)

    def test_uniform_reference(self, scenario1):
        eq = equilibrium_from_vstar(scenario1.network, 380.0)
        assert np.allclose(eq.I_t_bar, 0)

    def test_non_positive(self, scenario1):
        with pytest.raises(NonPositiveVoltage):
            equilibrium_from_vstar(scenario1.network, [380.0, 380.0, -1.0, 380.0])

    def test_closed_loop_ignores_gains(self, scenario1):
        net = scenario1.network
        slow = ControllerConfig(1.0, 1.0, 25e3, scenario1.controller.V_star)
        fast = scenario1.controller
        assert np.array_equal(closed_loop_equilibrium(net, slow).u_bar,
                              closed_loop_equilibrium(net, fast).u_bar)


class TestFromUstar:

    def test_inverts_vstar(self, scenario1):
        net = scenario1.network
        target = equilibrium_from_vstar(net, scenario1.controller.V_star)
        eq = equilibrium_from_ustar(net, target.u_bar)
        assert np.allclose(eq.V_bar, target.V_bar, atol=1e-8)
        assert np.allclose(eq.I_s_bar, target.I_s_bar, atol=1e-6)
        assert eq.residual < 1e-8

    @pytest.mark.parametrize('seed', range(10))
    def test_inverts_vstar_on_random_networks(self, seed):
        net = random_network(seed)
        V_star = np.random.default_rng(seed).uniform(379.0, 381.0, net.n)
        target = equilibrium_from_vstar(net, V_star)
        eq = equilibrium_from_ustar(net, target.u_bar)
        assert np.allclose(eq.V_bar, V_star, rtol=0, atol=1e-8)
        assert np.allclose(eq.I_t_bar, target.I_t_bar, rtol=0, atol=1e-6)

    def test_high_root_from_nominal(self):
        net = load_scenario(bundled_scenario('illustrative')).network
        u_bar = equilibrium_from_vstar(net, 380.0).u_bar
        eq = equilibrium_from_ustar(net, u_bar)
        assert np.isclose(eq.V_bar[0], 380.0, atol=1e-8)

    def test_low_root_warns(self):
        net = build_network([DguParams(1.0, 1e-3, 1e-3)], [], [ZipLoad(0, 0, 2)])
        with pytest.warns(EquilibriumBranchWarning):
            eq = equilibrium_from_ustar(net, 3.0, V_init=0.9)
        assert np.isclose(eq.V_bar[0], 1.0)

    def test_no_equilibrium(self):
        # u = 1 V can not supply 2 W through 1 Ω
        net = build_network([DguParams(1.0, 1e-3, 1e-3)], [], [ZipLoad(0, 0, 2)])
        with pytest.raises((NewtonDivergence, NonPositiveVoltage)):
            equilibrium_from_ustar(net, 1.0, V_init=1.0, max_iter=30)

    def test_bad_initial_guess(self, scenario1):
        with pytest.raises(NonPositiveVoltage):
            equilibrium_from_ustar(scenario1.network, 380.0, V_init=0.0)


class TestScalarRoots:

    def test_roots(self):
        net = build_network([DguParams(1.0, 1e-3, 1e-3)], [], [ZipLoad(0, 0, 2)])
        assert np.allclose(scalar_equilibrium_roots(net, 3.0), [1.0, 2.0])
        assert scalar_equilibrium_roots(net, 1.0).size == 0

    def test_without_power_load(self):
        net = build_network([DguParams(1.0, 1e-3, 1e-3)], [], [ZipLoad(1.0, 0, 0)])
        roots = scalar_equilibrium_roots(net, 4.0)
        assert np.allclose(roots, [2.0])

    def test_needs_scalar(self, scenario1):
        with pytest.raises(NetworkNotScalar):
            scalar_equilibrium_roots(scenario1.network, 380.0)
