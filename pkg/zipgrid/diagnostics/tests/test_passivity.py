"""Tests for `zipgrid.diagnostics.passivity`."""
import numpy as np
import pytest

from zipgrid.classes import NetworkState
from zipgrid.control import ControllerConfig
from zipgrid.diagnostics import (audit_passed,
                                 DissipationSample,
                                 dissipation_audit,
                                 fit_second_order,
                                 node_second_order_coefficients,
                                 set_membership_region,
                                 storage_report)
from zipgrid.formulary import closed_loop_equilibrium, equilibrium_from_vstar
from zipgrid.io import bundled_scenario, load_scenario
from zipgrid.simulation import SimConfig, simulate
from zipgrid.utils.exceptions import (AssumptionWarning,
                                      InsufficientSamples,
                                      NonPositiveVoltage)


@pytest.fixture(scope='module')
def scenario1():
    return load_scenario(bundled_scenario('scenario1'))


@pytest.fixture(scope='module')
def illustrative():
    return load_scenario(bundled_scenario('illustrative'))


@pytest.fixture(scope='module')
def illustrative_run(illustrative):
    net, ctrl, sim, events = illustrative.parts
    return simulate(net, ctrl, illustrative.initial_state(), sim, events)


class TestStorageReport:

    def test_at_equilibrium(self, scenario1):
        net, ctrl = scenario1.network, scenario1.controller
        eq = closed_loop_equilibrium(net, ctrl)
        report = storage_report(net, eq.state, eq, ctrl)
        assert report.S_bregman == 0
        assert np.isclose(report.S_d, 0, atol=1e-9)
        assert np.isclose(report.S_krasovskii, 0, atol=1e-9)
        assert np.isclose(report.P_A + report.S_a, report.S_d, atol=1e-6)
        assert report.in_X and report.in_X_B and report.in_X_K
        assert np.isclose(report.min_G_K, 0.00084, atol=5e-5)
        assert report.min_G_Pi > 0

    def test_after_the_step(self, scenario1):
        net, ctrl = scenario1.network, scenario1.controller
        stepped = scenario1.events[0].apply(net)
        eq = closed_loop_equilibrium(stepped, ctrl)
        report = storage_report(stepped, eq.state, eq, ctrl)
        # the references are outside 𝒳_B and 𝒳_K, the controller still damps
        assert not report.in_X_B
        assert not report.in_X_K
        assert np.isclose(report.min_G_B, -0.047, atol=5e-4)
        assert report.min_G_Pi > 0

    def test_uncovered_power_warns(self, scenario1):
        net = scenario1.network
        ctrl = ControllerConfig(50.0, 200.0, 5e3, scenario1.controller.V_star)
        eq = closed_loop_equilibrium(net, ctrl)
        with pytest.warns(AssumptionWarning):
            report = storage_report(net, eq.state, eq, ctrl)
        assert report.in_X

    def test_equilibrium_must_match_references(self, scenario1):
        net, ctrl = scenario1.network, scenario1.controller
        eq = equilibrium_from_vstar(net, 380.0)
        with pytest.raises(ValueError):
            storage_report(net, eq.state, eq, ctrl)

    def test_non_positive_voltage(self, scenario1):
        net, ctrl = scenario1.network, scenario1.controller
        eq = closed_loop_equilibrium(net, ctrl)
        with pytest.raises(NonPositiveVoltage):
            storage_report(net, NetworkState(np.zeros(4), np.zeros(4), np.zeros(4)), eq, ctrl)


class TestDissipationAudit:

    @pytest.mark.parametrize('which', ['energy', 'bregman', 'kras', 'pa', 'sd'])
    def test_illustrative_run(self, illustrative, illustrative_run, which):
        series = dissipation_audit(illustrative.network, illustrative_run, which,
                                   illustrative.controller)
        assert series.which == which
        assert len(series) == len(illustrative_run)
        assert audit_passed(series)

    def test_closed_loop_storage_decreases(self, illustrative, illustrative_run):
        series = dissipation_audit(illustrative.network, illustrative_run, 'sd',
                                   illustrative.controller)
        # no extra input, so the supply vanishes
        assert np.all(np.abs(series.supply) <= 1e-9 * np.abs(series.dS_dt_predicted) + 1e-9)
        assert np.all(series.dS_dt_predicted <= 1e-9)
        assert series.S[-1] < 1e-6 * series.S[0]

    def test_samples(self, illustrative, illustrative_run):
        series = dissipation_audit(illustrative.network, illustrative_run, 'energy')
        sample = series[10]
        assert isinstance(sample, DissipationSample)
        assert sample.t == illustrative_run.t[10]
        assert sample.residual == sample.dS_dt_numeric - sample.dS_dt_predicted
        assert len(series[:5]) == 5

    def test_power_bound_cancels_in_recovered_port(self, illustrative, illustrative_run):
        # Π enters both the recovered port and the dissipation, so the identity holds for any bound
        wrong = ControllerConfig(1.0, 5.0, 0.0, 380.0)
        series = dissipation_audit(illustrative.network, illustrative_run, 'pa', wrong)
        good = dissipation_audit(illustrative.network, illustrative_run, 'pa',
                                 illustrative.controller)
        assert np.allclose(series.S, good.S)
        assert np.allclose(series.dS_dt_predicted, good.dS_dt_predicted)
        assert audit_passed(series)

    def test_needs_samples(self, illustrative):
        net = illustrative.network
        eq = equilibrium_from_vstar(net, 380.0)
        short = simulate(net, eq.u_bar, eq.state, SimConfig(t_end=1e-4, dt=1e-4))
        with pytest.raises(InsufficientSamples):
            dissipation_audit(net, short, 'energy')

    def test_argument_errors(self, illustrative, illustrative_run, scenario1):
        net = illustrative.network
        with pytest.raises(ValueError):
            dissipation_audit(net, illustrative_run, 'hamiltonian')
        with pytest.raises(ValueError):
            dissipation_audit(net, illustrative_run, 'sd')
        with pytest.raises(ValueError):
            dissipation_audit(net, illustrative_run, 'bregman')
        with pytest.raises(ValueError):
            dissipation_audit(scenario1.network, illustrative_run, 'energy')

    def test_bregman_reference(self, illustrative, illustrative_run):
        series = dissipation_audit(illustrative.network, illustrative_run, 'bregman',
                                   V_ref=380.0)
        assert series.S[-1] < 1e-6 * series.S[0]
        assert audit_passed(series)


@pytest.mark.slow
def test_scenario1_audit(scenario1):
    net, ctrl, sim, events = scenario1.parts
    traj = simulate(net, scenario1.policy(), scenario1.initial_state(), sim, events)
    series = dissipation_audit(net, traj, 'sd', ctrl)
    assert audit_passed(series)
    assert np.all(series.dS_dt_predicted <= 1e-9)
    # one sample per recorded state, split at the load step
    assert len(series) == len(traj)


class TestMembershipRegion:

    def test_illustrative_boundary(self, illustrative):
        ctrl = ControllerConfig(1.0, 5.0, 5.5e3, 380.0)
        region = set_membership_region(illustrative.network, ctrl,
                                       np.linspace(300, 460, 161))
        assert np.isclose(region.boundary_K[0], 353.55, atol=5e-3)
        assert np.isclose(region.boundary_B[0], 5e3 / (0.04 * 380), rtol=1e-12)
        below = region.v_grid < region.boundary_K[0]
        assert np.array_equal(region.in_X_K[:, 0], ~below)
        assert np.all(region.G_Pi_nonnegative)

    def test_pure_power_loads(self):
        scenario = load_scenario(bundled_scenario('scenario2'))
        region = set_membership_region(scenario.network, scenario.controller, [300, 380, 450])
        assert np.all(np.isinf(region.boundary_B))
        assert np.all(np.isinf(region.boundary_K))
        assert not region.in_X_B.any()
        assert not region.in_X_K.any()
        assert region.G_Pi_nonnegative.all()

    def test_without_power_load(self):
        from zipgrid.classes import DguParams, ZipLoad, build_network

        net = build_network([DguParams(0.01, 1e-3, 1e-3)], [], [ZipLoad(0.04, 10, 0)])
        region = set_membership_region(net, ControllerConfig(1, 5, 0, 380), [10, 380])
        assert region.boundary_K[0] == 0 and region.boundary_B[0] == 0
        assert region.in_X_K.all()

    def test_grid_must_be_positive(self, illustrative):
        with pytest.raises(NonPositiveVoltage):
            set_membership_region(illustrative.network, illustrative.controller, [0, 380])


class TestSecondOrder:

    def test_coefficients(self, illustrative):
        net, ctrl = illustrative.network, illustrative.controller
        coeffs = node_second_order_coefficients(net, ctrl, 380.0)
        G_K = 0.04 - 5e3 / 380 ** 2
        assert np.isclose(coeffs.alpha[0], (G_K + 1e4 / 380 ** 2 + 5.0) / 6.8e-3)
        assert np.isclose(coeffs.beta[0], (1.12e-3 + 1) / (1.12e-3 * 6.8e-3))
        assert np.isclose(coeffs.gamma[0], coeffs.beta[0] * 380)

    def test_fit_known_solution(self):
        # V = 380 + 10 e^{−t} cos 2t solves V̈ + 2V̇ + 5V = 1900
        t = np.linspace(0, 3, 3001)
        V = 380 + 10 * np.exp(-t) * np.cos(2 * t)
        fit = fit_second_order(t, V)
        assert np.isclose(fit.alpha, 2.0, rtol=1e-4)
        assert np.isclose(fit.beta, 5.0, rtol=1e-4)
        assert np.isclose(fit.gamma / fit.beta, 380.0, rtol=1e-5)
        assert fit.rms_residual < 1e-3

    def test_fit_simulated_node(self, illustrative, illustrative_run):
        coeffs = node_second_order_coefficients(illustrative.network,
                                                illustrative.controller, 380.0)
        fit = fit_second_order(illustrative_run.t, illustrative_run.V[:, 0])
        assert np.isclose(fit.alpha, coeffs.alpha[0], rtol=1e-2)
        assert np.isclose(fit.beta, coeffs.beta[0], rtol=1e-2)

    def test_fit_needs_samples(self):
        with pytest.raises(InsufficientSamples):
            fit_second_order([0, 1, 2, 3], [1, 2, 3, 4])
