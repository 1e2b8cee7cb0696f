import numpy as np
import pytest

from zipgrid.classes import NetworkState
from zipgrid.diagnostics.storages import (bregman_storage,
                                          closed_loop_storage,
                                          energy_storage,
                                          krasovskii_storage,
                                          shaping_storage,
                                          STORAGE_IDS,
                                          storage_rate_series,
                                          storage_series)
from zipgrid.formulary import (closed_loop_equilibrium,
                               open_loop_field,
                               passivating_storage)
from zipgrid.io import bundled_scenario, load_scenario
from zipgrid.utils.pytest_helpers import central_gradient


@pytest.fixture(scope='module')
def scenario1():
    return load_scenario(bundled_scenario('scenario1'))


def perturbed_states(eq, count=4, seed=1):
    rng = np.random.default_rng(seed)
    return [NetworkState(eq.I_s_bar + rng.normal(0, 5, 4), eq.I_t_bar + rng.normal(0, 2, 4),
                         eq.V_bar + rng.normal(0, 3, 4)) for _ in range(count)]


def test_storage_ids():
    assert STORAGE_IDS == ('energy', 'bregman', 'kras', 'pa', 'sd')


class TestAtEquilibrium:

    def test_shifted_storages_vanish(self, scenario1):
        net, ctrl = scenario1.network, scenario1.controller
        eq = closed_loop_equilibrium(net, ctrl)
        assert bregman_storage(net, eq.state, eq) == 0
        assert np.isclose(krasovskii_storage(net, eq.state, eq.u_bar), 0, atol=1e-12)
        assert np.isclose(closed_loop_storage(net, eq.state, ctrl), 0, atol=1e-9)
        assert energy_storage(net, eq.state) > 0

    def test_closed_loop_storage_is_positive_elsewhere(self, scenario1):
        net, ctrl = scenario1.network, scenario1.controller
        for state in perturbed_states(closed_loop_equilibrium(net, ctrl)):
            assert closed_loop_storage(net, state, ctrl) > 0
            assert bregman_storage(net, state, closed_loop_equilibrium(net, ctrl)) > 0


def test_closed_loop_storage_decomposes(scenario1):
    net, ctrl = scenario1.network, scenario1.controller
    for state in perturbed_states(closed_loop_equilibrium(net, ctrl)):
        assert np.isclose(closed_loop_storage(net, state, ctrl),
                          passivating_storage(net, state) + shaping_storage(net, state.V, ctrl),
                          rtol=1e-9, atol=1e-6)


@pytest.mark.parametrize('which', STORAGE_IDS)
def test_series_matches_single_states(scenario1, which):
    net, ctrl = scenario1.network, scenario1.controller
    eq = closed_loop_equilibrium(net, ctrl)
    states = perturbed_states(eq)
    x = np.stack([state.as_vector() for state in states])
    u = np.tile(eq.u_bar, (len(states), 1))
    series = storage_series(net, which, x, u, ctrl=ctrl, eq=eq)
    single = {
        'energy': lambda s: energy_storage(net, s),
        'bregman': lambda s: bregman_storage(net, s, eq),
        'kras': lambda s: krasovskii_storage(net, s, eq.u_bar),
        'pa': lambda s: passivating_storage(net, s),
        'sd': lambda s: closed_loop_storage(net, s, ctrl),
    }[which]
    assert np.allclose(series, [single(state) for state in states], rtol=1e-12)


@pytest.mark.parametrize('which', STORAGE_IDS)
def test_rate_is_derivative_along_the_field(scenario1, which):
    # constant input, so the Krasovskii supply vanishes with u̇ = 0
    net, ctrl = scenario1.network, scenario1.controller
    eq = closed_loop_equilibrium(net, ctrl)
    u = eq.u_bar + np.array([2.0, -1.0, 0.5, 3.0])
    for state in perturbed_states(eq, count=3, seed=4):
        x = state.as_vector()
        x_dot = open_loop_field(net, x, u)

        def along(s):
            return storage_series(net, which, (x + s[0] * x_dot)[np.newaxis], u[np.newaxis],
                                  ctrl=ctrl, eq=eq)[0]

        numeric = central_gradient(along, np.array([0.0]), rel_step=1e-8)[0]
        predicted, _ = storage_rate_series(net, which, x[np.newaxis], u[np.newaxis],
                                           ctrl=ctrl, eq=eq, u_dot=np.zeros((1, 4)))
        assert np.isclose(predicted[0], numeric, rtol=1e-5, atol=1e-3)


def test_unknown_storage(scenario1):
    with pytest.raises(ValueError):
        storage_series(scenario1.network, 'hamiltonian', np.zeros((1, 12)), np.zeros((1, 4)))


@pytest.mark.parametrize('which, missing', [('bregman', 'eq'), ('sd', 'ctrl'), ('pa', 'ctrl')])
def test_missing_context(scenario1, which, missing):
    x = np.tile(np.concatenate((np.zeros(8), np.full(4, 380.0))), (2, 1))
    with pytest.raises(ValueError, match=missing):
        storage_rate_series(scenario1.network, which, x, np.full((2, 4), 380.0))
