"""Tests for the network value objects in `zipgrid.classes.network`."""
import numpy as np
import pytest

from astropy import units as u

from zipgrid.classes import (DguParams,
                             FilterBank,
                             LineParams,
                             Network,
                             NetworkState,
                             NOMINAL_VOLTAGE,
                             V_MIN,
                             ZipLoad,
                             build_network)
from zipgrid.utils.exceptions import (DisconnectedGraph,
                                      NetworkError,
                                      NonPositiveParameter,
                                      SelfLoop)

RING = [(0, 1), (1, 2), (2, 3), (3, 0)]


@pytest.fixture
def ring():
    dgus = [DguParams(0.010, 1.8e-3, 2.2e-3), DguParams(0.015, 2.0e-3, 1.9e-3),
            DguParams(0.025, 3.0e-3, 2.5e-3), DguParams(0.020, 2.2e-3, 1.7e-3)]
    lines = [LineParams(0.07, 2.1e-6), LineParams(0.05, 2.3e-6),
             LineParams(0.08, 2.0e-6), LineParams(0.06, 1.8e-6)]
    loads = [ZipLoad(0.08, 10, 10e3), ZipLoad(0.04, 15, 2e3),
             ZipLoad(0.05, 10, 6e3), ZipLoad(0.07, 15, 10e3)]
    return build_network(dgus, lines, loads, edge_list=RING)


def test_constants():
    assert V_MIN == 1e-6
    assert NOMINAL_VOLTAGE == 380.0


class TestParameters:

    def test_quantities_are_converted(self):
        dgu = DguParams(10 * u.mohm, 1.8 * u.mH, 2.2 * u.mF)
        assert np.allclose((dgu.R_s, dgu.L_s, dgu.C_s), (0.01, 1.8e-3, 2.2e-3))
        assert isinstance(dgu.L_s, float)
        assert ZipLoad(P_const=25 * u.kW).P_const == 25e3

    @pytest.mark.parametrize('args', [(0.0, 1e-3, 1e-3), (0.01, -1e-3, 1e-3),
                                      (0.01, 1e-3, np.inf), (0.01, 1e-3, np.nan)])
    def test_dgu_needs_positive_values(self, args):
        with pytest.raises(NonPositiveParameter):
            DguParams(*args)

    def test_dgu_scalar_only(self):
        with pytest.raises(NetworkError):
            DguParams([0.01, 0.02], 1e-3, 1e-3)

    def test_wrong_units(self):
        with pytest.raises(u.UnitTypeError):
            DguParams(0.01 * u.H, 1e-3, 1e-3)

    def test_load_may_be_zero_not_negative(self):
        assert ZipLoad() == ZipLoad(0, 0, 0)
        with pytest.raises(NonPositiveParameter):
            ZipLoad(P_const=-1.0)

    def test_self_loop(self):
        with pytest.raises(SelfLoop):
            LineParams(0.07, 2.1e-6, (2, 2))


class TestNetwork:

    def test_shapes(self, ring):
        assert (ring.n, ring.m, ring.state_size) == (4, 4, 12)
        assert ring.edges == tuple(RING)
        assert not ring.is_scalar

    def test_incidence(self, ring):
        assert np.array_equal(ring.incidence[:, 0], [1, -1, 0, 0])
        assert np.array_equal(ring.incidence[:, 3], [-1, 0, 0, 1])
        assert np.all(ring.incidence.sum(axis=0) == 0)

    def test_laplacian(self, ring):
        lap = ring.laplacian
        assert np.allclose(lap, lap.T)
        assert np.allclose(lap @ np.ones(4), 0)
        assert np.isclose(lap[0, 1], -1 / 0.07)
        assert np.isclose(lap[0, 0], 1 / 0.07 + 1 / 0.06)
        # one zero eigenvalue for a connected graph
        assert np.sum(np.abs(np.linalg.eigvalsh(lap)) < 1e-9) == 1

    def test_arrays_are_read_only(self, ring):
        with pytest.raises(ValueError):
            ring.P_const[0] = 0.0
        with pytest.raises(ValueError):
            ring.incidence[0, 0] = 0.0

    def test_filters_hold_no_loads(self, ring):
        filters = ring.filters
        assert isinstance(filters, FilterBank)
        assert filters.n == 4
        assert np.array_equal(filters.L_s, ring.L_s)
        assert not hasattr(filters, 'P_const')

    def test_disconnected(self):
        dgu = DguParams(0.01, 1e-3, 1e-3)
        with pytest.raises(DisconnectedGraph):
            build_network([dgu] * 4, [LineParams(0.1, 1e-6)] * 2,
                          edge_list=[(0, 1), (2, 3)])

    def test_isolated_nodes(self):
        with pytest.raises(DisconnectedGraph):
            build_network([DguParams(0.01, 1e-3, 1e-3)] * 2, [])

    def test_edge_count_mismatch(self):
        with pytest.raises(NetworkError):
            build_network([DguParams(0.01, 1e-3, 1e-3)] * 2, [LineParams(0.1, 1e-6)],
                          edge_list=[(0, 1), (1, 0)])

    def test_edge_outside_network(self):
        with pytest.raises(NetworkError):
            build_network([DguParams(0.01, 1e-3, 1e-3)] * 2, [LineParams(0.1, 1e-6)],
                          edge_list=[(0, 2)])

    @pytest.mark.parametrize('entry', [(0.01, 1e-3, 1e-3), LineParams(0.1, 1e-6), None])
    def test_node_params_type(self, entry):
        with pytest.raises(TypeError):
            build_network([DguParams(0.01, 1e-3, 1e-3), entry], [LineParams(0.1, 1e-6)],
                          edge_list=[(0, 1)])

    def test_flipped_edges_negate_columns(self, ring):
        lines = [LineParams(line.R_t, line.L_t) for line in ring.lines]
        flipped = build_network(ring.dgus, lines, ring.loads,
                                edge_list=[(j, i) for i, j in RING])
        assert np.array_equal(flipped.incidence, -ring.incidence)
        assert np.allclose(flipped.laplacian, ring.laplacian)

    def test_scalar(self):
        net = build_network([DguParams(0.01, 1.12e-3, 6.8e-3)], [], [ZipLoad(0.04, 10, 5e3)])
        assert net.is_scalar
        assert net.incidence.shape == (1, 0)
        assert np.array_equal(net.laplacian, [[0.0]])

    def test_equality(self, ring):
        again = ring.with_loads(ring.loads)
        assert again == ring
        assert ring.with_load_delta(dP_const=1.0) != ring

    def test_with_load_delta(self, ring):
        stepped = ring.with_load_delta(dP_const=[4e3, 8e3, 8e3, 4e3])
        assert np.allclose(stepped.P_const, [14e3, 10e3, 14e3, 14e3])
        assert np.array_equal(stepped.Z_inv, ring.Z_inv)
        # the original is untouched
        assert np.allclose(ring.P_const, [10e3, 2e3, 6e3, 10e3])
        assert np.allclose(ring.with_load_delta(dZ_inv=0.01).Z_inv, ring.Z_inv + 0.01)

    def test_with_load_delta_negative(self, ring):
        with pytest.raises(NonPositiveParameter):
            ring.with_load_delta(dI_const=-20.0)


class TestNetworkState:

    def test_vector_roundtrip(self):
        state = NetworkState([1.0, 2.0], [0.5], [380.0, 379.0])
        x = state.as_vector()
        assert np.array_equal(x, [1.0, 2.0, 0.5, 380.0, 379.0])
        assert NetworkState.from_vector(x, 2, 1) == state
        x[0] = 10.0
        assert state.I_s[0] == 1.0

    def test_from_vector_wrong_length(self):
        with pytest.raises(ValueError):
            NetworkState.from_vector(np.zeros(4), 2, 1)

    def test_quantities(self):
        state = NetworkState(40 * u.A, [] * u.A, 0.45 * u.kV)
        assert np.allclose(state.V, [450.0])
        assert state.m == 0

    def test_mismatched_nodes(self):
        with pytest.raises(ValueError):
            NetworkState([1.0, 2.0], [], [380.0])

    def test_domain(self):
        assert NetworkState([0.0], [], [1.0]).in_domain()
        assert not NetworkState([0.0], [], [V_MIN]).in_domain()
        assert not NetworkState([0.0, 0.0], [], [380.0, -1.0]).in_domain()

    def test_check_shape(self, ring):
        NetworkState(np.zeros(4), np.zeros(4), np.full(4, 380.0)).check_shape(ring)
        with pytest.raises(ValueError):
            NetworkState(np.zeros(4), np.zeros(3), np.full(4, 380.0)).check_shape(ring)
