"""Tests for the voltage controllers in `zipgrid.control.pbc`."""
import inspect
import numpy as np
import pytest

from astropy import units as u

from zipgrid.classes import FilterBank, NetworkState
from zipgrid.control import (comparison_controller,
                             control_input,
                             control_law,
                             ControllerConfig,
                             LevantGains,
                             LevantState,
                             u_pbc,
                             u_stab)
from zipgrid.utils.exceptions import (AssumptionWarning,
                                      NonPositiveParameter,
                                      NonPositiveVoltage)

filters = FilterBank([0.010, 0.015], [1.8e-3, 2.0e-3])
state = NetworkState([30.0, 45.0], [1.0], [381.0, 378.0])
v_dot = np.array([120.0, -60.0])


@pytest.fixture
def ctrl():
    return ControllerConfig(50.0, 200.0, 25 * u.kW, [379.5, 379.75])


class TestControllerConfig:

    def test_broadcast(self, ctrl):
        assert ctrl.n == 2
        assert np.array_equal(ctrl.K1, [50.0, 50.0])
        assert np.array_equal(ctrl.Pi, [25e3, 25e3])

    def test_from_scalar(self):
        ctrl = ControllerConfig.from_scalar(4, 50, 200, 25e3, 380 * u.V)
        assert ctrl.n == 4
        assert np.array_equal(ctrl.V_star, np.full(4, 380.0))

    def test_read_only(self, ctrl):
        with pytest.raises(ValueError):
            ctrl.K2[0] = 0.0

    def test_equality(self, ctrl):
        assert ctrl == ControllerConfig([50.0, 50.0], 200.0, 25e3, [379.5, 379.75])
        assert ctrl != ControllerConfig(50.0, 100.0, 25e3, [379.5, 379.75])

    @pytest.mark.parametrize('kwargs', [{'K1': -1.0}, {'Pi': np.nan}, {'V_star': 0.0},
                                        {'K2': np.inf}])
    def test_invalid(self, kwargs):
        values = dict(K1=50.0, K2=200.0, Pi=25e3, V_star=380.0)
        values.update(kwargs)
        with pytest.raises(NonPositiveParameter):
            ControllerConfig(**values)

    def test_size_mismatch(self):
        with pytest.raises(NonPositiveParameter):
            ControllerConfig([1.0, 2.0], [1.0, 2.0, 3.0], 0.0, 380.0)

    def test_zero_K2_warns(self):
        with pytest.warns(AssumptionWarning):
            ctrl = ControllerConfig(50.0, [200.0, 0.0], 25e3, 380.0)
        assert ctrl.K2[1] == 0

    def test_wrong_unit(self):
        with pytest.raises(u.UnitTypeError):
            ControllerConfig(50.0, 200.0, 25 * u.kV, 380.0)

    def test_derivative_mode(self):
        with pytest.raises(ValueError):
            ControllerConfig(50.0, 200.0, 25e3, 380.0, derivative_mode='exact')
        with pytest.raises(ValueError):
            ControllerConfig(50.0, 200.0, 25e3, 380.0, derivative_mode='levant')
        ctrl = ControllerConfig(50.0, 200.0, 25e3, [380.0, 380.0], derivative_mode='levant',
                                levant_gains=LevantGains(1e6))
        assert ctrl.levant_gains.L.shape == (2,)

    def test_covers(self, ctrl):
        assert ctrl.covers([14e3, 10e3])
        assert not ctrl.covers([14e3, 26e3])


class TestLaw:

    def test_split(self, ctrl):
        total = control_input(filters, state, ctrl, v_dot)
        assert np.allclose(total, u_pbc(filters, state, ctrl, v_dot)
                           + u_stab(filters, state, ctrl, v_dot))

    def test_closed_form(self, ctrl):
        expected = (filters.R_s * state.I_s + ctrl.V_star
                    - filters.L_s * ctrl.K1 * (state.V - ctrl.V_star)
                    - filters.L_s * (ctrl.Pi / state.V ** 2 + ctrl.K2) * v_dot)
        assert np.allclose(control_input(filters, state, ctrl, v_dot), expected, rtol=1e-14)

    def test_mu(self, ctrl):
        shifted = control_input(filters, state, ctrl, v_dot, mu=[10.0, 0.0])
        assert np.allclose(shifted - control_input(filters, state, ctrl, v_dot),
                           [10.0 * 1.8e-3, 0.0])

    def test_at_reference(self, ctrl):
        # at V = V* and V̇ = 0 only the filter drop is compensated
        at_ref = NetworkState(state.I_s, state.I_t, ctrl.V_star)
        assert np.allclose(control_input(filters, at_ref, ctrl, 0.0),
                           ctrl.V_star + filters.R_s * state.I_s)

    def test_comparison_is_special_case(self, ctrl):
        with pytest.warns(AssumptionWarning):
            bare = ControllerConfig(ctrl.K1, 0.0, 0.0, ctrl.V_star)
        assert np.allclose(comparison_controller(filters, state, ctrl),
                           control_input(filters, state, bare, v_dot))

    def test_size_mismatch(self):
        ctrl = ControllerConfig.from_scalar(3, 50, 200, 25e3, 380)
        with pytest.raises(ValueError):
            u_stab(filters, state, ctrl, 0.0)

    def test_non_positive_voltage(self, ctrl):
        with pytest.raises(NonPositiveVoltage):
            u_pbc(filters, NetworkState([1.0, 1.0], [0.0], [380.0, 0.0]), ctrl, 0.0)


class TestControlLaw:

    def test_oracle(self, ctrl):
        out = control_law(filters, state, ctrl, v_dot=v_dot)
        assert np.array_equal(out.v_dot_used, v_dot)
        assert out.levant is None
        assert np.allclose(out.u, control_input(filters, state, ctrl, v_dot))

    def test_oracle_needs_v_dot(self, ctrl):
        with pytest.raises(ValueError):
            control_law(filters, state, ctrl)

    def test_levant(self):
        ctrl = ControllerConfig(50.0, 200.0, 25e3, [379.5, 379.75], derivative_mode='levant',
                                levant_gains=LevantGains(1e6))
        levant = LevantState.initial(state.V)
        out = control_law(filters, state, ctrl, levant=levant, dt=1e-5)
        assert isinstance(out.levant, LevantState)
        assert np.allclose(out.u, control_input(filters, state, ctrl, out.v_dot_used))
        with pytest.raises(ValueError):
            control_law(filters, state, ctrl, levant=levant)

    def test_sees_no_load_parameters(self):
        load_names = {'Z_inv', 'I_const', 'P_const', 'load', 'loads', 'network', 'net'}
        for law in (control_law, control_input, u_pbc, u_stab, comparison_controller):
            assert not load_names & set(inspect.signature(law).parameters)
        assert not any(hasattr(filters, name) for name in load_names)


class TestDecentralization:
    filters = FilterBank([0.010, 0.015, 0.025], [1.8e-3, 2.0e-3, 3.0e-3])
    state = NetworkState([30.0, 45.0, 12.0], [1.0, -2.0], [381.0, 378.0, 380.5])
    v_dot = np.array([120.0, -60.0, 15.0])
    settings = dict(K1=[50.0, 40.0, 30.0], K2=[200.0, 150.0, 100.0],
                    Pi=[25e3, 10e3, 5e3], V_star=[379.5, 379.75, 380.0])

    def config(self, order=slice(None), **kwargs):
        values = {name: np.array(value)[order] for name, value in self.settings.items()}
        return ControllerConfig(**values, **kwargs)

    def permuted(self, order):
        return (FilterBank(self.filters.R_s[order], self.filters.L_s[order]),
                NetworkState(self.state.I_s[order], self.state.I_t, self.state.V[order]))

    @pytest.mark.parametrize('order', [[1, 2, 0], [2, 1, 0], [0, 2, 1]])
    def test_oracle_commutes_with_permutation(self, order):
        out = control_law(self.filters, self.state, self.config(), v_dot=self.v_dot)
        filters_p, state_p = self.permuted(order)
        out_p = control_law(filters_p, state_p, self.config(order), v_dot=self.v_dot[order])
        assert np.array_equal(out_p.u, out.u[order])

    @pytest.mark.parametrize('order', [[1, 2, 0], [2, 0, 1]])
    def test_levant_commutes_with_permutation(self, order):
        L = np.array([1e6, 2e6, 5e5])
        levant = LevantState(np.array([381.2, 377.9, 380.5]), np.array([10.0, -5.0, 0.0]))
        out = control_law(self.filters, self.state,
                          self.config(derivative_mode='levant', levant_gains=LevantGains(L)),
                          levant=levant, dt=1e-5)
        filters_p, state_p = self.permuted(order)
        ctrl_p = self.config(order, derivative_mode='levant', levant_gains=LevantGains(L[order]))
        out_p = control_law(filters_p, state_p, ctrl_p,
                            levant=LevantState(levant.z0[order], levant.z1[order]), dt=1e-5)
        assert np.array_equal(out_p.u, out.u[order])
        assert np.array_equal(out_p.levant.z1, out.levant.z1[order])

    def test_other_nodes_do_not_matter(self):
        out = control_law(self.filters, self.state, self.config(), v_dot=self.v_dot)
        state = NetworkState(self.state.I_s * [1.0, 2.0, 0.5], [7.0, 7.0],
                             self.state.V + [0.0, 3.0, -4.0])
        ctrl = ControllerConfig([50.0, 1.0, 2.0], [200.0, 1.0, 1.0], [25e3, 0.0, 1.0],
                                [379.5, 390.0, 370.0])
        other = control_law(self.filters, state, ctrl, v_dot=self.v_dot * [1.0, -3.0, 9.0])
        assert other.u[0] == out.u[0]
