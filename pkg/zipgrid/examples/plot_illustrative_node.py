"""
A single node with a ZIP load
=============================

Phase portraits of one DGU feeding a ZIP load, once with a positive and
once with a negative equivalent conductance at the 380 V reference.
"""

import matplotlib.pyplot as plt
import numpy as np

from zipgrid.diagnostics import set_membership_region
from zipgrid.formulary import equivalent_conductance
from zipgrid.io import load_scenario
from zipgrid.io.plotting import plot_vector_field
from zipgrid.simulation import simulate, vector_field_grid

############################################################
# The two bundled scenarios differ only in the constant-power part of the
# load.  Its equivalent conductance ``Z⁻¹ − P*/V*²`` changes sign between
# them.

cases = [load_scenario('illustrative'), load_scenario('illustrative_case2')]
for scenario in cases:
    G = equivalent_conductance(scenario.network, scenario.controller.V_star)
    print(f"{scenario.name}: P* = {scenario.network.P_const[0]:.0f} W, "
          f"Z⁻¹ − P*/V*² = {G[0]:.4g} S")

############################################################
# Under the passivity-based controller both runs settle at 380 V, whether or
# not the reference lies in the region where the shifted storages are
# certificates.

for scenario in cases:
    net, ctrl, sim, events = scenario.parts
    trajectory = simulate(net, scenario.policy(), scenario.initial_state(), sim, events)
    grid = scenario.outputs['vector_field']
    field = vector_field_grid(net, scenario.policy(), grid['I_s'], grid['V'],
                              grid['resolution'])
    region = set_membership_region(net, ctrl, np.linspace(*grid['V'], 200))
    plot_vector_field(field, region, trajectories=[trajectory], title=scenario.name)
    print(f"{scenario.name}: V(t_end) = {trajectory.V[-1, 0]:.4f} V")

plt.show()
