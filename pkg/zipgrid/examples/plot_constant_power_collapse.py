"""
Voltage collapse under a constant-power load
============================================

A DGU feeding a large pure P-load, regulated first without and then with
the derivative action of the passivity-based controller.
"""

import matplotlib.pyplot as plt

from zipgrid.io import load_scenario
from zipgrid.simulation import simulate
from zipgrid.utils.exceptions import DomainExit

############################################################
# Without the ``−L_s(Π/V² + K2)V̇`` term the load acts as a negative
# resistance and the voltage runs away from 380 V.

scenario = load_scenario('cpl_witness')
net, ctrl, sim, events = scenario.parts
try:
    simulate(net, scenario.policy(), scenario.initial_state(), sim, events)
except DomainExit as exc:
    collapse = exc.trajectory
    print(f"voltage left the domain at t = {exc.time:.4g} s")

############################################################
# With the full law and ``Π`` above the 40 kW load the same initial state
# converges.

full = scenario.with_controller_kind('passivity-based')
trajectory = simulate(net, full.policy(), full.initial_state(), sim, events)

fig, ax = plt.subplots()
ax.plot(collapse.t, collapse.V[:, 0], label="comparison law")
ax.plot(trajectory.t, trajectory.V[:, 0], label="passivity-based law")
ax.axhline(ctrl.V_star[0], color='grey', linestyle='--')
ax.set_xlabel("Time (s)")
ax.set_ylabel("Voltage $V$ (V)")
ax.legend()
plt.show()
