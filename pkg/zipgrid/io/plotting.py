"""
Figures of simulated runs and phase portraits.

Needs matplotlib, installed with ``pip install zipgrid[plotting]``.
"""
__all__ = ['plot_trajectory', 'plot_vector_field', 'save_figure']

import numpy as np

from typing import Optional

from zipgrid.diagnostics.passivity import MembershipRegion
from zipgrid.simulation import Trajectory, VectorField
from zipgrid.utils.exceptions import IoError

try:
    import matplotlib.pyplot as plt
except (ImportError, ModuleNotFoundError) as e:
    from zipgrid.optional_deps import mpl_import_error
    raise mpl_import_error from e


def plot_trajectory(trajectory: Trajectory, V_star=None, *, title: Optional[str] = None):
    """
    Three stacked panels: filter currents, line currents, and node voltages
    with their references as dashed lines.

    Parameters
    ----------
    trajectory : `~zipgrid.simulation.Trajectory`

    V_star : array_like, optional
        Voltage references (V), drawn in the voltage panel.

    title : str, optional

    Returns
    -------
    `~matplotlib.figure.Figure`
    """
    fig, (ax_s, ax_t, ax_v) = plt.subplots(3, 1, sharex=True, figsize=(7, 8))
    t = trajectory.t

    for i in range(trajectory.n):
        ax_s.plot(t, trajectory.I_s[:, i], label=f"DGU {i + 1}")
    ax_s.set_ylabel("Generated current $I_s$ (A)")

    for k in range(trajectory.m):
        ax_t.plot(t, trajectory.I_t[:, k], label=f"Line {k + 1}")
    ax_t.set_ylabel("Line current $I_t$ (A)")

    for i in range(trajectory.n):
        line, = ax_v.plot(t, trajectory.V[:, i], label=f"Node {i + 1}")
        if V_star is not None:
            ax_v.axhline(np.broadcast_to(V_star, (trajectory.n,))[i], color=line.get_color(),
                         linestyle='--', linewidth=0.8)
    ax_v.set_ylabel("Voltage $V$ (V)")
    ax_v.set_xlabel("Time (s)")

    for event_time in trajectory.event_times:
        for ax in (ax_s, ax_t, ax_v):
            ax.axvline(event_time, color='grey', linestyle=':', linewidth=0.8)
    for ax in (ax_s, ax_t, ax_v):
        if ax.lines and ax.get_legend_handles_labels()[0]:
            ax.legend(loc='best', fontsize='small')
    if title is not None:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def plot_vector_field(field: VectorField, region: Optional[MembershipRegion] = None, *,
                      trajectories=(), title: Optional[str] = None):
    """
    Phase portrait of a single node in the ``(I_s, V)`` plane.

    Parameters
    ----------
    field : `~zipgrid.simulation.VectorField`

    region : `~zipgrid.diagnostics.MembershipRegion`, optional
        Draws the voltages above which ``G_B ⪰ 0`` (dashed red) and
        ``G_K ⪰ 0`` (solid red).

    trajectories : iterable of `~zipgrid.simulation.Trajectory`
        Runs drawn on top of the field.

    title : str, optional

    Returns
    -------
    `~matplotlib.figure.Figure`
    """
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.streamplot(field.I_s, field.V, field.dI_s, field.dV, color='tab:blue',
                  density=1.2, linewidth=0.7)
    if region is not None:
        for boundary, style, label in ((region.boundary_B[0], '--', r"$G_B \succeq 0$"),
                                       (region.boundary_K[0], '-', r"$G_K \succeq 0$")):
            if np.isfinite(boundary) and boundary > 0:
                ax.axhline(boundary, color='red', linestyle=style, label=label)
    for trajectory in trajectories:
        ax.plot(trajectory.I_s[:, 0], trajectory.V[:, 0], color='k', linewidth=1.2)
        ax.plot(trajectory.I_s[0, 0], trajectory.V[0, 0], 'ko', markersize=4)
    ax.set_xlim(field.I_s.min(), field.I_s.max())
    ax.set_ylim(field.V.min(), field.V.max())
    ax.set_xlabel("Generated current $I_s$ (A)")
    ax.set_ylabel("Voltage $V$ (V)")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc='lower right')
    if title is not None:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> str:
    """Save ``fig`` as SVG and close it."""
    try:
        fig.savefig(path, format='svg')
    except OSError as exc:
        raise IoError(f"Cannot write {path!r}: {exc}") from exc
    finally:
        plt.close(fig)
    return str(path)
