"""
Result files of a run.

A run directory holds ``trajectory.csv`` (one row per recorded sample, SI
units), ``meta.json`` (the scenario and the times of the applied events),
``diagnostics.csv`` when dissipation audits were requested, and SVG
figures when plots were requested.  All numbers are written with 17
significant digits and a dot as decimal separator, so reading a file back
reproduces the recorded values exactly.
"""
__all__ = ['TRAJECTORY_FILE', 'META_FILE', 'DIAGNOSTICS_FILE', 'FIELD_FILE',
           'BOUNDARIES_FILE', 'trajectory_header', 'write_trajectory', 'write_diagnostics',
           'write_vector_field', 'emit_trajectory', 'read_run', 'read_trajectory']

import json
import numpy as np
import os

from typing import Dict, Iterable, Optional, Tuple

from zipgrid.diagnostics.passivity import (DissipationSample,
                                           DissipationSeries,
                                           MembershipRegion,
                                           dissipation_audit)
from zipgrid.io.scenario import Scenario, dump_scenario, scenario_from_dict
from zipgrid.simulation import Trajectory, VectorField
from zipgrid.utils.exceptions import DomainExit, IoError, ParseError
from zipgrid.version import version

TRAJECTORY_FILE = 'trajectory.csv'
META_FILE = 'meta.json'
DIAGNOSTICS_FILE = 'diagnostics.csv'
FIELD_FILE = 'field.csv'
BOUNDARIES_FILE = 'boundaries.csv'

_FLOAT = '%.17g'


def trajectory_header(n: int, m: int):
    """
    Column names of ``trajectory.csv``.

    Examples
    --------
    >>> ','.join(trajectory_header(1, 1))
    't,Is_1,It_1,V_1,u_1'
    """
    return (['t']
            + [f"Is_{i}" for i in range(1, n + 1)]
            + [f"It_{k}" for k in range(1, m + 1)]
            + [f"V_{i}" for i in range(1, n + 1)]
            + [f"u_{i}" for i in range(1, n + 1)])


def _savetxt(path, rows, header, fmt=_FLOAT):
    try:
        with open(path, 'w', encoding='ascii', newline='') as fh:
            np.savetxt(fh, rows, fmt=fmt, delimiter=',', newline='\n',
                       header=','.join(header), comments='')
    except OSError as exc:
        raise IoError(f"Cannot write {path!r}: {exc}") from exc
    return path


def write_trajectory(trajectory: Trajectory, path) -> str:
    """Write the samples of ``trajectory`` as CSV to ``path``."""
    rows = np.column_stack((trajectory.t, trajectory.x, trajectory.u))
    return _savetxt(os.fspath(path), rows, trajectory_header(trajectory.n, trajectory.m))


def write_diagnostics(series: Iterable[DissipationSeries], path) -> str:
    """
    Write audit results as CSV, one block of rows per audited storage.

    The first column names the storage; the others are the fields of
    `~zipgrid.diagnostics.DissipationSample`.
    """
    path = os.fspath(path)
    header = ','.join(('storage',) + DissipationSample._fields)
    try:
        with open(path, 'w', encoding='ascii', newline='') as fh:
            fh.write(header + '\n')
            for audit in series:
                columns = [getattr(audit, name) for name in DissipationSample._fields]
                fmt = audit.which + ',' + ','.join([_FLOAT] * len(columns))
                np.savetxt(fh, np.column_stack(columns), fmt=fmt, newline='\n')
    except OSError as exc:
        raise IoError(f"Cannot write {path!r}: {exc}") from exc
    return path


def write_vector_field(field: VectorField, region: MembershipRegion, out_dir) -> Dict[str, str]:
    """
    Write a phase portrait to ``field.csv`` and the voltages above which the
    load satisfies ``G_B ⪰ 0`` and ``G_K ⪰ 0`` to ``boundaries.csv``.

    A boundary of ``inf`` means the region is empty, ``0`` that it is the
    whole half-plane.
    """
    out_dir = _make_dir(out_dir)
    rows = np.column_stack([np.ravel(getattr(field, name)) for name in VectorField._fields])
    files = {'field': _savetxt(os.path.join(out_dir, FIELD_FILE), rows,
                               ('Is', 'V', 'dIs', 'dV'))}
    nodes = np.arange(1, region.boundary_B.size + 1)
    files['boundaries'] = _savetxt(os.path.join(out_dir, BOUNDARIES_FILE),
                                   np.column_stack((nodes, region.boundary_B,
                                                    region.boundary_K)),
                                   ('node', 'V_B', 'V_K'), fmt=('%d', _FLOAT, _FLOAT))
    return files


def _make_dir(out_dir) -> str:
    out_dir = os.fspath(out_dir)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoError(f"Cannot create output directory {out_dir!r}: {exc}") from exc
    return out_dir


def emit_trajectory(trajectory: Trajectory, out_dir, *,
                    scenario: Optional[Scenario] = None,
                    diagnostics: Iterable[str] = (),
                    plots: bool = False,
                    exit_error: Optional[DomainExit] = None) -> Dict[str, str]:
    """
    Write the result files of a run.

    Parameters
    ----------
    trajectory : `~zipgrid.simulation.Trajectory`
        A complete run, or the partial trajectory of a `DomainExit`.

    out_dir : str or path-like
        Created if needed.

    scenario : `~zipgrid.io.Scenario`, optional
        Stored in ``meta.json`` so that `read_trajectory` can rebuild the
        load sets; also supplies the controller for the ``'pa'`` and
        ``'sd'`` audits and the voltage references of the figures.

    diagnostics : iterable of str
        Storage ids to audit along the trajectory.

    plots : bool
        Also save the three-panel figure as ``trajectory.svg``; needs
        matplotlib.

    exit_error : `~zipgrid.utils.exceptions.DomainExit`, optional
        Recorded in ``meta.json`` for runs that left the voltage domain.

    Returns
    -------
    dict
        Paths of the written files.

    Raises
    ------
    ~zipgrid.utils.exceptions.IoError
        If a file cannot be written.
    """
    out_dir = _make_dir(out_dir)
    files = {'trajectory': write_trajectory(trajectory,
                                            os.path.join(out_dir, TRAJECTORY_FILE))}

    meta = {
        'zipgrid_version': version,
        'n': trajectory.n,
        'm': trajectory.m,
        'event_times': list(trajectory.event_times),
        'status': 'completed' if exit_error is None else 'domain-exit',
        'scenario': None if scenario is None else dump_scenario(scenario),
    }
    if exit_error is not None:
        meta.update(exit_time=float(exit_error.time),
                    exit_node=None if exit_error.node is None else int(exit_error.node))
    meta_path = os.path.join(out_dir, META_FILE)
    try:
        with open(meta_path, 'w', encoding='utf-8', newline='\n') as fh:
            json.dump(meta, fh, indent=2)
            fh.write('\n')
    except OSError as exc:
        raise IoError(f"Cannot write {meta_path!r}: {exc}") from exc
    files['meta'] = meta_path

    diagnostics = tuple(diagnostics)
    if diagnostics:
        ctrl = None if scenario is None else scenario.controller
        series = [dissipation_audit(trajectory.networks[0], trajectory, which, ctrl)
                  for which in diagnostics]
        files['diagnostics'] = write_diagnostics(series,
                                                 os.path.join(out_dir, DIAGNOSTICS_FILE))

    if plots:
        from zipgrid.io import plotting

        V_star = (None if scenario is None or scenario.controller is None
                  else scenario.controller.V_star)
        fig = plotting.plot_trajectory(trajectory, V_star=V_star)
        files['plot'] = plotting.save_figure(fig, os.path.join(out_dir, 'trajectory.svg'))
    return files


def _read_meta(directory):
    path = os.path.join(directory, META_FILE)
    if not os.path.isfile(path):
        return None
    try:
        with open(path, encoding='utf-8') as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(f"Cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def read_run(path, scenario: Optional[Scenario] = None) -> Tuple[Trajectory, Scenario]:
    """
    Read a ``trajectory.csv`` written by `emit_trajectory`, with the scenario
    of the run.

    Parameters
    ----------
    path : str or path-like
        The CSV file or the run directory containing it.

    scenario : `~zipgrid.io.Scenario`, optional
        The scenario of the run.  Defaults to the one stored in the
        ``meta.json`` next to the file.

    Returns
    -------
    trajectory : `~zipgrid.simulation.Trajectory`
        The load sets are rebuilt from the scenario's events.  Since the
        file does not store it, ``v_dot_used`` holds the exact ``V̇`` of the
        recorded states.

    scenario : `~zipgrid.io.Scenario`

    Raises
    ------
    ~zipgrid.utils.exceptions.IoError
        If the file is missing or its columns do not fit the scenario, or
        if no scenario is available.
    """
    path = os.fspath(path)
    if os.path.isdir(path):
        path = os.path.join(path, TRAJECTORY_FILE)
    meta = _read_meta(os.path.dirname(os.path.abspath(path)))
    if scenario is None:
        if meta is None or meta.get('scenario') is None:
            raise IoError(f"{path!r} has no {META_FILE} with the scenario of the run; "
                          f"pass the scenario explicitly.")
        scenario = scenario_from_dict(meta['scenario'])

    try:
        with open(path, encoding='ascii') as fh:
            header = fh.readline().strip().split(',')
            data = np.loadtxt(fh, delimiter=',', ndmin=2)
    except OSError as exc:
        raise IoError(f"Cannot read {path!r}: {exc}") from exc
    except ValueError as exc:
        raise IoError(f"{path!r} is not a trajectory file: {exc}") from None

    net = scenario.network
    n, m = net.n, net.m
    if header != trajectory_header(n, m) or data.shape[1] != len(header):
        raise IoError(f"The columns of {path!r} do not fit a network with n={n}, m={m}.")

    t, x, u_rec = data[:, 0], data[:, 1:1 + 2 * n + m], data[:, 1 + 2 * n + m:]
    if meta is not None and 'event_times' in meta:
        event_times = [float(time) for time in meta['event_times']]
    else:
        event_times = [event.time for event in scenario.events if event.time <= t[-1]]
    networks = [net]
    for event in scenario.events[:len(event_times)]:
        networks.append(event.apply(networks[-1]))
    # the simulator snaps event times onto the step grid within 1e-9 dt
    snap = 1e-9 * scenario.simulation.dt
    segment = np.searchsorted(np.asarray(event_times, dtype=float) - snap, t, side='right')

    v_dot = np.empty((t.size, n))
    for k, seg_net in enumerate(networks):
        rows = segment == k
        I_s, I_t, V = x[rows, :n], x[rows, n:n + m], x[rows, n + m:]
        load = seg_net.Z_inv * V + seg_net.I_const + seg_net.P_const / V
        v_dot[rows] = (I_s + I_t @ seg_net.incidence.T - load) / seg_net.C_s
    return Trajectory(t, x, u_rec, v_dot, segment, networks, event_times), scenario


def read_trajectory(path, scenario: Optional[Scenario] = None) -> Trajectory:
    """The trajectory of `read_run`."""
    return read_run(path, scenario)[0]
