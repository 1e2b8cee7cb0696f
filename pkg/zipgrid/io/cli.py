"""
The ``zipgrid`` command.

Subcommands::

    zipgrid simulate SCENARIO [--out DIR] [--controller KIND] [--derivative MODE]
                     [--plots | --no-plots] [--record-stride N]
    zipgrid steady-state SCENARIO
    zipgrid certify SCENARIO [--samples N] [--seed S]
    zipgrid vector-field SCENARIO [--out DIR] [--resolution N] [--plots]
    zipgrid audit TRAJECTORY [--storage ID] [--scenario PATH]

``SCENARIO`` is a JSON file or the name of a bundled scenario.  The exit
status is 0 on success, 2 when a simulated voltage leaves the positive
domain and 1 on any other error.  Errors are reported on standard error as
``zipgrid: <status>: <ErrorClass>: <message>``, warnings as
``zipgrid: warning: <WarningClass>: <message>``.
"""
__all__ = ['DEFAULT_OUT', 'EXIT_OK', 'EXIT_ERROR', 'EXIT_DOMAIN', 'build_parser', 'run_cli',
           'main']

import argparse
import numpy as np
import os
import sys
import warnings

from typing import Optional, Sequence

from zipgrid.classes import NetworkState
from zipgrid.diagnostics.passivity import (audit_passed,
                                           dissipation_audit,
                                           set_membership_region)
from zipgrid.diagnostics.storages import STORAGE_IDS
from zipgrid.formulary.brayton_moser import bm_stability_condition, passivity_certificate
from zipgrid.formulary.loads import equivalent_conductance
from zipgrid.formulary.steady_state import closed_loop_equilibrium, equilibrium_from_ustar
from zipgrid.io.output import (DIAGNOSTICS_FILE,
                               emit_trajectory,
                               read_run,
                               write_diagnostics,
                               write_vector_field)
from zipgrid.io.scenario import load_scenario
from zipgrid.simulation import SimConfig, simulate, vector_field_grid
from zipgrid.utils.exceptions import DomainExit, NetworkNotScalar, ZipGridError
from zipgrid.version import version

#: Output directory used when neither ``--out`` nor ``ZIPGRID_OUT`` is given.
DEFAULT_OUT = 'zipgrid-out'

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DOMAIN = 2


def _out_dir(args) -> str:
    return args.out or os.environ.get('ZIPGRID_OUT') or DEFAULT_OUT


def _networks(scenario):
    """The load sets of a scenario, before and after each event."""
    networks = [scenario.network]
    for event in scenario.events:
        networks.append(event.apply(networks[-1]))
    return networks


def _format_row(values, width=14):
    return ''.join(f"{value:>{width}}" if isinstance(value, str) else f"{value:>{width}.6g}"
                   for value in values)


def _simulate(args, out) -> int:
    scenario = load_scenario(args.scenario)
    if args.controller is not None:
        scenario = scenario.with_controller_kind(args.controller)
    if args.derivative is not None:
        scenario = scenario.with_derivative_mode(args.derivative)
    sim = scenario.simulation
    if args.record_stride is not None:
        sim = SimConfig(sim.t_end, sim.dt, sim.method, sim.rel_tol, sim.abs_tol,
                        args.record_stride)
    plots = args.plots if args.plots is not None else bool(scenario.outputs.get('plots', False))
    diagnostics = scenario.outputs.get('diagnostics', ())

    out_dir = _out_dir(args)
    try:
        trajectory = simulate(scenario.network, scenario.policy(), scenario.initial_state(),
                              sim, scenario.events)
    except DomainExit as exc:
        if exc.trajectory is not None and len(exc.trajectory):
            emit_trajectory(exc.trajectory, out_dir, scenario=scenario, exit_error=exc)
        print(f"zipgrid: {EXIT_DOMAIN}: DomainExit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    files = emit_trajectory(trajectory, out_dir, scenario=scenario, diagnostics=diagnostics,
                            plots=plots)
    print(f"scenario: {scenario.name}", file=out)
    print(f"samples: {len(trajectory)}  t_end: {trajectory.t[-1]:.6g} s", file=out)
    print(_format_row(('node', 'V (V)', 'V* (V)', '|V - V*| (V)')), file=out)
    V_end = trajectory.V[-1]
    V_star = (scenario.controller.V_star if scenario.controller is not None
              else np.full(trajectory.n, np.nan))
    for i in range(trajectory.n):
        print(_format_row((str(scenario.node_ids[i]), V_end[i], V_star[i],
                           abs(V_end[i] - V_star[i]))), file=out)
    for name, path in files.items():
        print(f"wrote {name}: {path}", file=out)
    return EXIT_OK


def _steady_state(args, out) -> int:
    scenario = load_scenario(args.scenario)
    for k, net in enumerate(_networks(scenario)):
        if scenario.controller_kind == 'constant':
            eq = equilibrium_from_ustar(net, scenario.constant_input)
        else:
            eq = closed_loop_equilibrium(net, scenario.controller)
        label = 'initial loads' if k == 0 else f"after event at {scenario.events[k - 1].time} s"
        print(f"load set {k} ({label}), residual {eq.residual:.3g}", file=out)
        print(_format_row(('node', 'I_s (A)', 'V (V)', 'u (V)')), file=out)
        for i in range(net.n):
            print(_format_row((str(scenario.node_ids[i]), eq.I_s_bar[i], eq.V_bar[i],
                               eq.u_bar[i])), file=out)
        if net.m:
            print(_format_row(('line', 'I_t (A)')), file=out)
            for j in range(net.m):
                print(_format_row((str(scenario.edge_ids[j]), eq.I_t_bar[j])), file=out)
    return EXIT_OK


def _sample_states(net, eq, n_samples, rng):
    """Random states with voltages within ±50 % of the equilibrium."""
    scale_s = np.abs(eq.I_s_bar) + 1.0
    scale_t = np.abs(eq.I_t_bar) + 1.0
    for _ in range(n_samples):
        yield NetworkState(eq.I_s_bar + scale_s * rng.standard_normal(net.n),
                           eq.I_t_bar + scale_t * rng.standard_normal(net.m),
                           eq.V_bar * rng.uniform(0.5, 1.5, net.n))


def _certify(args, out) -> int:
    scenario = load_scenario(args.scenario)
    ctrl = scenario.controller
    if ctrl is None:
        raise ValueError("certify needs a scenario with a controller configuration.")
    rng = np.random.default_rng(args.seed)

    networks = _networks(scenario)
    print("equivalent conductance Z⁻¹ − P*/V*² (S)", file=out)
    print(_format_row(['node'] + [f"set {k}" for k in range(len(networks))]), file=out)
    tables = [equivalent_conductance(net, ctrl.V_star) for net in networks]
    for i in range(scenario.network.n):
        print(_format_row([str(scenario.node_ids[i])] + [table[i] for table in tables]),
              file=out)

    bm = bm_stability_condition(scenario.network)
    print(f"Brayton-Moser norm condition: norm {bm.norm:.6g}, "
          f"{'satisfied' if bm.satisfied else 'not satisfied'}", file=out)

    for k, net in enumerate(networks):
        covered = ctrl.covers(net.P_const)
        eq = closed_loop_equilibrium(net, ctrl)
        certificate = passivity_certificate(net, ctrl.Pi,
                                            _sample_states(net, eq, args.samples, rng))
        print(f"set {k}: Pi covers P*: {covered}; max eig(Q_A + Q_Aᵀ) "
              f"{certificate.max_eig_sym_Q_A:.6g}, min P_A {certificate.min_P_A:.6g} over "
              f"{certificate.n_samples} states: "
              f"{'holds' if certificate.holds else 'fails'}", file=out)
    return EXIT_OK


def _vector_field(args, out) -> int:
    scenario = load_scenario(args.scenario)
    net, ctrl = scenario.network, scenario.controller
    if not net.is_scalar:
        raise NetworkNotScalar(f"vector-field needs a single-node scenario, "
                               f"{scenario.name!r} has {net.n} nodes.")
    grid = scenario.outputs.get('vector_field')
    if grid is None:
        eq = scenario.initial_state()
        grid = {'I_s': (0.0, 2.0 * max(abs(eq.I_s[0]), 1.0)),
                'V': (0.75 * eq.V[0], 1.25 * eq.V[0]), 'resolution': 25}
    resolution = args.resolution or grid['resolution']
    field = vector_field_grid(net, scenario.policy(), grid['I_s'], grid['V'], resolution)
    v_grid = np.linspace(*grid['V'], resolution)
    region = set_membership_region(net, ctrl, v_grid)

    out_dir = _out_dir(args)
    files = write_vector_field(field, region, out_dir)
    if args.plots:
        from zipgrid.io import plotting

        fig = plotting.plot_vector_field(field, region, title=scenario.name)
        files['plot'] = plotting.save_figure(fig, os.path.join(out_dir, 'field.svg'))
    print(f"boundary of G_B ⪰ 0: V ≥ {region.boundary_B[0]:.6g} V", file=out)
    print(f"boundary of G_K ⪰ 0: V ≥ {region.boundary_K[0]:.6g} V", file=out)
    for name, path in files.items():
        print(f"wrote {name}: {path}", file=out)
    return EXIT_OK


def _audit(args, out) -> int:
    scenario = None if args.scenario is None else load_scenario(args.scenario)
    trajectory, scenario = read_run(args.trajectory, scenario)

    series = dissipation_audit(trajectory.networks[0], trajectory, args.storage,
                               scenario.controller)
    ratio = np.abs(series.residual) / np.where(series.bound > 0, series.bound, np.inf)
    print(f"storage: {args.storage}  samples: {len(series)}", file=out)
    print(f"max |residual|: {np.max(np.abs(series.residual)):.6g}  "
          f"max |residual| / bound: {np.max(ratio):.6g}", file=out)
    print(f"max predicted dS/dt - supply: "
          f"{np.max(series.dS_dt_predicted - series.supply):.6g}", file=out)
    print(f"passed: {audit_passed(series)}", file=out)
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        path = write_diagnostics([series], os.path.join(args.out, DIAGNOSTICS_FILE))
        print(f"wrote diagnostics: {path}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``zipgrid`` command."""
    parser = argparse.ArgumentParser(
        prog='zipgrid',
        description="Simulate and certify DC networks of converters feeding ZIP loads.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {version}")
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    sim = commands.add_parser('simulate', help="integrate a scenario and write its results")
    sim.add_argument('scenario', help="scenario JSON file or bundled scenario name")
    sim.add_argument('--out', help=f"output directory (default: $ZIPGRID_OUT or "
                                   f"./{DEFAULT_OUT})")
    sim.add_argument('--controller', choices=('passivity-based', 'comparison', 'constant'),
                     help="override the scenario's controller")
    sim.add_argument('--derivative', choices=('oracle', 'levant'),
                     help="override where the controller takes V̇ from")
    sim.add_argument('--plots', action='store_true', default=None,
                     help="save the trajectory figure as SVG")
    sim.add_argument('--no-plots', dest='plots', action='store_false', default=None,
                     help="do not save figures even if the scenario asks for them")
    sim.add_argument('--record-stride', type=int, help="record every N-th step")
    sim.set_defaults(handler=_simulate)

    steady = commands.add_parser('steady-state',
                                 help="print the equilibrium of every load set")
    steady.add_argument('scenario')
    steady.set_defaults(handler=_steady_state)

    certify = commands.add_parser('certify', help="print conductance tables and check the "
                                                  "passivity conditions")
    certify.add_argument('scenario')
    certify.add_argument('--samples', type=int, default=200,
                         help="number of random states for the passivity check")
    certify.add_argument('--seed', type=int, default=0, help="seed of the random states")
    certify.set_defaults(handler=_certify)

    field = commands.add_parser('vector-field',
                                help="write the phase portrait of a single-node scenario")
    field.add_argument('scenario')
    field.add_argument('--out')
    field.add_argument('--resolution', type=int)
    field.add_argument('--plots', action='store_true')
    field.set_defaults(handler=_vector_field)

    audit = commands.add_parser('audit', help="check a dissipation identity along a "
                                              "recorded trajectory")
    audit.add_argument('trajectory', help="trajectory.csv or the directory holding it")
    audit.add_argument('--storage', choices=STORAGE_IDS, default='sd')
    audit.add_argument('--scenario', help="scenario of the run (default: from meta.json)")
    audit.add_argument('--out', help="also write diagnostics.csv to this directory")
    audit.set_defaults(handler=_audit)
    return parser


def run_cli(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """
    Run the ``zipgrid`` command with the arguments ``argv`` and return its
    exit status.

    Parameters
    ----------
    argv : sequence of str, optional
        Defaults to ``sys.argv[1:]``.

    out : file-like, optional
        Where results are printed; defaults to standard output.
    """
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        try:
            status = args.handler(args, out)
        except (ZipGridError, ValueError, OSError, ImportError) as exc:
            message = ' '.join(str(exc).split())
            print(f"zipgrid: {EXIT_ERROR}: {type(exc).__name__}: {message}", file=sys.stderr)
            status = EXIT_ERROR
    for warning in caught:
        print(f"zipgrid: warning: {warning.category.__name__}: {warning.message}",
              file=sys.stderr)
    return status


def main():
    """Entry point of the ``zipgrid`` console script."""
    sys.exit(run_cli())
