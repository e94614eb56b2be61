"""
Command line: simulate, render, verify, dynamics, spiral export, save-builtin.

Exit codes: 0 success, 1 usage or input error, 2 cone escaped the known
region, 3 verification failed.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from nuca_lab.configs.engine_config import EngineConfig
from nuca_lab.configs.run_spec import ResolvedRun, RunSpec
from nuca_lab.core import dynamics, odometer, spiral
from nuca_lab.core.builtins import builtin_distribution
from nuca_lab.core.engine import evolve_exact
from nuca_lab.core.lattice import Window, WindowConfiguration
from nuca_lab.core.report import VerificationReport
from nuca_lab.core.space_time_renderer import SpaceTimeRenderer
from nuca_lab.core.system_monitor import SystemMonitor
from nuca_lab.utils.constants import (
    BUILTIN_NAMES,
    DEFAULT_CONE_CAP,
    DEFAULT_RECURRENCE_RADIUS,
    DEFAULT_TRACE_BUDGET,
    EXIT_CONE_ESCAPE,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
)
from nuca_lab.utils.errors import NucaError, OutsideKnownRegionError
from nuca_lab.utils.rule_files import save_files


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _seeded(count: int, first_seed: int = 1) -> List[WindowConfiguration]:
    return [WindowConfiguration.seeded(first_seed + i) for i in range(count)]


def _verify_odometer_surjectivity(args, config):
    inits = [odometer.ALL_ZERO, *_seeded(args.inits)]
    return odometer.surjectivity_report(args.nmax, inits, config)


CHECKS: Dict[str, Callable[[argparse.Namespace, EngineConfig], VerificationReport]] = {
    'odometer-period': lambda a, c: odometer.verify_trace_period(a.xmax, config=c),
    'odometer-blocks': lambda a, c: odometer.block_structure_report(a.xmax, a.periods, c),
    'odometer-surjectivity': _verify_odometer_surjectivity,
    'odometer-rotation': lambda a, c: odometer.verify_start_independence(a.n, _seeded(a.inits), c),
    'lemma1': lambda a, c: odometer.lemma1_oracle(a.lmax),
    'lemma2': lambda a, c: odometer.lemma2_oracle(a.lmax),
    'spiral-equivalence': lambda a, c: spiral.verify_embedding_equivalence(
        a.n, a.steps, [odometer.ALL_ZERO, *_seeded(a.inits)], c
    ),
    'example1-witness': lambda a, c: dynamics.transitivity_witness_report(a.samples, seed=a.seed),
    'example1-h2': lambda a, c: dynamics.check_origin_invariant_H2(a.samples, a.seed),
    'example1-trace': lambda a, c: dynamics.check_weak_mixing_obstruction(a.samples, a.steps, a.seed, c),
    'candidate-equivalence': lambda a, c: odometer.verify_candidate_equivalence(
        a.n, a.steps, _seeded(a.inits), c
    ),
    'candidate-period': lambda a, c: odometer.candidate_period_report(a.xmax, config=c),
}

# Parameters each check reads, with their defaults
CHECK_DEFAULTS: Dict[str, Dict[str, int]] = {
    'odometer-period': {'xmax': 8},
    'odometer-blocks': {'xmax': 8, 'periods': 3},
    'odometer-surjectivity': {'nmax': 5, 'inits': 20},
    'odometer-rotation': {'n': 5, 'inits': 20},
    'lemma1': {'lmax': 14},
    'lemma2': {'lmax': 16},
    'spiral-equivalence': {'n': 25, 'steps': 3 ** 6, 'inits': 5},
    'example1-witness': {'samples': 100, 'seed': 0},
    'example1-h2': {'samples': 1000, 'seed': 0},
    'example1-trace': {'samples': 100, 'steps': 10 ** 4, 'seed': 0},
    'candidate-equivalence': {'n': 11, 'steps': 3 ** 8, 'inits': 10},
    'candidate-period': {'xmax': 5},
}


def _add_run_arguments(parser: argparse.ArgumentParser, formats: List[str], default_format: str):
    source = parser.add_argument_group('distribution')
    source.add_argument('--builtin', choices=BUILTIN_NAMES, help='Builtin rule distribution')
    source.add_argument('--rules', type=Path, help='Rule set JSON file')
    source.add_argument('--distribution', type=Path, help='Rule distribution JSON file')
    parser.add_argument('--init', default='uniform:0', help='uniform:S, seed:N or pattern:FILE')
    parser.add_argument('--fill', help='Fill outside a pattern: uniform:S, seed:N or undefined')
    targets = parser.add_mutually_exclusive_group(required=True)
    targets.add_argument('--cell', help='One cell, X or X,Y')
    targets.add_argument('--cells', help='Interval A:B of one-dimensional cells')
    targets.add_argument('--spiral-cells', type=int, help='Cells s(0)..s(K-1) of the plane')
    parser.add_argument('--steps', type=int, required=True, help='Number of time steps')
    parser.add_argument('--format', choices=formats, default=default_format)
    parser.add_argument('--output', type=Path, help='Output file (stdout by default)')
    parser.add_argument('--pruned', action='store_true', help='Expand cones along essential offsets only')


def _add_dynamics_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('kind', choices=sorted(DYNAMICS))
    source = parser.add_argument_group('distribution')
    source.add_argument('--builtin', choices=BUILTIN_NAMES, help='Builtin rule distribution')
    source.add_argument('--rules', type=Path, help='Rule set JSON file')
    source.add_argument('--distribution', type=Path, help='Rule distribution JSON file')
    targets = parser.add_mutually_exclusive_group(required=True)
    targets.add_argument('--cell', help='One cell, X or X,Y')
    targets.add_argument('--cells', help='Interval A:B of one-dimensional cells')
    targets.add_argument('--spiral-cells', type=int, help='Cells s(0)..s(K-1) of the plane')
    parser.add_argument('--radius', type=int, default=DEFAULT_RECURRENCE_RADIUS, help='Recurrence search radius')
    parser.add_argument('--cap', type=int, default=DEFAULT_CONE_CAP, help='Influence closure size cap')
    parser.add_argument('--tmax', type=int, default=DEFAULT_TRACE_BUDGET, help='Trace length')
    parser.add_argument('--init', help='One start, uniform:S or seed:N (default: --inits seeded starts)')
    parser.add_argument('--inits', type=int, default=5, help='Number of seeded starts')
    parser.add_argument('--copies', type=int, default=0, help='Compare the first cell with its nearest recurrent copies')
    parser.add_argument('--cones', choices=['pruned', 'full'], help='Cone expansion (trace-period: pruned, cone-boundedness: full)')
    parser.add_argument('--output', type=Path)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = ArgumentParser(description='Exact simulation and verification of non-uniform cellular automata')
    parser.add_argument('--verbose', action='store_true', help='Print progress and memory status to stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    _add_run_arguments(commands.add_parser('simulate', help='Exact trace or window evolution'), ['csv', 'json'], 'csv')
    _add_run_arguments(commands.add_parser('render', help='Space-time diagram'), ['pgm', 'png', 'csv'], 'pgm')

    verify = commands.add_parser('verify', help='Run a verifier and print its JSON report')
    verify.add_argument('check', choices=sorted(CHECKS))
    for name in sorted({k for defaults in CHECK_DEFAULTS.values() for k in defaults}):
        verify.add_argument(f"--{name}", type=int)
    verify.add_argument('--output', type=Path)

    _add_dynamics_arguments(commands.add_parser('dynamics', help='Recurrence, trace periods and cone boundedness'))

    spiral_parser = commands.add_parser('spiral', help='Spiral embedding utilities')
    spiral_parser.add_argument('action', choices=['export'])
    spiral_parser.add_argument('--n', type=int, required=True, help='Number of spiral cells, k = 0..K-1')
    spiral_parser.add_argument('--output', type=Path)

    save = commands.add_parser('save-builtin', help='Write a builtin as rule and distribution files')
    save.add_argument('name', choices=BUILTIN_NAMES)
    save.add_argument('--rules', type=Path, required=True)
    save.add_argument('--distribution', type=Path, required=True)

    return parser.parse_args(argv)


def _emit(text: str, output: Optional[Path]):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding='utf-8')


def _run_spec(args) -> RunSpec:
    return RunSpec(
        builtin=args.builtin,
        rules_path=args.rules,
        distribution_path=args.distribution,
        init=args.init,
        fill=args.fill,
        cell=args.cell,
        cells=args.cells,
        spiral_cells=args.spiral_cells,
        steps=args.steps,
    )


def _evolve(run: ResolvedRun, pruned: bool, config: EngineConfig):
    evolution = evolve_exact(run.theta, run.init, Window.from_cells(run.cells), run.steps, pruned, config)
    columns = [evolution.targets.positions[c] for c in run.cells]
    return evolution, evolution.states[:, columns]


def _label(cell) -> str:
    return ':'.join(str(v) for v in cell)


def cmd_simulate(args, config: EngineConfig) -> int:
    run = _run_spec(args).resolve()
    evolution, states = _evolve(run, args.pruned, config)
    if args.format == 'json':
        document = {
            'cells': [list(c) for c in run.cells],
            'steps': run.steps,
            'source': evolution.source,
            'cone_size': len(evolution.cone.required),
            'states': states.tolist(),
        }
        _emit(json.dumps(document, sort_keys=True) + '\n', args.output)
    elif len(run.cells) == 1:
        lines = ['t,state', *(f"{t},{int(v)}" for t, v in enumerate(states[:, 0]))]
        _emit('\n'.join(lines) + '\n', args.output)
    else:
        _emit(SpaceTimeRenderer.to_csv(states, [_label(c) for c in run.cells]), args.output)
    return EXIT_OK


def cmd_render(args, config: EngineConfig) -> int:
    run = _run_spec(args).resolve()
    _, states = _evolve(run, args.pruned, config)
    q = run.theta.q
    if args.format == 'png':
        if args.output is None:
            raise ValueError("--format png needs --output")
        return EXIT_OK if SpaceTimeRenderer.save_png(states, q, args.output) else EXIT_INPUT_ERROR
    if args.format == 'csv':
        _emit(SpaceTimeRenderer.to_csv(states, [_label(c) for c in run.cells]), args.output)
    else:
        _emit(SpaceTimeRenderer.to_pgm(states, q), args.output)
    return EXIT_OK


def cmd_verify(args, config: EngineConfig) -> int:
    defaults = CHECK_DEFAULTS[args.check]
    for name, value in defaults.items():
        if getattr(args, name) is None:
            setattr(args, name, value)
    report = CHECKS[args.check](args, config)
    _emit(report.to_json(), args.output)
    print(report.summary(), file=sys.stderr)
    if report.conjecture or report.passed:
        return EXIT_OK
    return EXIT_VERIFICATION_FAILED


def _dynamics_recurrence(args, run: ResolvedRun, config: EngineConfig) -> VerificationReport:
    return dynamics.recurrence_report(run.theta, Window.from_cells(run.cells), args.radius)


def _dynamics_trace_period(args, run: ResolvedRun, config: EngineConfig) -> VerificationReport:
    if args.tmax < 0 or args.inits < 1 or args.copies < 0:
        raise ValueError("--tmax and --copies must be non-negative, --inits positive")
    inits = [run.init] if args.init is not None else _seeded(args.inits)
    offsets = None
    if args.copies:
        offsets = dynamics.recurrence_offsets(run.theta, Window((run.cells[0],)), args.radius)
    return dynamics.trace_period_probe(
        run.theta, run.cells, inits, args.tmax, args.cones != 'full', config, offsets, args.copies
    )


def _dynamics_cone_boundedness(args, run: ResolvedRun, config: EngineConfig) -> VerificationReport:
    if args.cap < 1:
        raise ValueError(f"--cap must be positive, got {args.cap}")
    return dynamics.cone_boundedness_report(run.theta, run.cells, args.cap, args.cones == 'pruned')


DYNAMICS: Dict[str, Callable[[argparse.Namespace, ResolvedRun, EngineConfig], VerificationReport]] = {
    'recurrence': _dynamics_recurrence,
    'trace-period': _dynamics_trace_period,
    'cone-boundedness': _dynamics_cone_boundedness,
}


def cmd_dynamics(args, config: EngineConfig) -> int:
    spec = RunSpec(
        builtin=args.builtin,
        rules_path=args.rules,
        distribution_path=args.distribution,
        init=args.init or 'uniform:0',
        cell=args.cell,
        cells=args.cells,
        spiral_cells=args.spiral_cells,
    )
    report = DYNAMICS[args.kind](args, spec.resolve(), config)
    _emit(report.to_json(), args.output)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def cmd_spiral(args, config: EngineConfig) -> int:
    if args.n < 0:
        raise ValueError(f"--n must be non-negative, got {args.n}")
    _emit(spiral.spiral_csv(args.n), args.output)
    return EXIT_OK


def cmd_save_builtin(args, config: EngineConfig) -> int:
    theta = builtin_distribution(args.name)
    save_files(theta, args.rules, args.distribution)
    if config.verbose:
        print(f"Saved {args.name} to {args.rules} and {args.distribution}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'render': cmd_render,
    'verify': cmd_verify,
    'dynamics': cmd_dynamics,
    'spiral': cmd_spiral,
    'save-builtin': cmd_save_builtin,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_arguments(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        config = EngineConfig.from_env(verbose=args.verbose)
        if args.verbose:
            print(f"\nRunning {args.command}", file=sys.stderr)
            SystemMonitor.print_memory_status('start')
        code = COMMANDS[args.command](args, config)
        if args.verbose:
            SystemMonitor.print_memory_status('end')
        return code
    except OutsideKnownRegionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONE_ESCAPE
    except (NucaError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
