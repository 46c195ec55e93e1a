#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
ptlab
~~~~~

The entry point for the ptlab program. Every flag can also be set through the
environment as PTLAB_<FLAG> (e.g. PTLAB_TRIALS=500, PTLAB_NS="4 4 64");
explicit flags win over the environment, which wins over the defaults.

Exit codes: 0 on success, 1 when an invariant or a numerical step fails,
2 for an invalid configuration or invalid arguments.
"""

import argparse
import multiprocessing
import os
import sys
from pathlib import Path

ENV_PREFIX = 'PTLAB_'

_TRUE = ('1', 'true', 'yes', 'on')


def _from_env(name, kwargs):
    """Default for a flag taken from PTLAB_<FLAG>, converted like the command-line value."""
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return
    if kwargs.get('action') == 'store_true':
        kwargs['default'] = raw.strip().lower() in _TRUE
        return
    convert = kwargs.get('type', str)
    if kwargs.get('nargs'):
        value = [convert(item) for item in raw.split()]
    else:
        value = convert(raw)
    choices = kwargs.get('choices')
    if choices and any(item not in choices for item in (value if isinstance(value, list) else [value])):
        raise ValueError(f'Invalid environment: {ENV_PREFIX}{name}={raw!r} not in {choices}')
    kwargs['default'] = value
    kwargs['required'] = False


def add_flag(parser, *names, **kwargs):
    # named after the long flag, so --set reads PTLAB_SET whatever its dest
    _from_env(names[-1].lstrip('-').replace('-', '_').upper(), kwargs)
    return parser.add_argument(*names, **kwargs)


def _common_flags(parser, trials=True):
    add_flag(parser, '-c', '--config', metavar='FILE', type=Path, default=Path('config.json'),
             help='path to the configuration file (default: %(default)s)')
    add_flag(parser, '--qubits', metavar=('L1', 'L2', 'L'), type=int, nargs=3, default=None,
             help='subsystem sizes in qubits, the remaining L - L1 - L2 qubits traced out')
    add_flag(parser, '--ns', metavar=('N1', 'N2', 'N3'), type=int, nargs=3, default=None,
             help='subsystem dimensions')
    add_flag(parser, '--field', type=str, default='complex', choices=('complex', 'real'),
             help='complex or real random states (default: %(default)s)')
    add_flag(parser, '-o', '--out', metavar='FILE', type=Path, default=None,
             help='output file (defaults to stdout where applicable)')
    if trials:
        add_flag(parser, '-t', '--trials', metavar='N', type=int, default=None,
                 help='number of random states (defaults to the config budget)')
        add_flag(parser, '-s', '--seed', metavar='SEED', type=int, default=0,
                 help='master seed (default: %(default)s)')
        add_flag(parser, '--bins', metavar='N', type=int, default=None,
                 help='histogram bins (defaults to histogram.bins)')
        add_flag(parser, '-w', '--workers', type=int, default=-1,
                 help='number of parallel workers (defaults to number of processors)')
        add_flag(parser, '--cluster', type=str, default='',
                 help='dask cluster address (defaults to local cluster)')
        add_flag(parser, '--no_parallel', action='store_true', default=False, help='disable parallelism')
        add_flag(parser, '-d', '--debug', metavar='DIRECTORY', type=Path, default=None,
                 help='dump every PT spectrum and PT matrix to this directory (enables debug mode)')


def parse_args(argv=None):
    """Reads and parses the command-line arguments."""
    parser = argparse.ArgumentParser(prog='ptlab',
                                     description='Partial-transpose statistics of random tripartite states.')
    commands = parser.add_subparsers(dest='command', required=True)

    ensemble = commands.add_parser('ensemble', help='sample random states and summarize their PT spectra')
    _common_flags(ensemble)

    critical = commands.add_parser('critical', help='fit Tracy-Widom to the smallest PT eigenvalues')
    _common_flags(critical)

    laws = commands.add_parser('laws', help='emit a closed-form density curve or constants')
    _common_flags(laws, trials=False)
    add_flag(laws, '--law', type=str, default='constants',
             choices=('mp', 'semicircle', 'scaled-semicircle', 'constants'),
             help='curve to emit, or all constants as JSON (default: %(default)s)')
    add_flag(laws, '--points', metavar='N', type=int, default=801,
             help='grid points of the curve (default: %(default)s)')

    tw = commands.add_parser('tw', help='emit the Tracy-Widom table (s, F, density)')
    add_flag(tw, '-c', '--config', metavar='FILE', type=Path, default=Path('config.json'),
             help='path to the configuration file (default: %(default)s)')
    add_flag(tw, '--beta', type=int, default=2, choices=(1, 2), help='symmetry class (default: %(default)s)')
    add_flag(tw, '-o', '--out', metavar='FILE', type=Path, default=None, help='output CSV (defaults to stdout)')

    rotor = commands.add_parser('rotor', help='entanglement of the eigenstates of three coupled kicked rotors')
    _common_flags(rotor)
    add_flag(rotor, '--dims', metavar=('N1', 'N2', 'N3'), type=int, nargs=3, default=None,
             help='rotor Hilbert dimensions (same as --ns)')
    add_flag(rotor, '--set', metavar='N', type=int, default=1, choices=(1, 2), dest='parameter_set',
             help='parameter set for K and b when --K/--b are not given (default: %(default)s)')
    add_flag(rotor, '--K', metavar=('K1', 'K2', 'K3'), type=float, nargs=3, default=None, dest='kicks',
             help='kick strengths')
    add_flag(rotor, '--b', metavar=('B12', 'B13', 'B23'), type=float, nargs=3, default=None, dest='couplings',
             help='couplings')
    add_flag(rotor, '--alpha', type=float, default=None, help='quantization phase (defaults to rotor.alpha)')

    verify = commands.add_parser('verify', help='check every invariant at small dimensions')
    add_flag(verify, '-c', '--config', metavar='FILE', type=Path, default=Path('config.json'),
             help='path to the configuration file (default: %(default)s)')
    add_flag(verify, '-s', '--seed', metavar='SEED', type=int, default=0, help='master seed (default: %(default)s)')
    add_flag(verify, '--scale', type=float, default=1.0,
             help='multiplier of the Monte Carlo budgets of the statistical checks (default: %(default)s)')

    parsed = parser.parse_args(argv)

    if getattr(parsed, 'workers', None) == -1:
        parsed.workers = multiprocessing.cpu_count()
    if getattr(parsed, 'no_parallel', False):
        parsed.workers = 1

    return parsed


_REQUIRED_CONFIG = [
    'tolerance.hermitian',
    'tolerance.unitary',
    'shift.max',
    'shift.step',
    'shift.min_samples',
]


def load_config(config_file):
    """Loads the configuration file."""
    try:
        with open(config_file) as fp:
            config = jsonc.load(fp)
    except OSError as error:
        raise ValueError(f'Invalid config: cannot read "{config_file}": {error.strerror}')
    except json.JSONDecodeError as error:
        raise ValueError(f'Invalid config: {error}')

    if not isinstance(config, dict):
        raise ValueError('Invalid config: must be a dictionary')
    for required in _REQUIRED_CONFIG:
        if required not in config:
            raise ValueError(f'Invalid config: missing "{required}"')

    ExperimentConfig.checkconfig(config)
    TWTable.checkconfig(config)
    RotorParams.checkconfig(config)

    return config


def get_dims(args):
    """The PartitionDims named by --qubits or --ns (or --dims for rotors)."""
    given = [name for name in ('qubits', 'ns', 'dims') if getattr(args, name, None)]
    if len(given) != 1:
        raise ValueError('Invalid dims: give exactly one of --qubits L1 L2 L or --ns N1 N2 N3')
    if given[0] == 'qubits':
        return PartitionDims.from_qubits(*args.qubits)
    return PartitionDims(*getattr(args, given[0]))


def experiment(args, config, tag, budget='trials.fraction'):
    return ExperimentConfig.from_config(config, get_dims(args), trials=args.trials, budget=budget,
                                        field=args.field, seed=args.seed, out=args.out, tag=tag,
                                        debug=args.debug, **({'bins': args.bins} if args.bins else {}))


def run_command(args, config, client):
    if args.command == 'ensemble':
        summary, _ = harness.run_ensemble(experiment(args, config, 'ensemble'), client)
        if not args.out:
            json.dump(harness._jsonable(summary.to_dict()), sys.stdout, indent=2)
            print()
        return 0

    elif args.command == 'critical':
        tw = TWTable.from_config(config)
        report, _ = harness.run_critical(experiment(args, config, 'critical'), tw, client,
                                         config['shift.max'], config['shift.step'], config['shift.min_samples'])
        if not args.out:
            json.dump(harness._jsonable(report), sys.stdout, indent=2)
            print()
        return 0

    elif args.command == 'laws':
        dims = get_dims(args)
        if args.law == 'constants':
            constants = laws.closed_form_constants(dims, args.field)
            if args.out:
                harness.write_json(args.out, constants)
            else:
                json.dump(harness._jsonable(constants), sys.stdout, indent=2)
                print()
        else:
            rows = laws.density_curve(args.law, dims, args.points).to_rows()
            write_rows(args.out, ['grid', 'value'], rows)
        return 0

    elif args.command == 'tw':
        table = TWTable.from_config(config, args.beta)
        write_rows(args.out, ['s', 'F', 'density'], table.to_rows())
        return 0

    elif args.command == 'rotor':
        alpha = config['rotor.alpha'] if args.alpha is None else args.alpha
        kicks, couplings = PARAMETER_SETS[args.parameter_set]
        params = RotorParams(args.kicks or kicks, args.couplings or couplings,
                             get_dims(args).as_tuple(), alpha)
        summary, _ = harness.run_rotor(params, experiment(args, config, 'rotor', 'trials.spectra'), client,
                                       config['rotor.max_dim'])
        if not args.out:
            json.dump(harness._jsonable(summary.to_dict()), sys.stdout, indent=2)
            print()
        return 0

    elif args.command == 'verify':
        return 0 if verify_suite(args.seed, args.scale) else 1

    raise ValueError(f'Invalid command: {args.command}')


def write_rows(out, columns, rows):
    if out:
        harness.write_rows_csv(out, columns, rows)
    else:
        print(','.join(columns))
        for row in rows:
            print(','.join(fmt(value) for value in row))


def main(args):
    """Main function of ptlab."""
    start = time.time()
    client = None

    try:
        config = load_config(args.config)

        if getattr(args, 'workers', 1) > 1 or getattr(args, 'cluster', ''):
            client = harness.make_client(args.workers, args.cluster)

        status = run_command(args, config, client)

    except ValueError as error:
        print(f'ERROR: {error}', file=sys.stderr, flush=True)
        return 2
    except RuntimeError as error:
        print(f'FAILED: {error}', file=sys.stderr, flush=True)
        return 1
    except KeyboardInterrupt as error:
        raise error
    finally:
        if client is not None:
            client.close()

    print(f'{time.time() - start} seconds', file=sys.stderr, flush=True)

    return status


if __name__ == '__main__':
    try:
        args = parse_args()
    except ValueError as error:
        print(f'ERROR: {error}', file=sys.stderr, flush=True)
        sys.exit(2)

    import json
    import time

    import harness
    import jsonc
    import laws
    from harness import ExperimentConfig
    from mathhelper import fmt
    from qstate import PartitionDims
    from rotor import PARAMETER_SETS, RotorParams
    from tracywidom import TWTable
    from verify import verify_suite

    print('CHECKPOINT, {}, {}, {}'.format(time.time(), args.command, -1), file=sys.stderr, flush=True)
    sys.exit(main(args))
