# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Command line driver.

    flashbench simulate --model ggr --trials 100000 --seed 42 -o report.json
    flashbench verify --model worked-example
    flashbench enumerate
    flashbench analyze records.csv

Exit codes: 0 success, 2 validation failure, 3 feature (i) violated,
4 I/O error.
"""

from copy import copy
from optparse import OptionParser
import logging
import os
import sys

from . import config
from .config import ConfigError
from .core import EmptyDataError, tally
from .log import log
from .models import ModelValidationError
from .referee import (
    AMBIENT_MODES,
    ExperimentConfig,
    run_adaptive_experiment,
    run_experiment,
)
from .report import (
    RecordFormatError,
    analyze_report,
    dumps,
    enumerate_report,
    read_records,
    render_text,
    simulate_report,
    verify_report,
    write_records,
)
from .specs import VERIFIABLE_KINDS, SpecError, load_model_spec

COMMANDS = ('simulate', 'verify', 'enumerate', 'analyze')

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3
EXIT_IO = 4


def model_path():
    path = config.getValue('general', 'modelpath', '') or ''
    return [os.path.expanduser(p) for p in str(path).split(os.pathsep) if p]


def cmd_simulate(
    model,
    trials,
    seed,
    records=None,
    shards=1,
    workers=1,
    z=1.96,
    ambient_mode='per-run',
    search_path=None,
):
    """Run the experiment on a model document and report its statistics."""
    spec = load_model_spec(model, search_path)
    built = spec.build()
    if spec.is_adaptive:
        runs = run_adaptive_experiment(built, trials, seed)
    else:
        cfg = ExperimentConfig(trials, seed, built, ambient_mode, shards, workers)
        runs = run_experiment(cfg)
    if records:
        log.info('Writing %d records to %s', len(runs), records)
        with open(records, 'w') as fh:
            write_records(runs, fh)
    table = tally(runs)
    report = simulate_report(spec.document, trials, seed, ambient_mode, table, z)
    return report, EXIT_OK


def cmd_verify(model, search_path=None):
    """Exact verification; never runs the experiment."""
    spec = load_model_spec(model, search_path)
    if spec.kind not in VERIFIABLE_KINDS:
        raise SpecError(
            '$.kind',
            'verify supports %s, not %s' % (', '.join(VERIFIABLE_KINDS), spec.kind),
        )
    report, compliant = verify_report(spec, spec.build())
    if not compliant:
        log.error(
            'Feature (i) is violated: %s', report['verification']['witness']
        )
        return report, EXIT_VIOLATION
    return report, EXIT_OK


def cmd_enumerate():
    return enumerate_report(), EXIT_OK


def cmd_analyze(records, z=1.96):
    """Re-tally a records file written by ``simulate --records``."""
    with open(records) as fh:
        runs = read_records(fh)
    if not runs:
        raise EmptyDataError('no records in %s' % records)
    log.info('Read %d records from %s', len(runs), records)
    return analyze_report(records, tally(runs), z), EXIT_OK


def parse_commandline():

    parser = OptionParser(
        usage='%prog COMMAND [options] [RECORDS]\n\n'
        'Commands: ' + ', '.join(COMMANDS)
    )

    parser.add_option(
        '--config',
        dest='configfile',
        metavar='FILE',
        help='Config file with defaults for the [simulate] options',
    )

    parser.add_option(
        '-m',
        '--model',
        dest='model',
        metavar='MODEL',
        help='Model document: a file, or a name from the model path or catalog',
    )

    parser.add_option(
        '-n',
        '--trials',
        dest='trials',
        type='int',
        metavar='N',
        default=config.getValue('simulate', 'trials', 100000),
        help='Number of runs to simulate. Default=%default',
    )

    parser.add_option(
        '--seed',
        dest='seed',
        type='int',
        metavar='SEED',
        default=config.getValue('simulate', 'seed', 0),
        help='Root seed (64-bit unsigned). Default=%default',
    )

    parser.add_option(
        '-o',
        '--out',
        dest='out',
        metavar='FILE',
        default='-',
        help='Write the report to FILE. Default=stdout',
    )

    parser.add_option(
        '--records',
        dest='records',
        metavar='FILE',
        help='simulate: also write the raw records to FILE; '
        'analyze: the records file to read',
    )

    parser.add_option(
        '--shards',
        dest='shards',
        type='int',
        default=config.getValue('simulate', 'shards', 1),
        help='Split the trials into this many shards. Default=%default',
    )

    parser.add_option(
        '--workers',
        dest='workers',
        type='int',
        default=config.getValue('simulate', 'workers', 1),
        help='Worker processes for the shards. Default=%default',
    )

    parser.add_option(
        '--z',
        dest='z',
        type='float',
        default=config.getValue('simulate', 'z', 1.96),
        help='Normal quantile for Wilson intervals. Default=%default',
    )

    parser.add_option(
        '--ambient-mode',
        dest='ambient_mode',
        type='choice',
        choices=list(AMBIENT_MODES),
        default='per-run',
        help='When the ambient condition becomes known: '
        'per-run (at the detectors) or source-visible. Default=%default',
    )

    parser.add_option(
        '--format',
        dest='format',
        type='choice',
        choices=['json', 'text'],
        default='json',
        help='Report format. Default=%default',
    )

    parser.add_option(
        '--template',
        dest='template',
        metavar='NAME',
        default='report.tmpl',
        help='jinja2 template used by --format text. Default=%default',
    )

    parser.add_option(
        '-q',
        '--quiet',
        action='store_true',
        dest='quiet',
        default=False,
        help='Print less information.',
    )

    parser.add_option(
        '-v',
        '--verbose',
        action='store_true',
        dest='verbose',
        default=False,
        help='Print debugging information.',
    )

    parser.add_option(
        '--very-verbose',
        action='store_true',
        dest='vverbose',
        default=False,
        help='Print even more debugging information.',
    )

    parser.add_option(
        '--version',
        action='store_true',
        dest='version',
        default=False,
        help='Print version number and exit.',
    )

    return parser


def _dispatch(command, options, args):
    search_path = model_path()
    if command in ('simulate', 'verify') and not options.model:
        raise SpecError('$', '%s needs --model' % command)
    if command == 'simulate':
        return cmd_simulate(
            options.model,
            options.trials,
            options.seed,
            records=options.records,
            shards=options.shards,
            workers=options.workers,
            z=options.z,
            ambient_mode=options.ambient_mode,
            search_path=search_path,
        )
    if command == 'verify':
        return cmd_verify(options.model, search_path)
    if command == 'enumerate':
        return cmd_enumerate()
    records = options.records or (args[0] if args else None)
    if not records:
        raise SpecError('$', 'analyze needs a records file')
    return cmd_analyze(records, options.z)


def _write(report, options):
    if options.format == 'text':
        text = render_text(report, options.template, [os.getcwd()])
    else:
        text = dumps(report)
    if options.out == '-':
        sys.stdout.write(text)
    else:
        with open(options.out, 'w') as fh:
            fh.write(text)


def run(_args=None):
    """Parse the command line, run the command, return the exit code."""

    parser = parse_commandline()
    options, args = parser.parse_args(copy(_args))

    if options.configfile:
        # Defaults come from the config file, so parse again.
        try:
            config.parseConfig(options.configfile)
        except ConfigError as e:
            log.critical('%s', e)
            return EXIT_IO
        parser = parse_commandline()
        options, args = parser.parse_args(copy(_args))

    if options.version:
        from flashbench import version

        print(version)
        return EXIT_OK

    if options.quiet:
        log.setLevel(logging.CRITICAL)

    if options.verbose:
        log.setLevel(logging.INFO)

    if options.vverbose:
        log.setLevel(logging.DEBUG)

    if not args or args[0] not in COMMANDS:
        log.critical('Usage: flashbench {%s} [options]', ','.join(COMMANDS))
        return EXIT_VALIDATION
    command, args = args[0], args[1:]

    try:
        report, code = _dispatch(command, options, args)
    except SpecError as e:
        log.critical('Invalid model document: %s', e)
        return EXIT_VALIDATION
    except (ModelValidationError, EmptyDataError, RecordFormatError, ValueError) as e:
        log.critical('%s', e)
        return EXIT_VALIDATION
    except OSError as e:
        log.critical('%s', e)
        return EXIT_IO

    try:
        _write(report, options)
    except OSError as e:
        log.critical('Cannot write report: %s', e)
        return EXIT_IO
    return code


def main(_args=None):
    """Parse command line and run the requested command."""
    sys.exit(run(sys.argv[1:] if _args is None else _args))


if __name__ == "__main__":
    main(sys.argv[1:])
