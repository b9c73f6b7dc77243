#!/usr/bin/env python3

"""
oneway protocol: Monte Carlo runs of the learning protocols and m calibration.

CSV columns: fn, dist, eps, m, mode, truncate, mean_m1_bits, max_m1_bits,
m2_bits, error_rate, abort_rate, mi_bits, vc_or_pdim, threshold,
deterministic_bits.
"""

import os
from typing import Any, Dict

from ..core.protocols import ProtocolParams, SamplingMode, TranscriptStats, calibrate, run_protocol
from ..core.tables import load_distribution, load_function_table
from .reports import Report

COLUMNS = ('fn', 'dist', 'eps', 'm', 'mode', 'truncate', 'mean_m1_bits', 'max_m1_bits', 'm2_bits',
           'error_rate', 'abort_rate', 'mi_bits', 'vc_or_pdim', 'threshold', 'deterministic_bits')
EPILOG = f"CSV columns: {', '.join(COLUMNS)}"


def _protocol_options(parser) -> None:
    parser.add_argument('--fn', required=True, help='Function file')
    parser.add_argument('--dist', required=True, help='Distribution file')
    parser.add_argument('--eps', type=float, required=True, help='Target error in (0, 1/2)')
    parser.add_argument('--trials', type=int, default=1000, help='Monte Carlo trials (default: 1000)')
    parser.add_argument('--seed', type=int, default=0, help='Master seed (default: 0)')
    parser.add_argument('--c0', type=float, default=1.0, help='Learning constant c0 (default: 1.0)')
    parser.add_argument('--l', dest='l_const', type=float, default=16.0,
                        help='Correlation-protocol overhead l in bits (default: 16)')
    parser.add_argument('--truncate', action='store_true', help='Abort when |M1| passes its threshold')
    parser.add_argument('--mode', default=SamplingMode.INDEPENDENT.value,
                        choices=[m.value for m in SamplingMode], help='Correlation sampling mode')
    parser.add_argument('--nonboolean', action='store_true', help='Use the non-boolean protocol')
    parser.add_argument('--dimension', type=int, help='VC / pseudo-dimension to use instead of computing it')


def register(groups, common) -> None:
    protocol = groups.add_parser('protocol', help='Run one-way protocols')
    actions = protocol.add_subparsers(dest='action', help='Protocol action')

    run = actions.add_parser('run', parents=[common], help='Monte Carlo protocol run', epilog=EPILOG)
    _protocol_options(run)
    run.add_argument('--m', type=int, help='Sample count (default: from the sample-size formula)')
    run.set_defaults(handler=run_command)

    cal = actions.add_parser('calibrate', parents=[common], help='Smallest m meeting the error target',
                             epilog=EPILOG)
    _protocol_options(cal)
    cal.add_argument('--target', type=float, help='Error target (default: eps)')
    cal.set_defaults(handler=calibrate_command)


def _params(args, config, m=None) -> ProtocolParams:
    return ProtocolParams(eps=args.eps, m=m, c0=args.c0, l_const=args.l_const, truncate=args.truncate,
                          mode=args.mode, trials=args.trials, seed=args.seed, threads=config.threads,
                          dimension=args.dimension)


def _row(args, stats: TranscriptStats) -> Dict[str, Any]:
    return {
        'fn': os.path.basename(args.fn),
        'dist': os.path.basename(args.dist),
        'eps': args.eps,
        'm': stats.m,
        'mode': stats.mode,
        'truncate': stats.truncate,
        'mean_m1_bits': stats.mean_m1_bits,
        'max_m1_bits': stats.max_m1_bits,
        'm2_bits': stats.m2_bits,
        'error_rate': stats.error_rate,
        'abort_rate': stats.abort_rate,
        'mi_bits': stats.mi_bits,
        'vc_or_pdim': stats.dimension,
        'threshold': stats.threshold,
        'deterministic_bits': stats.deterministic_bits,
    }


def _report(config, row: Dict[str, Any]) -> Report:
    report = Report(config.command, columns=COLUMNS, rows=[row])
    for column in COLUMNS:
        report.add(column, row[column])
    return report


def run_command(args, config) -> Report:
    table = load_function_table(args.fn)
    mu = load_distribution(args.dist)
    stats = run_protocol(table, mu, _params(args, config, args.m), args.nonboolean)
    return _report(config, _row(args, stats))


def calibrate_command(args, config) -> Report:
    table = load_function_table(args.fn)
    mu = load_distribution(args.dist)
    m, stats = calibrate(table, mu, _params(args, config), args.target, args.nonboolean)
    report = _report(config, _row(args, stats))
    report.payload['target'] = args.eps if args.target is None else args.target
    return report
