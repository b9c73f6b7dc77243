#!/usr/bin/env python3

"""
oneway bench: write benchmark function (and distribution) files.
"""

import logging

from ..core.tables import (BenchmarkKind, JointDistribution, make_benchmark, make_npm, save_distribution,
                           save_function_table)
from .reports import Report

logger = logging.getLogger(__name__)


def register(groups, common) -> None:
    bench = groups.add_parser('bench', help='Generate benchmark functions')
    actions = bench.add_subparsers(dest='action', help='Bench action')
    gen = actions.add_parser('gen', parents=[common], help='Write GT, IP, DISJ or NPM tables')
    gen.add_argument('--kind', required=True, choices=[k.value for k in BenchmarkKind],
                     help='Benchmark family')
    gen.add_argument('--n', type=int, required=True, help='Bit width / size parameter')
    gen.add_argument('--out', required=True, help='Function file to write')
    gen.add_argument('--dist-out', help='Distribution file to write (uniform, or the NPM distribution)')
    gen.set_defaults(handler=generate)


def generate(args, config) -> Report:
    kind = BenchmarkKind(args.kind)
    if kind is BenchmarkKind.NPM:
        table, mu = make_npm(args.n)
    else:
        table = make_benchmark(kind, args.n)
        mu = JointDistribution.uniform(table.x_size, table.y_size)
    save_function_table(table, args.out)
    logger.info("wrote %s_%d to %s", kind.value, args.n, args.out)
    if args.dist_out:
        save_distribution(mu, args.dist_out)

    report = Report(config.command)
    report.add('kind', kind.value)
    report.add('n', args.n)
    report.add('x_size', table.x_size)
    report.add('y_size', table.y_size)
    report.add('out', args.out)
    if args.dist_out:
        report.add('dist_out', args.dist_out)
    return report
