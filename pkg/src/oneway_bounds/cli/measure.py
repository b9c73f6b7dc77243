#!/usr/bin/env python3

"""
oneway measure: complexity measures of a function file or distribution file.
"""

from ..core.dimensions import pseudo_dimension, sauer_bound, vc_dimension
from ..core.information import conditional_entropy, entropy, min_entropy, mutual_information
from ..core.protocols import optimal_oneway
from ..core.rectangles import rec_exact, rec_greedy
from ..core.tables import is_product, load_distribution, load_function_table
from .reports import Report


def register(groups, common) -> None:
    measure = groups.add_parser('measure', help='Compute complexity measures')
    actions = measure.add_subparsers(dest='action', help='Measure')

    vc = actions.add_parser('vc', parents=[common], help='Exact VC dimension of the row family')
    vc.add_argument('--fn', required=True, help='Function file')
    vc.set_defaults(handler=measure_vc)

    pdim = actions.add_parser('pdim', parents=[common], help='gamma-pseudo-dimension of the scaled rows')
    pdim.add_argument('--fn', required=True, help='Function file')
    pdim.add_argument('--gamma', type=float, required=True, help='Separation margin gamma > 0')
    pdim.set_defaults(handler=measure_pdim)

    mi = actions.add_parser('mi', parents=[common], help='Mutual information I(X:Y) in bits')
    mi.add_argument('--dist', required=True, help='Distribution file')
    mi.set_defaults(handler=measure_mi)

    minent = actions.add_parser('minentropy', parents=[common], help='Min-entropy of the X and Y marginals')
    minent.add_argument('--dist', required=True, help='Distribution file')
    minent.set_defaults(handler=measure_minentropy)

    rec = actions.add_parser('rec', parents=[common], help='One-way rectangle bound')
    rec.add_argument('--fn', required=True, help='Function file')
    rec.add_argument('--dist', required=True, help='Distribution file')
    rec.add_argument('--eps', type=float, required=True, help='Error parameter')
    how = rec.add_mutually_exclusive_group()
    how.add_argument('--exact', action='store_true', help='Enumerate every row subset (default)')
    how.add_argument('--greedy', action='store_true', help='Greedy upper bound')
    rec.set_defaults(handler=measure_rec)

    dopt = actions.add_parser('dopt', parents=[common], help='Optimal deterministic one-way cost under mu')
    dopt.add_argument('--fn', required=True, help='Function file')
    dopt.add_argument('--dist', required=True, help='Distribution file')
    dopt.add_argument('--eps', type=float, required=True, help='Error parameter')
    dopt.set_defaults(handler=measure_dopt)


def measure_vc(args, config) -> Report:
    table = load_function_table(args.fn)
    d, witness = vc_dimension(table)
    distinct = table.distinct_rows().shape[0]
    report = Report(config.command)
    report.add('vc', d)
    report.add('witness', list(witness.columns))
    report.add('distinct_rows', distinct)
    report.add('sauer_bound', sauer_bound(table.y_size, d))
    return report


def measure_pdim(args, config) -> Report:
    table = load_function_table(args.fn)
    d, witness = pseudo_dimension(table, args.gamma)
    report = Report(config.command)
    report.add('pdim', d)
    report.add('gamma', args.gamma)
    report.add('witness', list(witness.columns))
    report.add('thresholds', list(witness.thresholds or ()))
    return report


def measure_mi(args, config) -> Report:
    mu = load_distribution(args.dist)
    report = Report(config.command)
    report.add('mi_bits', mutual_information(mu))
    report.add('entropy_x_bits', entropy(mu.marginal_x()))
    report.add('entropy_y_bits', entropy(mu.marginal_y()))
    report.add('conditional_entropy_bits', conditional_entropy(mu))
    report.add('product', is_product(mu))
    return report


def measure_minentropy(args, config) -> Report:
    mu = load_distribution(args.dist)
    report = Report(config.command)
    report.add('min_entropy_x_bits', min_entropy(mu.marginal_x()))
    report.add('min_entropy_y_bits', min_entropy(mu.marginal_y()))
    return report


def measure_rec(args, config) -> Report:
    table = load_function_table(args.fn)
    mu = load_distribution(args.dist)
    if args.greedy:
        cert = rec_greedy(table, mu, args.eps)
        method = 'greedy'
    else:
        _, cert = rec_exact(table, mu, args.eps)
        method = 'exact'
    report = Report(config.command)
    report.add('rec_bits', cert.value)
    report.add('method', method)
    report.add('error', cert.error)
    report.add('mass', cert.mass)
    report.add('rows', list(cert.rows))
    report.payload['certificate'] = cert.to_dict()
    return report


def measure_dopt(args, config) -> Report:
    table = load_function_table(args.fn)
    mu = load_distribution(args.dist)
    result = optimal_oneway(table, mu, args.eps)
    report = Report(config.command)
    report.add('dopt_bits', result.bits)
    report.add('blocks', len(result.partition))
    report.add('error', result.error)
    report.add('partition', result.partition)
    report.payload['g'] = result.g.tolist()
    return report
