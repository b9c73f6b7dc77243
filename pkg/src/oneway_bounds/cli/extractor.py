#!/usr/bin/env python3

"""
oneway extractor: strong-extractor audits of a boolean 2^n x 2^m table.

CSV columns (audit): k, bias, is_strong, exact, rec_value, margin.
CSV columns (--leak): t, mi_bits, dist, a, b, k, implication_ok.
"""

from ..core.errors import ValidationError
from ..core.extractors import audit, input_bits, largerec_check, low_bits_leak, side_info_experiment
from ..core.tables import load_function_table
from .reports import Report

AUDIT_COLUMNS = ('k', 'bias', 'is_strong', 'exact', 'rec_value', 'margin')
LEAK_COLUMNS = ('t', 'mi_bits', 'dist', 'a', 'b', 'k', 'implication_ok')
EPILOG = (f"CSV columns: {', '.join(AUDIT_COLUMNS)}; "
          f"with --leak: {', '.join(LEAK_COLUMNS)}")


def register(groups, common) -> None:
    extractor = groups.add_parser('extractor', help='Audit extractors')
    actions = extractor.add_subparsers(dest='action', help='Extractor action')
    aud = actions.add_parser('audit', parents=[common], help='Worst flat-source bias per min-entropy k',
                             epilog=EPILOG)
    aud.add_argument('--fn', required=True, help='Boolean function file with 2^n rows and 2^m columns')
    aud.add_argument('--eps', type=float, required=True, help='Extractor error in (0, 1/2)')
    aud.add_argument('--k', type=int, help='Audit only this min-entropy')
    aud.add_argument('--rec', action='store_true', help='Compare with the rectangle bound at 1/2 - eps')
    aud.add_argument('--leak', type=int, metavar='T', help='Side-information experiment leaking T low bits of x')
    aud.add_argument('--greedy', action='store_true', help='Allow the greedy lower bound when m is too wide')
    aud.set_defaults(handler=audit_command)


def audit_command(args, config) -> Report:
    table = load_function_table(args.fn)
    n, m = input_bits(table)
    if args.k is not None and not 0 <= args.k <= n:
        raise ValidationError(f"--k must lie in 0..{n}, got {args.k}")
    ks = [args.k] if args.k is not None else list(range(n + 1))
    report = Report(config.command, show_table=True)

    if args.leak is not None:
        result = side_info_experiment(table, args.eps, low_bits_leak(n, args.leak))
        row = {'t': args.leak, **result._asdict()}
        report.columns, report.rows = LEAK_COLUMNS, [row]
        report.show_table = False
        for column in LEAK_COLUMNS:
            report.add(column, row[column])
        return report

    if args.rec:
        checked = largerec_check(table, args.eps)
        audits = [a for a in checked.audits if a.k in ks]
        report.add('rec_bits', checked.rec_value)
        report.add('largerec_holds', checked.holds)
    else:
        audits = [audit(table, k, args.eps, args.greedy) for k in ks]
    strong = [a.k for a in audits if a.is_strong]
    if args.k is None:
        report.add('threshold', strong[0] if strong else None)
    report.add('n', n)
    report.add('m', m)
    report.columns = AUDIT_COLUMNS
    report.rows = [{c: a.to_dict()[c] for c in AUDIT_COLUMNS} for a in audits]
    report.payload['audits'] = [a.to_dict() for a in audits]
    return report
