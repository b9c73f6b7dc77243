#!/usr/bin/env python3

"""
oneway quantum: randomized verification suites.

CSV columns: suite, trials, checked, skipped, violations, worst_margin, passed.
"""

from ..core.suites import Suite, run_suite
from .reports import Report

COLUMNS = ('suite', 'trials', 'checked', 'skipped', 'violations', 'worst_margin', 'passed')
EPILOG = f"CSV columns: {', '.join(COLUMNS)}"


def register(groups, common) -> None:
    quantum = groups.add_parser('quantum', help='Verify quantum and information inequalities')
    actions = quantum.add_subparsers(dest='action', help='Quantum action')
    check = actions.add_parser('check', parents=[common], help='Run one verification suite', epilog=EPILOG)
    check.add_argument('--suite', required=True, choices=[s.value for s in Suite], help='Suite to run')
    check.add_argument('--trials', type=int, default=100, help='Random instances (default: 100)')
    check.add_argument('--seed', type=int, default=0, help='Master seed (default: 0)')
    check.set_defaults(handler=check_command)


def check_command(args, config) -> Report:
    result = run_suite(args.suite, args.trials, args.seed, config.threads)
    row = result.to_dict()
    report = Report(config.command, columns=COLUMNS, rows=[row])
    for column in COLUMNS:
        report.add(column, row[column])
    return report
