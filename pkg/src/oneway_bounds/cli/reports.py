#!/usr/bin/env python3

"""
Result emission for the CLI: key=value lines on standard output, and the
optional CSV and JSON report files.

Floats are rounded to 10 decimals before printing so repeated runs with the
same seed produce byte-identical output.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

SCHEMA_VERSION = 1


def format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(round(value, 10))
    if isinstance(value, (list, tuple, np.ndarray)):
        return json.dumps(_plain(value), separators=(',', ':'))
    return str(value)


def _plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars and arrays become Python values, floats rounded."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isinf(value) or math.isnan(value) else round(value, 10)
    return value


@dataclass
class Report:
    """What one command produced: printable pairs, optional CSV table and JSON payload."""

    command: str
    pairs: List[Tuple[str, Any]] = field(default_factory=list)
    columns: Sequence[str] = ()
    rows: List[Dict[str, Any]] = field(default_factory=list)
    payload: Dict[str, Any] = field(default_factory=dict)
    show_table: bool = False

    def add(self, key: str, value: Any) -> None:
        self.pairs.append((key, value))
        self.payload.setdefault(key, value)


def print_report(report: Report) -> None:
    for key, value in report.pairs:
        print(f"{key}={format_value(value)}")
    if report.show_table and report.rows:
        print(",".join(report.columns))
        for row in report.rows:
            print(",".join(format_value(row.get(c)) for c in report.columns))


def write_csv(path: str, columns: Sequence[str], rows: List[Dict[str, Any]]) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])


def write_json(path: str, payload: Dict[str, Any]) -> None:
    document = {"schema_version": SCHEMA_VERSION}
    document.update(_plain(payload))
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write('\n')


def error_payload(code: int, error: BaseException) -> Dict[str, Any]:
    return {"error": {"code": code, "kind": type(error).__name__, "message": str(error)}}


def emit(report: Report, csv_path: Optional[str] = None, json_path: Optional[str] = None) -> None:
    print_report(report)
    if csv_path:
        columns = list(report.columns) or [k for k, _ in report.pairs]
        rows = report.rows or [dict(report.pairs)]
        write_csv(csv_path, columns, rows)
    if json_path:
        payload = {"command": report.command}
        payload.update(report.payload)
        if report.rows:
            payload["rows"] = report.rows
        write_json(json_path, payload)
