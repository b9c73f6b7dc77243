#!/usr/bin/env python3

"""
VC dimension, Sauer's bound and gamma-pseudo-dimension of a row family.

The row family of f is {f_x : x in X}; the searches run over column subsets
of increasing size in lexicographic order and stop at the first size with no
shattered subset (shattering is hereditary).
"""

import math
import logging
import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import setting
from .errors import CapExceededError, ValidationError
from .tables import FunctionTable

logger = logging.getLogger(__name__)

# column subsets scored per vectorized batch
_BATCH = 4096


@dataclass(frozen=True)
class ShatterWitness:
    """A shattered column set, with one threshold per column for pseudo-dimension."""

    columns: Tuple[int, ...] = ()
    thresholds: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError(f"witness columns {list(self.columns)} repeat")
        if self.thresholds is not None and len(self.thresholds) != len(self.columns):
            raise ValidationError("witness needs exactly one threshold per column")

    @property
    def size(self) -> int:
        return len(self.columns)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"columns": list(self.columns)}
        if self.thresholds is not None:
            data["thresholds"] = list(self.thresholds)
        return data


def _require_boolean_total(f: FunctionTable) -> None:
    if not f.is_boolean:
        raise ValidationError(f"expected a boolean function, got z_size = {f.z_size}")
    if not f.is_total:
        raise ValidationError("expected a total function, got undefined cells")


def shatters(f: FunctionTable, columns: Sequence[int]) -> bool:
    """True iff the rows of f restricted to ``columns`` realize all 2^|S| patterns."""
    _require_boolean_total(f)
    columns = list(columns)
    for c in columns:
        if not 0 <= c < f.y_size:
            raise ValidationError(f"column {c} is outside 0..{f.y_size - 1}")
    if len(set(columns)) != len(columns):
        raise ValidationError(f"column set {columns} repeats a column")
    if not columns:
        return True
    weights = 1 << np.arange(len(columns), dtype=np.int64)
    codes = f.values[:, columns] @ weights
    return np.unique(codes).size == 1 << len(columns)


def _pattern_counts(rows: np.ndarray, combos: np.ndarray) -> np.ndarray:
    """Number of distinct row patterns on each column combination."""
    size = combos.shape[1]
    weights = 1 << np.arange(size, dtype=np.int64)
    codes = rows[:, combos] @ weights              # (rows, combos)
    ordered = np.sort(codes, axis=0)
    return 1 + (np.diff(ordered, axis=0) != 0).sum(axis=0)


def _check_caps(candidates: int, max_columns: int) -> None:
    if candidates > max_columns:
        raise CapExceededError("VC search columns", candidates, max_columns, 'MAX_VC_COLUMNS')


def vc_dimension(f: FunctionTable, max_columns: Optional[int] = None,
                 max_dimension: Optional[int] = None) -> Tuple[int, ShatterWitness]:
    """Exact VC dimension of the row family, with the lexicographically first witness.

    Constant and duplicated columns are dropped first: neither can sit in a
    shattered set of size two or more, and a constant column shatters nothing.
    """
    _require_boolean_total(f)
    max_columns = setting('MAX_VC_COLUMNS', max_columns)
    max_dimension = setting('MAX_VC_DIMENSION', max_dimension)

    rows = f.distinct_rows()
    varying = [c for c in range(f.y_size) if rows[:, c].min() != rows[:, c].max()]
    _, first_seen = np.unique(rows[:, varying].T, axis=0, return_index=True) if varying else ([], [])
    candidates = sorted(varying[i] for i in first_seen)
    _check_caps(len(candidates), max_columns)

    best = ShatterWitness(())
    if not candidates:
        return 0, best
    if rows.shape[0] >= 2:
        best = ShatterWitness((candidates[0],))
    upper = min(len(candidates), int(math.floor(math.log2(rows.shape[0]))))
    logger.debug("VC search: %d distinct rows, %d candidate columns, size <= %d",
                 rows.shape[0], len(candidates), upper)

    for size in range(2, upper + 1):
        if size > max_dimension:
            raise CapExceededError("VC dimension", size, max_dimension, 'MAX_VC_DIMENSION')
        found = None
        combos = itertools.combinations(candidates, size)
        while found is None:
            batch = np.array(list(itertools.islice(combos, _BATCH)), dtype=np.int64)
            if batch.size == 0:
                break
            hits = np.flatnonzero(_pattern_counts(rows, batch) == 1 << size)
            if hits.size:
                found = tuple(int(c) for c in batch[hits[0]])
        if found is None:
            break
        best = ShatterWitness(found)
    return best.size, best


def sauer_bound(m: int, d: int) -> int:
    """Sum of C(m, i) for i = 0..d, exact."""
    if not 0 <= d <= m:
        raise ValidationError(f"Sauer bound needs 0 <= d <= m, got d = {d}, m = {m}")
    return sum(math.comb(m, i) for i in range(d + 1))


def gamma_shatters(values: np.ndarray, columns: Sequence[int], thresholds: Sequence[float],
                   gamma: float) -> bool:
    """The gamma-shattering predicate with witness thresholds w, indexed like ``columns``."""
    values = np.asarray(values, dtype=np.float64)
    columns = list(columns)
    if not columns:
        return True
    block = values[:, columns]
    w = np.asarray(thresholds, dtype=np.float64)
    above = block > w + gamma
    below = block < w - gamma
    decided = np.all(above | below, axis=1)
    weights = 1 << np.arange(len(columns), dtype=np.int64)
    codes = above[decided].astype(np.int64) @ weights
    return np.unique(codes).size == 1 << len(columns)


@dataclass
class _ColumnCuts:
    column: int
    thresholds: List[float] = field(default_factory=list)
    above: List[np.ndarray] = field(default_factory=list)
    below: List[np.ndarray] = field(default_factory=list)


def _column_cuts(rows: np.ndarray, column: int, gamma: float) -> _ColumnCuts:
    """Midpoints of every value pair more than 2*gamma apart, deduplicated by row split."""
    cuts = _ColumnCuts(column)
    seen = set()
    levels = np.unique(rows[:, column])
    for a, b in itertools.combinations(levels, 2):
        if b - a <= 2 * gamma:
            continue
        w = (a + b) / 2.0
        above = rows[:, column] > w + gamma
        below = rows[:, column] < w - gamma
        key = (above.tobytes(), below.tobytes())
        if key in seen:
            continue
        seen.add(key)
        cuts.thresholds.append(float(w))
        cuts.above.append(above)
        cuts.below.append(below)
    return cuts


def _cuts_shatter(cuts: Sequence[_ColumnCuts], choice: Sequence[int]) -> bool:
    above = np.stack([c.above[i] for c, i in zip(cuts, choice)], axis=1)
    below = np.stack([c.below[i] for c, i in zip(cuts, choice)], axis=1)
    decided = np.all(above | below, axis=1)
    if decided.sum() < 1 << len(cuts):
        return False
    weights = 1 << np.arange(len(cuts), dtype=np.int64)
    return np.unique(above[decided].astype(np.int64) @ weights).size == 1 << len(cuts)


def pseudo_dimension_of_values(values: np.ndarray, gamma: float, max_columns: Optional[int] = None,
                               max_dimension: Optional[int] = None) -> Tuple[int, ShatterWitness]:
    """gamma-pseudo-dimension of the rows of a real matrix, with the first witness found."""
    if gamma <= 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    values = np.asarray(values, dtype=np.float64)
    if np.isnan(values).any():
        raise ValidationError("pseudo-dimension needs a total function")
    max_columns = setting('MAX_VC_COLUMNS', max_columns)
    max_dimension = setting('MAX_VC_DIMENSION', max_dimension)

    rows = np.unique(values, axis=0)
    cuts = [c for c in (_column_cuts(rows, j, gamma) for j in range(values.shape[1])) if c.thresholds]
    _check_caps(len(cuts), max_columns)

    best = ShatterWitness((), ())
    if rows.shape[0] < 2:
        return 0, best
    upper = min(len(cuts), int(math.floor(math.log2(rows.shape[0]))))
    for size in range(1, upper + 1):
        if size > max_dimension:
            raise CapExceededError("pseudo-dimension", size, max_dimension, 'MAX_VC_DIMENSION')
        found = None
        for group in itertools.combinations(cuts, size):
            for choice in itertools.product(*(range(len(c.thresholds)) for c in group)):
                if _cuts_shatter(group, choice):
                    found = ShatterWitness(tuple(c.column for c in group),
                                           tuple(c.thresholds[i] for c, i in zip(group, choice)))
                    break
            if found is not None:
                break
        if found is None:
            break
        best = found
    logger.debug("pseudo-dimension at gamma=%g: %d", gamma, best.size)
    return best.size, best


def pseudo_dimension(f: FunctionTable, gamma: float, max_columns: Optional[int] = None,
                     max_dimension: Optional[int] = None) -> Tuple[int, ShatterWitness]:
    """gamma-pseudo-dimension of the scaled rows f'(x, y) = (f(x, y) + 1) / k."""
    if not f.is_total:
        raise ValidationError("pseudo-dimension needs a total function, got undefined cells")
    return pseudo_dimension_of_values(f.scaled(), gamma, max_columns, max_dimension)
