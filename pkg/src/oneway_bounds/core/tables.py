#!/usr/bin/env python3

"""
Function tables, joint input distributions and benchmark generators.

A FunctionTable is a dense x_size-by-y_size matrix of outputs in
{0, ..., z_size-1}; partial tables may also hold STAR (-1) for "any output is
correct". A JointDistribution is a dense probability matrix over the same
index sets. Both are immutable once built and serialize to JSON.
"""

import json
import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import CONFIG, setting
from .errors import CapExceededError, ValidationError

logger = logging.getLogger(__name__)

STAR = -1


class BenchmarkKind(str, Enum):
    GT = "gt"
    IP = "ip"
    DISJ = "disj"
    NPM = "npm"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MassFunction:
    """A probability mass function over {0, ..., support_size-1}."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValidationError(f"mass function must be a non-empty vector, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ValidationError(f"mass function entry {int(np.argmin(np.isfinite(probs)))} is not finite")
        if np.any(probs < 0):
            i = int(np.argmax(probs < 0))
            raise ValidationError(f"mass function entry {i} = {probs[i]!r} is negative")
        total = float(probs.sum())
        if abs(total - 1.0) > CONFIG['CONSTRUCTION_TOL']:
            raise ValidationError(f"mass function sums to {total!r}, not 1")
        object.__setattr__(self, 'probs', _frozen(probs))

    @property
    def support_size(self) -> int:
        return int(self.probs.size)

    @classmethod
    def coerce(cls, value: Union['MassFunction', Sequence[float], np.ndarray]) -> 'MassFunction':
        if isinstance(value, cls):
            return value
        return cls(np.asarray(value, dtype=np.float64))

    @classmethod
    def uniform(cls, size: int) -> 'MassFunction':
        return cls(np.full(size, 1.0 / size))


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A finite function f: X x Y -> {0..k-1} (or STAR when partial)."""

    values: np.ndarray
    z_size: int = 2
    partial: bool = False

    def __post_init__(self):
        raw = np.asarray(self.values)
        if raw.dtype.kind == 'f' and not np.all(np.mod(raw, 1) == 0):
            i, j = np.argwhere(np.mod(raw, 1) != 0)[0]
            raise ValidationError(f"values[{i}][{j}] = {raw[i, j]!r} is not an integer")
        values = np.array(raw, dtype=np.int64)
        if values.ndim != 2:
            raise ValidationError(f"values must be a matrix, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValidationError(f"x_size and y_size must be at least 1, got {values.shape}")
        if int(self.z_size) < 2:
            raise ValidationError(f"z_size must be at least 2, got {self.z_size}")
        k = int(self.z_size)
        bad = ((values < 0) & (values != STAR)) | (values >= k)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValidationError(f"values[{i}][{j}] = {values[i, j]} is outside {{0..{k - 1}}}")
        if not self.partial and (values == STAR).any():
            i, j = np.argwhere(values == STAR)[0]
            raise ValidationError(f"values[{i}][{j}] is the undefined marker {STAR} but partial is false")
        object.__setattr__(self, 'z_size', k)
        object.__setattr__(self, 'partial', bool(self.partial))
        object.__setattr__(self, 'values', _frozen(values))

    @property
    def x_size(self) -> int:
        return int(self.values.shape[0])

    @property
    def y_size(self) -> int:
        return int(self.values.shape[1])

    @property
    def is_boolean(self) -> bool:
        return self.z_size == 2

    @property
    def is_total(self) -> bool:
        return not bool((self.values == STAR).any())

    def distinct_rows(self) -> np.ndarray:
        """The row family F = {f_x}, as the set of distinct rows."""
        return np.unique(self.values, axis=0)

    def is_trivial(self) -> bool:
        """True when every row is the same, i.e. f depends on y only."""
        return self.distinct_rows().shape[0] == 1

    def scaled(self) -> np.ndarray:
        """f'(x,y) = (f(x,y)+1)/k in (0, 1]; undefined cells become NaN."""
        scaled = (self.values + 1.0) / self.z_size
        scaled[self.values == STAR] = np.nan
        return scaled

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x_size": self.x_size,
            "y_size": self.y_size,
            "z_size": self.z_size,
            "partial": self.partial,
            "values": self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FunctionTable':
        for key in ("x_size", "y_size", "z_size", "values"):
            if key not in data:
                raise ValidationError(f"function file is missing '{key}'")
        partial = data.get("partial", False)
        if not isinstance(partial, bool):
            raise ValidationError(f"'partial' must be true or false, got {partial!r}")
        rows = data["values"]
        x_size, y_size = data["x_size"], data["y_size"]
        if not isinstance(rows, list) or len(rows) != x_size:
            raise ValidationError(f"'values' must hold x_size = {x_size} rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != y_size:
                raise ValidationError(f"values[{i}] must hold y_size = {y_size} entries")
            for j, cell in enumerate(row):
                if isinstance(cell, bool) or not isinstance(cell, int):
                    raise ValidationError(f"values[{i}][{j}] = {cell!r} is not an integer")
        return cls(np.array(rows, dtype=np.int64).reshape(x_size, y_size), data["z_size"], partial)

    def equals(self, other: 'FunctionTable') -> bool:
        return (self.z_size == other.z_size and self.partial == other.partial
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """A probability mass matrix over X x Y."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValidationError(f"distribution must be a non-empty matrix, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            i, j = np.argwhere(~np.isfinite(p))[0]
            raise ValidationError(f"p[{i}][{j}] is not finite")
        if np.any(p < 0):
            i, j = np.argwhere(p < 0)[0]
            raise ValidationError(f"p[{i}][{j}] = {p[i, j]!r} is negative")
        total = float(p.sum())
        if abs(total - 1.0) > CONFIG['MASS_TOL']:
            raise ValidationError(f"distribution mass is {total!r}, not 1 (tolerance {CONFIG['MASS_TOL']})")
        object.__setattr__(self, 'p', _frozen(p))

    @property
    def x_size(self) -> int:
        return int(self.p.shape[0])

    @property
    def y_size(self) -> int:
        return int(self.p.shape[1])

    @property
    def total(self) -> float:
        return float(self.p.sum())

    def row_masses(self) -> np.ndarray:
        return self.p.sum(axis=1)

    def marginal_x(self) -> MassFunction:
        return MassFunction(self.p.sum(axis=1) / self.total)

    def marginal_y(self) -> MassFunction:
        return MassFunction(self.p.sum(axis=0) / self.total)

    def conditional_row(self, x: int) -> MassFunction:
        return conditional_row(self, x)

    def conditional_matrix(self) -> np.ndarray:
        """Rows mu_x for positive-mass rows; zero-mass rows stay zero."""
        masses = self.row_masses()
        out = np.zeros_like(self.p)
        live = masses > 0
        out[live] = self.p[live] / masses[live, None]
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {"x_size": self.x_size, "y_size": self.y_size, "p": self.p.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'JointDistribution':
        for key in ("x_size", "y_size", "p"):
            if key not in data:
                raise ValidationError(f"distribution file is missing '{key}'")
        rows = data["p"]
        x_size, y_size = data["x_size"], data["y_size"]
        if not isinstance(rows, list) or len(rows) != x_size:
            raise ValidationError(f"'p' must hold x_size = {x_size} rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != y_size:
                raise ValidationError(f"p[{i}] must hold y_size = {y_size} entries")
            for j, cell in enumerate(row):
                if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                    raise ValidationError(f"p[{i}][{j}] = {cell!r} is not a number")
        return cls(np.array(rows, dtype=np.float64).reshape(x_size, y_size))

    @classmethod
    def uniform(cls, x_size: int, y_size: int) -> 'JointDistribution':
        return cls(np.full((x_size, y_size), 1.0 / (x_size * y_size)))

    @classmethod
    def product(cls, px: Sequence[float], py: Sequence[float]) -> 'JointDistribution':
        px = MassFunction.coerce(px).probs
        py = MassFunction.coerce(py).probs
        return cls(np.outer(px, py))

    def equals(self, other: 'JointDistribution') -> bool:
        return np.array_equal(self.p, other.p)


def conditional_row(mu: JointDistribution, x: int) -> MassFunction:
    """mu_x: the distribution of Y given X = x."""
    if not 0 <= x < mu.x_size:
        raise ValidationError(f"row {x} is outside 0..{mu.x_size - 1}")
    row = mu.p[x]
    mass = float(row.sum())
    if mass <= 0:
        raise ValidationError(f"row {x} has zero mass; its conditional distribution is undefined")
    return MassFunction(row / mass)


def is_product(mu: JointDistribution, tol: float = 1e-9) -> bool:
    """True iff p is within ``tol`` (max entry) of the outer product of its marginals."""
    outer = np.outer(mu.p.sum(axis=1), mu.p.sum(axis=0)) / mu.total
    return float(np.max(np.abs(mu.p - outer))) <= tol


def make_copy_distribution(size: int, stay: float = 0.5) -> JointDistribution:
    """X uniform; Y = X with probability ``stay``, otherwise uniform."""
    if not 0.0 <= stay <= 1.0:
        raise ValidationError(f"stay probability {stay} is outside [0, 1]")
    p = np.full((size, size), (1.0 - stay) / (size * size))
    p[np.diag_indices(size)] += stay / size
    return JointDistribution(p)


def popcounts(bits: int) -> np.ndarray:
    """Number of set bits of every integer in [0, 2**bits)."""
    counts = np.zeros(1 << bits, dtype=np.int64)
    for b in range(bits):
        counts[1 << b:1 << (b + 1)] = counts[:1 << b] + 1
    return counts


def make_benchmark(kind: Union[str, BenchmarkKind], n: int, limit: Optional[int] = None) -> FunctionTable:
    """GT, IP or DISJ on n-bit inputs as a 2^n x 2^n boolean table."""
    kind = BenchmarkKind(kind)
    limit = setting('MAX_BENCH_BITS', limit)
    if kind is BenchmarkKind.NPM:
        raise ValidationError("use make_npm for the noisy partial matching function")
    if not 1 <= n <= limit:
        raise ValidationError(f"bit width n = {n} is outside 1..{limit}")
    size = 1 << n
    xs = np.arange(size)[:, None]
    ys = np.arange(size)[None, :]
    if kind is BenchmarkKind.GT:
        values = xs > ys
    elif kind is BenchmarkKind.IP:
        values = popcounts(n)[xs & ys] & 1
    else:
        values = (xs & ys) == 0
    logger.debug("built %s_%d (%d x %d)", kind.value, n, size, size)
    return FunctionTable(values.astype(np.int64), 2)


def double_factorial(value: int) -> int:
    return math.prod(range(value, 0, -2)) if value > 0 else 1


def enumerate_matchings(vertices: int) -> List[Tuple[Tuple[int, int], ...]]:
    """All perfect matchings of {0..vertices-1} in canonical order.

    The smallest unmatched vertex is paired with each larger vertex in turn,
    recursively, which fixes the index <-> matching bijection.
    """
    if vertices % 2:
        raise ValidationError(f"no perfect matching on {vertices} vertices")

    def extend(remaining: Tuple[int, ...]) -> Iterator[Tuple[Tuple[int, int], ...]]:
        if not remaining:
            yield ()
            return
        first, rest = remaining[0], remaining[1:]
        for idx, partner in enumerate(rest):
            for tail in extend(rest[:idx] + rest[idx + 1:]):
                yield ((first, partner),) + tail

    return list(extend(tuple(range(vertices))))


def npm_radius(n: int) -> int:
    return n // 3


def matching_images(n: int, matchings: Sequence[Tuple[Tuple[int, int], ...]]) -> np.ndarray:
    """Mx for every matching and every x, shape (len(matchings), 2^n).

    Position i of [2n] reads bit x_{i mod n}; edge t writes bit t of Mx.
    """
    xs = np.arange(1 << n)
    bits = np.stack([(xs >> (i % n)) & 1 for i in range(2 * n)], axis=1)
    images = np.zeros((len(matchings), xs.size), dtype=np.int64)
    for index, matching in enumerate(matchings):
        for t, (a, b) in enumerate(matching):
            images[index] |= (bits[:, a] ^ bits[:, b]) << t
    return images


def make_npm(n: int, limit: Optional[int] = None) -> Tuple[FunctionTable, JointDistribution]:
    """Noisy Partial Matching NPM_n with its non-product input distribution.

    Y index = matching_index * 2^n + w.
    """
    limit = setting('MAX_Y_SIZE', limit)
    if n < 2:
        raise ValidationError(f"NPM needs n >= 2, got {n}")
    y_size = double_factorial(2 * n - 1) * (1 << n)
    if y_size > limit:
        raise CapExceededError("NPM y_size", y_size, limit, 'MAX_Y_SIZE')

    matchings = enumerate_matchings(2 * n)
    images = matching_images(n, matchings)
    counts = popcounts(n)
    radius = npm_radius(n)
    ws = np.arange(1 << n)

    # distance[x, M, w] = Hamming distance between Mx and w
    distance = counts[images.T[:, :, None] ^ ws[None, None, :]]
    near_zero = distance <= radius
    near_one = (n - distance) <= radius

    values = near_one.astype(np.int64).reshape(1 << n, y_size)
    ball = sum(math.comb(n, i) for i in range(radius + 1))
    weight = 0.5 / ((1 << n) * len(matchings) * ball)
    p = (near_zero.astype(np.float64) + near_one.astype(np.float64)) * weight
    logger.info("built NPM_%d: %d matchings, y_size %d, radius %d", n, len(matchings), y_size, radius)
    return FunctionTable(values, 2), JointDistribution(p.reshape(1 << n, y_size))


def save_function_table(table: FunctionTable, file_path: str) -> None:
    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(table.to_dict(), f)


def load_function_table(file_path: str) -> FunctionTable:
    """Load and validate a function file."""
    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{file_path}: not valid JSON ({exc})")
    if not isinstance(data, dict):
        raise ValidationError(f"{file_path}: expected a JSON object")
    try:
        return FunctionTable.from_dict(data)
    except ValidationError as exc:
        raise ValidationError(f"{file_path}: {exc}")


def save_distribution(mu: JointDistribution, file_path: str) -> None:
    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(mu.to_dict(), f)


def load_distribution(file_path: str) -> JointDistribution:
    """Load and validate a distribution file."""
    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{file_path}: not valid JSON ({exc})")
    if not isinstance(data, dict):
        raise ValidationError(f"{file_path}: expected a JSON object")
    try:
        return JointDistribution.from_dict(data)
    except ValidationError as exc:
        raise ValidationError(f"{file_path}: {exc}")
