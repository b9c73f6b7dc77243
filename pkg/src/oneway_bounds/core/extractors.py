#!/usr/bin/env python3

"""
Strong-extractor audits over flat sources, the link from extractors to the
one-way rectangle bound, and extraction in the presence of side information.

h is a boolean table with X = {0,1}^n and Y = {0,1}^m. For a source uniform
on S, the bias is ||h(X,Y)Y - U (x) Y||_1 = mean_y |2 p_y(S) - 1|, with
p_y(S) the fraction of x in S with h(x, y) = 1. h is a strong (k, eps)
extractor when every flat source of size 2^k has bias < 2 eps.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import CONFIG, setting
from .errors import CapExceededError, InfeasibleError, ValidationError
from .information import binary_entropy, mutual_information
from .quantum import DensityMatrix, QuantumEnsemble, holevo_chi, trace_norm
from .rectangles import rec_exact
from .tables import FunctionTable, JointDistribution

logger = logging.getLogger(__name__)

TIE_SLACK = 1e-12


@dataclass(frozen=True)
class ExtractorAudit:
    n: int
    m: int
    k: int
    eps: float
    worst_set: Tuple[int, ...]
    bias: float
    is_strong: bool
    exact: bool = True
    rec_value: Optional[float] = None
    margin: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["worst_set"] = list(self.worst_set)
        return data


def input_bits(h: FunctionTable) -> Tuple[int, int]:
    """(n, m) with x_size = 2^n and y_size = 2^m."""
    if not h.is_boolean or not h.is_total:
        raise ValidationError("extractor audits need a total boolean function")
    n = h.x_size.bit_length() - 1
    m = h.y_size.bit_length() - 1
    if 1 << n != h.x_size or 1 << m != h.y_size:
        raise ValidationError(f"extractor tables must be 2^n x 2^m, got {h.x_size} x {h.y_size}")
    return n, m


def _signed(h: FunctionTable) -> np.ndarray:
    return 2.0 * h.values - 1.0


def flat_source_bias(h: FunctionTable, rows: Sequence[int]) -> float:
    """mean_y |2 p_y(S) - 1| for the source uniform on S."""
    if not h.is_boolean:
        raise ValidationError(f"flat_source_bias needs a boolean function, got z_size = {h.z_size}")
    rows = sorted(set(int(r) for r in rows))
    if not rows:
        raise ValidationError("the source set S must be nonempty")
    if rows[0] < 0 or rows[-1] >= h.x_size:
        raise ValidationError(f"source set leaves 0..{h.x_size - 1}")
    return float(np.abs(_signed(h)[rows].mean(axis=0)).mean())


def _top_rows(scores: np.ndarray, size: int) -> np.ndarray:
    """Indices of the ``size`` largest scores per column, ties to smaller rows, sorted."""
    order = np.argsort(-scores, axis=0, kind='stable')[:size]
    return np.sort(order, axis=0)


def _sign_patterns(width: int, start: int, stop: int) -> np.ndarray:
    codes = np.arange(start, stop)[:, None]
    return np.where((codes >> np.arange(width)) & 1, 1.0, -1.0)


def _exact_worst_rows(signed: np.ndarray, size: int, cells: int) -> Tuple[int, ...]:
    """Best S over every sign pattern, scoring at most ``cells`` (row, pattern) pairs at a time."""
    width = signed.shape[1]
    total = 1 << width
    step = max(1, cells // signed.shape[0])
    kept_rows, kept_values = [], []
    for start in range(0, total, step):
        patterns = _sign_patterns(width, start, min(total, start + step))
        scores = signed @ patterns.T
        tops = _top_rows(scores, size)
        totals = np.take_along_axis(scores, tops, axis=0).sum(axis=0)
        near = np.flatnonzero(totals >= totals.max() - TIE_SLACK)
        kept_rows.append(tops[:, near])
        kept_values.append(totals[near])
    rows, _ = _pick(np.concatenate(kept_rows, axis=1), np.concatenate(kept_values))
    return rows


def _pick(candidates: np.ndarray, values: np.ndarray) -> Tuple[Tuple[int, ...], float]:
    """Largest value; among near-ties the lexicographically smallest row set."""
    top = values.max()
    best = None
    for index in np.flatnonzero(values >= top - TIE_SLACK):
        rows = tuple(int(r) for r in candidates[:, index])
        if best is None or rows < best:
            best = rows
    return best, float(top)


def worst_flat_source(h: FunctionTable, k: int, greedy: bool = False, restarts: Optional[int] = None,
                      seed: int = 0) -> Tuple[Tuple[int, ...], float, bool]:
    """The flat source of size 2^k with the largest bias: (S, bias, exact).

    Exact search scores every sign pattern sigma over Y: for each sigma the best
    S is the 2^k rows with the largest sum_y sigma_y (2h - 1). When Y is too
    wide and ``greedy`` is set, alternating ascent over (sigma, S) from random
    sigma gives a lower bound on the worst bias.
    """
    n, m = input_bits(h)
    if not 0 <= k <= n or int(k) != k:
        raise ValidationError(f"k must be an integer in 0..{n}, got {k}")
    size = 1 << k
    signed = _signed(h)
    limit = CONFIG['MAX_SIGN_PATTERN_BITS']

    if m <= limit:
        rows = _exact_worst_rows(signed, size, CONFIG['SCORE_CHUNK_CELLS'])
        return rows, flat_source_bias(h, rows), True

    if not greedy:
        raise CapExceededError("sign-pattern width m", m, limit, 'MAX_SIGN_PATTERN_BITS')
    restarts = setting('GREEDY_RESTARTS', restarts)
    rng = np.random.default_rng(seed)
    best: Optional[Tuple[Tuple[int, ...], float]] = None
    for _ in range(restarts):
        sigma = np.where(rng.random(h.y_size) < 0.5, -1.0, 1.0)
        visited = set()
        while True:
            rows = tuple(int(r) for r in _top_rows((signed @ sigma)[:, None], size)[:, 0])
            if rows in visited:
                break
            visited.add(rows)
            sigma = np.where(signed[list(rows)].sum(axis=0) >= 0, 1.0, -1.0)
        bias = flat_source_bias(h, rows)
        if best is None or bias > best[1] + TIE_SLACK or (abs(bias - best[1]) <= TIE_SLACK and rows < best[0]):
            best = (rows, bias)
    logger.info("greedy worst-source search (lower bound): k=%d bias=%.6f", k, best[1])
    return best[0], best[1], False


def audit(h: FunctionTable, k: int, eps: float, greedy: bool = False) -> ExtractorAudit:
    """Worst flat source at min-entropy k, classified strong iff bias < 2 eps."""
    if not 0.0 < eps < 0.5:
        raise ValidationError(f"eps must lie in (0, 1/2), got {eps}")
    n, m = input_bits(h)
    rows, bias, exact = worst_flat_source(h, k, greedy)
    return ExtractorAudit(n, m, k, eps, rows, bias, bias < 2 * eps, exact)


def extractor_threshold(h: FunctionTable, eps: float, greedy: bool = False) -> Optional[int]:
    """Smallest k at which h is a strong (k, eps) extractor, or None."""
    n, _ = input_bits(h)
    for k in range(n + 1):
        if audit(h, k, eps, greedy).is_strong:
            return k
    return None


@dataclass
class LargeRecReport:
    eps: float
    rec_value: float
    audits: List[ExtractorAudit] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(a.margin is not None and a.margin > 0 for a in self.audits if a.is_strong)

    def to_dict(self) -> Dict[str, Any]:
        return {"eps": self.eps, "rec_value": self.rec_value, "holds": self.holds,
                "audits": [a.to_dict() for a in self.audits]}


def largerec_check(h: FunctionTable, eps: float) -> LargeRecReport:
    """rec at error 1/2 - eps under the uniform product distribution against n - k.

    Every k at which h is a strong extractor must have rec > n - k. Audits at
    every k are listed; margins are filled in for the strong ones.
    """
    n, _ = input_bits(h)
    rec_value, _ = rec_exact(h, JointDistribution.uniform(h.x_size, h.y_size), 0.5 - eps)
    report = LargeRecReport(eps, rec_value)
    for k in range(n + 1):
        result = audit(h, k, eps)
        if result.is_strong:
            result = ExtractorAudit(result.n, result.m, k, eps, result.worst_set, result.bias, True,
                                    result.exact, rec_value, rec_value - (n - k))
        report.audits.append(result)
    logger.info("largerec: eps=%g rec=%.6f holds=%s", eps, rec_value, report.holds)
    return report


def extractor_gap_a(eps: float) -> float:
    """a(eps) = (1/4) (1/2 - eps)^3."""
    return 0.25 * (0.5 - eps) ** 3


def extractor_gap_b(eps: float) -> float:
    """b(eps) = eps (S(1/4 - eps/2) - S(1/8 - eps/4))."""
    return eps * (binary_entropy(0.25 - eps / 2) - binary_entropy(0.125 - eps / 4))


class SideInfoResult(NamedTuple):
    mi_bits: float
    dist: float
    a: float
    b: float
    k: int
    implication_ok: bool


def low_bits_leak(n: int, t: int) -> np.ndarray:
    """M = the t low-order bits of x."""
    if not 0 <= t <= n:
        raise ValidationError(f"leak width t must lie in 0..{n}, got {t}")
    return np.arange(1 << n) & ((1 << t) - 1)


def _implication(h: FunctionTable, eps: float, mi: float, dist: float) -> SideInfoResult:
    n, _ = input_bits(h)
    k = extractor_threshold(h, eps)
    if k is None:
        raise InfeasibleError(f"h is not a strong extractor at eps = {eps} for any k")
    a, b = extractor_gap_a(eps), extractor_gap_b(eps)
    ok = not dist > 1 - a or mi > b * (n - k)
    return SideInfoResult(mi, dist, a, b, k, ok)


def side_info_experiment(h: FunctionTable, eps: float, leak: Sequence[int]) -> SideInfoResult:
    """Classical side information M = leak(X) with X, Y uniform and independent.

    dist = ||h(X,Y) Y M - U (x) Y M||_1 = mean_y sum_m |sum_{x: leak(x)=m} 2^-n (-1)^h(x,y)|.
    The result records whether dist > 1 - a(eps) implies I(X:M) > b(eps)(n - k).
    """
    n, _ = input_bits(h)
    leak = np.asarray(leak, dtype=np.int64)
    if leak.shape != (h.x_size,) or leak.min() < 0:
        raise ValidationError(f"leak must map each of the {h.x_size} inputs to a label >= 0")
    labels, codes = np.unique(leak, return_inverse=True)
    joint = np.zeros((h.x_size, labels.size))
    joint[np.arange(h.x_size), codes] = 1.0 / h.x_size
    mi = mutual_information(JointDistribution(joint))

    parity = 1.0 - 2.0 * h.values
    grouped = np.zeros((labels.size, h.y_size))
    np.add.at(grouped, codes, parity / h.x_size)
    dist = float(np.abs(grouped).sum(axis=0).mean())
    return _implication(h, eps, mi, dist)


def side_info_quantum(h: FunctionTable, eps: float, states: Sequence[DensityMatrix]) -> SideInfoResult:
    """Quantum side information: M is rho_x for input x.

    I(X:M) is the Holevo quantity of the uniform ensemble and
    dist = mean_y || sum_x 2^-n (-1)^h(x,y) rho_x ||_1.
    """
    input_bits(h)
    if len(states) != h.x_size:
        raise ValidationError(f"need one state per input, got {len(states)} for {h.x_size}")
    ensemble = QuantumEnsemble(np.full(h.x_size, 1.0 / h.x_size), tuple(states))
    stack = np.array([s.entries for s in ensemble.states])
    parity = (1.0 - 2.0 * h.values) / h.x_size
    dist = float(np.mean([trace_norm(np.tensordot(parity[:, y], stack, axes=1)) for y in range(h.y_size)]))
    return _implication(h, eps, holevo_chi(ensemble), dist)
