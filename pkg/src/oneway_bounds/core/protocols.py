#!/usr/bin/env python3

"""
One-way protocols: the learning protocols for boolean and non-boolean f,
sample-size and cost formulas, m calibration, and a brute-force oracle for
the optimal deterministic one-way distributional complexity.

Protocol outline for input (x, y) ~ mu:
  1. Alice and Bob share proposal streams from the Y-marginal of mu.
  2. Alice runs the correlation sampler to make y_1..y_m ~ mu_x appear on
     both sides, sending M1 (the accepted indices, Elias-gamma coded).
  3. Alice sends M2 = f(x, y_1..y_m).
  4. Bob picks x' from the rows consistent with (or closest to) M2 and
     answers f(x', y).
"""

import math
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import CONFIG, setting
from .dimensions import pseudo_dimension, vc_dimension
from .errors import CapExceededError, InfeasibleError, ValidationError
from .information import mutual_information
from .rectangles import FEASIBILITY_SLACK, correctness_weights
from .sampling import GreedyRejectionSampler, encode_index
from .tables import FunctionTable, JointDistribution

logger = logging.getLogger(__name__)

ROUNDING_SLACK = 1e-9
MAX_CALIBRATION_M = 1 << 16


class SamplingMode(str, Enum):
    INDEPENDENT = "independent"
    JOINT = "joint"


@dataclass(frozen=True)
class ProtocolParams:
    """Knobs of a protocol run; c0, l_const and kappa stand in for unknown universal constants."""

    eps: float
    m: Optional[int] = None
    c0: float = 1.0
    l_const: float = 16.0
    truncate: bool = False
    mode: SamplingMode = SamplingMode.INDEPENDENT
    trials: int = 1000
    seed: int = 0
    threads: int = 1
    dimension: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.eps < 0.5:
            raise ValidationError(f"eps must lie in (0, 1/2), got {self.eps}")
        if self.m is not None and self.m < 1:
            raise ValidationError(f"m must be at least 1, got {self.m}")
        if self.trials < 1:
            raise ValidationError(f"trials must be at least 1, got {self.trials}")
        if self.threads < 1:
            raise ValidationError(f"threads must be at least 1, got {self.threads}")
        if self.dimension is not None and self.dimension < 0:
            raise ValidationError(f"dimension must be non-negative, got {self.dimension}")
        object.__setattr__(self, 'mode', SamplingMode(self.mode))


@dataclass(frozen=True)
class TranscriptStats:
    trials: int
    m: int
    mean_m1_bits: float
    max_m1_bits: int
    m2_bits: int
    error_rate: float
    abort_rate: float
    mi_bits: float
    dimension: Optional[int]
    threshold: Optional[float] = None
    deterministic_bits: float = 0.0
    mode: str = SamplingMode.INDEPENDENT.value
    truncate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class OptimalProtocol(NamedTuple):
    bits: int
    partition: List[List[int]]
    g: np.ndarray
    error: float


def sample_size_boolean(d: int, eps: float, delta: float, c0: float = 1.0) -> int:
    """m0(d, eps, delta) = c0 ((1/eps) log(1/delta) + (d/eps) log(1/eps))."""
    if not 0.0 < eps < 1.0 or not 0.0 < delta <= 1.0:
        raise ValidationError(f"need eps in (0, 1) and delta in (0, 1], got {eps}, {delta}")
    value = c0 * (math.log2(1 / delta) / eps + d * math.log2(1 / eps) / eps)
    return max(0, math.ceil(value - ROUNDING_SLACK))


def sample_size_nonboolean(d: int, eps: float, delta: float, c0: float = 1.0) -> int:
    """c0 ((1/eps^4) log(1/delta) + (d/eps^4) log^2(d/eps)); the d-term vanishes at d = 0."""
    if not 0.0 < eps < 1.0 or not 0.0 < delta <= 1.0:
        raise ValidationError(f"need eps in (0, 1) and delta in (0, 1], got {eps}, {delta}")
    dim_term = d * math.log2(d / eps) ** 2 / eps ** 4 if d > 0 else 0.0
    value = c0 * (math.log2(1 / delta) / eps ** 4 + dim_term)
    return max(0, math.ceil(value - ROUNDING_SLACK))


def correlation_cost(m: int, mi: float, l_const: float) -> float:
    """c = 4 m I(X:Y) + l, the expected M1 length for one sampler call on mu_x^m."""
    return 4 * m * mi + l_const


def derandomized_cost(c: float, m: int, eps: float, k: int = 2) -> float:
    """Deterministic one-way cost after truncation: 2c/eps + m, or c/eps + m ceil(log2 k)."""
    if k == 2:
        return 2 * c / eps + m
    return c / eps + m * math.ceil(math.log2(k))


def boolean_upper_bound(vc: int, mi: float, eps: float, kappa: float = 1.0) -> float:
    return kappa * (1 / eps) * math.log2(1 / eps) * (mi / eps + 1) * vc


def nonboolean_upper_bound(d: int, k: int, mi: float, eps: float, kappa: float = 1.0) -> float:
    dim_term = d * math.log2(d * k / eps) ** 2 if d > 0 else 0.0
    return kappa * (k ** 4 / eps ** 5) * (math.log2(1 / eps) + dim_term) * (mi + math.log2(k))


def _check_inputs(f: FunctionTable, mu: JointDistribution) -> None:
    if f.values.shape != mu.p.shape:
        raise ValidationError(f"function is {f.values.shape} but distribution is {mu.p.shape}")
    if not f.is_total:
        raise ValidationError("protocols need a total function")


class _SamplerBank:
    """Correlation samplers per Alice input, built on first use and shared across trials."""

    def __init__(self, mu: JointDistribution, copies: int, mode: SamplingMode):
        self.mu = mu
        self.copies = copies
        self.mode = mode
        self.proposal = mu.marginal_y().probs
        self._cond = mu.conditional_matrix()
        if mode is SamplingMode.JOINT:
            size = mu.y_size ** copies
            limit = CONFIG['MAX_Y_SIZE']
            if size > limit:
                raise CapExceededError("joint-mode sample space", size, limit, 'MAX_Y_SIZE')
            self.proposal = self._power(self.proposal)
        self._samplers: Dict[int, GreedyRejectionSampler] = {}
        self._lock = threading.Lock()

    def _power(self, probs: np.ndarray) -> np.ndarray:
        out = probs
        for _ in range(self.copies - 1):
            out = np.outer(out, probs).ravel()
        return out

    def get(self, x: int) -> GreedyRejectionSampler:
        with self._lock:
            sampler = self._samplers.get(x)
            if sampler is None:
                target = self._cond[x]
                if self.mode is SamplingMode.JOINT:
                    target = self._power(target)
                sampler = GreedyRejectionSampler(target / target.sum(), self.proposal)
                sampler.schedule()
                self._samplers[x] = sampler
            return sampler

    def draw(self, x: int, rng: np.random.Generator) -> Tuple[np.ndarray, int]:
        """y_1..y_m ~ mu_x and the M1 length in bits."""
        sampler = self.get(x)
        if self.mode is SamplingMode.INDEPENDENT:
            indices, ys = sampler.sample_many(self.copies, rng)
            return ys, int(sum(encode_index(int(i)) for i in indices))
        index, joint = sampler.sample(rng)
        digits = [(joint // self.mu.y_size ** (self.copies - 1 - i)) % self.mu.y_size
                  for i in range(self.copies)]
        return np.array(digits, dtype=np.int64), encode_index(index)


def _draw_inputs(cum: np.ndarray, y_size: int, rng: np.random.Generator) -> Tuple[int, int]:
    flat = min(int(np.searchsorted(cum, rng.random() * cum[-1], side='right')), cum.size - 1)
    return divmod(flat, y_size)


def _run_trials(f: FunctionTable, mu: JointDistribution, params: ProtocolParams, m: int,
                threshold: Optional[float], learner) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    bank = _SamplerBank(mu, m, params.mode)
    cum = np.cumsum(mu.p.ravel())
    m1 = np.zeros(params.trials, dtype=np.int64)
    wrong = np.zeros(params.trials, dtype=bool)
    aborted = np.zeros(params.trials, dtype=bool)

    def run_range(start: int, stop: int) -> None:
        for trial in range(start, stop):
            rng = np.random.default_rng([params.seed, trial])
            x, y = _draw_inputs(cum, mu.y_size, rng)
            ys, bits = bank.draw(x, rng)
            m1[trial] = bits
            if threshold is not None and bits > threshold:
                aborted[trial] = True
                answer = 0
            else:
                answer = int(f.values[learner(x, ys), y])
            wrong[trial] = answer != f.values[x, y]

    edges = np.linspace(0, params.trials, params.threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=params.threads) as pool:
        for future in [pool.submit(run_range, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]:
            future.result()
    return m1, wrong, aborted


def _stats(params: ProtocolParams, m: int, m2: int, mi: float, dimension: Optional[int],
           threshold: Optional[float], deterministic: float, m1: np.ndarray, wrong: np.ndarray, aborted: np.ndarray) -> TranscriptStats:
    return TranscriptStats(
        trials=params.trials,
        m=m,
        mean_m1_bits=float(m1.sum()) / params.trials,
        max_m1_bits=int(m1.max()),
        m2_bits=m2,
        error_rate=float(wrong.sum()) / params.trials,
        abort_rate=float(aborted.sum()) / params.trials,
        mi_bits=mi,
        dimension=dimension,
        threshold=threshold,
        deterministic_bits=deterministic,
        mode=params.mode.value,
        truncate=params.truncate,
    )


def _search_dimension(f: FunctionTable, params: ProtocolParams, search) -> Optional[int]:
    """The dimension to report: given, searched, or None when m is fixed and the search hits a cap."""
    if params.dimension is not None:
        return params.dimension
    try:
        return search(f)
    except CapExceededError as error:
        if params.m is None:
            raise
        logger.info("dimension not reported, m is fixed: %s", error)
        return None


def _vc(f: FunctionTable) -> int:
    return vc_dimension(f)[0]


def _pdim_for(eps: float):
    def search(f: FunctionTable) -> int:
        return pseudo_dimension(f, nonboolean_gamma(eps, f.z_size))[0]
    return search


def resolve_boolean_m(f: FunctionTable, params: ProtocolParams) -> Tuple[int, Optional[int]]:
    """(m, VC dimension) with m = m0(VC(f), eps/4, eps/4) unless params.m is set."""
    d = _search_dimension(f, params, _vc)
    if params.m is not None:
        return params.m, d
    return max(1, sample_size_boolean(d, params.eps / 4, params.eps / 4, params.c0)), d


def nonboolean_gamma(eps: float, k: int) -> float:
    return eps * eps / (576 * k * k)


def resolve_nonboolean_m(f: FunctionTable, params: ProtocolParams) -> Tuple[int, Optional[int]]:
    """(m, pseudo-dimension) with m = m0(d, eps/k, eps) unless params.m is set."""
    d = _search_dimension(f, params, _pdim_for(params.eps))
    if params.m is not None:
        return params.m, d
    return max(1, sample_size_nonboolean(d, params.eps / f.z_size, params.eps, params.c0)), d


def run_boolean_protocol(f: FunctionTable, mu: JointDistribution, params: ProtocolParams) -> TranscriptStats:
    """Monte Carlo run of the boolean learning protocol.

    Bob answers with the first x' in index order whose row agrees with M2 on
    the shared samples. With ``truncate`` the protocol aborts and outputs 0
    when |M1| exceeds 2c/eps.
    """
    _check_inputs(f, mu)
    if not f.is_boolean:
        raise ValidationError(f"boolean protocol needs z_size = 2, got {f.z_size}")
    m, d = resolve_boolean_m(f, params)
    mi = mutual_information(mu)
    c = correlation_cost(m, mi, params.l_const)
    threshold = 2 * c / params.eps if params.truncate else None
    logger.info("boolean protocol: m=%d, VC=%s, I=%.6f, mode=%s, %d trials",
                m, d, mi, params.mode.value, params.trials)

    def learner(x: int, ys: np.ndarray) -> int:
        consistent = np.all(f.values[:, ys] == f.values[x, ys], axis=1)
        return int(np.argmax(consistent))

    m1, wrong, aborted = _run_trials(f, mu, params, m, threshold, learner)
    return _stats(params, m, m, mi, d, threshold, derandomized_cost(c, m, params.eps), m1, wrong, aborted)


def run_nonboolean_protocol(f: FunctionTable, mu: JointDistribution, params: ProtocolParams) -> TranscriptStats:
    """Monte Carlo run of the non-boolean learning protocol.

    M2 carries each f(x, y_i) in ceil(log2 k) bits. Bob picks the row with the
    smallest empirical L1 loss against M2 on the scaled values (ties to the
    smallest index). Truncation aborts when |M1| exceeds c/eps.
    """
    _check_inputs(f, mu)
    k = f.z_size
    m, d = resolve_nonboolean_m(f, params)
    mi = mutual_information(mu)
    c = correlation_cost(m, mi, params.l_const)
    threshold = c / params.eps if params.truncate else None
    m2 = m * math.ceil(math.log2(k))
    scaled = f.scaled()
    logger.info("non-boolean protocol: k=%d, m=%d, pdim=%s, I=%.6f, %d trials", k, m, d, mi, params.trials)

    def learner(x: int, ys: np.ndarray) -> int:
        loss = np.abs(scaled[:, ys] - scaled[x, ys]).sum(axis=1)
        return int(np.argmin(loss))

    m1, wrong, aborted = _run_trials(f, mu, params, m, threshold, learner)
    return _stats(params, m, m2, mi, d, threshold, derandomized_cost(c, m, params.eps, k), m1, wrong, aborted)


def run_protocol(f: FunctionTable, mu: JointDistribution, params: ProtocolParams,
                 nonboolean: bool = False) -> TranscriptStats:
    if nonboolean or not f.is_boolean:
        return run_nonboolean_protocol(f, mu, params)
    return run_boolean_protocol(f, mu, params)


def calibrate(f: FunctionTable, mu: JointDistribution, params: ProtocolParams,
              target: Optional[float] = None, nonboolean: bool = False,
              max_m: int = MAX_CALIBRATION_M) -> Tuple[int, TranscriptStats]:
    """Smallest m whose empirical error meets ``target`` (default eps).

    m doubles from 1 until the target is met, then bisects between the last
    failing and first passing values. All runs share the seed. The VC or
    pseudo-dimension is searched once, up front, and reported as none when
    the search hits a cap.
    """
    target = params.eps if target is None else target
    if params.dimension is None:
        search = _pdim_for(params.eps) if nonboolean or not f.is_boolean else _vc
        d = _search_dimension(f, replace(params, m=1), search)
        if d is not None:
            params = replace(params, dimension=d)

    def trial(m: int) -> TranscriptStats:
        stats = run_protocol(f, mu, replace(params, m=m), nonboolean)
        logger.info("calibrate: m=%d error=%.4f (target %.4f)", m, stats.error_rate, target)
        return stats

    failing, passing, passing_stats = 0, 1, trial(1)
    while passing_stats.error_rate > target:
        failing, passing = passing, passing * 2
        if passing > max_m:
            raise InfeasibleError(f"error target {target} not met for any m <= {max_m}")
        passing_stats = trial(passing)
    while passing - failing > 1:
        middle = (failing + passing) // 2
        stats = trial(middle)
        if stats.error_rate <= target:
            passing, passing_stats = middle, stats
        else:
            failing = middle
    return passing, passing_stats


def optimal_oneway(f: FunctionTable, mu: JointDistribution, eps: float,
                   max_rows: Optional[int] = None) -> OptimalProtocol:
    """Least ceil(log2 B) over partitions of X into B blocks with mu-error <= eps.

    Bob answers each (block, y) with the heaviest correct output (undefined
    cells count as correct). Block counts B = 1, 2, 4, ... are tried in turn;
    each is a depth-first search over restricted-growth strings, pruned on
    the error so far, which only grows as rows join blocks.
    """
    max_rows = setting('MAX_PARTITION_ROWS', max_rows)
    if f.x_size > max_rows:
        raise CapExceededError("partition enumeration rows", f.x_size, max_rows, 'MAX_PARTITION_ROWS')
    if not 0.0 <= eps < 1.0:
        raise ValidationError(f"eps must lie in [0, 1), got {eps}")
    weights = correctness_weights(f, mu)
    mass = mu.p
    limit = eps + FEASIBILITY_SLACK

    def wrong_of(tally: np.ndarray, block_mass: np.ndarray) -> float:
        return float((block_mass - tally.max(axis=1)).sum())

    def search(blocks: int) -> Optional[List[int]]:
        tallies = np.zeros((blocks,) + weights.shape[1:])
        masses = np.zeros((blocks, f.y_size))
        wrongs = np.zeros(blocks)
        labels = [0] * f.x_size

        def place(row: int, used: int, total: float) -> bool:
            if row == f.x_size:
                return True
            for block in range(min(used + 1, blocks)):
                tally = tallies[block] + weights[row]
                block_mass = masses[block] + mass[row]
                new_wrong = wrong_of(tally, block_mass)
                new_total = total - wrongs[block] + new_wrong
                if new_total > limit:
                    continue
                saved = tallies[block].copy(), masses[block].copy(), wrongs[block]
                tallies[block], masses[block], wrongs[block] = tally, block_mass, new_wrong
                labels[row] = block
                if place(row + 1, max(used, block + 1), new_total):
                    return True
                tallies[block], masses[block], wrongs[block] = saved
            return False

        return labels if place(0, 0, 0.0) else None

    bits = 0
    while True:
        blocks = 1 << bits
        labels = search(min(blocks, f.x_size))
        if labels is not None:
            break
        if blocks >= f.x_size:
            floor = float((mass.sum(axis=1) - weights.max(axis=2).sum(axis=1)).sum())
            raise InfeasibleError(f"eps = {eps} is below {max(0.0, floor):.10g}, "
                                  f"the least error even with full discrimination of X")
        bits += 1

    partition = [[x for x in range(f.x_size) if labels[x] == b] for b in range(max(labels) + 1)]
    g = np.array([np.argmax(weights[rows].sum(axis=0), axis=1) for rows in partition], dtype=np.int64)
    error = float(sum((mass[rows].sum(axis=0) - weights[rows].sum(axis=0).max(axis=1)).sum()
                      for rows in partition))
    logger.debug("optimal one-way: %d bits, %d blocks, error %.6g", bits, len(partition), error)
    return OptimalProtocol(bits, partition, g, max(0.0, error))


def distributional_lower_envelope(f: FunctionTable, distributions: Sequence[JointDistribution],
                                  eps: float) -> Tuple[int, int]:
    """max over the family of D^{1,mu}_eps(f): (bits, index of a maximizing distribution)."""
    if not distributions:
        raise ValidationError("need at least one distribution")
    best_bits, best_index = -1, 0
    for index, mu in enumerate(distributions):
        bits = optimal_oneway(f, mu, eps).bits
        if bits > best_bits:
            best_bits, best_index = bits, index
    return best_bits, best_index
