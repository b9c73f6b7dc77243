#!/usr/bin/env python3

"""
Greedy rejection sampling for correlation protocols, and the Elias-gamma
code used to send the accepted index.

Both parties read the same stream of proposals y_1, y_2, ... ~ q. Alice, who
knows the target p, announces the index of the first accepted proposal; Bob
reads y at that index. The state after round i is the scalar pair (C_i, s_i)
with p*_i(y) = min(p(y), q(y) C_i) already emitted and s_i = 1 - sum p*_i.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from .config import setting
from .errors import SamplerError, ValidationError
from .tables import MassFunction

logger = logging.getLogger(__name__)

_SCHEDULE_CHUNK = 256
_FIRST_BLOCK = 8


class GreedyRejectionSampler:
    """Exact sampler of ``target`` from shared proposals drawn from ``proposal``."""

    def __init__(self, target, proposal, floor: Optional[float] = None, max_rounds: Optional[int] = None):
        self.p = MassFunction.coerce(target).probs
        self.q = MassFunction.coerce(proposal).probs
        if self.p.shape != self.q.shape:
            raise ValidationError(f"target has {self.p.size} outcomes but proposal has {self.q.size}")
        uncovered = np.flatnonzero((self.p > 0) & (self.q <= 0))
        if uncovered.size:
            raise ValidationError(f"target puts mass on y = {int(uncovered[0])} where the proposal has none")
        self.floor = setting('SAMPLER_FLOOR', floor)
        self.max_rounds = setting('SAMPLER_MAX_ROUNDS', max_rounds)

        covered = self.q > 0
        ratios = np.zeros_like(self.p)
        ratios[covered] = self.p[covered] / self.q[covered]
        order = np.argsort(ratios[covered], kind='stable')
        self._ratios = ratios[covered][order]
        self._cum_p = np.concatenate(([0.0], np.cumsum(self.p[covered][order])))
        q_sorted = self.q[covered][order]
        self._tail_q = np.concatenate((np.cumsum(q_sorted[::-1])[::-1], [0.0]))
        self._cum_q = np.cumsum(self.q)

        self._c: List[float] = [0.0]
        self._s: List[float] = [1.0]
        self._done = self._s[-1] <= self.floor

    def _emitted(self, c: float) -> float:
        """sum_y min(p(y), q(y) c), piecewise linear in c."""
        k = int(np.searchsorted(self._ratios, c, side='right'))
        return float(self._cum_p[k] + c * self._tail_q[k])

    def _extend(self, rounds: int) -> None:
        while not self._done and len(self._s) < rounds:
            if len(self._s) > self.max_rounds:
                raise SamplerError(f"schedule passed {self.max_rounds} rounds with residual {self._s[-1]:.3g}")
            for _ in range(min(_SCHEDULE_CHUNK, self.max_rounds + 1 - len(self._s))):
                c = self._c[-1] + self._s[-1]
                s = max(0.0, 1.0 - self._emitted(c))
                self._c.append(c)
                self._s.append(s)
                if s <= self.floor:
                    self._done = True
                    break

    def schedule(self) -> Tuple[np.ndarray, np.ndarray]:
        """The full (C_i, s_i) sequence up to the round where s falls below the floor."""
        self._extend(self.max_rounds + 2)
        return np.array(self._c), np.array(self._s)

    @property
    def terminal_round(self) -> Optional[int]:
        """Round at which the residual target is drawn directly, once known."""
        return len(self._s) - 1 if self._done else None

    def index_distribution(self) -> np.ndarray:
        """Pr[accepted index = i] for i = 1, 2, ...; the last entry absorbs the residual."""
        _, s = self.schedule()
        probs = s[:-1] - s[1:]
        probs = np.append(probs, s[-1])
        return np.clip(probs, 0.0, None)

    def expected_code_length(self) -> float:
        """Mean Elias-gamma length of the accepted index."""
        probs = self.index_distribution()
        lengths = 2 * np.floor(np.log2(np.arange(1, probs.size + 1))) + 1
        return float(probs @ lengths)

    def _acceptance(self, rounds: np.ndarray, ys: np.ndarray) -> np.ndarray:
        c = np.asarray(self._c)[rounds]
        s = np.asarray(self._s)[rounds]
        p, q = self.p[ys], self.q[ys]
        gained = np.minimum(p, q * (c + s)) - np.minimum(p, q * c)
        return gained / (q * s)

    def _residual_draw(self, uniforms: np.ndarray) -> np.ndarray:
        c = self._c[-1]
        residual = np.maximum(self.p - np.minimum(self.p, self.q * c), 0.0)
        if residual.sum() <= 0:
            residual = self.p
        cum = np.cumsum(residual / residual.sum())
        return np.minimum(np.searchsorted(cum, uniforms, side='right'), self.p.size - 1)

    def _propose(self, uniforms: np.ndarray) -> np.ndarray:
        return np.minimum(np.searchsorted(self._cum_q, uniforms * self._cum_q[-1], side='right'),
                          self.q.size - 1)

    def sample(self, rng: np.random.Generator) -> Tuple[int, int]:
        """One run: (1-based accepted index, sample)."""
        index, sample = self.sample_many(1, rng)
        return int(index[0]), int(sample[0])

    def sample_many(self, count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """``count`` independent runs, drawn in blocks of rounds per pending run."""
        indices = np.zeros(count, dtype=np.int64)
        samples = np.zeros(count, dtype=np.int64)
        pending = np.arange(count)
        start, block = 0, _FIRST_BLOCK
        while pending.size:
            self._extend(start + block + 1)
            terminal = self.terminal_round
            if terminal is not None and start >= terminal:
                indices[pending] = terminal + 1
                samples[pending] = self._residual_draw(rng.random(pending.size))
                break
            width = block if terminal is None else min(block, terminal - start)
            if start + width > self.max_rounds:
                raise SamplerError(f"no acceptance within {self.max_rounds} rounds")
            rounds = np.arange(start, start + width)
            ys = self._propose(rng.random((pending.size, width)))
            accept = rng.random((pending.size, width)) < self._acceptance(rounds[None, :], ys)
            hit = accept.any(axis=1)
            first = np.argmax(accept, axis=1)
            done = pending[hit]
            indices[done] = start + first[hit] + 1
            samples[done] = ys[hit, first[hit]]
            pending = pending[~hit]
            start += width
            block *= 2
        return indices, samples


def greedy_rejection_sample(target, proposal, rng: np.random.Generator) -> Tuple[int, int]:
    """(accepted index, sample) for one run of the greedy rejection sampler."""
    return GreedyRejectionSampler(target, proposal).sample(rng)


def encode_index(index: int) -> int:
    """Elias-gamma code length of a positive integer: 2 floor(log2 i) + 1."""
    if index < 1:
        raise ValidationError(f"Elias-gamma codes positive integers, got {index}")
    return 2 * (int(index).bit_length() - 1) + 1


def elias_gamma_encode(index: int) -> str:
    if index < 1:
        raise ValidationError(f"Elias-gamma codes positive integers, got {index}")
    binary = bin(int(index))[2:]
    return '0' * (len(binary) - 1) + binary


def elias_gamma_decode(bits: str) -> Tuple[int, int]:
    """Decode one codeword from the front of ``bits``: (value, bits consumed)."""
    zeros = len(bits) - len(bits.lstrip('0'))
    end = 2 * zeros + 1
    if end > len(bits) or set(bits[:end]) - {'0', '1'}:
        raise ValidationError(f"'{bits}' does not start with a complete Elias-gamma codeword")
    return int(bits[zeros:end], 2), end
