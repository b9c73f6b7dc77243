#!/usr/bin/env python3
"""
Unit tests for greedy rejection sampling and Elias-gamma coding
"""

import math

import numpy as np
import pytest

from oneway_bounds.core.errors import SamplerError, ValidationError
from oneway_bounds.core.information import kl_divergence, l1_distance
from oneway_bounds.core.sampling import (GreedyRejectionSampler, elias_gamma_decode, elias_gamma_encode,
                                         encode_index, greedy_rejection_sample)


class TestSchedule:
    """Test the (C, s) schedule"""

    def test_identical_target_and_proposal(self):
        sampler = GreedyRejectionSampler([0.25, 0.75], [0.25, 0.75])
        c, s = sampler.schedule()
        assert c.tolist() == [0.0, 1.0]
        assert s.tolist() == [1.0, 0.0]
        assert sampler.terminal_round == 1

    def test_point_mass_halves_the_residual(self):
        sampler = GreedyRejectionSampler([1.0, 0.0], [0.5, 0.5])
        _, s = sampler.schedule()
        assert s[:4] == pytest.approx([1.0, 0.5, 0.25, 0.125])

    def test_index_distribution_is_geometric(self, test_utils):
        sampler = GreedyRejectionSampler([1.0, 0.0], [0.5, 0.5])
        probs = sampler.index_distribution()
        test_utils.assert_probability_vector(probs)
        assert probs[:3] == pytest.approx([0.5, 0.25, 0.125])
        mean = float(probs @ np.arange(1, probs.size + 1))
        assert mean == pytest.approx(2.0, abs=1e-9)

    def test_expected_code_length_against_divergence(self, factory):
        for _ in range(10):
            p, q = factory.target_and_proposal(8)
            kl = kl_divergence(p, q)
            length = GreedyRejectionSampler(p, q).expected_code_length()
            assert length <= kl + 2 * math.log2(kl + 2) + 12

    def test_support_violation(self):
        with pytest.raises(ValidationError, match="y = 1"):
            GreedyRejectionSampler([0.5, 0.5], [1.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError, match="outcomes"):
            GreedyRejectionSampler([1.0], [0.5, 0.5])

    def test_round_guard(self):
        sampler = GreedyRejectionSampler([1.0, 0.0], [0.5, 0.5], max_rounds=3)
        with pytest.raises(SamplerError):
            sampler.schedule()


class TestSampling:
    """Test exactness and determinism of the sampler"""

    def test_identical_accepts_first_round(self, rng):
        sampler = GreedyRejectionSampler([0.25, 0.75], [0.25, 0.75])
        indices, _ = sampler.sample_many(500, rng)
        assert np.all(indices == 1)

    def test_point_mass_always_outputs_its_point(self, rng):
        indices, samples = GreedyRejectionSampler([0.0, 1.0], [0.5, 0.5]).sample_many(2000, rng)
        assert np.all(samples == 1)
        assert indices.mean() == pytest.approx(2.0, abs=0.15)

    def test_empirical_distribution_matches_target(self, factory):
        rng = np.random.default_rng(3)
        for _ in range(3):
            p, q = factory.target_and_proposal(8)
            _, samples = GreedyRejectionSampler(p, q).sample_many(40000, rng)
            empirical = np.bincount(samples, minlength=8) / samples.size
            assert l1_distance(empirical, p) <= 0.03

    def test_samples_stay_in_target_support(self, factory, rng):
        p, q = factory.target_and_proposal(10)
        _, samples = GreedyRejectionSampler(p, q).sample_many(3000, rng)
        assert np.all(p[samples] > 0)

    def test_same_seed_same_stream(self, factory):
        p, q = factory.target_and_proposal(6)
        first = GreedyRejectionSampler(p, q).sample_many(200, np.random.default_rng(11))
        second = GreedyRejectionSampler(p, q).sample_many(200, np.random.default_rng(11))
        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])

    def test_single_draw(self, rng):
        index, sample = greedy_rejection_sample([0.5, 0.5], [0.5, 0.5], rng)
        assert index == 1
        assert sample in (0, 1)


class TestEliasGamma:
    """Test the Elias-gamma code"""

    @pytest.mark.parametrize("index,length", [(1, 1), (2, 3), (3, 3), (4, 5), (5, 5), (1024, 21)])
    def test_code_length(self, index, length):
        assert encode_index(index) == length
        assert len(elias_gamma_encode(index)) == length

    def test_codewords(self):
        assert elias_gamma_encode(1) == '1'
        assert elias_gamma_encode(5) == '00101'

    def test_decode_stream(self):
        stream = elias_gamma_encode(5) + elias_gamma_encode(1) + elias_gamma_encode(2)
        values = []
        while stream:
            value, used = elias_gamma_decode(stream)
            values.append(value)
            stream = stream[used:]
        assert values == [5, 1, 2]

    def test_prefix_free(self):
        words = [elias_gamma_encode(i) for i in range(1, 65)]
        for a in words:
            for b in words:
                assert a == b or not b.startswith(a)

    def test_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            encode_index(0)
        with pytest.raises(ValidationError):
            elias_gamma_encode(-3)

    def test_truncated_codeword(self):
        with pytest.raises(ValidationError, match="complete"):
            elias_gamma_decode('001')
