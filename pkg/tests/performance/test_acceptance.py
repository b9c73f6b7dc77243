#!/usr/bin/env python3
"""
Acceptance-scale checks for oneway-bounds
Randomized property suites and Monte Carlo protocol runs on the desk-scale benchmarks
"""

import itertools
import os

import numpy as np
import pytest

from oneway_bounds.cli.protocol import COLUMNS
from oneway_bounds.cli.reports import write_csv
from oneway_bounds.core.dimensions import pseudo_dimension, sauer_bound, vc_dimension
from oneway_bounds.core.extractors import (flat_source_bias, largerec_check, low_bits_leak, side_info_experiment,
                                           worst_flat_source)
from oneway_bounds.core.information import infadd_expand, kl_divergence, l1_distance, mass_entropy, mutual_information
from oneway_bounds.core.protocols import (ProtocolParams, calibrate, optimal_oneway, run_boolean_protocol,
                                          run_nonboolean_protocol)
from oneway_bounds.core.rectangles import rec_exact, rec_greedy
from oneway_bounds.core.sampling import GreedyRejectionSampler
from oneway_bounds.core.suites import run_suite
from oneway_bounds.core.tables import FunctionTable, JointDistribution, make_benchmark, make_copy_distribution
from tests.fixtures.test_data_factory import Scenario, TableSize

EPS = 0.2
CALIBRATION_TRIALS = 2000
PROTOCOL_TRIALS = 10_000
DISTRIBUTIONS = {
    'product': lambda: JointDistribution.uniform(256, 256),
    'correlated': lambda: make_copy_distribution(256, 0.5),
}


class TestDimensionAcceptance:
    """VC and pseudo-dimension on the benchmarks and on random tables"""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_greater_than_has_vc_one(self, n):
        assert vc_dimension(make_benchmark('gt', n))[0] == 1

    @pytest.mark.parametrize("n", [2, 3])
    def test_inner_product_has_vc_n(self, n):
        assert vc_dimension(make_benchmark('ip', n))[0] == n

    def test_pseudo_dimension_matches_vc_on_all_2x2(self):
        for cells in itertools.product([0, 1], repeat=4):
            table = FunctionTable(np.array(cells).reshape(2, 2))
            assert pseudo_dimension(table, 0.2)[0] == vc_dimension(table)[0]

    def test_pseudo_dimension_matches_vc_on_random_4x4(self, factory):
        for _ in range(40):
            table = factory.table(4, 4)
            assert pseudo_dimension(table, 0.2)[0] == vc_dimension(table)[0]

    def test_sauer_suite(self, factory):
        violations = 0
        for _ in range(200):
            table = factory.boolean_table(TableSize.MEDIUM)
            d, _ = vc_dimension(table)
            if table.distinct_rows().shape[0] > sauer_bound(table.y_size, d):
                violations += 1
        assert violations == 0


class TestInformationAcceptance:
    """Fano, small-distance entropy facts, non-negativity and information additivity"""

    def test_fano_suite(self):
        assert run_suite('fano', trials=1000, seed=11).violations == 0

    def test_ssmall_grid(self):
        assert run_suite('ssmall').passed

    def test_mutual_information_is_nonnegative(self, factory):
        worst = min(
            mass_entropy(p.sum(axis=1)) + mass_entropy(p.sum(axis=0)) - mass_entropy(p)
            for p in (factory.joint(3, 4, Scenario.SPARSE).p for _ in range(1000))
        )
        assert worst >= -1e-9

    def test_information_additivity(self, factory):
        for _ in range(100):
            mu = factory.joint(3, 3)
            for copies in (1, 2, 3):
                assert mutual_information(infadd_expand(mu, copies)) <= copies * mutual_information(mu) + 1e-9


class TestSamplerAcceptance:
    """Exactness and code length of the greedy rejection sampler"""

    def test_empirical_distribution_matches_target(self, factory):
        rng = np.random.default_rng(5)
        draws = 100_000
        for _ in range(20):
            p, q = factory.target_and_proposal(8)
            _, samples = GreedyRejectionSampler(p, q).sample_many(draws, rng)
            empirical = np.bincount(samples, minlength=p.size) / draws
            assert l1_distance(empirical, p) <= 0.02

    def test_code_length_tracks_relative_entropy(self, factory):
        for _ in range(20):
            p, q = factory.target_and_proposal(8)
            kl = kl_divergence(p, q)
            assert GreedyRejectionSampler(p, q).expected_code_length() <= kl + 2 * np.log2(kl + 2) + 12


class TestBooleanProtocolAcceptance:
    """The boolean learning protocol on GT_8 with m from calibration"""

    @pytest.fixture(scope='class')
    def gt8(self):
        return make_benchmark('gt', 8)

    @pytest.fixture(scope='class')
    def calibrated(self, gt8):
        """(m, stats) per distribution, each calibrated once"""
        cache = {}

        def lookup(name):
            if name not in cache:
                params = ProtocolParams(eps=EPS, trials=CALIBRATION_TRIALS, seed=1)
                cache[name] = calibrate(gt8, DISTRIBUTIONS[name](), params)
            return cache[name]
        return lookup

    @pytest.mark.parametrize("name", ["product", "correlated"])
    def test_error_and_message_length(self, gt8, calibrated, name, test_utils):
        m, _ = calibrated(name)
        params = ProtocolParams(eps=EPS, m=m, trials=PROTOCOL_TRIALS, seed=7)
        stats = run_boolean_protocol(gt8, DISTRIBUTIONS[name](), params)
        assert stats.error_rate <= EPS + test_utils.binomial_margin(EPS, PROTOCOL_TRIALS)
        if name == 'product':
            assert stats.mi_bits == pytest.approx(0.0, abs=1e-12)
            assert stats.mean_m1_bits <= m * params.l_const
        else:
            assert stats.mi_bits > 0
            assert stats.mean_m1_bits <= 4 * m * stats.mi_bits + m * params.l_const

    def test_truncated_runs_rarely_abort(self, gt8, calibrated, test_utils):
        m, _ = calibrated('correlated')
        params = ProtocolParams(eps=EPS, m=m, trials=PROTOCOL_TRIALS, seed=8, truncate=True)
        stats = run_boolean_protocol(gt8, DISTRIBUTIONS['correlated'](), params)
        assert stats.threshold is not None
        assert stats.abort_rate <= EPS / 2 + test_utils.binomial_margin(EPS / 2, PROTOCOL_TRIALS)

    def test_calibrated_m_is_the_smallest(self, gt8, calibrated):
        m, stats = calibrated('product')
        assert stats.m == m
        assert stats.error_rate <= EPS
        if m > 1:
            smaller = run_boolean_protocol(gt8, DISTRIBUTIONS['product'](), ProtocolParams(
                eps=EPS, m=m - 1, trials=CALIBRATION_TRIALS, seed=1))
            assert smaller.error_rate > EPS


class TestNonBooleanProtocolAcceptance:
    """The non-boolean protocol on a random 16 x 16 table with four outputs"""

    def test_error_and_second_message(self, factory, test_utils):
        table = factory.table(16, 16, z_size=4)
        mu = JointDistribution.uniform(16, 16)
        eps = 0.1
        m, calibration = calibrate(table, mu, ProtocolParams(eps=eps, trials=CALIBRATION_TRIALS, seed=4))
        assert calibration.m == m
        assert calibration.dimension is not None

        params = ProtocolParams(eps=eps, m=m, trials=CALIBRATION_TRIALS, seed=5, dimension=calibration.dimension)
        stats = run_nonboolean_protocol(table, mu, params)
        assert stats.error_rate <= 3 * eps + test_utils.binomial_margin(3 * eps, CALIBRATION_TRIALS)
        assert stats.m2_bits == 2 * m


class TestExactOracles:
    """Optimal one-way costs and the rectangle bound"""

    def test_optimal_oneway_fixtures(self, xor_table, uniform_2x2, gt2_table, uniform_4x4):
        assert optimal_oneway(xor_table, uniform_2x2, 0.0).bits == 1
        assert optimal_oneway(gt2_table, uniform_4x4, 0.0).bits == 2
        y_only = FunctionTable(np.tile([1, 0, 1, 1], (4, 1)))
        assert optimal_oneway(y_only, uniform_4x4, 0.0).bits == 0

    def test_xor_rectangle_bound(self, xor_table, uniform_2x2):
        assert rec_exact(xor_table, uniform_2x2, 0.1)[0] == 1.0

    def test_rectangle_bound_properties(self, factory):
        for table, mu in factory.instances(30, TableSize.SMALL, Scenario.PRODUCT):
            previous = np.inf
            for eps in (0.0, 0.1, 0.2, 0.3, 0.45):
                value, cert = rec_exact(table, mu, eps)
                assert cert.verify(table, mu, eps)
                assert value <= previous + 1e-9
                previous = value
                greedy = rec_greedy(table, mu, eps)
                assert greedy.verify(table, mu, eps)
                assert greedy.value >= value - 1e-9


class TestQuantumAcceptance:
    """Holevo, Helstrom and the binary-measurement information bound"""

    @pytest.mark.parametrize("suite,trials", [("holevo", 500), ("largeinf", 500), ("helstrom", 25)])
    def test_suite_is_clean(self, suite, trials):
        report = run_suite(suite, trials=trials, seed=21)
        assert report.violations == 0
        assert report.passed


class TestExtractorAcceptance:
    """Flat-source audits, the rectangle link and side information on IP_4"""

    def test_worst_source_matches_brute_force(self, factory):
        for n, m in itertools.product(range(1, 4), range(1, 3)):
            h = factory.table(1 << n, 1 << m)
            for k in range(n + 1):
                _, bias, _ = worst_flat_source(h, k)
                brute = max(flat_source_bias(h, rows) for rows in itertools.combinations(range(1 << n), 1 << k))
                assert bias == pytest.approx(brute, abs=1e-12)

    def test_largerec_on_inner_product(self):
        assert largerec_check(make_benchmark('ip', 4), EPS).holds

    def test_largerec_on_random_functions(self, factory):
        for _ in range(10):
            assert largerec_check(factory.table(16, 8), EPS).holds

    def test_leak_sweep(self):
        h = make_benchmark('ip', 4)
        results = [side_info_experiment(h, EPS, low_bits_leak(4, t)) for t in range(5)]
        assert all(r.implication_ok for r in results)
        assert results[0].mi_bits == pytest.approx(0.0, abs=1e-12)
        assert results[4].mi_bits == pytest.approx(4.0)


class TestReproducibility:
    """Same seed, same bytes"""

    def test_protocol_csv_is_byte_identical(self, temp_dir):
        gt4 = make_benchmark('gt', 4)
        mu = make_copy_distribution(16, 0.5)
        contents = []
        for run, threads in enumerate((1, 4)):
            params = ProtocolParams(eps=EPS, m=12, trials=300, seed=9, threads=threads, dimension=1)
            stats = run_boolean_protocol(gt4, mu, params)
            row = {'fn': 'gt4.json', 'dist': 'corr.json', 'eps': EPS, 'm': stats.m, 'mode': stats.mode,
                   'truncate': stats.truncate, 'mean_m1_bits': stats.mean_m1_bits,
                   'max_m1_bits': stats.max_m1_bits, 'm2_bits': stats.m2_bits, 'error_rate': stats.error_rate,
                   'abort_rate': stats.abort_rate, 'mi_bits': stats.mi_bits, 'vc_or_pdim': stats.dimension,
                   'threshold': stats.threshold, 'deterministic_bits': stats.deterministic_bits}
            path = os.path.join(temp_dir, f'run{run}.csv')
            write_csv(path, COLUMNS, [row])
            with open(path, 'rb') as f:
                contents.append(f.read())
        assert contents[0] == contents[1]

    def test_suite_reports_repeat(self):
        assert run_suite('largeinf', trials=50, seed=3) == run_suite('largeinf', trials=50, seed=3, threads=4)
