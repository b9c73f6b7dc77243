#!/usr/bin/env python3
"""
Pytest configuration and fixtures for oneway-bounds tests
Provides shared fixtures and test configuration
"""

import pytest
import os
import sys
import tempfile
import shutil

import numpy as np

# Add project root and src to path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)
sys.path.insert(0, os.path.join(project_root, 'src'))

from oneway_bounds.core import config as oneway_config
from oneway_bounds.core.tables import (FunctionTable, JointDistribution, make_benchmark,
                                       make_copy_distribution, save_distribution, save_function_table)
from tests.fixtures.test_data_factory import TestDataFactory

# Test configuration
pytest_plugins = []

def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line("markers", "unit: Unit tests (fast, isolated)")
    config.addinivalue_line("markers", "integration: Integration tests (CLI end to end)")
    config.addinivalue_line("markers", "performance: Acceptance-scale runs")
    config.addinivalue_line("markers", "slow: Slow running tests")

def pytest_collection_modifyitems(config, items):
    """Automatically mark tests based on their location"""
    for item in items:
        test_dir = os.path.basename(str(item.fspath.dirname))
        if test_dir == "unit":
            item.add_marker(pytest.mark.unit)
        elif test_dir == "integration":
            item.add_marker(pytest.mark.integration)
        elif test_dir == "performance":
            item.add_marker(pytest.mark.performance)
            item.add_marker(pytest.mark.slow)

@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the default limits and tolerances"""
    oneway_config.reset()
    yield oneway_config.CONFIG
    oneway_config.reset()

@pytest.fixture
def temp_dir():
    """Provide a temporary directory for test files"""
    temp_dir = tempfile.mkdtemp(prefix='oneway_test_')
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)

@pytest.fixture
def rng():
    """Seeded generator; tests that need other streams build their own"""
    return np.random.default_rng(20240601)

@pytest.fixture
def factory():
    return TestDataFactory(seed=7)

@pytest.fixture
def xor_table():
    return FunctionTable(np.array([[0, 1], [1, 0]]))

@pytest.fixture
def uniform_2x2():
    return JointDistribution.uniform(2, 2)

@pytest.fixture
def gt2_table():
    return make_benchmark('gt', 2)

@pytest.fixture
def ip2_table():
    return make_benchmark('ip', 2)

@pytest.fixture
def uniform_4x4():
    return JointDistribution.uniform(4, 4)

@pytest.fixture
def correlated_4x4():
    """X uniform; Y = X with probability 1/2, otherwise uniform"""
    return make_copy_distribution(4, 0.5)

@pytest.fixture
def ternary_table():
    """f(x, y) = (x + y) mod 3: every pair of rows differs in every column"""
    xs = np.arange(3)
    return FunctionTable((xs[:, None] + xs[None, :]) % 3, z_size=3)

@pytest.fixture
def sample_files(temp_dir, xor_table, uniform_2x2, ip2_table, uniform_4x4):
    """Function and distribution files on disk, keyed by short name"""
    files = {}
    for name, table in (('xor', xor_table), ('ip2', ip2_table)):
        path = os.path.join(temp_dir, f'{name}.json')
        save_function_table(table, path)
        files[name] = path
    for name, mu in (('uniform2', uniform_2x2), ('uniform4', uniform_4x4)):
        path = os.path.join(temp_dir, f'{name}.json')
        save_distribution(mu, path)
        files[name] = path
    yield files

# Test utilities
class TestUtils:
    """Utility functions for tests"""
    __test__ = False

    @staticmethod
    def assert_probability_vector(probs, tol=1e-9):
        """Assert that probs is a non-negative vector summing to one"""
        probs = np.asarray(probs)
        assert probs.ndim == 1
        assert np.all(probs >= -tol)
        assert abs(float(probs.sum()) - 1.0) <= tol

    @staticmethod
    def assert_key_values(output: str, expected: dict):
        """Assert that key=value lines in CLI output hold the expected values"""
        pairs = dict(line.split('=', 1) for line in output.strip().splitlines() if '=' in line)
        for key, value in expected.items():
            assert key in pairs, f"missing '{key}' in output:\n{output}"
            assert pairs[key] == value, f"{key}={pairs[key]}, expected {value}"

    @staticmethod
    def binomial_margin(p: float, trials: int, sigmas: float = 3.0) -> float:
        """sigmas standard deviations of an empirical rate over trials"""
        return sigmas * float(np.sqrt(p * (1 - p) / trials))

@pytest.fixture
def test_utils():
    """Provide test utilities"""
    return TestUtils
