#!/usr/bin/env python3
"""
Test Data Factory for oneway-bounds
Seeded random tables, joint distributions and quantum ensembles for tests
"""

from enum import Enum
from typing import List, Tuple

import numpy as np

from oneway_bounds.core.quantum import QuantumEnsemble, random_ensemble
from oneway_bounds.core.tables import FunctionTable, JointDistribution


class TableSize(Enum):
    TINY = "tiny"        # 2-3 rows and columns
    SMALL = "small"      # up to 6
    MEDIUM = "medium"    # up to 12


class Scenario(Enum):
    PRODUCT = "product"        # outer product of two random marginals
    CORRELATED = "correlated"  # arbitrary Dirichlet joint
    SPARSE = "sparse"          # joint with zero cells (and possibly zero rows)


_BOUNDS = {
    TableSize.TINY: (2, 3),
    TableSize.SMALL: (2, 6),
    TableSize.MEDIUM: (4, 12),
}


class TestDataFactory:
    """Factory for random test instances; every draw comes from one seeded stream"""
    __test__ = False

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def shape(self, size: TableSize) -> Tuple[int, int]:
        low, high = _BOUNDS[size]
        return int(self.rng.integers(low, high + 1)), int(self.rng.integers(low, high + 1))

    def boolean_table(self, size: TableSize = TableSize.SMALL) -> FunctionTable:
        return FunctionTable(self.rng.integers(0, 2, size=self.shape(size)))

    def table(self, x_size: int, y_size: int, z_size: int = 2) -> FunctionTable:
        return FunctionTable(self.rng.integers(0, z_size, size=(x_size, y_size)), z_size)

    def joint(self, x_size: int, y_size: int, scenario: Scenario = Scenario.CORRELATED) -> JointDistribution:
        if scenario is Scenario.PRODUCT:
            return JointDistribution.product(self.rng.dirichlet(np.ones(x_size)),
                                             self.rng.dirichlet(np.ones(y_size)))
        p = self.rng.dirichlet(np.ones(x_size * y_size)).reshape(x_size, y_size)
        if scenario is Scenario.SPARSE:
            p = p * (self.rng.random(p.shape) < 0.6)
            if p.sum() == 0:
                p[0, 0] = 1.0
            p = p / p.sum()
        return JointDistribution(p)

    def mass(self, size: int, sparse: bool = False) -> np.ndarray:
        probs = self.rng.dirichlet(np.ones(size))
        if sparse:
            probs = probs * (self.rng.random(size) < 0.5)
            if probs.sum() == 0:
                probs[0] = 1.0
            probs = probs / probs.sum()
        return probs

    def target_and_proposal(self, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """(p, q) with supp(p) inside supp(q)"""
        return self.mass(size, sparse=True), self.mass(size)

    def ensemble(self, states: int = 2, dim: int = 2, pure: bool = False) -> QuantumEnsemble:
        return random_ensemble(states, dim, self.rng, pure)

    def instances(self, count: int, size: TableSize = TableSize.SMALL,
                  scenario: Scenario = Scenario.CORRELATED) -> List[Tuple[FunctionTable, JointDistribution]]:
        """count (boolean table, joint) pairs of matching shape"""
        pairs = []
        for _ in range(count):
            table = self.boolean_table(size)
            pairs.append((table, self.joint(table.x_size, table.y_size, scenario)))
        return pairs
