#!/usr/bin/env python3

"""
Randomized verification suites for the information-theoretic and quantum
inequalities the bounds rest on.

Each instance i draws from numpy.random.default_rng([seed, i]); a suite
reports how many instances violate their inequality by more than
COMPARE_TOL and the smallest margin (bound minus measured side) seen.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Callable, Dict, List

import numpy as np
from scipy.linalg import eigvalsh

from .config import CONFIG
from .errors import BoundNotApplicable, ValidationError
from .information import binary_entropy, conditional_entropy, fano_bound, mass_entropy, mutual_information
from .quantum import (cq_mutual_information, helstrom_measurement, helstrom_success, holevo_chi, largeinf_gap,
                      measure, random_density_matrix, random_ensemble, random_povm, success_probability,
                      vn_entropy)
from .tables import JointDistribution

logger = logging.getLogger(__name__)

RANDOM_MEASUREMENTS = 1000
SSMALL_STEP = 1e-3


class Suite(str, Enum):
    HELSTROM = "helstrom"
    HOLEVO = "holevo"
    LARGEINF = "largeinf"
    FANO = "fano"
    SSMALL = "ssmall"
    QINF = "qinf"


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    trials: int
    checked: int
    skipped: int
    violations: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def _helstrom_margin(rng: np.random.Generator, draws: int = RANDOM_MEASUREMENTS) -> float:
    """Helstrom value minus the best of the projector and ``draws`` random measurements.

    Returns the worse of (optimum - best random) and -|optimum - projector|.
    """
    dim = int(rng.integers(2, 5))
    ensemble = random_ensemble(2, dim, rng)
    p0, p1 = ensemble.priors
    rho0, rho1 = ensemble.states
    optimum = helstrom_success(p0, rho0, p1, rho1)
    attained = success_probability(ensemble, helstrom_measurement(p0, rho0, p1, rho1))
    best_random = max(success_probability(ensemble, random_povm(dim, 2, rng)) for _ in range(draws))
    return min(optimum - best_random, -abs(optimum - attained))


def _holevo_margin(rng: np.random.Generator) -> float:
    dim = int(rng.integers(2, 5))
    ensemble = random_ensemble(int(rng.integers(2, 5)), dim, rng)
    povm = random_povm(dim, int(rng.integers(2, 5)), rng)
    return holevo_chi(ensemble) - mutual_information(measure(ensemble, povm))


def _largeinf_margin(rng: np.random.Generator) -> float:
    ensemble = random_ensemble(2, 2, rng)
    p0, p1 = ensemble.priors
    povm = helstrom_measurement(p0, ensemble.states[0], p1, ensemble.states[1])
    gap = largeinf_gap(ensemble, povm)
    return gap.mutual_information - gap.bound


def _fano_margin(rng: np.random.Generator) -> float:
    size = int(rng.integers(2, 6))
    mu = JointDistribution(rng.dirichlet(np.ones(size * size)).reshape(size, size))
    error = 1.0 - float(np.trace(mu.p))
    return fano_bound(min(max(error, 0.0), 1.0), size) - conditional_entropy(mu)


def _qinf_margin(rng: np.random.Generator) -> float:
    """chi against min(S(X), S(average)); entropy against log2 dim; chi against I(X:M)."""
    qubits = int(rng.integers(1, 4))
    dim = 1 << qubits
    ensemble = random_ensemble(int(rng.integers(2, 5)), dim, rng, pure=bool(rng.integers(0, 2)))
    chi = holevo_chi(ensemble)
    return min(
        mass_entropy(ensemble.priors) - chi,
        mass_entropy(np.clip(eigvalsh(ensemble.average()), 0.0, None)) - chi,
        qubits - vn_entropy(random_density_matrix(dim, rng)),
        -abs(cq_mutual_information(ensemble) - chi),
    )


_MARGINS: Dict[Suite, Callable[[np.random.Generator], float]] = {
    Suite.HELSTROM: _helstrom_margin,
    Suite.HOLEVO: _holevo_margin,
    Suite.LARGEINF: _largeinf_margin,
    Suite.FANO: _fano_margin,
    Suite.QINF: _qinf_margin,
}


def ssmall_margins(step: float = SSMALL_STEP) -> np.ndarray:
    """S(1/2 + d) <= 1 - 2 d^2 and S(d) <= 2 sqrt(d) on a grid of d over [0, 1/2]."""
    grid = np.linspace(0.0, 0.5, int(round(0.5 / step)) + 1)
    margins = []
    for delta in grid:
        margins.append(1 - 2 * delta * delta - binary_entropy(min(0.5 + delta, 1.0)))
        margins.append(2 * np.sqrt(delta) - binary_entropy(delta))
    return np.array(margins)


def run_suite(name: str, trials: int = 100, seed: int = 0, threads: int = 1) -> SuiteReport:
    """Run one suite over ``trials`` seeded random instances."""
    suite = Suite(name)
    if trials < 1:
        raise ValidationError(f"trials must be at least 1, got {trials}")
    tol = CONFIG['COMPARE_TOL']

    if suite is Suite.SSMALL:
        margins = ssmall_margins()
        skipped = 0
    else:
        check = _MARGINS[suite]
        results: List[float] = [np.nan] * trials

        def run_instance(index: int) -> None:
            try:
                results[index] = check(np.random.default_rng([seed, index]))
            except BoundNotApplicable:
                results[index] = np.nan

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_instance, range(trials)))
        values = np.array(results)
        skipped = int(np.isnan(values).sum())
        margins = values[~np.isnan(values)]

    violations = int((margins < -tol).sum())
    worst = float(margins.min()) if margins.size else 0.0
    report = SuiteReport(suite.value, trials, int(margins.size), skipped, violations, worst)
    logger.info("suite %s: %d checked, %d skipped, %d violations, worst margin %.3g",
                suite.value, report.checked, skipped, violations, worst)
    return report
