#!/usr/bin/env python3

"""
Small dense density-matrix toolkit: von Neumann entropy, trace norm,
Holevo quantity, Helstrom discrimination and measurement statistics.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag, eigh, eigvalsh

from .config import CONFIG
from .errors import BoundNotApplicable, CapExceededError, ValidationError
from .information import LabeledJoint, binary_entropy, mass_entropy, mutual_information

logger = logging.getLogger(__name__)


def _hermitian_gap(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def _check_square(matrix: np.ndarray, what: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise ValidationError(f"{what} must be a non-empty square matrix, got shape {matrix.shape}")
    limit = CONFIG['MAX_QUANTUM_DIM']
    if matrix.shape[0] > limit:
        raise CapExceededError(f"{what} dimension", matrix.shape[0], limit, 'MAX_QUANTUM_DIM')


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A positive semi-definite, trace-one Hermitian matrix."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=np.complex128)
        _check_square(rho, "density matrix")
        tol = CONFIG['QUANTUM_TOL']
        gap = _hermitian_gap(rho)
        if gap > tol:
            raise ValidationError(f"density matrix is not Hermitian (max |A - A^H| = {gap:.3g})")
        trace = float(np.trace(rho).real)
        if abs(trace - 1.0) > tol:
            raise ValidationError(f"density matrix has trace {trace!r}, not 1")
        rho = (rho + rho.conj().T) / 2
        lowest = float(eigvalsh(rho)[0])
        if lowest < -tol:
            raise ValidationError(f"density matrix has negative eigenvalue {lowest:.3g}")
        rho.setflags(write=False)
        object.__setattr__(self, 'entries', rho)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def eigenvalues(self) -> np.ndarray:
        return np.clip(eigvalsh(self.entries), 0.0, 1.0)

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> 'DensityMatrix':
        v = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValidationError("pure state vector is zero")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def diagonal(cls, probs: Sequence[float]) -> 'DensityMatrix':
        return cls(np.diag(np.asarray(probs, dtype=np.float64)))

    @classmethod
    def maximally_mixed(cls, dim: int) -> 'DensityMatrix':
        return cls(np.eye(dim) / dim)


@dataclass(frozen=True, eq=False)
class QuantumEnsemble:
    """Prior-weighted states {(Pr[X=x], rho_x)} of one common dimension."""

    priors: np.ndarray
    states: Tuple[DensityMatrix, ...]

    def __post_init__(self):
        priors = np.array(self.priors, dtype=np.float64)
        states = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(s) for s in self.states)
        if priors.ndim != 1 or priors.size != len(states) or not states:
            raise ValidationError(f"need one prior per state, got {priors.size} priors and {len(states)} states")
        if np.any(priors < 0):
            raise ValidationError(f"prior {int(np.argmax(priors < 0))} is negative")
        if abs(float(priors.sum()) - 1.0) > CONFIG['QUANTUM_TOL']:
            raise ValidationError(f"priors sum to {float(priors.sum())!r}, not 1")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise ValidationError(f"states have mixed dimensions {sorted(dims)}")
        priors.setflags(write=False)
        object.__setattr__(self, 'priors', priors)
        object.__setattr__(self, 'states', states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)

    def average(self) -> np.ndarray:
        return sum(p * s.entries for p, s in zip(self.priors, self.states))


def vn_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -Tr rho log rho in bits."""
    return mass_entropy(rho.eigenvalues())


def trace_norm(matrix: np.ndarray) -> float:
    """||A||_1 for Hermitian A, the sum of absolute eigenvalues."""
    a = np.asarray(matrix, dtype=np.complex128)
    _check_square(a, "operator")
    gap = _hermitian_gap(a)
    if gap > CONFIG['QUANTUM_TOL']:
        raise ValidationError(f"trace_norm needs a Hermitian operator (max |A - A^H| = {gap:.3g})")
    return float(np.abs(eigvalsh((a + a.conj().T) / 2)).sum())


def holevo_chi(ensemble: QuantumEnsemble) -> float:
    """chi = S(sum p_x rho_x) - sum p_x S(rho_x)."""
    average = mass_entropy(np.clip(eigvalsh(ensemble.average()), 0.0, None))
    value = average - sum(p * vn_entropy(s) for p, s in zip(ensemble.priors, ensemble.states))
    return max(0.0, float(value))


def cq_mutual_information(ensemble: QuantumEnsemble) -> float:
    """I(X:M) of the classical-quantum state sum_x p_x |x><x| (x) rho_x, as S(X) + S(M) - S(XM)."""
    joint = block_diag(*[p * s.entries for p, s in zip(ensemble.priors, ensemble.states)])
    s_xm = mass_entropy(np.clip(eigvalsh(joint), 0.0, None))
    s_m = mass_entropy(np.clip(eigvalsh(ensemble.average()), 0.0, None))
    return max(0.0, mass_entropy(ensemble.priors) + s_m - s_xm)


def _binary_states(p0: float, rho0, p1: float, rho1) -> Tuple[DensityMatrix, DensityMatrix]:
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    rho1 = rho1 if isinstance(rho1, DensityMatrix) else DensityMatrix(rho1)
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1.0) > CONFIG['QUANTUM_TOL']:
        raise ValidationError(f"priors {p0}, {p1} are not a probability pair")
    if rho0.dim != rho1.dim:
        raise ValidationError(f"states have dimensions {rho0.dim} and {rho1.dim}")
    return rho0, rho1


def helstrom_success(p0: float, rho0, p1: float, rho1) -> float:
    """Optimal success probability of guessing X from its state: 1/2 + 1/2 ||p0 rho0 - p1 rho1||_1."""
    rho0, rho1 = _binary_states(p0, rho0, p1, rho1)
    return 0.5 + 0.5 * trace_norm(p0 * rho0.entries - p1 * rho1.entries)


def helstrom_measurement(p0: float, rho0, p1: float, rho1) -> List[np.ndarray]:
    """[P, I - P] with P the projector on the positive eigenspace of p0 rho0 - p1 rho1.

    Outcome 0 guesses X = 0.
    """
    rho0, rho1 = _binary_states(p0, rho0, p1, rho1)
    values, vectors = eigh(p0 * rho0.entries - p1 * rho1.entries)
    positive = vectors[:, values > 0]
    projector = positive @ positive.conj().T
    return [projector, np.eye(rho0.dim) - projector]


def _check_povm(povm: Sequence[np.ndarray], dim: int) -> List[np.ndarray]:
    tol = CONFIG['QUANTUM_TOL']
    operators = [np.asarray(op, dtype=np.complex128) for op in povm]
    if not operators:
        raise ValidationError("measurement needs at least one operator")
    for j, op in enumerate(operators):
        if op.shape != (dim, dim):
            raise ValidationError(f"operator {j} has shape {op.shape}, expected {(dim, dim)}")
        if _hermitian_gap(op) > tol:
            raise ValidationError(f"operator {j} is not Hermitian")
        if eigvalsh((op + op.conj().T) / 2)[0] < -tol:
            raise ValidationError(f"operator {j} is not positive")
    gap = float(np.max(np.abs(sum(operators) - np.eye(dim))))
    if gap > tol:
        raise ValidationError(f"measurement operators do not sum to the identity (max deviation {gap:.3g})")
    return operators


def measure(ensemble: QuantumEnsemble, povm: Sequence[np.ndarray]) -> LabeledJoint:
    """Joint of (X, outcome) with Pr[x, j] = p_x Tr(M_j rho_x)."""
    operators = _check_povm(povm, ensemble.dim)
    joint = np.array([[p * float(np.real(np.trace(op @ s.entries))) for op in operators]
                      for p, s in zip(ensemble.priors, ensemble.states)])
    joint = np.clip(joint, 0.0, None)
    return LabeledJoint(joint / joint.sum())


def success_probability(ensemble: QuantumEnsemble, povm: Sequence[np.ndarray]) -> float:
    """Probability that outcome j equals the hidden index x."""
    joint = measure(ensemble, povm).probs
    size = min(joint.shape)
    return float(np.trace(joint[:size, :size]))


class LargeInfGap(NamedTuple):
    mutual_information: float
    bound: float
    min_prior: float
    error: float


def largeinf_gap(ensemble: QuantumEnsemble, povm: Sequence[np.ndarray]) -> LargeInfGap:
    """I(Z:Z') for the outcome Z' of a binary measurement, against the bound S(c) - S(d).

    c is the smaller prior and d the error Pr[Z' != Z]. The bound is only
    claimed for d <= c <= 1/2.
    """
    if len(ensemble) != 2 or len(povm) != 2:
        raise ValidationError("largeinf needs a binary ensemble and a two-outcome measurement")
    joint = measure(ensemble, povm)
    c = float(min(ensemble.priors))
    d = float(joint.probs[0, 1] + joint.probs[1, 0])
    if d > c + CONFIG['QUANTUM_TOL']:
        raise BoundNotApplicable(f"measurement error {d:.6g} exceeds the smaller prior {c:.6g}")
    return LargeInfGap(mutual_information(joint), binary_entropy(c) - binary_entropy(d), c, d)


def _complex_gaussian(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """G G^H / Tr(G G^H) for a dim x rank matrix G of standard complex Gaussians."""
    g = _complex_gaussian(rng, (dim, rank or dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    return DensityMatrix.pure(_complex_gaussian(rng, (dim,)))


def random_povm(dim: int, outcomes: int, rng: np.random.Generator) -> List[np.ndarray]:
    """M_j = S^{-1/2} A_j S^{-1/2} with A_j = G_j G_j^H and S = sum_j A_j."""
    raw = []
    for _ in range(outcomes):
        g = _complex_gaussian(rng, (dim, dim))
        raw.append(g @ g.conj().T)
    values, vectors = eigh(sum(raw))
    root = vectors @ np.diag(values ** -0.5) @ vectors.conj().T
    povm = [root @ a @ root for a in raw]
    return [(op + op.conj().T) / 2 for op in povm]


def random_ensemble(states: int, dim: int, rng: np.random.Generator, pure: bool = False) -> QuantumEnsemble:
    priors = rng.dirichlet(np.ones(states))
    make = random_pure_state if pure else random_density_matrix
    return QuantumEnsemble(priors, tuple(make(dim, rng) for _ in range(states)))
