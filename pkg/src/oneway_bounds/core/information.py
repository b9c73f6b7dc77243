#!/usr/bin/env python3

"""
Exact Shannon quantities on explicit finite distributions, in bits.

Everything here is a pure function of immutable inputs. Entropies and mutual
informations are clamped at zero after floating rounding.
"""

import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import rel_entr
from scipy.stats import entropy as _scipy_entropy

from .config import CONFIG, setting
from .errors import CapExceededError, ValidationError
from .tables import JointDistribution, MassFunction

logger = logging.getLogger(__name__)

MassLike = Union[MassFunction, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class LabeledJoint:
    """A joint mass function over several labeled axes (X1, ..., Xr)."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim < 1 or probs.size == 0:
            raise ValidationError(f"joint must have at least one non-empty axis, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ValidationError("joint holds a non-finite entry")
        if np.any(probs < 0):
            index = tuple(int(i) for i in np.argwhere(probs < 0)[0])
            raise ValidationError(f"joint entry {list(index)} = {probs[index]!r} is negative")
        total = float(probs.sum())
        if abs(total - 1.0) > CONFIG['CONSTRUCTION_TOL']:
            raise ValidationError(f"joint sums to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, 'probs', probs)

    @property
    def axes(self) -> Tuple[int, ...]:
        return tuple(int(s) for s in self.probs.shape)

    @property
    def rank(self) -> int:
        return self.probs.ndim

    def marginal(self, axes: Iterable[int]) -> np.ndarray:
        """Mass array over ``axes`` (in the given order); other axes summed out."""
        keep = list(axes)
        self._check_axes(keep)
        drop = tuple(a for a in range(self.rank) if a not in keep)
        reduced = self.probs.sum(axis=drop) if drop else self.probs
        # sum() keeps the remaining axes in increasing order
        order = sorted(keep)
        return np.transpose(reduced, [order.index(a) for a in keep])

    def _check_axes(self, axes: Sequence[int]) -> None:
        for a in axes:
            if not 0 <= a < self.rank:
                raise ValidationError(f"axis {a} is outside 0..{self.rank - 1}")
        if len(set(axes)) != len(axes):
            raise ValidationError(f"axis list {list(axes)} repeats an axis")

    @classmethod
    def from_distribution(cls, mu: JointDistribution) -> 'LabeledJoint':
        return cls(mu.p / mu.total)

    def to_distribution(self, rows: Sequence[int], columns: Sequence[int]) -> JointDistribution:
        """Group axes into an (A, B) matrix distribution."""
        block = self.marginal(list(rows) + list(columns))
        x_size = int(np.prod([self.axes[a] for a in rows])) if rows else 1
        return JointDistribution(block.reshape(x_size, -1))

    def to_dict(self) -> Dict[str, Any]:
        return {"axes": list(self.axes), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LabeledJoint':
        if "axes" not in data or "probs" not in data:
            raise ValidationError("joint needs 'axes' and 'probs'")
        probs = np.array(data["probs"], dtype=np.float64)
        if list(probs.shape) != list(data["axes"]):
            raise ValidationError(f"'probs' has shape {list(probs.shape)} but axes are {data['axes']}")
        return cls(probs)


def _as_probs(value: MassLike) -> np.ndarray:
    return MassFunction.coerce(value).probs


def mass_entropy(mass: np.ndarray) -> float:
    """Entropy in bits of a (possibly multi-axis) mass array."""
    flat = np.ravel(mass)
    total = flat.sum()
    if total <= 0:
        return 0.0
    return max(0.0, float(_scipy_entropy(flat / total, base=2)))


def entropy(dist: MassLike) -> float:
    """Shannon entropy S(P) in bits, with 0 log 0 = 0."""
    return mass_entropy(_as_probs(dist))


def binary_entropy(p: float) -> float:
    """S(p) = -p log p - (1-p) log(1-p)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"binary entropy needs p in [0, 1], got {p}")
    return mass_entropy(np.array([p, 1.0 - p]))


def mutual_information(mu: Union[JointDistribution, LabeledJoint]) -> float:
    """I(X:Y) = S(X) + S(Y) - S(XY) for a two-axis joint."""
    p = mu.p / mu.total if isinstance(mu, JointDistribution) else mu.probs
    if p.ndim != 2:
        raise ValidationError(f"mutual_information needs two axes, got {p.ndim}")
    value = mass_entropy(p.sum(axis=1)) + mass_entropy(p.sum(axis=0)) - mass_entropy(p)
    return max(0.0, value)


def conditional_entropy(mu: JointDistribution) -> float:
    """S(X|Y) = S(XY) - S(Y)."""
    p = mu.p / mu.total
    return max(0.0, mass_entropy(p) - mass_entropy(p.sum(axis=0)))


def conditional_mutual_information(joint: LabeledJoint,
                                   groups: Tuple[Sequence[int], Sequence[int], Sequence[int]]) -> float:
    """I(A:B|C) = S(AC) + S(BC) - S(ABC) - S(C) for disjoint axis groups A, B, C."""
    a, b, c = (list(g) for g in groups)
    used = a + b + c
    if not a or not b:
        raise ValidationError("the A and B groups must be non-empty")
    if len(set(used)) != len(used):
        raise ValidationError(f"axis groups {a}, {b}, {c} overlap")
    joint._check_axes(used)
    s_c = mass_entropy(joint.marginal(c)) if c else 0.0
    value = (mass_entropy(joint.marginal(a + c)) + mass_entropy(joint.marginal(b + c))
             - mass_entropy(joint.marginal(a + b + c)) - s_c)
    return max(0.0, value)


def chain_rule_terms(joint: LabeledJoint) -> List[float]:
    """I(X_i : M | X_1 ... X_{i-1}) for every i, with M the last axis."""
    if joint.rank < 2:
        raise ValidationError("chain rule needs at least one X axis and the M axis")
    m_axis = joint.rank - 1
    return [conditional_mutual_information(joint, ([i], [m_axis], list(range(i))))
            for i in range(m_axis)]


def fano_bound(error_probability: float, alphabet: int) -> float:
    """S(Pe) + Pe log(|X| - 1), the Fano upper bound on S(X|Y)."""
    if alphabet < 2:
        raise ValidationError(f"Fano bound needs an alphabet of at least 2, got {alphabet}")
    return binary_entropy(error_probability) + error_probability * math.log2(alphabet - 1)


def min_entropy(dist: MassLike) -> float:
    """-log2 of the largest probability."""
    return max(0.0, -math.log2(float(np.max(_as_probs(dist)))))


def l1_distance(p: MassLike, q: MassLike) -> float:
    p, q = _as_probs(p), _as_probs(q)
    if p.shape != q.shape:
        raise ValidationError(f"support sizes differ: {p.size} vs {q.size}")
    return float(np.abs(p - q).sum())


def kl_divergence(p: MassLike, q: MassLike) -> float:
    """Relative entropy D(p||q) in bits; infinite when p is not dominated by q."""
    p, q = _as_probs(p), _as_probs(q)
    if p.shape != q.shape:
        raise ValidationError(f"support sizes differ: {p.size} vs {q.size}")
    return max(0.0, float(rel_entr(p, q).sum()) / math.log(2))


def infadd_expand(mu: JointDistribution, copies: int, limit: Optional[int] = None) -> JointDistribution:
    """The joint of X and m conditionally independent copies of Y given X.

    Row x is Pr[X=x] times the m-fold product of mu_x; the Y index reads
    (y_1, ..., y_m) in big-endian base y_size.
    """
    limit = setting('MAX_Y_SIZE', limit)
    if copies < 1:
        raise ValidationError(f"copies must be at least 1, got {copies}")
    expanded_size = mu.y_size ** copies
    if expanded_size > limit:
        raise CapExceededError("expanded y_size", expanded_size, limit, 'MAX_Y_SIZE')
    cond = mu.conditional_matrix()
    rows = cond
    for _ in range(copies - 1):
        rows = (rows[:, :, None] * cond[:, None, :]).reshape(mu.x_size, -1)
    logger.debug("expanded %d x %d joint to %d copies (%d columns)", mu.x_size, mu.y_size, copies, expanded_size)
    return JointDistribution(rows * mu.row_masses()[:, None])
