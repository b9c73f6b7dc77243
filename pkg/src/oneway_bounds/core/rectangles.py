#!/usr/bin/env python3

"""
One-way rectangle (corruption) bound.

A one-way rectangle is S x Y for a nonempty S in X. It is eps-monochromatic
under mu when some response g: Y -> Z is correct with probability at least
1 - eps on mu conditioned to the rectangle; undefined cells count as correct.
rec is the least log2(1/mu(R)) over such rectangles.
"""

import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import setting
from .errors import CapExceededError, InfeasibleError, ValidationError
from .information import binary_entropy
from .tables import STAR, FunctionTable, JointDistribution

logger = logging.getLogger(__name__)

FEASIBILITY_SLACK = 1e-12
GREEDY_SEEDS = 5
# Gray-walk steps between exact recomputations of the running tally
RESYNC_STEPS = 256


@dataclass(frozen=True)
class RectangleCertificate:
    rows: Tuple[int, ...]
    g: Tuple[int, ...]
    error: float
    mass: float
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {"rows": list(self.rows), "g": list(self.g), "error": self.error,
                "mass": self.mass, "value": self.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RectangleCertificate':
        try:
            return cls(tuple(int(r) for r in data["rows"]), tuple(int(z) for z in data["g"]),
                       float(data["error"]), float(data["mass"]), float(data["value"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed rectangle certificate: {exc}")

    def verify(self, f: FunctionTable, mu: JointDistribution, eps: Optional[float] = None,
               tol: float = FEASIBILITY_SLACK) -> bool:
        """Recompute mass and error of (S, g); check value and, if given, feasibility at eps."""
        if not self.rows or len(self.g) != f.y_size:
            return False
        mass = float(mu.p[list(self.rows)].sum())
        if mass <= 0 or abs(mass - self.mass) > tol:
            return False
        error = certificate_error(f, mu, self.rows, self.g)
        if abs(error - self.error) > tol:
            return False
        if abs(-math.log2(mass) - self.value) > 1e-9:
            return False
        return eps is None or error <= eps + tol


def _check_pair(f: FunctionTable, mu: JointDistribution) -> None:
    if f.values.shape != mu.p.shape:
        raise ValidationError(f"function is {f.values.shape} but distribution is {mu.p.shape}")


def correctness_weights(f: FunctionTable, mu: JointDistribution) -> np.ndarray:
    """W[x, y, z] = mu(x, y) when z is a correct answer at (x, y), else 0."""
    _check_pair(f, mu)
    z = np.arange(f.z_size)
    correct = (f.values[:, :, None] == z) | (f.values[:, :, None] == STAR)
    return mu.p[:, :, None] * correct


def _rows_list(rows: Sequence[int], x_size: int) -> List[int]:
    rows = sorted(set(int(r) for r in rows))
    if not rows:
        raise ValidationError("the row set S must be nonempty")
    if rows[0] < 0 or rows[-1] >= x_size:
        raise ValidationError(f"row set {rows} leaves 0..{x_size - 1}")
    return rows


def best_response(f: FunctionTable, mu: JointDistribution,
                  rows: Sequence[int]) -> Tuple[Tuple[int, ...], float]:
    """The response g maximizing correctness on S x Y (ties to smaller z), and its error."""
    rows = _rows_list(rows, f.x_size)
    weights = correctness_weights(f, mu)[rows]
    mass = float(mu.p[rows].sum())
    if mass <= 0:
        raise ValidationError(f"rectangle on rows {rows} has zero mass")
    tally = weights.sum(axis=0)
    g = np.argmax(tally, axis=1)
    achieved = float(tally[np.arange(f.y_size), g].sum())
    return tuple(int(z) for z in g), max(0.0, 1.0 - achieved / mass)


def certificate_error(f: FunctionTable, mu: JointDistribution, rows: Sequence[int],
                      g: Sequence[int]) -> float:
    """Error of the fixed response g on S x Y under mu conditioned to the rectangle."""
    rows = _rows_list(rows, f.x_size)
    values = f.values[rows]
    wrong = (values != np.asarray(g)[None, :]) & (values != STAR)
    mass = float(mu.p[rows].sum())
    if mass <= 0:
        raise ValidationError(f"rectangle on rows {rows} has zero mass")
    return float((mu.p[rows] * wrong).sum()) / mass


def is_monochromatic(f: FunctionTable, mu: JointDistribution, rows: Sequence[int], eps: float) -> bool:
    return best_response(f, mu, rows)[1] <= eps + FEASIBILITY_SLACK


def _certificate(f: FunctionTable, mu: JointDistribution, rows: Sequence[int]) -> RectangleCertificate:
    rows = _rows_list(rows, f.x_size)
    g, error = best_response(f, mu, rows)
    mass = float(mu.p[rows].sum())
    return RectangleCertificate(tuple(rows), g, error, mass, max(0.0, -math.log2(mass)))


def _mask_rows(mask: int) -> List[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _better(mass: float, rows: List[int], best: Optional[Tuple[float, List[int]]]) -> bool:
    if best is None:
        return True
    if mass > best[0] + FEASIBILITY_SLACK:
        return True
    return abs(mass - best[0]) <= FEASIBILITY_SLACK and rows < best[1]


def rec_exact(f: FunctionTable, mu: JointDistribution, eps: float, max_rows: Optional[int] = None,
              block_bits: Optional[int] = None) -> Tuple[float, RectangleCertificate]:
    """Exact rec by enumerating every nonempty S.

    The low ``block_bits`` rows are tallied for all 2^L subsets at once; the
    remaining rows are walked in Gray-code order, adding or removing one row's
    tally per step and recounting it every RESYNC_STEPS steps. A candidate S
    is kept only after its error is recomputed exactly.
    """
    max_rows = setting('MAX_REC_ROWS', max_rows)
    block_bits = setting('REC_BLOCK_BITS', block_bits)
    if not 0.0 <= eps < 1.0:
        raise ValidationError(f"eps must lie in [0, 1), got {eps}")
    if f.x_size > max_rows:
        raise CapExceededError("rectangle enumeration rows", f.x_size, max_rows, 'MAX_REC_ROWS')

    weights = correctness_weights(f, mu)
    row_mass = mu.row_masses()
    low = min(block_bits, f.x_size)
    high = f.x_size - low

    low_tally = np.zeros((1 << low,) + weights.shape[1:])
    low_mass = np.zeros(1 << low)
    for mask in range(1, 1 << low):
        bit = (mask & -mask).bit_length() - 1
        low_tally[mask] = low_tally[mask ^ (1 << bit)] + weights[bit]
        low_mass[mask] = low_mass[mask ^ (1 << bit)] + row_mass[bit]
    logger.debug("rec_exact: %d rows (%d low-block, %d Gray-walked), eps=%g", f.x_size, low, high, eps)

    best: Optional[Tuple[float, List[int]]] = None
    high_tally = np.zeros(weights.shape[1:])
    high_mass = 0.0
    high_mask = 0
    for step in range(1 << high):
        if step:
            bit = (step & -step).bit_length() - 1
            row = low + bit
            sign = -1.0 if high_mask >> bit & 1 else 1.0
            high_tally = high_tally + sign * weights[row]
            high_mass += sign * row_mass[row]
            high_mask ^= 1 << bit
            if step % RESYNC_STEPS == 0:
                members = [low + i for i in range(high) if high_mask >> i & 1]
                high_tally = weights[members].sum(axis=0)
                high_mass = float(row_mass[members].sum())
        mass = low_mass + high_mass
        correct = (low_tally + high_tally).max(axis=2).sum(axis=1)
        feasible = (mass > 0) & (mass - correct <= eps * mass + FEASIBILITY_SLACK)
        if high_mask == 0:
            feasible[0] = False
        if not feasible.any():
            continue
        top = mass[feasible].max()
        for low_mask in np.flatnonzero(feasible & (mass >= top - FEASIBILITY_SLACK)):
            rows = _mask_rows(int(low_mask) | high_mask << low)
            # running tallies drift; only an exact recount certifies S
            exact_mass = float(mu.p[rows].sum())
            if exact_mass > 0 and _better(exact_mass, rows, best) and is_monochromatic(f, mu, rows, eps):
                best = (exact_mass, rows)

    if best is None:
        raise InfeasibleError(f"no {eps}-monochromatic rectangle with positive mass exists")
    cert = _certificate(f, mu, best[1])
    return cert.value, cert


def rec_greedy(f: FunctionTable, mu: JointDistribution, eps: float,
               seeds: int = GREEDY_SEEDS) -> RectangleCertificate:
    """Greedy upper bound on rec: grow S from the heaviest rows while it stays eps-monochromatic."""
    weights = correctness_weights(f, mu)
    row_mass = mu.row_masses()
    live = np.flatnonzero(row_mass > 0)
    if live.size == 0:
        raise InfeasibleError("every row has zero mass")
    order = live[np.argsort(-row_mass[live], kind='stable')]

    best: Optional[RectangleCertificate] = None
    for seed in order[:seeds]:
        members = np.zeros(f.x_size, dtype=bool)
        members[seed] = True
        tally = weights[seed].copy()
        mass = float(row_mass[seed])
        wrong = mass - float(tally.max(axis=1).sum())
        while True:
            candidates = np.flatnonzero(~members & (row_mass > 0))
            if candidates.size == 0:
                break
            new_mass = mass + row_mass[candidates]
            new_wrong = new_mass - (tally[None] + weights[candidates]).max(axis=2).sum(axis=1)
            ok = new_wrong <= eps * new_mass + FEASIBILITY_SLACK
            if not ok.any():
                break
            ratio = np.where(ok, (new_wrong - wrong) / row_mass[candidates], np.inf)
            pick = int(np.argmin(ratio))
            row = int(candidates[pick])
            members[row] = True
            tally += weights[row]
            mass, wrong = float(new_mass[pick]), float(new_wrong[pick])
        cert = _certificate(f, mu, np.flatnonzero(members))
        if best is None or _better(cert.mass, list(cert.rows), (best.mass, list(best.rows))):
            best = cert
    logger.debug("rec_greedy: value %.6f from %d rows", best.value, len(best.rows))
    return best


def quantum_lower_bound(rec: float, eps: float, partial: bool = False) -> float:
    """Quantum one-way lower bound implied by a rectangle bound value.

    ``rec`` is taken at error eps^3/8. The entropy gap is S(eps/2) - S(eps/4)
    for total functions and eps^2/300 for partial ones.
    """
    if not 0.0 < eps < 0.5:
        raise ValidationError(f"eps must lie in (0, 1/2), got {eps}")
    if partial:
        gap = eps * eps / 300.0
    else:
        gap = binary_entropy(eps / 2) - binary_entropy(eps / 4)
    return max(0.0, 0.5 * (1 - 2 * eps) * gap * (math.floor(rec) - 1))
