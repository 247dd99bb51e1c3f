"""Finite-rank discretization of diffusion operators on uniform partitions.

Both diffusion operators have the form

    [A psi]|_{cell k} = sum_t w_t * sup { psi((x - s_t) / r) : x in cell k, r in [r_lo_t, r_hi_t] }

for shifts ``s_t``, ratio intervals and nonnegative weights.  Since the
argument hull moves monotonically with k, each sup is a sliding-window
maximum over a precomputed index window.  Windows are built once per
(partition, shifts, ratios) and reused for every alpha and iteration.

Arithmetic contract: index windows are widened by a slack far above the
accumulated float error, weights are rounded up, and the final sum is
inflated past its worst-case relative rounding error, so the computed image
never under-approximates the exact finite-rank operator.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._kernels import weighted_window_sum
from .scheme import CERTIFIED, EPS, INCONCLUSIVE, StepFunction, UniformPartition

log = logging.getLogger(__name__)

# relative slack on hull positions, in units of cells; ~500 ulps
_SLACK = 2.0**-44
_UNIT_ROUNDOFF = 2.0**-53


def up(x: float) -> float:
    return math.nextafter(x, math.inf)


def contraction_scalar(ratio: float, alpha: float) -> float:
    """Upper bound on ratio**(-alpha)."""
    if alpha == 0.0:
        return 1.0
    return up(up(ratio ** (-alpha)))


def hull_windows(partition: UniformPartition, shift: float, r_lo: float, r_hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Index windows of cells met by {(x - shift)/r : x in cell k, r in [r_lo, r_hi]}.

    Returned bounds are unclipped (may fall outside [0, N-1]) and
    nondecreasing in k.
    """
    n = partition.cells
    w = partition.cell_width
    e = partition.edges()
    u1 = e[:-1] - shift
    u2 = e[1:] - shift
    # r > 0, so the hull is [min(u1/r_lo, u1/r_hi), max(u2/r_lo, u2/r_hi)]
    lo = np.where(u1 >= 0.0, u1 / r_hi, u1 / r_lo)
    hi = np.where(u2 >= 0.0, u2 / r_lo, u2 / r_hi)
    tlo = (lo - partition.lo) / w
    thi = (hi - partition.lo) / w
    scale = n / r_lo + 1.0
    jlo = np.floor(tlo - _SLACK * (scale + np.abs(tlo)))
    jhi = np.floor(thi + _SLACK * (scale + np.abs(thi)))
    jlo = np.clip(jlo, -1, n).astype(np.int64)
    jhi = np.clip(jhi, -1, n).astype(np.int64)
    # enforce monotonicity by widening only
    jlo = np.minimum.accumulate(jlo[::-1])[::-1].copy()
    jhi = np.maximum.accumulate(jhi)
    return jlo, jhi


@dataclass(frozen=True, eq=False)
class WindowPlan:
    """Precomputed sliding windows for a fixed set of (shift, ratio interval) terms."""

    partition: UniformPartition
    shifts: tuple[float, ...]
    ratio_lo: tuple[float, ...]
    ratio_hi: tuple[float, ...]
    lo: np.ndarray
    hi: np.ndarray
    partner: np.ndarray

    @classmethod
    def build(
        cls,
        partition: UniformPartition,
        shifts: Sequence[float],
        ratio_lo: Sequence[float],
        ratio_hi: Sequence[float],
        weight_keys: Sequence[float] | None = None,
    ) -> "WindowPlan":
        """Build windows; terms (s, r) and (-s, r) with equal ``weight_keys`` are paired.

        On a symmetric partition paired windows are made exact mirror images
        of each other (by taking unions), which keeps even functions even.
        """
        t = len(shifts)
        keys = list(weight_keys) if weight_keys is not None else [None] * t
        lo = np.empty((t, partition.cells), np.int64)
        hi = np.empty((t, partition.cells), np.int64)
        for i in range(t):
            lo[i], hi[i] = hull_windows(partition, shifts[i], ratio_lo[i], ratio_hi[i])

        mirror = [-1] * t
        for i in range(t):
            for j in range(t):
                if (
                    shifts[j] == -shifts[i]
                    and ratio_lo[j] == ratio_lo[i]
                    and ratio_hi[j] == ratio_hi[i]
                    and keys[i] == keys[j]
                ):
                    mirror[i] = j
                    break

        if partition.is_symmetric:
            n = partition.cells
            raw_lo, raw_hi = lo.copy(), hi.copy()
            for i in range(t):
                j = mirror[i]
                if j < 0:
                    continue
                lo[i] = np.minimum(raw_lo[i], n - 1 - raw_hi[j][::-1])
                hi[i] = np.maximum(raw_hi[i], n - 1 - raw_lo[j][::-1])

        partner = np.full(t, -1, np.int64)
        for i in range(t):
            j = mirror[i]
            if j > i and keys[i] is not None:
                partner[i] = j
                partner[j] = -2
        return cls(
            partition,
            tuple(float(s) for s in shifts),
            tuple(float(r) for r in ratio_lo),
            tuple(float(r) for r in ratio_hi),
            lo,
            hi,
            partner,
        )

    @property
    def terms(self) -> int:
        return len(self.shifts)

    def apply(self, values: np.ndarray, weights: Sequence[float]) -> np.ndarray:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (self.terms,):
            raise ValueError("one weight per term expected")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        values = np.ascontiguousarray(values, dtype=np.float64)
        out = np.empty(self.partition.cells)
        inflate = 1.0 + (2 * self.terms + 4) * EPS
        weighted_window_sum(values, self.lo, self.hi, weights, self.partner, inflate, out)
        return out


@dataclass(frozen=True)
class HatConfig:
    """Hat-operator increment theta, iteration cap K, success threshold t, exponent alpha."""

    theta: float = 1e-3
    max_iterations: int = 200
    threshold: float = 0.995
    alpha: float = 0.5

    def __post_init__(self):
        if not (self.theta >= 100 * _UNIT_ROUNDOFF):
            raise ValueError("theta must be positive and at least 100 unit roundoffs")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie in (0, 1)")
        if not (0.0 <= self.alpha):
            raise ValueError("alpha must be nonnegative")


@dataclass(frozen=True)
class CertificateResult:
    status: str
    alpha: float
    iterations_used: int
    final_function: StepFunction
    threshold: float = 1.0

    def __post_init__(self):
        if self.status == CERTIFIED and not np.all(self.final_function.values < self.threshold):
            raise ValueError("certified result must have every value below the threshold")

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


def hat_step(applied: StepFunction, previous: StepFunction, theta: float) -> StepFunction:
    """Cellwise min(applied + theta, previous)."""
    if applied.partition != previous.partition:
        raise ValueError("partition mismatch")
    return StepFunction(previous.partition, np.minimum(applied.values + theta, previous.values))


def iterate_hat(
    apply: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    theta: float,
    max_iterations: int,
    threshold: float,
) -> tuple[str, int, np.ndarray]:
    """Iterate psi <- min(A psi + theta, psi) until max psi < threshold.

    Returns (status, iterations, final values).  A fixed point reached
    before success is final, so the loop stops there as inconclusive.
    """
    v = np.array(start, dtype=np.float64)
    for n in range(1, max_iterations + 1):
        nxt = np.minimum(apply(v) + theta, v)
        if nxt.max() < threshold:
            return CERTIFIED, n, nxt
        if np.array_equal(nxt, v):
            log.debug("hat iteration stalled at step %d", n)
            return INCONCLUSIVE, n, nxt
        v = nxt
    return INCONCLUSIVE, max_iterations, v
