"""Brute-force, non-rigorous dimension estimates from finite-level atom measures.

Used only to sanity-check certificates: the certifiers give lower bounds,
these give rough regression slopes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .scheme import SimilarityScheme

log = logging.getLogger(__name__)

DEFAULT_ATOM_CAP = 2**24
MERGE_TOL = 2.0**-40


class AtomBudgetExceeded(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AtomMeasure:
    positions: np.ndarray
    weights: np.ndarray
    depth: int

    def __post_init__(self):
        if self.positions.shape != self.weights.shape or self.positions.ndim != 1:
            raise ValueError("positions and weights must be 1-d arrays of equal length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("positions must be strictly increasing")

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def _exact_arithmetic(lam: float, translations, depth: int) -> bool:
    """True when every depth-n position is a float computed without rounding."""
    q = Fraction(lam)
    if q.denominator & (q.denominator - 1) or not all(float(c).is_integer() for c in translations):
        return False
    bits = q.denominator.bit_length() - 1 + q.numerator.bit_length()
    span = max(1, int(max(abs(c) for c in translations))).bit_length() + depth.bit_length()
    return depth * bits + span <= 52


def _merge(pos: np.ndarray, w: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(pos, kind="stable")
    pos, w = pos[order], w[order]
    if len(pos) == 0:
        return pos, w
    new_group = np.empty(len(pos), bool)
    new_group[0] = True
    new_group[1:] = np.diff(pos) > tol
    idx = np.flatnonzero(new_group)
    return pos[idx], np.add.reduceat(w, idx)


def finite_level_atoms(scheme: SimilarityScheme, depth: int, cap: int = DEFAULT_ATOM_CAP) -> AtomMeasure:
    """Law of sum_{j<depth} c_{w_j} lam^j over random words, with collided atoms merged.

    The scheme's ratio box must be a single point.  Atoms are merged level by
    level, so the cap bounds distinct atoms rather than k^depth.
    """
    box = scheme.ratio_box
    if box.lo != box.hi:
        raise ValueError("atom enumeration needs an exact ratio (degenerate box)")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    lam = box.lo
    c = np.array(scheme.translations)
    p = np.array(scheme.probabilities)
    tol = 0.0 if _exact_arithmetic(lam, scheme.translations, depth) else MERGE_TOL
    if tol:
        log.info("merging atoms with tolerance %.3g (lambda %r is not exactly representable)", tol, lam)
    pos, w = np.zeros(1), np.ones(1)
    for _ in range(depth):
        if len(pos) * len(c) > cap:
            raise AtomBudgetExceeded(f"more than {cap} atoms before merging")
        # prepend one digit: x -> c_i + lam * x
        pos = (c[:, None] + lam * pos[None, :]).ravel()
        w = (p[:, None] * w[None, :]).ravel()
        pos, w = _merge(pos, w, tol)
    return AtomMeasure(pos, w, depth)


class EmpiricalDimensions(NamedTuple):
    corr_slope: float
    frostman_slope: float
    corr_residual: float
    frostman_residual: float


def ball_masses(atoms: AtomMeasure, r: float) -> np.ndarray:
    """mu(B_r(x_i)) for every atom x_i, through prefix sums on the sorted positions."""
    x = atoms.positions
    cum = np.concatenate(([0.0], np.cumsum(atoms.weights)))
    lo = np.searchsorted(x, x - r, side="left")
    hi = np.searchsorted(x, x + r, side="right")
    return cum[hi] - cum[lo]


def correlation_sum(atoms: AtomMeasure, r: float) -> float:
    """P(|X - Y| <= r) for independent X, Y with law ``atoms``."""
    return float(np.dot(atoms.weights, ball_masses(atoms, r)))


def _slope(logr: np.ndarray, logv: np.ndarray) -> tuple[float, float]:
    coef, res, *_ = np.polyfit(logr, logv, 1, full=True)
    rms = float(np.sqrt(res[0] / len(logr))) if len(res) else 0.0
    return float(coef[0]), rms


def empirical_dimensions(atoms: AtomMeasure, r_lo: float, r_hi: float, n_scales: int = 12) -> EmpiricalDimensions:
    """Log-log slopes of the correlation sum and of max_x mu(B_r(x)) over geometric scales."""
    if len(atoms) < 2:
        raise ValueError("need at least two atoms")
    if not 0 < r_lo < r_hi:
        raise ValueError("need 0 < r_lo < r_hi")
    if n_scales < 2:
        raise ValueError("need at least two scales")
    radii = np.geomspace(r_lo, r_hi, n_scales)
    corr = np.array([correlation_sum(atoms, r) for r in radii])
    frost = np.array([ball_masses(atoms, r).max() for r in radii])
    logr = np.log(radii)
    cs, cr = _slope(logr, np.log(corr))
    fs, fr = _slope(logr, np.log(frost))
    return EmpiricalDimensions(cs, fs, cr, fr)
