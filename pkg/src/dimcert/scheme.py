"""Schemes of similarities, parameter boxes, admissible intervals and step functions.

All geometric bounds derived here (support bound, interval half-width,
admissibility test) are computed in exact rational arithmetic on the float
inputs and rounded outward, so downstream certificates never rely on an
under-estimated interval.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

EPS = 2.0**-52


def round_up(q: Fraction | float) -> float:
    """Smallest float >= q."""
    x = float(q)
    if Fraction(x) < q:
        x = math.nextafter(x, math.inf)
    return x


def round_down(q: Fraction | float) -> float:
    """Largest float <= q."""
    x = float(q)
    if Fraction(x) > q:
        x = math.nextafter(x, -math.inf)
    return x


@dataclass(frozen=True)
class ParameterBox:
    """Closed interval [lo, hi] of contraction ratios with float endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (0.0 < lo <= hi):
            raise ValueError(f"need 0 < lo <= hi, got [{lo}, {hi}]")

    @classmethod
    def point(cls, value: float) -> "ParameterBox":
        return cls(value, value)

    @classmethod
    def around(cls, center: float, radius: float) -> "ParameterBox":
        """Box containing [center - radius, center + radius], rounded outward."""
        c, r = Fraction(center), Fraction(radius)
        return cls(round_down(c - r), round_up(c + r))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi


def _as_box(box) -> ParameterBox:
    if isinstance(box, ParameterBox):
        return box
    if isinstance(box, (int, float)):
        return ParameterBox.point(box)
    lo, hi = box
    return ParameterBox(lo, hi)


def _check_probabilities(probs: Sequence[float]) -> None:
    if len(probs) == 0:
        raise ValueError("scheme needs at least one map")
    if any(not (p > 0.0) or not math.isfinite(p) for p in probs):
        raise ValueError("probabilities must be strictly positive")
    if abs(math.fsum(probs) - 1.0) > len(probs) * EPS:
        raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")


@dataclass(frozen=True)
class SimilarityScheme:
    """Maps x -> lam * x + c_j, chosen with probability p_j, for lam in ``ratio_box``."""

    ratio_box: ParameterBox
    translations: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ratio_box", _as_box(self.ratio_box))
        object.__setattr__(self, "translations", tuple(float(c) for c in self.translations))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(self.translations) != len(self.probabilities):
            raise ValueError("translations and probabilities differ in length")
        if not all(math.isfinite(c) for c in self.translations):
            raise ValueError("translations must be finite")
        _check_probabilities(self.probabilities)
        if self.ratio_box.hi >= 1.0:
            raise ValueError("contraction ratio must be < 1")

    @property
    def size(self) -> int:
        return len(self.translations)

    def with_ratio_box(self, box) -> "SimilarityScheme":
        return replace(self, ratio_box=_as_box(box))

    def entropy(self) -> float:
        return -math.fsum(p * math.log(p) for p in self.probabilities)

    def dimension_cap(self) -> float:
        """Upper bound min(1, H / log(1/lam_min)) for the dimension of every measure in the box."""
        return min(1.0, self.entropy() / -math.log(self.ratio_box.lo))


def uniform_scheme(translations: Iterable[float], box) -> SimilarityScheme:
    translations = tuple(translations)
    k = len(translations)
    return SimilarityScheme(_as_box(box), translations, (1.0 / k,) * k)


def bernoulli(box) -> SimilarityScheme:
    """Bernoulli convolution scheme {lam x, lam x + 1} with equal weights."""
    return uniform_scheme((0.0, 1.0), box)


def zero_one_three(box) -> SimilarityScheme:
    """The {0,1,3}-system with equal weights."""
    return uniform_scheme((0.0, 1.0, 3.0), box)


@dataclass(frozen=True)
class AffineScheme:
    """Affine contractions x -> r_j x + c_j with possibly distinct ratios."""

    maps: tuple[tuple[float, float], ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        maps = tuple((float(r), float(c)) for r, c in self.maps)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(maps) != len(self.probabilities):
            raise ValueError("maps and probabilities differ in length")
        for r, c in maps:
            if not (0.0 < r < 1.0) or not math.isfinite(c):
                raise ValueError(f"bad map ({r}, {c}): need 0 < ratio < 1")
        _check_probabilities(self.probabilities)

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(r for r, _ in self.maps)

    @property
    def translations(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.maps)


@dataclass(frozen=True)
class ComplementaryScheme:
    """Distinct pairwise translation differences d_k with merged weights q_k."""

    differences: tuple[float, ...]
    weights: tuple[float, ...]

    @property
    def max_abs_difference(self) -> float:
        return max(abs(d) for d in self.differences)

    def is_symmetric(self) -> bool:
        table = dict(zip(self.differences, self.weights))
        return all(table.get(-d) == w for d, w in table.items())


def build_complementary(scheme: SimilarityScheme) -> ComplementaryScheme:
    """Merge the ordered pairs (i, j) by c_i - c_j, weighting each by p_i p_j.

    Weights are summed exactly and rounded up, and a difference and its
    negative always get the identical float weight.
    """
    exact: dict[Fraction, Fraction] = {}
    cs = [Fraction(c) for c in scheme.translations]
    ps = [Fraction(p) for p in scheme.probabilities]
    for ci, pi in zip(cs, ps):
        for cj, pj in zip(cs, ps):
            d = ci - cj
            exact[d] = exact.get(d, Fraction(0)) + pi * pj
    diffs = sorted(exact)
    differences = tuple(float(d) for d in diffs)
    if len(set(differences)) != len(differences):
        raise ValueError("translations too close to separate their differences in float")
    weights = tuple(round_up(exact[d]) for d in diffs)
    return ComplementaryScheme(differences, weights)


@dataclass(frozen=True)
class AdmissibleInterval:
    """Symmetric interval J = [-a, a] with a > m, where supp mu*(-mu) lies in [-m, m]."""

    half_width: float
    support_bound: float

    def __post_init__(self):
        if not (self.half_width > self.support_bound >= 0.0):
            raise ValueError(
                f"need half_width > support_bound >= 0, got a={self.half_width}, m={self.support_bound}"
            )

    @property
    def lo(self) -> float:
        return -self.half_width

    @property
    def hi(self) -> float:
        return self.half_width


def admissible_interval(comp: ComplementaryScheme, ratio_box, margin: float = 0.1) -> AdmissibleInterval:
    """m = max|d| / (1 - lam_max) and a = (1 + margin) m, both rounded up."""
    box = _as_box(ratio_box)
    if margin <= 0:
        raise ValueError("margin must be positive")
    if box.hi >= 1.0:
        raise ValueError("lam_max must be < 1")
    dmax = Fraction(comp.max_abs_difference)
    if dmax == 0:
        raise ValueError("degenerate scheme (all differences zero): pass an explicit interval")
    m = round_up(dmax / (1 - Fraction(box.hi)))
    a = round_up((1 + Fraction(margin)) * Fraction(m))
    return AdmissibleInterval(a, m)


def explicit_interval(half_width: float, comp: ComplementaryScheme | None = None, ratio_box=None) -> AdmissibleInterval:
    """J = [-a, a] supplied by the caller, e.g. for single-map schemes."""
    m = 0.0
    if comp is not None and ratio_box is not None and comp.max_abs_difference > 0:
        m = round_up(Fraction(comp.max_abs_difference) / (1 - Fraction(_as_box(ratio_box).hi)))
    return AdmissibleInterval(float(half_width), m)


def check_admissibility(interval: AdmissibleInterval, comp: ComplementaryScheme, ratio_box) -> bool:
    """True iff lam_max * a + max|d| < a, decided exactly."""
    box = _as_box(ratio_box)
    if box.hi >= 1.0:
        return False
    a = Fraction(interval.half_width)
    return Fraction(box.hi) * a + Fraction(comp.max_abs_difference) < a


@dataclass(frozen=True)
class UniformPartition:
    """N equal cells tiling [lo, hi]; cell i is [lo + i w, lo + (i+1) w)."""

    lo: float
    hi: float
    cells: int

    def __post_init__(self):
        if self.cells < 1:
            raise ValueError("need at least one cell")
        if not (self.hi > self.lo):
            raise ValueError("empty partition interval")

    @classmethod
    def over(cls, interval: AdmissibleInterval, cells: int) -> "UniformPartition":
        return cls(interval.lo, interval.hi, int(cells))

    @property
    def cell_width(self) -> float:
        return (self.hi - self.lo) / self.cells

    @property
    def is_symmetric(self) -> bool:
        return self.lo == -self.hi

    def edges(self) -> np.ndarray:
        k = np.arange(self.cells + 1, dtype=np.float64)
        return self.lo + k * self.cell_width

    def midpoints(self) -> np.ndarray:
        k = np.arange(self.cells, dtype=np.float64)
        return self.lo + (k + 0.5) * self.cell_width

    def exact_edge(self, i: int) -> Fraction:
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        return lo + (hi - lo) * i / self.cells

    def locate_exact(self, x: Fraction) -> int | None:
        """Index of the cell holding x (exact arithmetic), or None outside [lo, hi]."""
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if x < lo or x > hi:
            return None
        i = math.floor((x - lo) * self.cells / (hi - lo))
        return min(i, self.cells - 1)

    def refine(self, factor: int = 2) -> "UniformPartition":
        return UniformPartition(self.lo, self.hi, self.cells * factor)


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Nonnegative piecewise-constant function on a partition, zero outside it."""

    partition: UniformPartition
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != (self.partition.cells,):
            raise ValueError(f"expected {self.partition.cells} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("step function values must be finite and nonnegative")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def indicator(cls, partition: UniformPartition) -> "StepFunction":
        return cls(partition, np.ones(partition.cells))

    @classmethod
    def from_callable(cls, partition: UniformPartition, fn, samples: int = 8) -> "StepFunction":
        """Cell values = max of fn over ``samples`` evenly spaced points per cell (endpoints included)."""
        e = partition.edges()
        t = np.linspace(0.0, 1.0, samples)
        pts = e[:-1, None] + (e[1:] - e[:-1])[:, None] * t[None, :]
        return cls(partition, np.max(fn(pts), axis=1).clip(min=0.0))

    def __call__(self, x):
        """Evaluate pointwise (float arithmetic; zero outside the partition)."""
        x = np.asarray(x, dtype=np.float64)
        p = self.partition
        idx = np.floor((x - p.lo) / p.cell_width).astype(np.int64)
        idx = np.where(x == p.hi, p.cells - 1, idx)
        inside = (x >= p.lo) & (x <= p.hi) & (idx >= 0) & (idx < p.cells)
        return np.where(inside, self.values[np.clip(idx, 0, p.cells - 1)], 0.0)

    def max(self) -> float:
        return float(self.values.max())

    def refine(self, factor: int = 2) -> "StepFunction":
        return StepFunction(self.partition.refine(factor), np.repeat(self.values, factor))


CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class BoundRow:
    lambda_lo: float
    lambda_hi: float
    alpha: float
    status: str
    iterations: int
    cells: int

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


@dataclass(frozen=True)
class BoundTable:
    """Piecewise-constant lower bound: rows (lambda_lo, lambda_hi, alpha, status, iterations, cells)."""

    rows: tuple[BoundRow, ...] = ()

    def __post_init__(self):
        rows = tuple(sorted(self.rows, key=lambda r: (r.lambda_lo, r.lambda_hi)))
        object.__setattr__(self, "rows", rows)
        for r in rows:
            if r.certified and not (0.0 < r.alpha < 1.0):
                raise ValueError(f"certified row with alpha={r.alpha} outside (0, 1)")

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def covers(self, lo: float, hi: float) -> bool:
        """True when the union of rows contains [lo, hi] without gaps."""
        reach = lo
        for r in self.rows:
            if r.lambda_lo > reach:
                break
            reach = max(reach, r.lambda_hi)
        return bool(self.rows) and self.rows[0].lambda_lo <= lo and reach >= hi

    def lookup(self, lam: float, lam_hi: float | None = None) -> float:
        """Best certified alpha among rows whose box contains lam (or all of [lam, lam_hi])."""
        lam_hi = lam if lam_hi is None else lam_hi
        los = [r.lambda_lo for r in self.rows]
        cands = [r.alpha for r in self.rows[: bisect_right(los, lam)] if r.lambda_hi >= lam_hi and r.certified]
        if not cands:
            raise KeyError(f"no certified row covers lambda={lam}")
        return max(cands)

    def minimum(self) -> BoundRow:
        return min((r for r in self.rows if r.certified), key=lambda r: r.alpha)


def _square_down(x: float) -> float:
    return round_down(Fraction(x) ** 2)


def _square_up(x: float) -> float:
    return round_up(Fraction(x) ** 2)


def squaring_chain(lam: float, lo: float = 0.5, hi: float = 0.8) -> tuple[float, float, int]:
    """Enclosure [x_lo, x_hi] of lam^(2^k) for the least k >= 0 with lam^(2^k) <= hi."""
    if not (0.5 <= lam < 1.0):
        raise ValueError("lambda must lie in [0.5, 1)")
    k, x_lo, x_hi = 0, lam, lam
    while x_lo > hi:
        x_lo, x_hi, k = _square_down(x_lo), _square_up(x_hi), k + 1
    return x_lo, x_hi, k


def extend_by_squaring(table: BoundTable, lam: float) -> float:
    """Lower bound at lam from a table over [0.5, 0.8], using dim mu_lam >= dim mu_{lam^2}."""
    x_lo, x_hi, _ = squaring_chain(lam)
    return table.lookup(x_lo, x_hi)
