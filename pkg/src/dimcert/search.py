"""Alpha search within a bracket, parameter-range scans and the near-1 Gaussian check."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .discretize import CertificateResult, HatConfig
from .scheme import (
    INCONCLUSIVE,
    BoundRow,
    BoundTable,
    ParameterBox,
    SimilarityScheme,
    UniformPartition,
    _as_box,
    admissible_interval,
    bernoulli,
    build_complementary,
)
from .symmetric import SymmetricOperator, certify_with, check_pointwise_d2

log = logging.getLogger(__name__)

# d2 default for a warm-started pass sits this far above the previous alpha
WARM_HEADROOM = 0.02


@dataclass(frozen=True)
class SearchConfig:
    """Bracket [d1, d2] for alpha, resolution epsilon, and hat-iteration resources.

    ``d2=None`` means the entropy cap min(1, H / log(1/lam_min)) of the box.
    """

    d1: float = 0.5
    d2: float | None = None
    epsilon: float = 1e-2
    cells: int = 10_000
    max_iterations: int = 200
    theta: float = 1e-7
    threshold: float = 0.995
    margin: float = 0.1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 <= self.d1 <= 1.0:
            raise ValueError("d1 must lie in [0, 1]")
        if self.d2 is not None:
            if not self.d1 <= self.d2 <= 1.0:
                raise ValueError("need d1 <= d2 <= 1")
            if self.d2 > self.d1 and self.epsilon > self.d2 - self.d1:
                raise ValueError("epsilon exceeds the bracket width")
        if self.cells < 1:
            raise ValueError("cells must be >= 1")
        # validates theta, K and t
        self.hat(self.d1)

    def hat(self, alpha: float) -> HatConfig:
        return HatConfig(self.theta, self.max_iterations, self.threshold, alpha)


def _grid_size(width: float, epsilon: float) -> int:
    return max(2, math.floor(math.sqrt(width / epsilon)))


def refine_bound(scheme: SimilarityScheme, ratio_box, cfg: SearchConfig) -> CertificateResult:
    """Largest grid-certified alpha in [d1, d2], resolved to within epsilon.

    Each level splits the current bracket [lo, hi] (lo certified) into
    M = floor(sqrt((hi - lo)/epsilon)) steps and certifies upward until the
    first failure, which becomes the new hi.  Levels repeat until hi - lo <= epsilon.
    """
    box = _as_box(ratio_box)
    scheme = scheme.with_ratio_box(box)
    comp = build_complementary(scheme)
    interval = admissible_interval(comp, box, cfg.margin)
    op = SymmetricOperator(comp, box, UniformPartition.over(interval, cfg.cells))

    best = certify_with(op, cfg.hat(cfg.d1))
    if not best.certified:
        return best
    hi = scheme.dimension_cap() if cfg.d2 is None else cfg.d2
    lo = cfg.d1
    if hi <= lo:
        return best
    while hi - lo > cfg.epsilon:
        m = _grid_size(hi - lo, cfg.epsilon)
        base, step = lo, (hi - lo) / m
        new_hi = None
        for k in range(1, m + 1):
            alpha = hi if k == m else base + k * step
            res = certify_with(op, cfg.hat(alpha))
            if not res.certified:
                new_hi = alpha
                break
            best, lo = res, alpha
        if new_hi is None:
            break
        hi = new_hi
    return best


def overlapping_boxes(lo: float, hi: float, n: int, overlap: float = 0.1) -> list[ParameterBox]:
    """n boxes of equal nominal width covering [lo, hi], each widened by overlap*width, clipped."""
    if n == 0 or hi <= lo:
        return []
    if overlap < 0:
        raise ValueError("overlap must be nonnegative")
    edges = np.linspace(lo, hi, n + 1)
    pad = overlap * (hi - lo) / n
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        out.append(ParameterBox(max(lo, float(a) - pad), min(hi, float(b) + pad)))
    return out


def _row(box: ParameterBox, res: CertificateResult, cells: int, d1: float) -> BoundRow:
    alpha = res.alpha if res.certified else d1
    return BoundRow(box.lo, box.hi, alpha, res.status, res.iterations_used, cells)


def scan_box(scheme: SimilarityScheme, box: ParameterBox, cfg: SearchConfig, previous: float | None = None) -> BoundRow:
    """One work item: refine on the box, optionally warm-started from a previous alpha."""
    if previous is None:
        return _row(box, refine_bound(scheme, box, cfg), cfg.cells, cfg.d1)
    d2 = min(1.0, previous + WARM_HEADROOM)
    d1 = max(0.0, min(previous - cfg.epsilon, d2))
    eps = min(cfg.epsilon, d2 - d1) if d2 > d1 else cfg.epsilon
    warm = replace(cfg, d1=d1, d2=d2, epsilon=eps)
    res = refine_bound(scheme, box, warm)
    if not res.certified or res.alpha < previous:
        # refinement monotonicity: with superset resources the old alpha must still hold
        prev = refine_bound(scheme, box, replace(warm, d1=previous, d2=previous))
        if prev.certified and (not res.certified or prev.alpha > res.alpha):
            res = prev
    return _row(box, res, cfg.cells, warm.d1)


def _scan_item(args) -> BoundRow:
    return scan_box(*args)


def resolve_workers(workers: int | None) -> int:
    env = os.environ.get("DIMCERT_WORKERS")
    if env:
        workers = int(env)
    return max(1, workers or 1)


def iter_scan(
    scheme: SimilarityScheme,
    lam_lo: float,
    lam_hi: float,
    n_intervals: int,
    overlap: float = 0.1,
    cfg: SearchConfig | None = None,
    warm_start: BoundTable | None = None,
    workers: int | None = 1,
) -> Iterator[BoundRow]:
    """Yield one row per box in box order; rows do not depend on the worker count."""
    if lam_hi >= 1.0:
        raise ValueError("lambda_hi must be < 1")
    if n_intervals < 0:
        raise ValueError("n_intervals must be nonnegative")
    cfg = cfg or SearchConfig()
    items = []
    for box in overlapping_boxes(lam_lo, lam_hi, n_intervals, overlap):
        prev = None
        if warm_start is not None:
            try:
                prev = warm_start.lookup(box.lo, box.hi)
            except KeyError:
                log.info("no warm-start row covers [%g, %g]", box.lo, box.hi)
        items.append((scheme, box, cfg, prev))
    n = resolve_workers(workers)
    if n == 1 or len(items) <= 1:
        for it in items:
            yield _scan_item(it)
        return
    with ProcessPoolExecutor(max_workers=n) as pool:
        # map preserves submission order
        yield from pool.map(_scan_item, items)


def scan_range(
    scheme: SimilarityScheme,
    lam_lo: float,
    lam_hi: float,
    n_intervals: int,
    overlap: float = 0.1,
    cfg: SearchConfig | None = None,
    warm_start: BoundTable | None = None,
    workers: int | None = 1,
) -> BoundTable:
    """Cover [lam_lo, lam_hi] by overlapping boxes and refine a bound on each."""
    return BoundTable(tuple(iter_scan(scheme, lam_lo, lam_hi, n_intervals, overlap, cfg, warm_start, workers)))


def gaussian_test_function(eps: float):
    """f_eps(x) = exp(-delta (1 - eps)^2 x^2) with delta = 2 eps - eps^2."""
    delta = 2 * eps - eps * eps
    k = delta * (1 - eps) ** 2
    return lambda x: np.exp(-k * np.asarray(x, dtype=np.float64) ** 2)


def near_one_check(eps: float, c: float, grid_halfwidth: float, n_points: int) -> bool:
    """Sampled check that the Bernoulli operator at lam = 1 - eps, alpha = 1 - c eps, shrinks f_eps."""
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    lam = 1.0 - eps
    comp = build_complementary(bernoulli(lam))
    grid = np.linspace(-grid_halfwidth, grid_halfwidth, n_points)
    return check_pointwise_d2(gaussian_test_function(eps), 1.0 - c * eps, lam, comp, grid)


__all__ = [
    "SearchConfig",
    "refine_bound",
    "overlapping_boxes",
    "scan_box",
    "iter_scan",
    "scan_range",
    "near_one_check",
    "gaussian_test_function",
    "resolve_workers",
    "INCONCLUSIVE",
]
