"""Symmetric diffusion operator, its discretization over a parameter box, and certification.

For a box Lambda of ratios the discretized operator on a step function psi is

    (inf Lambda)^(-alpha) * sum_d q_d * sup_{x in cell, lam in Lambda} psi((x - d) / lam)

and a hat-iterate of the indicator of J that drops below the threshold
everywhere certifies D_2(mu_lam) >= alpha for every lam in Lambda.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Sequence

import numpy as np

from .discretize import (
    CertificateResult,
    HatConfig,
    WindowPlan,
    contraction_scalar,
    hat_step,
    iterate_hat,
    up,
)
from .scheme import (
    AdmissibleInterval,
    ComplementaryScheme,
    ParameterBox,
    StepFunction,
    UniformPartition,
    _as_box,
    check_admissibility,
)

__all__ = [
    "SymmetricOperator",
    "apply_d2_discrete",
    "hat_step",
    "certify_alpha",
    "one_shot_alpha",
    "check_pointwise_d2",
]

log = logging.getLogger(__name__)


class SymmetricOperator:
    """Discretized symmetric operator for fixed (comp, box, partition); alpha varies per call."""

    def __init__(self, comp: ComplementaryScheme, ratio_box, partition: UniformPartition):
        box = _as_box(ratio_box)
        if not partition.is_symmetric:
            raise ValueError("the symmetric operator needs a partition of some [-a, a]")
        interval = AdmissibleInterval(partition.hi, 0.0)
        if not check_admissibility(interval, comp, box):
            raise ValueError(
                f"J = [-{partition.hi}, {partition.hi}] is not admissible for lam_max = {box.hi}"
            )
        self.comp = comp
        self.box = box
        self.partition = partition
        k = len(comp.differences)
        self.plan = WindowPlan.build(
            partition, comp.differences, [box.lo] * k, [box.hi] * k, weight_keys=comp.weights
        )

    def weights(self, alpha: float) -> list[float]:
        s = contraction_scalar(self.box.lo, alpha)
        return [up(q * s) for q in self.comp.weights]

    def apply_values(self, values: np.ndarray, alpha: float) -> np.ndarray:
        return self.plan.apply(values, self.weights(alpha))

    def __call__(self, psi: StepFunction, alpha: float) -> StepFunction:
        if psi.partition != self.partition:
            raise ValueError("partition mismatch")
        return StepFunction(self.partition, self.apply_values(psi.values, alpha))


def apply_d2_discrete(psi: StepFunction, alpha: float, ratio_box, comp: ComplementaryScheme) -> StepFunction:
    """One application of the discretized symmetric operator (never under-approximates)."""
    return SymmetricOperator(comp, ratio_box, psi.partition)(psi, alpha)


def _cell_count_advisory(box: ParameterBox, partition: UniformPartition) -> None:
    width = partition.hi - partition.lo
    if box.width > 0 and not (0.5 * partition.cells * box.width <= width <= 2 * box.width * partition.cells):
        log.warning(
            "cell width %.3g is not comparable with |Lambda| = %.3g (advisory only)",
            partition.cell_width,
            box.width,
        )


def certify_with(op: SymmetricOperator, cfg: HatConfig) -> CertificateResult:
    """Hat-iterate 1_J under ``op`` at cfg.alpha."""
    weights = op.weights(cfg.alpha)
    status, n, values = iterate_hat(
        lambda v: op.plan.apply(v, weights),
        np.ones(op.partition.cells),
        cfg.theta,
        cfg.max_iterations,
        cfg.threshold,
    )
    return CertificateResult(status, cfg.alpha, n, StepFunction(op.partition, values), cfg.threshold)


def certify_alpha(
    comp: ComplementaryScheme,
    ratio_box,
    interval: AdmissibleInterval,
    cells: int,
    cfg: HatConfig,
) -> CertificateResult:
    """Try to certify D_2 >= cfg.alpha uniformly over the box."""
    partition = UniformPartition.over(interval, cells)
    box = _as_box(ratio_box)
    _cell_count_advisory(box, partition)
    return certify_with(SymmetricOperator(comp, box, partition), cfg)


def one_shot_alpha(psi: StepFunction, ratio_box, comp: ComplementaryScheme) -> float:
    """Largest alpha with D_{alpha}[psi] <= psi, from a single alpha = 0 application.

    alpha = log(max_J D_0[psi] / psi) / log(inf Lambda), rounded down and
    re-verified against the rounded-up scalar.
    """
    if np.any(psi.values <= 0):
        raise ValueError("psi must be strictly positive on every cell")
    op = SymmetricOperator(comp, ratio_box, psi.partition)
    d0 = op.apply_values(psi.values, 0.0)
    ratio = float(np.max(np.nextafter(d0 / psi.values, np.inf)))
    lam = op.box.lo
    alpha = math.log(ratio) / math.log(lam)
    alpha -= 1e-13 * max(1.0, abs(alpha))
    while alpha > 0 and up(contraction_scalar(lam, alpha) * ratio) > 1.0:
        alpha -= 1e-12
    return alpha


def check_pointwise_d2(
    psi: Callable[[np.ndarray], np.ndarray],
    alpha: float,
    lam: float,
    comp: ComplementaryScheme,
    grid: Sequence[float],
    interval: AdmissibleInterval | tuple[float, float] | None = None,
) -> bool:
    """Sampled check of lam^-alpha sum_d q_d psi((x - d)/lam) < psi(x) on ``grid``.

    With ``interval`` given, psi is taken to vanish outside it.  Diagnostic
    only: sampling proves nothing between grid points.
    """
    x = np.asarray(grid, dtype=np.float64)
    if interval is None:
        f = psi
    else:
        lo, hi = (interval.lo, interval.hi) if isinstance(interval, AdmissibleInterval) else interval

        def f(y):
            y = np.asarray(y, dtype=np.float64)
            return np.where((y >= lo) & (y <= hi), psi(y), 0.0)

    image = sum(q * f((x - d) / lam) for d, q in zip(comp.differences, comp.weights))
    image = lam ** (-alpha) * image
    return bool(np.all(image < f(x)))
