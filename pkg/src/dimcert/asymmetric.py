"""Asymmetric diffusion operator for affine schemes and Frostman (alpha-regularity) certificates."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .discretize import HatConfig, WindowPlan, contraction_scalar, iterate_hat, up
from .scheme import (
    CERTIFIED,
    AffineScheme,
    StepFunction,
    UniformPartition,
    round_down,
    round_up,
)

log = logging.getLogger(__name__)

# default neighbourhood radius as a fraction of |J|
DEFAULT_RADIUS_FRACTION = 0.05


@dataclass(frozen=True)
class RegularityCertificate:
    status: str
    alpha: float
    neighborhood_radius: float
    iterations_used: int
    final_function: StepFunction
    threshold: float = 1.0

    def __post_init__(self):
        if self.status == CERTIFIED and not np.all(self.final_function.values < self.threshold):
            raise ValueError("certified result must have every value below the threshold")

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


def support_interval(scheme: AffineScheme) -> tuple[float, float]:
    """Smallest interval invariant under all maps: hull of the fixed points c_j/(1 - r_j)."""
    fixed = [Fraction(c) / (1 - Fraction(r)) for r, c in scheme.maps]
    return round_down(min(fixed)), round_up(max(fixed))


def neighborhood_partition(scheme: AffineScheme, radius: float, cells: int) -> UniformPartition:
    """Uniform partition of B_r(J) for J = support_interval(scheme)."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    lo, hi = support_interval(scheme)
    return UniformPartition(round_down(Fraction(lo) - Fraction(radius)), round_up(Fraction(hi) + Fraction(radius)), cells)


class AsymmetricOperator:
    """sum_j p_j r_j^(-alpha) sup_cell psi((x - c_j)/r_j), discretized on a partition."""

    def __init__(self, scheme: AffineScheme, partition: UniformPartition):
        self.scheme = scheme
        self.partition = partition
        ratios = scheme.ratios
        self.plan = WindowPlan.build(
            partition, scheme.translations, ratios, ratios, weight_keys=scheme.probabilities
        )

    def weights(self, alpha: float) -> list[float]:
        # |(f_j^-1)'| = 1/r_j exactly for affine maps
        return [up(p * contraction_scalar(r, alpha)) for p, r in zip(self.scheme.probabilities, self.scheme.ratios)]

    def apply_values(self, values: np.ndarray, alpha: float) -> np.ndarray:
        return self.plan.apply(values, self.weights(alpha))

    def __call__(self, psi: StepFunction, alpha: float) -> StepFunction:
        if psi.partition != self.partition:
            raise ValueError("partition mismatch")
        return StepFunction(self.partition, self.apply_values(psi.values, alpha))


def apply_d1_discrete(psi: StepFunction, alpha: float, scheme: AffineScheme) -> StepFunction:
    """One application of the discretized asymmetric operator; psi vanishes off its partition."""
    return AsymmetricOperator(scheme, psi.partition)(psi, alpha)


def certify_regularity(
    scheme: AffineScheme,
    alpha: float,
    radius: float | None,
    cells: int,
    cfg: HatConfig,
) -> RegularityCertificate:
    """Hat-iterate the indicator of B_r(J); success certifies that mu is alpha-regular.

    ``radius=None`` uses 5% of |J|.
    """
    if radius is None:
        lo, hi = support_interval(scheme)
        radius = DEFAULT_RADIUS_FRACTION * (hi - lo)
    partition = neighborhood_partition(scheme, radius, cells)
    op = AsymmetricOperator(scheme, partition)
    weights = op.weights(alpha)
    status, n, values = iterate_hat(
        lambda v: op.plan.apply(v, weights),
        np.ones(partition.cells),
        cfg.theta,
        cfg.max_iterations,
        cfg.threshold,
    )
    return RegularityCertificate(status, alpha, radius, n, StepFunction(partition, values), cfg.threshold)


def frostman_below_correlation(frostman_alpha: float, correlation_alpha: float) -> bool:
    """Soft consistency check D_1 <= D_2; logs a warning instead of failing."""
    ok = frostman_alpha <= correlation_alpha
    if not ok:
        log.warning(
            "Frostman certificate %.6f exceeds correlation certificate %.6f; "
            "both are lower bounds, so the correlation run is the weaker one",
            frostman_alpha,
            correlation_alpha,
        )
    return ok


def bernoulli_difference_scheme(lam: float) -> AffineScheme:
    """{lam x - 1, lam x, lam x + 1} with weights (1/4, 1/2, 1/4)."""
    return AffineScheme(((lam, -1.0), (lam, 0.0), (lam, 1.0)), (0.25, 0.5, 0.25))
