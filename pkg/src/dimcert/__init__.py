"""Certified lower bounds on correlation and Frostman dimensions of self-similar measures."""

from .algebraic import IntegerPolynomial, classify, find_roots, multinacci, reciprocal_box
from .asymmetric import apply_d1_discrete, certify_regularity, support_interval
from .discretize import CertificateResult, HatConfig, hat_step
from .oracle import empirical_dimensions, finite_level_atoms
from .scheme import (
    AdmissibleInterval,
    AffineScheme,
    BoundRow,
    BoundTable,
    ComplementaryScheme,
    ParameterBox,
    SimilarityScheme,
    StepFunction,
    UniformPartition,
    admissible_interval,
    bernoulli,
    build_complementary,
    extend_by_squaring,
    zero_one_three,
)
from .search import SearchConfig, near_one_check, refine_bound, scan_range
from .symmetric import apply_d2_discrete, certify_alpha, check_pointwise_d2, one_shot_alpha

__version__ = "0.1.0"

__all__ = [
    "AdmissibleInterval",
    "AffineScheme",
    "BoundRow",
    "BoundTable",
    "CertificateResult",
    "ComplementaryScheme",
    "HatConfig",
    "IntegerPolynomial",
    "ParameterBox",
    "SearchConfig",
    "SimilarityScheme",
    "StepFunction",
    "UniformPartition",
    "admissible_interval",
    "apply_d1_discrete",
    "apply_d2_discrete",
    "bernoulli",
    "build_complementary",
    "certify_alpha",
    "certify_regularity",
    "check_pointwise_d2",
    "classify",
    "empirical_dimensions",
    "extend_by_squaring",
    "find_roots",
    "finite_level_atoms",
    "hat_step",
    "multinacci",
    "near_one_check",
    "one_shot_alpha",
    "reciprocal_box",
    "refine_bound",
    "scan_range",
    "support_interval",
    "zero_one_three",
]
