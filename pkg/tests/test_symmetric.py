from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dimcert.discretize import CertificateResult, HatConfig, contraction_scalar, hat_step, iterate_hat
from dimcert.scheme import (
    CERTIFIED,
    INCONCLUSIVE,
    ParameterBox,
    SimilarityScheme,
    StepFunction,
    UniformPartition,
    admissible_interval,
    bernoulli,
    build_complementary,
    explicit_interval,
    zero_one_three,
)
from dimcert.symmetric import (
    SymmetricOperator,
    apply_d2_discrete,
    certify_alpha,
    check_pointwise_d2,
    one_shot_alpha,
)

from reference import operator as reference_operator


def _setup(scheme, box, cells, margin=0.1):
    box = ParameterBox(*box) if not isinstance(box, ParameterBox) else box
    comp = build_complementary(scheme.with_ratio_box(box))
    iv = admissible_interval(comp, box, margin)
    return comp, box, UniformPartition.over(iv, cells)


def _reference(values, part, comp, box):
    terms = [(q, d, box.lo, box.hi) for d, q in zip(comp.differences, comp.weights)]
    return reference_operator(values, part.lo, part.hi, terms)


def test_matches_exact_reference_closely():
    comp, box, part = _setup(bernoulli(0.6), (0.59, 0.61), 30)
    rng = np.random.default_rng(1)
    v = rng.random(30)
    got = apply_d2_discrete(StepFunction(part, v), 0.0, box, comp).values
    exact = _reference(v, part, comp, box)
    for g, e in zip(got, exact):
        assert Fraction(g) >= e
        assert g <= float(e) * (1 + 1e-13)


@given(
    st.sampled_from([(0.0, 1.0), (0.0, 1.0, 3.0), (0.0, 2.0, 3.0, 7.0)]),
    st.floats(0.2, 0.9),
    st.floats(0.0, 0.05),
    st.integers(2, 24),
    st.integers(0, 2**32 - 1),
)
def test_discrete_dominates_exact_reference(translations, lam, width, cells, seed):
    scheme = SimilarityScheme(lam, translations, (1 / len(translations),) * len(translations))
    hi = min(lam + width, 0.95)
    comp, box, part = _setup(scheme, (lam, hi), cells)
    v = np.random.default_rng(seed).random(cells)
    got = apply_d2_discrete(StepFunction(part, v), 0.0, box, comp).values
    for g, e in zip(got, _reference(v, part, comp, box)):
        assert Fraction(g) >= e


@given(st.floats(0.05, 0.99), st.floats(0.0, 2.0))
def test_contraction_scalar_is_upper_bound(r, alpha):
    with mpmath.workdps(40):
        exact = mpmath.mpf(r) ** (-mpmath.mpf(alpha))
        assert mpmath.mpf(contraction_scalar(r, alpha)) >= exact


def test_rejects_inadmissible_partition():
    comp = build_complementary(bernoulli(0.75))
    with pytest.raises(ValueError):
        SymmetricOperator(comp, 0.75, UniformPartition(-4.0, 4.0, 10))
    with pytest.raises(ValueError):
        SymmetricOperator(comp, 0.75, UniformPartition(-4.0, 5.0, 10))


def test_worked_example_certifies():
    comp, box, part = _setup(bernoulli(0.75), (0.74, 0.76), 120, margin=0.08)
    iv = admissible_interval(comp, box, 0.08)
    res = certify_alpha(comp, box, iv, 120, HatConfig(theta=1e-3, max_iterations=200, threshold=0.995, alpha=0.75))
    assert res.certified
    assert res.iterations_used <= 25
    assert res.final_function.max() < 0.995


def test_lebesgue_case_certifies_high_alpha():
    comp, box, part = _setup(bernoulli(0.5), ParameterBox.point(0.5), 2000)
    iv = admissible_interval(comp, box)
    assert certify_alpha(comp, box, iv, 2000, HatConfig(1e-7, 300, 0.995, 0.99)).certified
    assert not certify_alpha(comp, box, iv, 2000, HatConfig(1e-7, 300, 0.995, 1.01)).certified


def test_hat_step_and_config_validation():
    p = UniformPartition(-1.0, 1.0, 3)
    q = UniformPartition(-1.0, 1.0, 4)
    out = hat_step(StepFunction(p, [0.1, 2.0, 0.5]), StepFunction(p, [1.0, 1.0, 1.0]), 0.25)
    assert out.values.tolist() == [0.35, 1.0, 0.75]
    with pytest.raises(ValueError):
        hat_step(StepFunction(p, [1, 1, 1]), StepFunction(q, [1, 1, 1, 1]), 0.1)
    with pytest.raises(ValueError):
        HatConfig(theta=0.0)
    with pytest.raises(ValueError):
        HatConfig(threshold=1.0)
    with pytest.raises(ValueError):
        CertificateResult(CERTIFIED, 0.5, 1, StepFunction(p, [1, 1, 1]), 0.995)


def test_iterate_hat_stalls_are_inconclusive():
    status, n, v = iterate_hat(lambda x: 2 * x, np.ones(3), 1e-3, 50, 0.995)
    assert status == INCONCLUSIVE
    assert n == 1
    np.testing.assert_array_equal(v, np.ones(3))


def test_one_shot_alpha_is_valid_and_sharp():
    comp, box, part = _setup(bernoulli(0.6180339887), ParameterBox.around(0.6180339887, 0.5e-5), 4000)
    iv = admissible_interval(comp, box)
    res = certify_alpha(comp, box, iv, 4000, HatConfig(1e-7, 500, 0.05, 0.82))
    assert res.certified
    alpha = one_shot_alpha(res.final_function, box, comp)
    op = SymmetricOperator(comp, box, part)
    psi = res.final_function.values
    assert np.all(op.apply_values(psi, alpha) <= psi)
    assert not np.all(op.apply_values(psi, alpha + 1e-9) <= psi)
    assert alpha > 0.82


def test_one_shot_needs_positive_function():
    comp, box, part = _setup(bernoulli(0.6), (0.6, 0.6), 10)
    with pytest.raises(ValueError):
        one_shot_alpha(StepFunction(part, np.zeros(10)), box, comp)


def test_pointwise_checks():
    comp = build_complementary(bernoulli(0.75))
    grid = (np.arange(1000) + 0.5) / 1000 * 8 - 4
    assert check_pointwise_d2(lambda x: 1 - 0.2 * np.abs(x), 0.2, 0.75, comp, grid, (-4, 4))
    # too large an exponent breaks it at the centre
    assert not check_pointwise_d2(lambda x: 1 - 0.2 * np.abs(x), 0.9, 0.75, comp, grid, (-4, 4))


def test_zero_one_three_never_exceeds_cap_small():
    box = ParameterBox(0.25, 0.26)
    comp = build_complementary(zero_one_three(box))
    iv = admissible_interval(comp, box)
    cap = np.log(3) / -np.log(box.hi)
    assert not certify_alpha(comp, box, iv, 5000, HatConfig(1e-7, 200, 0.995, cap)).certified


def test_explicit_interval_single_map():
    comp = build_complementary(SimilarityScheme(0.5, (0.0,), (1.0,)))
    res = certify_alpha(comp, 0.5, explicit_interval(1.0), 64, HatConfig(1e-3, 300, 0.995, 0.05))
    assert res.status == INCONCLUSIVE
