from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dimcert.algebraic import (
    HYPERBOLIC,
    OTHER,
    PISOT,
    SALEM,
    IntegerPolynomial,
    classify,
    enclose_reciprocal,
    find_roots,
    multinacci,
    parse_polynomials,
    read_polynomial_file,
    reciprocal_box,
    trace_polynomial,
)

SMALL_SALEM_HALF = (1, -1, 1, -1, 0, 0, -1, 1, -1, 1)
SMALL_SALEM_BETA = 1.188368147508
SMALL_SALEM_RECIPROCAL = 0.841490073675


def small_salem():
    return IntegerPolynomial.from_palindromic_half(SMALL_SALEM_HALF)


def test_polynomial_basics():
    p = IntegerPolynomial((1, 0, -1, -1))
    assert p.degree == 3
    assert str(p) == "x^3 - x - 1"
    assert multinacci(2).coefficients == (1, -1, -1)
    assert p.exact(Fraction(1)) == -1
    with pytest.raises(ValueError):
        IntegerPolynomial((0, 1))
    with pytest.raises(ValueError):
        IntegerPolynomial((3,))


def test_palindromic_mirror():
    s = small_salem()
    assert s.degree == 18
    assert s.is_palindromic
    assert s.coefficients[:10] == SMALL_SALEM_HALF


@pytest.mark.parametrize(
    "coeffs, root",
    [((1, 0, -1, -1), 1.324717957244746), ((1, -1, -1), (1 + 5**0.5) / 2), ((1, -2), 2.0)],
)
def test_dominant_roots(coeffs, root):
    roots = find_roots(IntegerPolynomial(coeffs))
    top = roots[0]
    assert abs(top.value - root) < 1e-14
    assert top.radius < 1e-14


def test_root_residuals_and_vieta():
    for p in (small_salem(), multinacci(5), IntegerPolynomial((2, -3, -1, 4))):
        roots = find_roots(p)
        with mpmath.workdps(60):
            for r in roots:
                assert abs(p(r.value)) <= max(r.residual, mpmath.mpf(10) ** -40)
            prod = mpmath.fprod(abs(r.value) for r in roots)
            assert abs(prod - abs(mpmath.mpf(p.coefficients[-1]) / p.leading)) < 1e-30


def test_salem_roots_closed_under_inversion():
    roots = find_roots(small_salem())
    with mpmath.workdps(60):
        for r in roots:
            inv = 1 / r.value
            assert min(abs(inv - s.value) for s in roots) < 1e-30


def test_repeated_roots_reported():
    from dimcert.algebraic import RootFindingError

    with pytest.raises(RootFindingError):
        find_roots(IntegerPolynomial((1, -2, 1)))


@pytest.mark.parametrize(
    "coeffs, kind",
    [
        ((1, 0, -1, -1), PISOT),
        ((1, -1, -1), PISOT),
        ((1, -1, -1, -1), PISOT),
        ((1, 0, -2), OTHER),
        ((2, -3, -1), HYPERBOLIC),
    ],
)
def test_classify(coeffs, kind):
    c = classify(IntegerPolynomial(coeffs))
    assert c.kind == kind
    assert c.certified


def test_classify_small_salem():
    c = classify(small_salem())
    assert c.kind == SALEM
    assert c.certified
    assert c.dominant_root == pytest.approx(SMALL_SALEM_BETA, abs=1e-12)


def test_trace_polynomial_identity():
    s = small_salem()
    q = trace_polynomial(s)
    x = mpmath.mpf("0.37")
    with mpmath.workdps(50):
        lhs = s(x)
        rhs = x**9 * mpmath.polyval(q, x + 1 / x)
        assert abs(lhs - rhs) < 1e-40


def test_palindrome_with_two_large_roots_is_other():
    # (x^2 - 3x + 1)(x^2 - 4x + 1): roots 2.618 and 3.732 both lie outside the circle
    c = classify(IntegerPolynomial((1, -7, 14, -7, 1)))
    assert c.kind == OTHER
    assert c.dominant_root == pytest.approx(2 + 3**0.5)


def test_reciprocal_boxes():
    box = reciprocal_box(small_salem(), 1e-8)
    exact = 1 / mpmath.mpf(find_roots(small_salem())[0].value.real)
    assert box.lo <= exact - mpmath.mpf(1e-8) and exact + mpmath.mpf(1e-8) <= box.hi
    assert box.mid == pytest.approx(SMALL_SALEM_RECIPROCAL, abs=1e-12)
    fib = reciprocal_box(multinacci(2), 0.5e-5)
    assert fib.mid == pytest.approx(0.6180339887, abs=1e-10)
    half = reciprocal_box(IntegerPolynomial((1, -2)), 1e-8)
    assert Fraction(half.lo) <= Fraction(1, 2) - Fraction(1e-8)
    assert Fraction(half.hi) >= Fraction(1, 2) + Fraction(1e-8)
    assert half.hi - half.lo < 2e-8 + 1e-15


def test_reciprocal_box_rejects_tiny_delta():
    with pytest.raises(ValueError):
        reciprocal_box(small_salem(), 1e-20)


@given(st.integers(2, 8))
def test_reciprocal_enclosure_sign_change(n):
    p = multinacci(n)
    lo, hi = enclose_reciprocal(p)
    rev = p.reversed()
    assert lo == hi or rev.exact(lo) * rev.exact(hi) < 0
    assert hi - lo < Fraction(1, 10**14)


def test_parse_polynomials(tmp_path):
    text = "# comment\n1 -1 -1\n\n1 0 -1 -1  # trailing\n"
    polys = parse_polynomials(text)
    assert [p.coefficients for p in polys] == [(1, -1, -1), (1, 0, -1, -1)]
    f = tmp_path / "salem.txt"
    f.write_text(" ".join(map(str, SMALL_SALEM_HALF)) + "\n")
    (p,) = read_polynomial_file(f, palindromic_half=True)
    assert p == small_salem()
    with pytest.raises(ValueError):
        parse_polynomials("1 x 2\n")
