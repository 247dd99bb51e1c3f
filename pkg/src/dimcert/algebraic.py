"""Integer polynomials, certified root enclosures and Pisot / Salem classification.

Roots come from Aberth's simultaneous iteration in mpmath; each root carries a
Weierstrass-correction radius n |W_i|.  When these disks are pairwise disjoint
each contains exactly one root.  Salem structure is confirmed symbolically: a
palindromic P of degree 2m factors as x^m Q(x + 1/x), and P is Salem exactly
when Q has one root in (2, inf) and m - 1 distinct roots in (-2, 2), which a
Sturm count decides in integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath
import sympy

from .scheme import ParameterBox, round_down, round_up

PISOT = "pisot"
SALEM = "salem"
HYPERBOLIC = "hyperbolic"
OTHER = "other"

# on-circle tolerance for the floating Salem pre-check
UNIT_CIRCLE_TOL = 1e-10


class RootFindingError(RuntimeError):
    """Aberth iteration failed to converge or root disks overlap."""


@dataclass(frozen=True)
class IntegerPolynomial:
    """Coefficients from leading to constant."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if len(coeffs) < 2:
            raise ValueError("degree must be at least 1")
        if coeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_palindromic_half(cls, half: Sequence[int]) -> "IntegerPolynomial":
        """Mirror leading-to-middle coefficients: (a0..am) -> (a0..am..a0), degree 2m."""
        half = list(half)
        return cls(tuple(half + half[-2::-1]))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[0]

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    @property
    def is_palindromic(self) -> bool:
        return self.coefficients == self.coefficients[::-1]

    def reversed(self) -> "IntegerPolynomial":
        """x^n p(1/x); its roots are the reciprocals of the nonzero roots of p."""
        c = list(self.coefficients[::-1])
        while c and c[0] == 0:
            c.pop(0)
        return IntegerPolynomial(tuple(c))

    def exact(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def __call__(self, z):
        return mpmath.polyval(list(self.coefficients), z)

    def derivative_at(self, z):
        n = self.degree
        return mpmath.polyval([c * (n - i) for i, c in enumerate(self.coefficients[:-1])], z)

    def __str__(self) -> str:
        terms = []
        n = self.degree
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            k = n - i
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            mag = abs(c)
            body = str(mag) if (mag != 1 or not mono) else ""
            sign = "-" if c < 0 else "+"
            terms.append((sign, body + mono))
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, t in terms[1:]:
            out += f" {sign} {t}"
        return out


def multinacci(n: int) -> IntegerPolynomial:
    """x^n - x^(n-1) - ... - 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return IntegerPolynomial((1,) + (-1,) * n)


@dataclass(frozen=True)
class Root:
    value: mpmath.mpc
    radius: mpmath.mpf
    residual: mpmath.mpf

    @property
    def modulus(self) -> mpmath.mpf:
        return abs(self.value)

    @property
    def is_real(self) -> bool:
        return abs(self.value.imag) <= self.radius


def _initial_guesses(p: IntegerPolynomial):
    a = p.coefficients
    n = p.degree
    r = max(abs(mpmath.mpf(a[k]) / a[0]) ** (mpmath.mpf(1) / k) for k in range(1, n + 1)) or mpmath.mpf(1)
    r = max(r, mpmath.mpf("0.5"))
    return [r * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4")) for k in range(n)]


def find_roots(p: IntegerPolynomial, dps: int = 60, max_iterations: int = 1000) -> list[Root]:
    """All complex roots with Weierstrass inclusion radii, sorted by decreasing modulus.

    Raises RootFindingError if Aberth does not converge or the inclusion
    disks fail to separate (multiple or clustered roots).
    """
    n = p.degree
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(dps - 10))
        z = _initial_guesses(p)
        for _ in range(max_iterations):
            biggest = mpmath.mpf(0)
            for i in range(n):
                pv = p(z[i])
                dv = p.derivative_at(z[i])
                if pv == 0:
                    continue
                w = pv / dv if dv != 0 else mpmath.mpf(1)
                s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(n) if j != i)
                corr = w / (1 - w * s)
                z[i] -= corr
                biggest = max(biggest, abs(corr) / max(1, abs(z[i])))
            if biggest < tol:
                break
        else:
            raise RootFindingError(f"Aberth iteration did not converge for {p}")

        unit = mpmath.mpf(2) ** (1 - mpmath.mp.prec)
        roots = []
        for i in range(n):
            prod = mpmath.mpf(p.leading)
            for j in range(n):
                if j != i:
                    prod *= z[i] - z[j]
            pv = p(z[i])
            # Horner evaluation error bound, 2n u sum |a_k| |z|^k
            horner = 2 * (n + 1) * unit * mpmath.polyval([abs(c) for c in p.coefficients], abs(z[i]))
            radius = n * (abs(pv) + horner) / abs(prod) if prod != 0 else mpmath.inf
            roots.append(Root(mpmath.mpc(z[i]), radius * (1 + 1e-10), abs(pv)))
        for i in range(n):
            for j in range(i + 1, n):
                if abs(roots[i].value - roots[j].value) <= roots[i].radius + roots[j].radius:
                    raise RootFindingError(f"root disks overlap for {p}; repeated or clustered roots")
    roots.sort(key=lambda r: -r.modulus)
    return roots


def dominant_real_root(p: IntegerPolynomial, roots: list[Root] | None = None) -> Root:
    roots = find_roots(p) if roots is None else roots
    real = [r for r in roots if r.is_real and r.value.real > 1]
    if not real:
        raise ValueError(f"{p} has no real root > 1")
    return max(real, key=lambda r: r.value.real)


@dataclass(frozen=True)
class AlgebraicClassification:
    kind: str
    dominant_root: float
    certified: bool


def trace_polynomial(p: IntegerPolynomial) -> list[int]:
    """Q (leading first) with p(x) = x^m Q(x + 1/x) for palindromic p of degree 2m."""
    if not p.is_palindromic or p.degree % 2:
        raise ValueError("need a palindromic polynomial of even degree")
    m = p.degree // 2
    x = sympy.Symbol("x")
    rem = sympy.Poly(list(p.coefficients), x)
    b = [0] * (m + 1)
    for k in range(m, -1, -1):
        c = rem.coeff_monomial(x ** (m + k))
        b[m - k] = int(c)
        rem -= sympy.Poly(c * x ** (m - k) * (x**2 + 1) ** k, x)
    if not rem.is_zero:
        raise ValueError("trace reduction left a remainder")
    return b


def _salem_by_trace(p: IntegerPolynomial) -> bool:
    """Exact Salem test through Sturm counts on the trace polynomial."""
    if p.degree < 4 or not p.is_monic or not p.is_palindromic or p.degree % 2:
        return False
    m = p.degree // 2
    y = sympy.Symbol("y")
    q = sympy.Poly(trace_polynomial(p), y)
    if q.eval(2) == 0 or q.eval(-2) == 0:
        return False
    inside = q.count_roots(-2, 2)
    above = q.count_roots(2, None)
    return inside == m - 1 and above == 1


def classify(p: IntegerPolynomial) -> AlgebraicClassification:
    """Pisot, Salem, hyperbolic or other, judged from the roots of p.

    Pisot needs a monic p with one root outside the closed unit disk and
    the rest strictly inside; hyperbolic is the same pattern for a non-monic
    p.  ``certified`` means the root radii (or the exact trace test for Salem)
    settle the question.
    """
    roots = find_roots(p)
    try:
        beta = dominant_real_root(p, roots)
    except ValueError:
        return AlgebraicClassification(OTHER, math.nan, True)
    others = [r for r in roots if r is not beta]
    beta_f = float(beta.value.real)
    outside = beta.modulus - beta.radius > 1

    if all(r.modulus < 1 for r in others):
        clear = outside and all(r.modulus + r.radius < 1 for r in others)
        kind = PISOT if p.is_monic else HYPERBOLIC
        return AlgebraicClassification(kind, beta_f, bool(clear))

    if p.is_monic and p.is_palindromic and p.degree >= 4:
        rest = [r for r in others if abs(r.modulus - 1) <= UNIT_CIRCLE_TOL]
        inv = [r for r in others if abs(r.value - 1 / beta.value) <= UNIT_CIRCLE_TOL]
        if len(rest) == p.degree - 2 and len(inv) == 1:
            return AlgebraicClassification(SALEM, beta_f, _salem_by_trace(p))
    return AlgebraicClassification(OTHER, beta_f, outside)


def enclose_reciprocal(p: IntegerPolynomial) -> tuple[Fraction, Fraction]:
    """Rational interval [lo, hi] containing 1/beta, checked by an exact sign change.

    The reversed polynomial changes sign on [lo, hi], so it has a root there;
    the root disks of p show that no root other than beta maps into it.
    """
    roots = find_roots(p)
    beta = dominant_real_root(p, roots)
    rev = p.reversed()
    c = Fraction(float(1 / beta.value.real))
    if rev.exact(c) == 0:
        return c, c
    for k in range(52, 20, -1):
        eta = Fraction(1, 2**k) * max(c, Fraction(1))
        lo, hi = c - eta, c + eta
        if rev.exact(lo) * rev.exact(hi) < 0:
            break
    else:
        raise RootFindingError("no sign change found around 1/beta")
    # preimage [1/hi, 1/lo] may meet only beta's disk
    a, b = 1 / hi, 1 / lo
    for r in roots:
        if r is beta:
            continue
        dist_re = max(mpmath.mpf(a.numerator) / a.denominator - r.value.real, r.value.real - mpmath.mpf(b.numerator) / b.denominator, 0)
        if math.hypot(float(dist_re), float(r.value.imag)) <= float(r.radius):
            raise RootFindingError("reciprocal enclosure is not isolated from other roots")
    return lo, hi


def reciprocal_box(p: IntegerPolynomial, delta: float) -> ParameterBox:
    """Binary box with outward-rounded ends containing [1/beta - delta, 1/beta + delta]."""
    lo, hi = enclose_reciprocal(p)
    if not delta > 0 or Fraction(delta) < hi - lo:
        raise ValueError(f"delta={delta} is below the achievable enclosure width {float(hi - lo):.3g}")
    d = Fraction(delta)
    return ParameterBox(round_down(lo - d), round_up(hi + d))


def parse_polynomials(text: str, palindromic_half: bool = False) -> list[IntegerPolynomial]:
    """One polynomial per line, integer coefficients leading to constant; '#' starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            coeffs = [int(tok) for tok in line.replace(",", " ").split()]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        out.append(IntegerPolynomial.from_palindromic_half(coeffs) if palindromic_half else IntegerPolynomial(tuple(coeffs)))
    return out


def read_polynomial_file(path: str | Path, palindromic_half: bool = False) -> list[IntegerPolynomial]:
    return parse_polynomials(Path(path).read_text(), palindromic_half)
