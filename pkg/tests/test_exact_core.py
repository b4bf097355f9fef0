import random
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest

from shintani_kit.errors import ZeroConstantTerm
from shintani_kit.exact_core import (
    QuadScalar,
    TruncSeries,
    bernoulli_number,
    bernoulli_polynomial,
    quad_sign,
)


def test_bernoulli_small_values():
    assert bernoulli_number(0) == 1
    assert bernoulli_number(1) == Fraction(-1, 2)
    assert bernoulli_number(2) == Fraction(1, 6)
    assert bernoulli_number(4) == Fraction(-1, 30)
    assert bernoulli_number(12) == Fraction(-691, 2730)


def test_bernoulli_odd_vanish():
    for k in range(3, 30, 2):
        assert bernoulli_number(k) == 0


def test_bernoulli_recurrence_residual():
    # independent restatement of the defining identity
    from math import comb

    for n in range(1, 25):
        acc = sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n + 1))
        assert acc == -(n + 1) * bernoulli_number(n) + (n + 1) * bernoulli_number(n)
        total = sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n + 2))
        # full sum including j = n+1 equals B_{n+1} * C(n+1, n+1) + 0
        assert total == bernoulli_number(n + 1)


def test_bernoulli_polynomial_values():
    assert bernoulli_polynomial(2, Fraction(1, 3)) == Fraction(-1, 18)
    assert bernoulli_polynomial(1, 1) == Fraction(1, 2)
    # difference equation B_k(x+1) - B_k(x) = k x^(k-1)
    rng = random.Random(11)
    for _ in range(40):
        k = rng.randrange(1, 9)
        x = Fraction(rng.randrange(-30, 30), rng.randrange(1, 12))
        lhs = bernoulli_polynomial(k, x + 1) - bernoulli_polynomial(k, x)
        assert lhs == k * x ** (k - 1)


def _decimal_sign(a: Fraction, b: Fraction, D: int) -> int:
    getcontext().prec = 60
    val = (
        Decimal(a.numerator) / Decimal(a.denominator)
        + Decimal(b.numerator) / Decimal(b.denominator) * Decimal(D).sqrt()
    )
    if val > 0:
        return 1
    if val < 0:
        return -1
    return 0


def test_quad_sign_pinned_cases():
    assert quad_sign(QuadScalar(-2, 1, 5)) == 1
    assert quad_sign(QuadScalar(2, -1, 3)) == 1
    assert quad_sign(QuadScalar(0, 0, 5)) == 0
    assert quad_sign(QuadScalar(Fraction(1, 2), Fraction(-1, 5), 2)) == 1


def test_quad_sign_against_decimal_oracle():
    rng = random.Random(7)
    for _ in range(1000):
        D = rng.choice([2, 3, 5, 7, 13, 21, 29])
        a = Fraction(rng.randrange(-400, 400), rng.randrange(1, 40))
        b = Fraction(rng.randrange(-400, 400), rng.randrange(1, 40))
        x = QuadScalar(a, b, D)
        assert quad_sign(x) == _decimal_sign(a, b, D)


def test_quad_arithmetic():
    x = QuadScalar(1, 1, 5)
    y = QuadScalar(2, -3, 5)
    assert (x * y).a == 2 - 15
    assert (x * y).b == -3 + 2
    assert x * x.inverse() == 1
    assert (x / y) * y == x
    assert x.conjugate().conjugate() == x
    assert (x + Fraction(1, 2)).a == Fraction(3, 2)
    assert (2 * x).b == 2


def test_series_invert_roundtrip():
    rng = random.Random(3)
    caps = (4, 3)
    for _ in range(20):
        coeffs = {}
        for e0 in range(caps[0] + 1):
            for e1 in range(caps[1] + 1):
                if rng.random() < 0.4:
                    coeffs[(e0, e1)] = Fraction(rng.randrange(-9, 10), rng.randrange(1, 5))
        coeffs[(0, 0)] = Fraction(rng.choice([1, 2, -3, 5]))
        s = TruncSeries(caps, coeffs)
        prod = s * s.invert()
        assert prod.coeff((0, 0)) == 1
        assert all(c == 0 for e, c in prod.coeffs.items() if e != (0, 0))


def test_series_invert_requires_unit():
    s = TruncSeries((3,), {(1,): Fraction(1)})
    with pytest.raises(ZeroConstantTerm):
        s.invert()


def test_exp_linear_form_additivity():
    caps = (5, 4)
    a = TruncSeries.exp_linear_form(caps, [Fraction(2), Fraction(-1)])
    b = TruncSeries.exp_linear_form(caps, [Fraction(1, 2), Fraction(3)])
    combined = TruncSeries.exp_linear_form(caps, [Fraction(5, 2), Fraction(2)])
    assert (a * b).coeffs == combined.coeffs


def test_exp_linear_form_quadratic_coeffs():
    # conjugating the linear form conjugates every series coefficient
    caps = (4,)
    w = QuadScalar(1, 1, 5)
    s = TruncSeries.exp_linear_form(caps, [w])
    sc = TruncSeries.exp_linear_form(caps, [w.conjugate()])
    for e, c in s.coeffs.items():
        assert sc.coeff(e) == c.conjugate()


def test_series_mul_respects_caps():
    s = TruncSeries((2,), {(2,): Fraction(1)})
    assert (s * s).coeffs == {}
