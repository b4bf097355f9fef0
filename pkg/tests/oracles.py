"""Independent reference values for the test suite.

Everything here is implemented from closed formulas, deliberately not
sharing code paths with the package: Bernoulli numbers come from the
worpitzky double sum rather than the package recurrence, and the field
zeta values at -1 and -3 come from sigma-divisor sums.
"""

from fractions import Fraction
from math import comb, isqrt


def bernoulli_oracle(n: int) -> Fraction:
    """Worpitzky's formula: B_n = sum_k (1/(k+1)) sum_j (-1)^j C(k,j) j^n.

    Gives the B_1 = -1/2 convention directly (0^0 counts as 1)."""
    total = Fraction(0)
    for k in range(n + 1):
        inner = 0
        for j in range(k + 1):
            inner += (-1) ** j * comb(k, j) * j ** n
        total += Fraction(inner, k + 1)
    return total


def bernoulli_poly_oracle(n: int, x) -> Fraction:
    x = Fraction(x)
    return sum(
        comb(n, j) * bernoulli_oracle(j) * x ** (n - j) for j in range(n + 1)
    )


def hurwitz_special_value(a: int, f: int, k: int) -> Fraction:
    """Value at s = -k of sum over n > 0, n = a mod f, of n^(-s)."""
    if f <= 0 or not 1 <= a:
        raise ValueError("need f >= 1 and a >= 1")
    return -Fraction(f) ** k * bernoulli_poly_oracle(k + 1, Fraction(a, f)) / (k + 1)


def sigma(n: int, power: int = 1) -> int:
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += d ** power
    return total


def field_discriminant(D: int) -> int:
    return D if D % 4 == 1 else 4 * D


def siegel_zeta_minus_one(D: int) -> Fraction:
    """zeta_F(-1) for F = Q(sqrt(D)) via the sigma_1 sum over the
    discriminant."""
    disc = field_discriminant(D)
    total = 0
    for t in range(-isqrt(disc), isqrt(disc) + 1):
        if (disc - t * t) % 4 == 0 and disc - t * t > 0:
            total += sigma((disc - t * t) // 4, 1)
    return Fraction(total, 60)


def siegel_zeta_minus_three(D: int) -> Fraction:
    disc = field_discriminant(D)
    total = 0
    for t in range(-isqrt(disc), isqrt(disc) + 1):
        if (disc - t * t) % 4 == 0 and disc - t * t > 0:
            total += sigma((disc - t * t) // 4, 3)
    return Fraction(total, 120)
