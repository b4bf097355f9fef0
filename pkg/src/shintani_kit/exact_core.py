"""Exact scalar and truncated power series arithmetic.

Everything here is rational or quadratic-irrational and exact; no floats.
The truncated series type is the workhorse behind the cone generating
functions, so its multiplication clamps against per-variable caps rather
than growing without bound.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Union

from .errors import ZeroConstantTerm

# Grown on demand by bernoulli_number; selftest uses it as a tamper canary.
_BERNOULLI_CACHE: list[Fraction] = [Fraction(1)]

Rational = Union[int, Fraction]


def bernoulli_number(k: int) -> Fraction:
    """k-th Bernoulli number with B_1 = -1/2.

    Computed by the defining recurrence sum(C(n+1, j) * B_j, j <= n) = 0
    and cached at module level.
    """
    if k < 0:
        raise ValueError("negative index")
    while len(_BERNOULLI_CACHE) <= k:
        n = len(_BERNOULLI_CACHE)
        acc = Fraction(0)
        for j in range(n):
            acc += comb(n + 1, j) * _BERNOULLI_CACHE[j]
        _BERNOULLI_CACHE.append(-acc / (n + 1))
    return _BERNOULLI_CACHE[k]


def bernoulli_polynomial(k: int, x: Rational) -> Fraction:
    """B_k(x) = sum of C(k, j) * B_j * x^(k-j)."""
    xf = Fraction(x)
    acc = Fraction(0)
    for j in range(k + 1):
        acc += comb(k, j) * bernoulli_number(j) * xf ** (k - j)
    return acc


def _sign(x: Fraction) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


class QuadScalar:
    """Element a + b*sqrt(D) of a real quadratic field, exact.

    D must be a nonsquare positive integer; sqrt(D) always denotes the
    positive root, so comparisons have a definite meaning.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a: Rational, b: Rational, D: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    # -- arithmetic -------------------------------------------------

    def _coerce(self, other) -> "QuadScalar":
        if isinstance(other, QuadScalar):
            if other.D != self.D and other.b != 0 and self.b != 0:
                raise ValueError("mixed radicands")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadScalar(other, 0, self.D)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadScalar(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadScalar(
            self.a * o.a + self.b * o.b * self.D,
            self.a * o.b + self.b * o.a,
            self.D,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadScalar":
        n = self.a * self.a - self.b * self.b * self.D
        if n == 0:
            raise ZeroDivisionError("zero element")
        return QuadScalar(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.a, -self.b, self.D)

    # -- structure --------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadScalar):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.D == other.D and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __repr__(self):
        return f"QuadScalar({self.a}, {self.b}, sqrt{self.D})"

    def rational_part(self) -> Fraction:
        return self.a

    def surd_part(self) -> Fraction:
        return self.b


def quad_sign(x) -> int:
    """Exact sign of a + b*sqrt(D) in {-1, 0, +1}.

    Decided by rational case analysis only: when a and b have opposite
    signs the comparison reduces to a^2 versus b^2 * D.  Equality of
    those squares is impossible for b != 0 since D is not a square.
    """
    if isinstance(x, (int, Fraction)):
        return _sign(Fraction(x))
    a, b, D = x.a, x.b, x.D
    if b == 0:
        return _sign(a)
    if a == 0:
        return _sign(b)
    sa, sb = _sign(a), _sign(b)
    if sa == sb:
        return sa
    aa = a * a
    bb = b * b * D
    if aa == bb:
        raise ArithmeticError("radicand must not be a perfect square")
    # sign determined by the larger magnitude side
    if aa > bb:
        return sa
    return sb


def scalar_conjugate(x):
    """Galois conjugate; rationals are fixed."""
    if isinstance(x, QuadScalar):
        return x.conjugate()
    return x


def scalar_rational(x) -> Fraction:
    """Assert-and-extract a rational value."""
    if isinstance(x, QuadScalar):
        if x.b != 0:
            raise ArithmeticError(f"not rational: {x!r}")
        return x.a
    return Fraction(x)


class TruncSeries:
    """Multivariate power series truncated to per-variable degree caps.

    coeffs maps exponent tuples to scalars (Fraction or QuadScalar);
    absent keys are zero, and stored values are never zero.  Instances
    are immutable by convention: no method mutates, all return new.
    """

    __slots__ = ("caps", "coeffs")

    def __init__(self, caps: tuple[int, ...], coeffs: dict | None = None):
        self.caps = tuple(caps)
        cleaned = {}
        if coeffs:
            for e, c in coeffs.items():
                if all(ei <= cap for ei, cap in zip(e, self.caps)) and c:
                    cleaned[tuple(e)] = c
        self.coeffs = cleaned

    @classmethod
    def constant(cls, caps: tuple[int, ...], value) -> "TruncSeries":
        zero = tuple(0 for _ in caps)
        return cls(caps, {zero: value} if value else {})

    def coeff(self, exp: tuple[int, ...]):
        return self.coeffs.get(tuple(exp), Fraction(0))

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        assert self.caps == other.caps
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TruncSeries(self.caps, out)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.caps, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def scale(self, factor) -> "TruncSeries":
        if not factor:
            return TruncSeries(self.caps, {})
        return TruncSeries(self.caps, {e: factor * c for e, c in self.coeffs.items()})

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        assert self.caps == other.caps
        caps = self.caps
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(ei > cap for ei, cap in zip(e, caps)):
                    continue
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return TruncSeries(caps, out)

    def invert(self) -> "TruncSeries":
        """Multiplicative inverse; requires invertible constant term."""
        zero = tuple(0 for _ in self.caps)
        c0 = self.coeffs.get(zero)
        if not c0:
            raise ZeroConstantTerm("series has no invertible constant term")
        if isinstance(c0, QuadScalar):
            r = c0.inverse()
        else:
            r = 1 / Fraction(c0)
        # x := 1 - s/c0 has zero constant term; geometric series in x
        # terminates after total-degree-many rounds.
        x = TruncSeries.constant(self.caps, Fraction(1)) - self.scale(r)
        acc = TruncSeries.constant(self.caps, Fraction(1))
        for _ in range(sum(self.caps)):
            acc = TruncSeries.constant(self.caps, Fraction(1)) + x * acc
        return acc.scale(r)

    @classmethod
    def exp_linear_form(
        cls, caps: tuple[int, ...], coeffs: Iterable
    ) -> "TruncSeries":
        """exp(sum of coeffs[i] * t_i), truncated to caps.

        Coefficient of t^alpha is prod(coeffs[i]^alpha_i / alpha_i!).
        """
        cs = list(coeffs)
        assert len(cs) == len(caps)
        out: dict = {}

        def rec(i: int, exp: list[int], val):
            if not val:
                return
            if i == len(cs):
                out[tuple(exp)] = val
                return
            power = val
            for a in range(caps[i] + 1):
                rec(i + 1, exp + [a], power)
                if a == caps[i]:
                    break
                power = power * cs[i] / (a + 1)

        rec(0, [], Fraction(1))
        return cls(caps, out)

    def __repr__(self):
        terms = sorted(self.coeffs.items())[:6]
        more = "..." if len(self.coeffs) > 6 else ""
        return f"TruncSeries(caps={self.caps}, {terms}{more})"
