"""Arithmetic of real quadratic fields over the basis (1, omega).

Everything an interpolation run needs in one place: fundamental and ray
units, integral ideals in Hermite form, narrow ray class enumeration,
Shintani fans (geometric and cocycle-derived), and the exact and p-adic
sides of smoothed partial zeta values.  Field elements are coordinate
pairs (x, y) meaning x + y*omega with omega = (1+sqrt(D))/2 for
D = 1 mod 4 and sqrt(D) otherwise, matching quadratic_norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from random import Random

from ._linalg import columns, from_columns, hnf_with_transform, identity, mat_vec, vec
from ._rational_padics import residue
from .cones import ConeFunction, GLTuple, OpenCone, hill_cone_function
from .errors import (
    BadSmoothingData,
    ClassSearchExhausted,
    GuardTripped,
    ShintaniKitError,
    SignCalibrationFailure,
)
from .exact_core import QuadScalar, TruncSeries, quad_sign
from .padic_measures import (
    PadicScalar,
    amice_of_cone_function,
    evaluate_at_s,
    polynomial_moment,
    pushforward_norm,
)
from .shintani_zeta import quadratic_norm, special_value
from .test_functions import PLevelSet, TestFunction, tensor_at_p

# enumeration guards; all searches below are finite in theory, these keep
# a bad input from looking like a hang
UNIT_SEARCH_GUARD = 1_000_000
GENERATOR_BOX_GUARD = 400_000
RAY_SEARCH_GUARD = 100_000


def _squarefree(d: int) -> bool:
    q = 2
    while q * q <= d:
        if d % (q * q) == 0:
            return False
        q += 1
    return True


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    q = 2
    while q * q <= n:
        if n % q == 0:
            return False
        q += 1
    return True


@dataclass(frozen=True)
class RealQuadraticField:
    """Q(sqrt(D)) for squarefree D > 1, with ring of integers Z[omega]."""

    D: int

    def __post_init__(self):
        if self.D <= 1 or not _squarefree(self.D):
            raise ValueError("D must be a squarefree integer > 1")

    @property
    def half_basis(self) -> bool:
        return self.D % 4 == 1

    @property
    def disc(self) -> int:
        return self.D if self.half_basis else 4 * self.D

    # omega satisfies omega^2 = trace*omega - norm
    @property
    def omega_trace(self) -> int:
        return 1 if self.half_basis else 0

    @property
    def omega_norm(self) -> int:
        return (1 - self.D) // 4 if self.half_basis else -self.D

    def mul(self, u, v):
        x1, y1 = u
        x2, y2 = v
        yy = y1 * y2
        return (
            x1 * x2 - self.omega_norm * yy,
            x1 * y2 + y1 * x2 + self.omega_trace * yy,
        )

    def conj(self, u):
        x, y = u
        return (x + self.omega_trace * y, -y)

    def norm(self, u):
        x, y = u
        return x * x + self.omega_trace * x * y + self.omega_norm * y * y

    def trace(self, u):
        x, y = u
        return 2 * x + self.omega_trace * y

    def to_quad(self, u) -> QuadScalar:
        x, y = u
        if self.half_basis:
            return QuadScalar(Fraction(x) + Fraction(y, 2), Fraction(y, 2), self.D)
        return QuadScalar(Fraction(x), Fraction(y), self.D)

    def sign_pair(self, u) -> tuple[int, int]:
        q = self.to_quad(u)
        return (quad_sign(q), quad_sign(q.conjugate()))

    def is_totally_positive(self, u) -> bool:
        return self.sign_pair(u) == (1, 1)

    def pow(self, u, k: int):
        """u^k; negative exponents are allowed for units only."""
        if k < 0:
            n = self.norm(u)
            if n not in (1, -1):
                raise ValueError("negative powers need a unit")
            inv = self.conj(u)
            if n == -1:
                inv = (-inv[0], -inv[1])
            return self.pow(inv, -k)
        out = (1, 0)
        base = u
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def mult_matrix(self, u):
        """Matrix of multiplication by u on the basis (1, omega)."""
        return from_columns([vec(u), vec(self.mul(u, (0, 1)))])

    def norm_form(self) -> dict:
        """The norm as a polynomial in the coordinates."""
        return {
            (2, 0): Fraction(1),
            (1, 1): Fraction(self.omega_trace),
            (0, 2): Fraction(self.omega_norm),
        }


# ---------------------------------------------------------------------------
# units


@lru_cache(maxsize=None)
def fundamental_unit(field: RealQuadraticField) -> tuple[int, int]:
    """The smallest unit greater than 1, by ascending second coordinate.

    For the half-integral basis the norm equation is (2x+y)^2 - D y^2 = +-4,
    otherwise the Pell equation x^2 - D y^2 = +-1.
    """
    one = QuadScalar(1, 0, field.D)
    for y in range(1, UNIT_SEARCH_GUARD):
        best = None
        deltas = (4, -4) if field.half_basis else (1, -1)
        for delta in deltas:
            z2 = field.D * y * y + delta
            if z2 <= 0:
                continue
            z = math.isqrt(z2)
            if z * z != z2:
                continue
            for zz in (z, -z):
                if field.half_basis:
                    if (zz - y) % 2:
                        continue
                    x = (zz - y) // 2
                else:
                    x = zz
                u = (x, y)
                if abs(field.norm(u)) != 1:
                    continue
                if quad_sign(field.to_quad(u) - one) <= 0:
                    continue
                if best is None or quad_sign(
                    field.to_quad(best) - field.to_quad(u)
                ) > 0:
                    best = u
        if best is not None:
            return best
    raise GuardTripped("no fundamental unit found within the search guard")


@lru_cache(maxsize=None)
def eps_plus(field: RealQuadraticField) -> tuple[int, int]:
    """Generator of the totally positive units: the fundamental unit or
    its square when the fundamental norm is -1."""
    u0 = fundamental_unit(field)
    if field.norm(u0) == 1:
        return u0
    return field.mul(u0, u0)


def unit_order_mod(field: RealQuadraticField, u, modulus: int) -> int:
    """Multiplicative order of the unit u in (O / modulus O)^*."""
    if modulus <= 1:
        return 1
    target = (1 % modulus, 0)
    cur = (u[0] % modulus, u[1] % modulus)
    t = 1
    guard = 4 * modulus * modulus + 64
    while cur != target:
        cur = tuple(c % modulus for c in field.mul(cur, u))
        t += 1
        if t > guard:
            raise GuardTripped("unit order exceeds the group-size guard")
    return t


def ray_unit(field: RealQuadraticField, modulus: int) -> tuple[tuple[int, int], int]:
    """(eps, t) with eps = eps_plus^t the smallest totally positive unit
    congruent to 1 mod (modulus)."""
    base = eps_plus(field)
    t = unit_order_mod(field, base, modulus)
    return field.pow(base, t), t


# ---------------------------------------------------------------------------
# ideals in Hermite form


@dataclass(frozen=True)
class IdealHNF:
    """Integral ideal a*Z + (b + d*omega)*Z with d | a, d | b, 0 <= b < a."""

    field: RealQuadraticField
    a: int
    b: int
    d: int

    def __post_init__(self):
        if self.a <= 0 or self.d <= 0 or not 0 <= self.b < self.a:
            raise ShintaniKitError("not a Hermite basis of an integral ideal")
        if self.a % self.d or self.b % self.d:
            raise ShintaniKitError("lattice is not stable under omega")
        if self.field.norm((self.b, self.d)) % (self.a * self.d):
            raise ShintaniKitError("lattice is not stable under omega")

    @property
    def norm(self) -> int:
        return self.a * self.d

    def basis(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, 0), (self.b, self.d))

    def basis_matrix(self):
        return from_columns([vec(v) for v in self.basis()])

    def inverse_basis_matrix(self):
        """Basis of the fractional inverse: the conjugate basis over the norm."""
        n = self.norm
        cols = [
            tuple(Fraction(x, n) for x in self.field.conj(v)) for v in self.basis()
        ]
        return from_columns([vec(c) for c in cols])

    def conjugate(self) -> "IdealHNF":
        return _ideal_from_vectors(
            self.field, [self.field.conj(v) for v in self.basis()]
        )

    def contains(self, v) -> bool:
        y = Fraction(v[1])
        t = y / self.d
        if t.denominator != 1:
            return False
        x = Fraction(v[0]) - t * self.b
        return (x / self.a).denominator == 1

    def __mul__(self, other: "IdealHNF") -> "IdealHNF":
        if not isinstance(other, IdealHNF):
            return NotImplemented
        if other.field != self.field:
            raise ValueError("ideals of different fields")
        prods = [
            self.field.mul(u, v) for u in self.basis() for v in other.basis()
        ]
        return _ideal_from_vectors(self.field, prods)


def _ideal_from_vectors(field: RealQuadraticField, vectors) -> IdealHNF:
    """Hermite form of an omega-stable integer span (stability is checked
    by the IdealHNF constructor, not restored here)."""
    rows = (
        tuple(int(v[1]) for v in vectors),
        tuple(int(v[0]) for v in vectors),
    )
    h, _ = hnf_with_transform(rows)
    d, a, b = h[0][0], h[1][1], h[1][0]
    if d == 0 or a == 0:
        raise ShintaniKitError("vectors do not span a full lattice")
    return IdealHNF(field, a, b % a, d)


def o_ideal(field: RealQuadraticField) -> IdealHNF:
    return IdealHNF(field, 1, 0, 1)


def rational_ideal(field: RealQuadraticField, n: int) -> IdealHNF:
    return IdealHNF(field, n, 0, n)


def principal_ideal(field: RealQuadraticField, u) -> IdealHNF:
    return _ideal_from_vectors(field, [u, field.mul(u, (0, 1))])


def prime_above(field: RealQuadraticField, ell: int) -> list[IdealHNF]:
    """Degree-one primes over ell: (ell, omega - s) for each root s of the
    minimal polynomial of omega mod ell.  Empty when ell is inert."""
    if not _is_prime(ell):
        raise ValueError("ell must be prime")
    roots = [
        s
        for s in range(ell)
        if (s * s - field.omega_trace * s + field.omega_norm) % ell == 0
    ]
    return [IdealHNF(field, ell, (-s) % ell, 1) for s in roots]


# ---------------------------------------------------------------------------
# class groups


def _eps_real_bound(field: RealQuadraticField) -> int:
    # integer upper bound for the larger embedding of eps_plus
    x, y = eps_plus(field)
    if field.half_basis:
        wc = (1 + math.isqrt(field.D)) // 2 + 1
    else:
        wc = math.isqrt(field.D) + 1
    return abs(x) + abs(y) * wc + 1


def _generator_of(field: RealQuadraticField, ideal: IdealHNF):
    """A generator of the ideal, or None if it is not principal.

    Some unit multiple of any generator has both embeddings at most
    sqrt(norm * eps_plus) in absolute value, so the scan over the box below
    is complete and a miss is a proof.
    """
    n = ideal.norm
    B = 2 * math.isqrt(n * _eps_real_bound(field)) + 2
    if (2 * B + 1) ** 2 > GENERATOR_BOX_GUARD:
        raise ClassSearchExhausted("generator box exceeds the search guard")
    a, b, d = ideal.a, ideal.b, ideal.d
    for y in range(-B, B + 1):
        if y % d:
            continue
        r = ((y // d) * b) % a
        x = -B + ((r + B) % a)
        while x <= B:
            if (x or y) and abs(field.norm((x, y))) == n:
                return (x, y)
            x += a
    return None


def is_equivalent(
    field: RealQuadraticField,
    I: IdealHNF,
    J: IdealHNF,
    modulus: int = 1,
    narrow: bool = True,
) -> bool:
    """Whether I and J agree in the ray class group mod (modulus), with
    totally positive generators when narrow is set.

    I ~ J iff I * conj(J) has a generator g that is totally positive and
    congruent to norm(J) mod (modulus); all generators are +-u0^j * g0, and
    their sign patterns and residues repeat with period twice the order of
    u0 mod (modulus), so the scan is complete.
    """
    g0 = _generator_of(field, I * J.conjugate())
    if g0 is None:
        return False
    if not narrow and modulus == 1:
        return True
    Q = modulus
    u0 = fundamental_unit(field)
    su = field.sign_pair(u0)
    sg = field.sign_pair(g0)
    period = 2 * (unit_order_mod(field, u0, Q) if Q > 1 else 1)
    target = (J.norm % Q, 0) if Q > 1 else None
    cur = (1 % Q, 0) if Q > 1 else (1, 0)
    g0m = (g0[0] % Q, g0[1] % Q) if Q > 1 else g0
    cs = (1, 1)
    for _ in range(period):
        for sgn in (1, -1):
            signs = (sgn * cs[0] * sg[0], sgn * cs[1] * sg[1])
            if narrow and signs != (1, 1):
                continue
            if Q == 1:
                return True
            v = field.mul(cur, g0m)
            if ((sgn * v[0]) % Q, (sgn * v[1]) % Q) == target:
                return True
        if Q > 1:
            cur = tuple(c % Q for c in field.mul(cur, u0))
        cs = (cs[0] * su[0], cs[1] * su[1])
    return False


def _ideals_of_norm(field: RealQuadraticField, n: int) -> list[IdealHNF]:
    out = []
    for d in range(1, math.isqrt(n) + 1):
        if n % (d * d):
            continue
        a = n // d
        for b in range(0, a, d):
            if field.norm((b, d)) % (a * d) == 0:
                out.append(IdealHNF(field, a, b, d))
    return out


def wide_class_reps(field: RealQuadraticField) -> list[IdealHNF]:
    """Ideal class representatives; complete by the Minkowski bound."""
    bound = math.isqrt(field.disc) // 2 + 1
    reps: list[IdealHNF] = []
    for n in range(1, bound + 1):
        for I in _ideals_of_norm(field, n):
            if not any(is_equivalent(field, I, R, 1, narrow=False) for R in reps):
                reps.append(I)
    return reps


def euler_phi_quadratic(field: RealQuadraticField, modulus: int) -> int:
    """Order of (O / modulus O)^*."""
    count = 0
    for x in range(modulus):
        for y in range(modulus):
            if math.gcd(field.norm((x, y)), modulus) == 1:
                count += 1
    return count if modulus > 1 else 1


def _unit_image_order(field: RealQuadraticField, modulus: int) -> int:
    """Size of the image of the unit group in residues-times-signs."""
    Q = modulus
    u0 = fundamental_unit(field)
    gens = [
        ((u0[0] % Q, u0[1] % Q), field.sign_pair(u0)),
        (((-1) % Q, 0), (-1, -1)),
    ]
    start = ((1 % Q, 0), (1, 1))
    seen = {start}
    frontier = [start]
    while frontier:
        res, sg = frontier.pop()
        for gres, gsg in gens:
            nxt = (
                tuple(c % Q for c in field.mul(res, gres)),
                (sg[0] * gsg[0], sg[1] * gsg[1]),
            )
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen)


def h_plus_count(field: RealQuadraticField, modulus: int = 1) -> int:
    """Narrow ray class number mod (modulus): h * phi(Q) * 4 over the
    order of the unit image in residues-times-signs."""
    h = len(wide_class_reps(field))
    num = h * euler_phi_quadratic(field, modulus) * 4
    img = _unit_image_order(field, modulus)
    if num % img:
        raise ShintaniKitError("unit image order does not divide the count")
    return num // img


def narrow_ray_class_reps(
    field: RealQuadraticField, modulus: int = 1, coprime_to: int = 1
) -> list[IdealHNF]:
    """One integral ideal per narrow ray class mod (modulus), each coprime
    to modulus * coprime_to; stops once the analytic count is reached."""
    target = h_plus_count(field, modulus)
    avoid = modulus * coprime_to
    reps: list[IdealHNF] = []
    n = 0
    while len(reps) < target:
        n += 1
        if n > RAY_SEARCH_GUARD:
            raise ClassSearchExhausted("ray class enumeration guard reached")
        if math.gcd(n, avoid) > 1:
            continue
        for I in _ideals_of_norm(field, n):
            if not any(is_equivalent(field, I, R, modulus, True) for R in reps):
                reps.append(I)
                if len(reps) == target:
                    break
    return reps


# ---------------------------------------------------------------------------
# Shintani fans


def shintani_fan(field: RealQuadraticField, eps) -> ConeFunction:
    """Fundamental domain of the action of eps on the totally positive
    quadrant: the open cone on (1, eps) plus the ray through 1."""
    if field.norm(eps) != 1 or not field.is_totally_positive(eps):
        raise ValueError("eps must be a totally positive unit")
    e1 = (1, 0)
    return ConeFunction(
        [
            (Fraction(1), OpenCone((e1, tuple(eps)))),
            (Fraction(1), OpenCone((e1,))),
        ]
    )


def domain_from_cocycle(
    field: RealQuadraticField, eps, samples: int = 24
) -> ConeFunction:
    """Shintani domain read off the perturbed cocycle at (1, mult-by-eps).

    The output is normalized to weight +1 and cross-checked pointwise
    against the geometric domain on interior sample points; the
    one-dimensional ray may lawfully sit on either edge of the cone, which
    changes nothing downstream because eps has norm one.
    """
    if field.norm(eps) != 1 or not field.is_totally_positive(eps):
        raise ValueError("eps must be a totally positive unit")
    kappa = hill_cone_function(GLTuple((identity(2), field.mult_matrix(eps))))
    two = [t for t in kappa.terms if t[1].dim == 2]
    one = [t for t in kappa.terms if t[1].dim == 1]
    if len(two) != 1 or len(one) != 1 or len(kappa.terms) != 2:
        raise SignCalibrationFailure("unexpected cone pattern from the cocycle")
    w = two[0][0]
    if w not in (1, -1) or one[0][0] != w:
        raise SignCalibrationFailure("unexpected weight pattern from the cocycle")
    fan = ConeFunction([(Fraction(1), two[0][1]), (Fraction(1), one[0][1])])
    meps = field.mult_matrix(eps)
    rng = Random(11213)
    for _ in range(samples):
        t1 = Fraction(rng.randrange(1, 400), rng.randrange(1, 97))
        t2 = Fraction(rng.randrange(1, 400), rng.randrange(1, 97))
        v = (t1 + t2 * eps[0], t2 * eps[1])
        if fan.evaluate(v) != 1:
            raise SignCalibrationFailure("cocycle domain disagrees inside the cone")
        if fan.evaluate(mat_vec(meps, v)) != 0:
            raise SignCalibrationFailure("cocycle domain meets its eps-translate")
    return fan


# ---------------------------------------------------------------------------
# partial zeta values, exact side


def _crt_offset(ell: int, Q: int) -> int:
    # c = 0 mod ell and c = 1 mod Q; needs gcd(ell, Q) = 1
    if Q == 1:
        return 0
    return ell * pow(ell, -1, Q)


def _check_smoothing(field, aideal: IdealHNF, cprime: IdealHNF, coprime_to: int):
    ell = cprime.norm
    if cprime.d != 1 or not _is_prime(ell):
        raise BadSmoothingData("smoothing ideal must be a degree-one prime")
    if math.gcd(ell, coprime_to * aideal.norm) > 1:
        raise BadSmoothingData("smoothing prime collides with the rest of the data")


def _check_fan_directions(field, cprime: IdealHNF, fan: ConeFunction):
    ell = cprime.norm
    for _, cone in fan.terms:
        for g in cone.generators:
            if field.norm(tuple(int(x) for x in g)) % ell == 0:
                raise BadSmoothingData("smoothing prime divides a fan direction")


def smoothed_ray_function(
    field: RealQuadraticField,
    aideal: IdealHNF,
    cprime: IdealHNF | None,
    lattice_modulus: int,
    c: int,
    translates,
    away: int | None = None,
) -> TestFunction:
    """Indicator of the ray coset 1 + Q a^-1 minus ell times the branch
    shifted into the smoothing prime, summed over the given unit
    translates (Q = lattice_modulus)."""
    Q = lattice_modulus
    na = aideal.norm
    ainv = aideal.inverse_basis_matrix()
    lat1 = from_columns([tuple(Q * x for x in col) for col in columns(ainv)])
    terms = []
    if cprime is not None:
        prod = cprime * aideal.conjugate()
        lat2 = from_columns(
            [
                tuple(Fraction(Q) * x / na for x in vec(v))
                for v in prod.basis()
            ]
        )
        ell = cprime.norm
    for u in translates:
        terms.append((Fraction(1), tuple(u), lat1))
        if cprime is not None:
            terms.append((Fraction(-ell), (c * u[0], c * u[1]), lat2))
    return TestFunction(2, tuple(terms), away)


def exact_ray_class_zeta(
    field: RealQuadraticField,
    aideal: IdealHNF,
    modulus: int,
    k: int,
    smoothing: IdealHNF | None = None,
    star_at: int | None = None,
) -> Fraction:
    """Value at -k of the partial zeta of the narrow ray class of aideal
    mod (modulus), optionally smoothed by a degree-one prime and with the
    p-divisible part of the sum removed (star_at = p).

    The sum over the class is folded onto the fixed fan of eps_plus by
    translating the ray coset through eps_plus^j for j below the order of
    eps_plus mod (modulus); this avoids fan generators of exponential size.
    """
    Q = modulus
    base = eps_plus(field)
    t = unit_order_mod(field, base, Q)
    translates = [field.pow(base, j) for j in range(t)]
    if smoothing is not None:
        _check_smoothing(field, aideal, smoothing, Q * (star_at or 1))
        c = _crt_offset(smoothing.norm, Q)
    else:
        c = 0
    f = smoothed_ray_function(field, aideal, smoothing, Q, c, translates, star_at)
    if star_at is not None:
        f = tensor_at_p(f, x_level_set(field, base, star_at, 0))
    fan = shintani_fan(field, base)
    if smoothing is not None:
        _check_fan_directions(field, smoothing, fan)
    value = special_value(f, fan, k, quadratic_norm(field.D))
    return Fraction(aideal.norm) ** k * value


def field_zeta_value(field: RealQuadraticField, k: int) -> Fraction:
    """zeta_F(-k) as the sum of the narrow class partial values."""
    total = Fraction(0)
    for rep in narrow_ray_class_reps(field, 1):
        total += exact_ray_class_zeta(field, rep, 1, k)
    return total


# ---------------------------------------------------------------------------
# partial zeta values, p-adic side


def x_level_set(field: RealQuadraticField, eps, p: int, m: int) -> PLevelSet:
    """Support of the level-m interpolation: norm-unit residues at level
    zero, the eps-orbit of 1 mod p^m above it."""
    if m == 0:
        offs = [
            (x, y)
            for x in range(p)
            for y in range(p)
            if field.norm((x, y)) % p
        ]
        return PLevelSet(p, 1, 2, tuple(offs))
    pm = p**m
    t = unit_order_mod(field, eps, pm)
    offs = []
    cur = (1, 0)
    for _ in range(t):
        offs.append((cur[0] % pm, cur[1] % pm))
        cur = tuple(c % pm for c in field.mul(cur, eps))
    return PLevelSet(p, m, 2, tuple(offs))


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            key = (e1[0] + e2[0], e1[1] + e2[1])
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _poly_pow(a: dict, k: int) -> dict:
    out = {(0, 0): Fraction(1)}
    for _ in range(k):
        out = _poly_mul(out, a)
    return out


def _check_prime_setup(field, aideal, cprime, p, conductor):
    if p < 3 or not _is_prime(p):
        raise ValueError("p must be an odd prime")
    if math.gcd(p, field.disc * conductor) > 1:
        raise ValueError("p must be unramified and prime to the conductor")
    if math.gcd(p, aideal.norm) > 1:
        raise ValueError("class representative must be coprime to p")
    _check_smoothing(field, aideal, cprime, p * conductor)


@dataclass(frozen=True)
class PartialZetaValue:
    """p-adic side of one interpolation point, with its exact rational."""

    exact: Fraction
    value: PadicScalar
    p: int
    level: int
    k: int


def smoothed_class_series(
    field: RealQuadraticField,
    aideal: IdealHNF,
    cprime: IdealHNF,
    p: int,
    m: int,
    conductor: int = 1,
    caps: tuple[int, int] = (4, 4),
    use_cocycle: bool = True,
) -> TruncSeries:
    """Amice transform of the smoothed class measure restricted to the
    level-m set.  One series serves every moment its caps can reach.

    The measure lives at the conductor level; only the translation offset
    of the smoothed branch is sharpened to 1 mod conductor * p^m, and the
    level enters through the support restriction.
    """
    _check_prime_setup(field, aideal, cprime, p, conductor)
    eps_f, _ = ray_unit(field, conductor)
    fan = (
        domain_from_cocycle(field, eps_f)
        if use_cocycle
        else shintani_fan(field, eps_f)
    )
    _check_fan_directions(field, cprime, fan)
    c = _crt_offset(cprime.norm, conductor * p**m)
    f = smoothed_ray_function(
        field, aideal, cprime, conductor, c, [(1, 0)], away=p
    )
    level = x_level_set(field, eps_f, p, m)
    return amice_of_cone_function(f, fan, level, caps)


def padic_partial_zeta(
    field: RealQuadraticField,
    aideal: IdealHNF,
    cprime: IdealHNF,
    p: int,
    m: int,
    k: int,
    conductor: int = 1,
    caps: tuple[int, int] | None = None,
    M: int = 6,
    use_cocycle: bool = True,
    series: TruncSeries | None = None,
) -> PartialZetaValue:
    """Norm moment of the smoothed class measure over the level-m set,
    scaled by norm(a)^k: the p-adic side of one interpolation point.

    The moment is an exact rational, reported together with its residue
    mod p^M.  Pass a precomputed `series` (from smoothed_class_series with
    caps of at least 2k) to share one transform across several k.
    """
    if series is None:
        if caps is None:
            caps = (2 * k + 2, 2 * k + 2)
        series = smoothed_class_series(
            field, aideal, cprime, p, m, conductor, caps, use_cocycle
        )
    else:
        _check_prime_setup(field, aideal, cprime, p, conductor)
    val = Fraction(aideal.norm) ** k * polynomial_moment(
        series, _poly_pow(field.norm_form(), k)
    )
    return PartialZetaValue(val, PadicScalar(p, M, 0, residue(val, p, M)), p, m, k)


@dataclass(frozen=True)
class FieldPadicL:
    """One-variable p-adic L-data: norm pushforwards of the smoothed class
    measure, one component per unit residue of the norm."""

    p: int
    count: int
    components: dict

    def value_at(self, s, twist: int = 0, M: int = 8) -> PadicScalar:
        return evaluate_at_s(self.components, self.p, M, s, twist, self.count)


def field_padic_L(
    field: RealQuadraticField,
    aideal: IdealHNF,
    cprime: IdealHNF,
    p: int,
    conductor: int = 1,
    count: int = 5,
    use_cocycle: bool = True,
) -> FieldPadicL:
    """Push the smoothed class measure forward along norm(a) * Norm, split
    by the unit residue class of the pushed value.

    Scaling by norm(a) (a p-adic unit) folds the class normalization into
    the measure, so value_at(-k, twist=k) matches the level-zero moment of
    padic_partial_zeta for k below `count`."""
    _check_prime_setup(field, aideal, cprime, p, conductor)
    caps = (2 * (count - 1), 2 * (count - 1))
    eps_f, _ = ray_unit(field, conductor)
    fan = (
        domain_from_cocycle(field, eps_f)
        if use_cocycle
        else shintani_fan(field, eps_f)
    )
    _check_fan_directions(field, cprime, fan)
    c = _crt_offset(cprime.norm, conductor)
    f = smoothed_ray_function(
        field, aideal, cprime, conductor, c, [(1, 0)], away=p
    )
    na = aideal.norm
    norm_int = {e: na * int(v) for e, v in field.norm_form().items()}
    comps: dict[int, TruncSeries] = {}
    for b in range(1, p):
        offs = [
            (x, y)
            for x in range(p)
            for y in range(p)
            if (na * field.norm((x, y))) % p == b
        ]
        level = PLevelSet(p, 1, 2, tuple(offs))
        ser = amice_of_cone_function(f, fan, level, caps)
        comps[b] = pushforward_norm(ser, norm_int, count)
    return FieldPadicL(p, count, comps)
