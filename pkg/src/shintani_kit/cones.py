"""Open simplicial cones, perturbed-sign cocycle values, and explicit
cone-combination extraction.

The perturbation scalars eps_1 >> eps_2 >> ... are formal: an element of
the ordered coefficient field is a polynomial in them, and its sign is
the sign of the coefficient on the most significant monomial (monomials
compared coordinate-reversed lexicographically, smallest key dominates).
This pins 1 - eps_1 > 0 and eps_1 - eps_2 > 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import gcd, lcm

from ._linalg import Matrix, Vector, columns, det, from_columns, mat, mat_vec, rank, solve, vec
from .errors import (
    DegenerateTuple,
    GuardTripped,
    ShintaniKitError,
    SingularMatrix,
    ZeroVector,
)

# ---------------------------------------------------------------------------
# formal perturbation polynomials


def _sig_key(exp: tuple[int, ...]) -> tuple[int, ...]:
    # eps_n outranks eps_{n-1} in smallness, so compare from the right
    return tuple(reversed(exp))


class EpsPoly:
    """Polynomial in the perturbation scalars with Fraction coefficients."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict | None = None):
        self.n = n
        self.coeffs: dict[tuple[int, ...], Fraction] = {}
        if coeffs:
            for e, c in coeffs.items():
                c = Fraction(c)
                if c:
                    self.coeffs[tuple(e)] = c

    @classmethod
    def const(cls, n: int, value) -> "EpsPoly":
        return cls(n, {tuple(0 for _ in range(n)): Fraction(value)})

    def __add__(self, other: "EpsPoly") -> "EpsPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return EpsPoly(self.n, out)

    def __neg__(self) -> "EpsPoly":
        return EpsPoly(self.n, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "EpsPoly") -> "EpsPoly":
        return self + (-other)

    def __mul__(self, other: "EpsPoly") -> "EpsPoly":
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return EpsPoly(self.n, out)

    def scale(self, factor) -> "EpsPoly":
        factor = Fraction(factor)
        return EpsPoly(self.n, {e: factor * c for e, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_sign(self) -> int:
        """Sign of the value: coefficient sign at the dominating monomial."""
        if not self.coeffs:
            return 0
        e = min(self.coeffs, key=_sig_key)
        return 1 if self.coeffs[e] > 0 else -1


# ---------------------------------------------------------------------------
# cones and signed cone combinations


def primitive_direction(g) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector."""
    g = vec(g)
    if all(x == 0 for x in g):
        raise ZeroVector("zero vector has no direction")
    den = lcm(*(x.denominator for x in g), 1)
    ints = [int(x * den) for x in g]
    g0 = gcd(*(abs(x) for x in ints))
    return tuple(x // g0 for x in ints)


@dataclass(frozen=True)
class OpenCone:
    """Open simplicial cone: strictly positive combinations of the
    generators, which must be linearly independent."""

    generators: tuple[Vector, ...]

    def __post_init__(self):
        gens = tuple(vec(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ShintaniKitError("cone needs at least one generator")
        g_mat = from_columns(gens)
        if rank(g_mat) != len(gens):
            raise ShintaniKitError("cone generators must be independent")

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def ambient(self) -> int:
        return len(self.generators[0])

    def canonical(self) -> "OpenCone":
        return OpenCone(tuple(vec(primitive_direction(g)) for g in self.generators))

    def contains(self, v) -> bool:
        v = vec(v)
        coords = _span_coordinates(self.generators, v)
        if coords is None:
            return False
        return all(c > 0 for c in coords)


def _span_coordinates(gens: tuple[Vector, ...], v: Vector):
    """Coordinates of v in the (independent) generators, else None."""
    n = len(v)
    r = len(gens)
    g_mat = from_columns(gens)
    # pick r independent rows to invert
    rows_idx: list[int] = []
    probe: list = []
    for i in range(n):
        cand = probe + [g_mat[i]]
        if rank(mat(cand)) == len(cand):
            probe = cand
            rows_idx.append(i)
            if len(rows_idx) == r:
                break
    sub = mat([g_mat[i] for i in rows_idx])
    try:
        coords = solve(sub, [v[i] for i in rows_idx])
    except SingularMatrix:
        return None
    if mat_vec(g_mat, coords) != tuple(v):
        return None
    return coords


@dataclass
class ConeFunction:
    """Finite integer combination of open-cone indicators plus a constant.

    evaluate(v) = constant + sum(weight * [v in cone]) for v != 0.
    """

    terms: list[tuple[Fraction, OpenCone]] = field(default_factory=list)
    constant: Fraction = Fraction(0)

    def evaluate(self, v) -> Fraction:
        v = vec(v)
        if all(x == 0 for x in v):
            raise ZeroVector("cone functions live on V minus the origin")
        acc = Fraction(self.constant)
        for w, cone in self.terms:
            if cone.contains(v):
                acc += w
        return acc

    def scale(self, factor) -> "ConeFunction":
        factor = Fraction(factor)
        return ConeFunction(
            [(factor * w, c) for w, c in self.terms], factor * self.constant
        )

    def __add__(self, other: "ConeFunction") -> "ConeFunction":
        return ConeFunction(
            list(self.terms) + list(other.terms), self.constant + other.constant
        )


# ---------------------------------------------------------------------------
# the perturbed cocycle


@dataclass(frozen=True)
class GLTuple:
    """Tuple of invertible rational matrices with a marked basis."""

    matrices: tuple[Matrix, ...]
    basis: Matrix | None = None

    def __post_init__(self):
        mats = tuple(mat(m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        n = len(mats[0])
        for m in mats:
            if det(m) == 0:
                raise ShintaniKitError("tuple entries must be invertible")
        if self.basis is None:
            object.__setattr__(self, "basis", mat(
                [[1 if i == j else 0 for j in range(n)] for i in range(n)]))
        else:
            b = mat(self.basis)
            if det(b) == 0:
                raise ShintaniKitError("basis must be invertible")
            object.__setattr__(self, "basis", b)

    @property
    def ambient(self) -> int:
        return len(self.matrices[0])


def _perturbed_columns(t: GLTuple) -> list[list[EpsPoly]]:
    """Columns alpha_j * b_j with b_j = w_1 + eps_j w_2 + ... (EpsPoly)."""
    n = t.ambient
    w_cols = columns(t.basis)
    cols = []
    for j, alpha in enumerate(t.matrices):
        # b_j as EpsPoly vector
        b = [EpsPoly(n) for _ in range(n)]
        for i, w in enumerate(w_cols):
            exp = tuple(i if k == j else 0 for k in range(n))
            for coord in range(n):
                if w[coord]:
                    b[coord] = b[coord] + EpsPoly(n, {exp: w[coord]})
        moved = []
        for row in range(n):
            acc = EpsPoly(n)
            for k in range(n):
                if alpha[row][k]:
                    acc = acc + b[k].scale(alpha[row][k])
            moved.append(acc)
        cols.append(moved)
    return cols


def _eps_det(cols: list[list[EpsPoly]]) -> EpsPoly:
    n = len(cols)
    nvars = cols[0][0].n  # minors keep the full set of perturbation vars
    acc = EpsPoly(nvars)
    for perm in permutations(range(n)):
        inv = sum(
            1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
        )
        term = EpsPoly.const(nvars, -1 if inv % 2 else 1)
        for j in range(n):
            term = term * cols[j][perm[j]]
        acc = acc + term
    return acc


def _sign_of_tuple(t: GLTuple) -> int:
    d = _eps_det(_perturbed_columns(t))
    s = d.leading_sign()
    if s == 0:
        raise GuardTripped("perturbed determinant vanished")
    return s


def hill_eval(t: GLTuple, v) -> int:
    """Value at v of the perturbed cocycle for the tuple t.

    Returns sign(det M) if v lies in the perturbed open cone, else 0.
    """
    v = vec(v)
    if all(x == 0 for x in v):
        raise ZeroVector("evaluation point must be nonzero")
    if len(t.matrices) != t.ambient:
        raise ShintaniKitError("tuple length must equal the ambient dimension")
    cols = _perturbed_columns(t)
    sigma = _eps_det(cols).leading_sign()
    if sigma == 0:
        raise GuardTripped("perturbed determinant vanished")
    n = t.ambient
    for i in range(n):
        replaced = [
            [EpsPoly.const(n, v[row]) for row in range(n)] if j == i else cols[j]
            for j in range(n)
        ]
        s = _eps_det(replaced).leading_sign()
        if s != sigma:
            return 0
    return sigma


# --- explicit extraction ----------------------------------------------------


def _functionals(cols: list[list[EpsPoly]], i: int) -> list[Vector]:
    """Significance-ordered linear functionals carrying det(M with column i
    replaced by a v-column) = sum over monomials of eps^r * phi_r(v)."""
    n = len(cols)
    # cofactor of entry (row, i): signed det of the minor
    cofactors = []
    for row in range(n):
        minor_cols = []
        for j in range(n):
            if j == i:
                continue
            minor_cols.append([cols[j][k] for k in range(n) if k != row])
        if minor_cols:
            minor = _eps_det(minor_cols)
        else:
            minor = EpsPoly.const(n, 1)
        sign = -1 if (row + i) % 2 else 1
        cofactors.append(minor.scale(sign))
    monomials = sorted({e for c in cofactors for e in c.coeffs}, key=_sig_key)
    funcs = []
    for e in monomials:
        funcs.append(vec([c.coeffs.get(e, Fraction(0)) for c in cofactors]))
    return funcs


def _split_pieces(gens: list[Vector], vals: list[Fraction]):
    """Split an open simplicial cone along ker(phi) when phi changes sign.

    Returns (positive pieces, kernel pieces, negative pieces), each a list
    of generator lists describing disjoint open simplicial cones that
    together cover the input cone.
    """
    pos = [j for j, x in enumerate(vals) if x > 0]
    neg = [j for j, x in enumerate(vals) if x < 0]
    zero = [j for j, x in enumerate(vals) if x == 0]
    d = len(gens)

    def edge_point(jp: int, jn: int) -> Vector:
        # phi-kernel point strictly inside the edge (g_jp, g_jn)
        return vec([
            vals[jp] * bn - vals[jn] * bp
            for bp, bn in zip(gens[jp], gens[jn])
        ])

    if d == 2:
        a, b = pos[0], neg[0]
        h = edge_point(a, b)
        return [[gens[a], h]], [[h]], [[h, gens[b]]]
    if d == 3 and len(zero) == 1:
        a, b, z = pos[0], neg[0], zero[0]
        h = edge_point(a, b)
        return (
            [[gens[a], h, gens[z]]],
            [[h, gens[z]]],
            [[h, gens[b], gens[z]]],
        )
    if d == 3 and len(pos) == 2:
        a, b = pos
        c = neg[0]
        h1 = edge_point(a, c)
        h2 = edge_point(b, c)
        plus = [
            [gens[a], gens[b], h2],
            [gens[a], h2],
            [gens[a], h2, h1],
        ]
        return plus, [[h1, h2]], [[gens[c], h1, h2]]
    if d == 3 and len(neg) == 2:
        a = pos[0]
        b, c = neg
        h1 = edge_point(a, b)
        h2 = edge_point(a, c)
        minus = [
            [gens[b], gens[c], h2],
            [gens[b], h2],
            [gens[b], h2, h1],
        ]
        return [[gens[a], h1, h2]], [[h1, h2]], minus
    raise ShintaniKitError(
        "cone splitting implemented for ambient dimension <= 3 only"
    )


def hill_cone_function(t: GLTuple, verify_samples: int = 40) -> ConeFunction:
    """Explicit open-cone combination equal to the perturbed cocycle value.

    Requires the vectors alpha_i * w_1 to be linearly independent
    (DegenerateTuple otherwise).  The result is checked pointwise against
    hill_eval on sampled rational points before being returned.
    """
    n = t.ambient
    if len(t.matrices) != n:
        raise ShintaniKitError("tuple length must equal the ambient dimension")
    w1 = columns(t.basis)[0]
    u = [mat_vec(alpha, w1) for alpha in t.matrices]
    if rank(from_columns(u)) != n:
        raise DegenerateTuple("alpha_i * w_1 must be independent")
    cols = _perturbed_columns(t)
    sigma = _eps_det(cols).leading_sign()
    if sigma == 0:
        raise GuardTripped("perturbed determinant vanished")
    func_lists = [_functionals(cols, i) for i in range(n)]

    accepted: list[list[Vector]] = []

    def walk(gens: list[Vector], i: int, pos: int):
        if i == n:
            accepted.append(gens)
            return
        funcs = func_lists[i]
        while pos < len(funcs):
            phi = funcs[pos]
            vals = [sum(p * g[k] for k, p in enumerate(phi)) for g in gens]
            has_pos = any(x > 0 for x in vals)
            has_neg = any(x < 0 for x in vals)
            if not has_pos and not has_neg:
                pos += 1
                continue
            if has_pos and has_neg:
                plus, kernel, minus = _split_pieces(gens, vals)
                decided = plus if sigma > 0 else minus
                rejected = minus if sigma > 0 else plus
                for piece in decided:
                    walk(piece, i + 1, 0)
                for piece in kernel:
                    walk(piece, i, pos + 1)
                # pieces on the wrong side never satisfy membership
                _ = rejected
                return
            s = 1 if has_pos else -1
            if s == sigma:
                walk(gens, i + 1, 0)
            return
        # functional list exhausted: D_i vanishes identically on this piece
        return

    # enumerate the faces of the simplicial fan on u_1..u_n
    for mask in range(1, 1 << n):
        gens = [u[j] for j in range(n) if mask & (1 << j)]
        walk(gens, 0, 0)

    result = ConeFunction(
        [(Fraction(sigma), OpenCone(tuple(g))) for g in accepted], Fraction(0)
    )

    # verification pass: the extraction must agree with direct evaluation
    rng = random.Random(20240801)
    samples: list[Vector] = []
    for gens in accepted[: verify_samples]:
        samples.append(vec([sum(col) for col in zip(*gens)]))
    while len(samples) < verify_samples:
        pt = [Fraction(rng.randrange(-12, 13), rng.randrange(1, 4)) for _ in range(n)]
        if any(pt):
            samples.append(vec(pt))
    for v in samples:
        if result.evaluate(v) != hill_eval(t, v):
            raise GuardTripped("cone extraction disagrees with direct evaluation")
    return result


def cocycle_defect(mats, samples) -> list[Fraction]:
    """Alternating facet sum of cocycle values at each sample point.

    mats is a list of n+1 invertible matrices; the i-th facet omits the
    i-th entry.  The returned list should be constant in v, which callers
    assert; each facet must itself be non-degenerate.
    """
    mats = [mat(m) for m in mats]
    n = len(mats[0])
    if len(mats) != n + 1:
        raise ShintaniKitError("need exactly n+1 matrices")
    facets = []
    for i in range(len(mats)):
        rest = tuple(m for j, m in enumerate(mats) if j != i)
        t = GLTuple(rest)
        w1 = columns(t.basis)[0]
        u = [mat_vec(alpha, w1) for alpha in t.matrices]
        if rank(from_columns(u)) != n:
            raise DegenerateTuple("facet tuple is degenerate")
        facets.append(t)
    out = []
    for v in samples:
        acc = Fraction(0)
        for i, t in enumerate(facets):
            acc += (-1) ** i * hill_eval(t, v)
        out.append(acc)
    return out


def gl_act_cone(gamma, kappa: ConeFunction) -> ConeFunction:
    """Push a cone combination forward through an invertible matrix.

    (gamma . kappa)(v) = sign(det gamma) * kappa(gamma^{-1} v).
    """
    gamma = mat(gamma)
    d = det(gamma)
    if d == 0:
        raise ShintaniKitError("matrix must be invertible")
    sign = 1 if d > 0 else -1
    terms = []
    for w, cone in kappa.terms:
        gens = tuple(mat_vec(gamma, g) for g in cone.generators)
        terms.append((sign * w, OpenCone(gens)))
    return ConeFunction(terms, sign * kappa.constant)
