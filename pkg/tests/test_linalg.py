import random
from fractions import Fraction

import pytest

from shintani_kit._linalg import (
    coset_representatives,
    det,
    from_columns,
    hnf_with_transform,
    identity,
    integer_kernel,
    inverse,
    lattice_intersection,
    mat,
    mat_mul,
    mat_vec,
    minimal_multiplier,
    rank,
    rational_kernel,
    solve,
    solve_integer,
    vec,
)
from shintani_kit.errors import SingularMatrix, ZeroVector


def _rand_int_matrix(rng, n, m, lo=-6, hi=7):
    return mat([[rng.randrange(lo, hi) for _ in range(m)] for _ in range(n)])


def test_det_inverse_solve():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randrange(1, 5)
        a = _rand_int_matrix(rng, n, n)
        if det(a) == 0:
            with pytest.raises(SingularMatrix):
                inverse(a)
            continue
        ai = inverse(a)
        assert mat_mul(a, ai) == identity(n)
        b = vec([rng.randrange(-9, 9) for _ in range(n)])
        x = solve(a, b)
        assert mat_vec(a, x) == b


def test_hnf_properties():
    rng = random.Random(9)
    for _ in range(40):
        n = rng.randrange(1, 4)
        m = rng.randrange(1, 5)
        a = _rand_int_matrix(rng, n, m)
        h, u = hnf_with_transform(a)
        # a * u = h with u unimodular
        assert mat_mul(a, u) == h
        assert abs(det(u)) == 1
        # lower triangular in the staircase sense: pivots move down
        r = rank(a)
        for j in range(r, m):
            assert all(h[i][j] == 0 for i in range(n))


def test_integer_kernel():
    rng = random.Random(13)
    for _ in range(30):
        a = _rand_int_matrix(rng, 2, 4)
        kern = integer_kernel(a)
        for v in kern:
            assert all(x == 0 for x in mat_vec(a, vec(v)))
            assert all(isinstance(x, int) for x in v)
        # kernel dimension matches rank-nullity
        assert len(kern) == 4 - rank(a)


def test_solve_integer():
    rng = random.Random(17)
    for _ in range(60):
        n = rng.randrange(1, 4)
        m = rng.randrange(1, 4)
        a = _rand_int_matrix(rng, n, m)
        x0 = vec([rng.randrange(-5, 6) for _ in range(m)])
        b = mat_vec(a, x0)
        x = solve_integer(a, b)
        assert x is not None
        assert mat_vec(a, x) == b
        assert all(xi.denominator == 1 for xi in x)
    # insolvable case
    assert solve_integer(mat([[2]]), vec([1])) is None


def test_lattice_intersection_membership():
    a = mat([[2, 0], [0, 3]])
    b = mat([[3, 0], [0, 2]])
    c = lattice_intersection(a, b)
    assert abs(det(c)) == 36
    # 6*e1 and 6*e2 generate the intersection
    ci = inverse(c)
    for v in ([6, 0], [0, 6]):
        x = mat_vec(ci, vec(v))
        assert all(xi.denominator == 1 for xi in x)


def test_lattice_intersection_fractional():
    a = mat([[Fraction(1, 2), 0], [0, 1]])
    b = mat([[Fraction(1, 3), 0], [0, 1]])
    c = lattice_intersection(a, b)
    ci = inverse(c)
    x = mat_vec(ci, vec([Fraction(1, 6) * 6, 0]))  # the vector (1, 0)
    assert all(xi.denominator == 1 for xi in x)
    assert abs(det(c)) == 1


def test_coset_representatives_count():
    rng = random.Random(23)
    for _ in range(25):
        n = rng.randrange(1, 4)
        while True:
            a = _rand_int_matrix(rng, n, n, -4, 5)
            d = det(a)
            if d != 0 and abs(d) <= 40:
                break
        h, _ = hnf_with_transform(a)
        reps = coset_representatives(h)
        assert len(reps) == abs(d)
        # distinct modulo the lattice
        hi = inverse(h)
        seen = set()
        for r in reps:
            canon = tuple(x - (x.numerator // x.denominator) for x in mat_vec(hi, vec(r)))
            assert canon not in seen
            seen.add(canon)


def test_minimal_multiplier():
    basis = mat([[2, 0], [0, 3]])
    assert minimal_multiplier(vec([1, 0]), basis) == 2
    assert minimal_multiplier(vec([2, 3]), basis) == 1
    assert minimal_multiplier(vec([1, 1]), basis) == 6
    assert minimal_multiplier(vec([Fraction(1, 2), 0]), basis) == 4
    with pytest.raises(ZeroVector):
        minimal_multiplier(vec([0, 0]), basis)


def test_rational_kernel():
    a = mat([[1, 2, 3]])
    kern = rational_kernel(a)
    assert len(kern) == 2
    for v in kern:
        assert sum(ai * vi for ai, vi in zip(a[0], v)) == 0
