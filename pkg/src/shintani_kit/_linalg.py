"""Exact linear algebra over the rationals and over the integers.

Matrices are tuples of row-tuples of Fractions (or ints where noted).  The
sizes involved here are tiny (n <= 4 in practice), so clarity beats
asymptotics: plain Gaussian elimination with exact arithmetic throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .errors import SingularMatrix, ZeroVector

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


def mat(rows) -> Matrix:
    """Normalize a nested iterable into a Fraction matrix."""
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def vec(entries) -> Vector:
    return tuple(Fraction(x) for x in entries)


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    assert all(len(row) == k for row in a)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )

def mat_vec(a: Matrix, v) -> Vector:
    v = vec(v)
    assert len(a[0]) == len(v)
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def columns(a: Matrix) -> list[Vector]:
    return [tuple(row[j] for row in a) for j in range(len(a[0]))]


def from_columns(cols) -> Matrix:
    cols = [vec(c) for c in cols]
    return tuple(tuple(c[i] for c in cols) for i in range(len(cols[0])))


def det(a: Matrix) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(a)
    rows = [list(vec(r)) for r in a]
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = -result
        result *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                for c in range(col, n):
                    rows[r][c] -= factor * rows[col][c]
    return result


def solve(a: Matrix, b) -> Vector:
    """Solve a*x = b for square invertible a."""
    n = len(a)
    b = vec(b)
    aug = [list(vec(a[i])) + [b[i]] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("singular system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[i][n] for i in range(n))


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    cols = [solve(a, [Fraction(1 if i == j else 0) for i in range(n)])
            for j in range(n)]
    return from_columns(cols)


def rank(a: Matrix) -> int:
    rows = [list(vec(r)) for r in a]
    n, m = len(rows), len(rows[0]) if rows else 0
    r = 0
    for col in range(m):
        pivot = next((i for i in range(r, n) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == n:
            break
    return r


def rational_kernel(a: Matrix) -> list[Vector]:
    """Basis of the right kernel of a (rows may be dependent)."""
    rows = [list(vec(r)) for r in a]
    n, m = len(rows), len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for col in range(m):
        pivot = next((i for i in range(r, n) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == n:
            break
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * m
        v[fcol] = Fraction(1)
        for i, pcol in enumerate(pivots):
            v[pcol] = -rows[i][fcol]
        basis.append(tuple(v))
    return basis


# --- integer-lattice routines -------------------------------------------

IntMatrix = tuple[tuple[int, ...], ...]


def _as_int_matrix(a) -> IntMatrix:
    out = []
    for row in a:
        new = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("integer matrix expected")
            new.append(f.numerator)
        out.append(tuple(new))
    return tuple(out)


def hnf_with_transform(a) -> tuple[IntMatrix, IntMatrix]:
    """Column Hermite normal form of an integer matrix.

    Returns (h, u) with a*u = h, u unimodular, h lower triangular with
    nonnegative pivots and entries right of a pivot zero.  Works for any
    shape; zero columns of h are pushed to the right.
    """
    a = _as_int_matrix(a)
    n = len(a)
    m = len(a[0]) if n else 0
    cols = [[a[i][j] for i in range(n)] for j in range(m)]
    ucols = [[1 if i == j else 0 for i in range(m)] for j in range(m)]
    row = 0
    pivot_col = 0
    while row < n and pivot_col < m:
        # clear row `row` across columns pivot_col..m-1 by column gcd steps
        j = pivot_col
        while True:
            nz = [t for t in range(pivot_col, m) if cols[t][row] != 0]
            if not nz:
                break
            t0 = min(nz, key=lambda t: abs(cols[t][row]))
            if t0 != pivot_col:
                cols[pivot_col], cols[t0] = cols[t0], cols[pivot_col]
                ucols[pivot_col], ucols[t0] = ucols[t0], ucols[pivot_col]
            done = True
            for t in range(pivot_col + 1, m):
                if cols[t][row]:
                    q = cols[t][row] // cols[pivot_col][row]
                    cols[t] = [x - q * y for x, y in zip(cols[t], cols[pivot_col])]
                    ucols[t] = [x - q * y for x, y in zip(ucols[t], ucols[pivot_col])]
                    if cols[t][row]:
                        done = False
            if done:
                break
        if cols[pivot_col][row] != 0:
            if cols[pivot_col][row] < 0:
                cols[pivot_col] = [-x for x in cols[pivot_col]]
                ucols[pivot_col] = [-x for x in ucols[pivot_col]]
            # reduce earlier columns against this pivot
            piv = cols[pivot_col][row]
            for t in range(pivot_col):
                q = cols[t][row] // piv
                if q:
                    cols[t] = [x - q * y for x, y in zip(cols[t], cols[pivot_col])]
                    ucols[t] = [x - q * y for x, y in zip(ucols[t], ucols[pivot_col])]
            pivot_col += 1
        row += 1
    h = tuple(tuple(cols[j][i] for j in range(m)) for i in range(n))
    u = tuple(tuple(ucols[j][i] for j in range(m)) for i in range(m))
    return h, u


def integer_kernel(a) -> list[tuple[int, ...]]:
    """Basis of the integer kernel {x in Z^m : a*x = 0}."""
    a = _as_int_matrix(a)
    m = len(a[0]) if a else 0
    h, u = hnf_with_transform(a)
    basis = []
    for j in range(m):
        if all(h[i][j] == 0 for i in range(len(a))):
            basis.append(tuple(u[i][j] for i in range(m)))
    return basis


def solve_integer(a, b) -> tuple[int, ...] | None:
    """One integer solution x of a*x = b, or None if none exists."""
    a = _as_int_matrix(a)
    n = len(a)
    m = len(a[0]) if n else 0
    b = [int(Fraction(x)) if Fraction(x).denominator == 1 else None
         for x in b]
    if any(x is None for x in b):
        return None
    h, u = hnf_with_transform(a)
    # forward-substitute through the staircase columns of h
    x_h = [0] * m
    resid = list(b)
    col = 0
    for row in range(n):
        if col < m and h[row][col] != 0:
            if resid[row] % h[row][col] != 0:
                return None
            q = resid[row] // h[row][col]
            x_h[col] = q
            for i in range(n):
                resid[i] -= q * h[i][col]
            col += 1
        elif resid[row] != 0:
            # zero row in the staircase with a nonzero target
            return None
    if any(resid):
        return None
    return tuple(sum(u[i][j] * x_h[j] for j in range(m)) for i in range(m))


def lattice_intersection(a, b) -> IntMatrix:
    """Basis matrix (columns) of the intersection of two full-rank lattices.

    a and b are square rational matrices whose columns span the lattices.
    """
    a = mat(a)
    b = mat(b)
    n = len(a)
    s = lcm(*(f.denominator for m_ in (a, b) for row in m_ for f in row), 1)
    sa = tuple(tuple(int(x * s) for x in row) for row in a)
    sb = tuple(tuple(int(x * s) for x in row) for row in b)
    stacked = tuple(sa[i] + tuple(-x for x in sb[i]) for i in range(n))
    kern = integer_kernel(stacked)
    if len(kern) != n:
        raise SingularMatrix("lattices are not full rank")
    cols = []
    for k in kern:
        cols.append(tuple(
            sum(Fraction(sa[i][j], s) * k[j] for j in range(n))
            for i in range(n)))
    # HNF-normalize so callers get a canonical triangular basis
    den = lcm(*(f.denominator for c in cols for f in c), 1)
    icols = [[int(x * den) for x in c] for c in cols]
    h, _ = hnf_with_transform(tuple(zip(*[tuple(c) for c in icols])))
    return tuple(tuple(Fraction(h[i][j], den) for j in range(n))
                 for i in range(n))


def coset_representatives(h: IntMatrix) -> list[tuple[int, ...]]:
    """Representatives of Z^n modulo the lattice spanned by h's columns.

    h must be a lower-triangular integer matrix with positive diagonal
    (a column HNF).  Processing rows top-down, each representative is the
    canonical digit vector in the box prod [0, h_ii).
    """
    n = len(h)
    reps: list[tuple[int, ...]] = [()]
    for i in range(n):
        d = h[i][i]
        if d <= 0:
            raise SingularMatrix("HNF with nonpositive pivot")
        reps = [r + (k,) for r in reps for k in range(d)]
    # lower-triangular reduction puts every vector in the box prod [0, h_ii),
    # so the box itself is a complete, canonical set of representatives
    return reps


def minimal_multiplier(g, basis: Matrix) -> Fraction:
    """Smallest positive rational a with a*g inside the column lattice."""
    coords = solve(basis, g)
    d = lcm(*(c.denominator for c in coords), 1)
    numers = [int(c * d) for c in coords]
    g0 = gcd(*numers) if any(numers) else 0
    if g0 == 0:
        raise ZeroVector("zero vector has no minimal multiplier")
    return Fraction(d, g0)
