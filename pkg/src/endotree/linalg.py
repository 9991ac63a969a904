"""Exact integer and rational matrix helpers.

Matrices are tuples of tuples, row major.  Everything here is sized for
rank <= 4 lattices and small finite matrix groups, so the algorithms
favour clarity over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

from .errors import DomainError

Vec = tuple[int, ...]
Mat = tuple[tuple[int, ...], ...]


def identity(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def vec_dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_neg(u: Vec) -> Vec:
    return tuple(-a for a in u)


def mat_vec(m: Mat, v):
    return tuple(vec_dot(row, v) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def transpose(m) -> Mat:
    return tuple(zip(*m))


def mat_eq(a: Mat, b: Mat) -> bool:
    return tuple(map(tuple, a)) == tuple(map(tuple, b))


def mat_pow(m: Mat, k: int) -> Mat:
    out = identity(len(m))
    for _ in range(k):
        out = mat_mul(out, m)
    return out


def mat_order(m: Mat, bound: int = 24) -> int | None:
    """Smallest k >= 1 with m^k = 1, or None if k would exceed `bound`."""
    eye = identity(len(m))
    power = m
    for k in range(1, bound + 1):
        if mat_eq(power, eye):
            return k
        power = mat_mul(power, m)
    return None


def mat_det(m) -> Fraction:
    n = len(m)
    rows = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return det


def frac_inverse(m) -> tuple[tuple[Fraction, ...], ...] | None:
    """Inverse over Q, or None when the matrix is singular."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [a * inv for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def mat_inverse_unimodular(m: Mat) -> Mat:
    inv = frac_inverse(m)
    if inv is None or any(x.denominator != 1 for row in inv for x in row):
        raise DomainError(f"matrix {m} is not invertible over the integers")
    return tuple(tuple(int(x) for x in row) for row in inv)


def inverse_transpose(m: Mat) -> Mat:
    """The induced action on the dual lattice; requires a unimodular input."""
    return transpose(mat_inverse_unimodular(m))


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Row-reduce in place; returns (rows, pivot column indices)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [a * inv for a in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows, pivots


def frac_nullspace(m) -> list[tuple[Fraction, ...]]:
    """Basis of the rational kernel of `m` (rows = equations)."""
    if not m:
        return []
    ncols = len(m[0])
    rows = [[Fraction(x) for x in row] for row in m]
    rows, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -rows[r][f]
        basis.append(tuple(vec))
    return basis


def frac_solve(m, b) -> tuple[Fraction, ...] | None:
    """One solution of m x = b over Q, or None when inconsistent."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rows = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(m, b, strict=True)]
    rows, pivots = rref(rows)
    if ncols in pivots:
        return None
    sol = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        sol[c] = rows[r][ncols]
    return tuple(sol)


def independent_columns(vectors) -> list[int]:
    """Indices of a maximal linearly independent subset, scanned in order."""
    chosen: list[int] = []
    rows: list[list[Fraction]] = []
    for idx, vec in enumerate(vectors):
        trial = rows + [[Fraction(x) for x in vec]]
        reduced, pivots = rref([r[:] for r in trial])
        if len(pivots) == len(trial):
            rows = trial
            chosen.append(idx)
    return chosen


def smith_normal_form(a) -> tuple[Mat, Mat, Mat]:
    """Return (d, s, t) with s a t = d, s and t unimodular, d diagonal with
    nonnegative entries each dividing the next."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    d = [list(map(int, row)) for row in a]
    s = [list(row) for row in identity(nrows)]
    t = [list(row) for row in identity(ncols)]

    def row_sub(i, j, q):
        d[i] = [x - q * y for x, y in zip(d[i], d[j])]
        s[i] = [x - q * y for x, y in zip(s[i], s[j])]

    def col_sub(i, j, q):
        for row in d:
            row[i] -= q * row[j]
        for row in t:
            row[i] -= q * row[j]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        s[i], s[j] = s[j], s[i]

    def col_swap(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in t:
            row[i], row[j] = row[j], row[i]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        s[i] = [-x for x in s[i]]

    k = 0
    while k < min(nrows, ncols):
        piv = None
        for i in range(k, nrows):
            for j in range(k, ncols):
                if d[i][j] and (piv is None or abs(d[i][j]) < abs(d[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        if piv[0] != k:
            row_swap(k, piv[0])
        if piv[1] != k:
            col_swap(k, piv[1])
        if d[k][k] < 0:
            row_negate(k)
        dirty = False
        for i in range(k + 1, nrows):
            if d[i][k]:
                q, r = divmod(d[i][k], d[k][k])
                row_sub(i, k, q)
                if r:
                    dirty = True
        for j in range(k + 1, ncols):
            if d[k][j]:
                q, r = divmod(d[k][j], d[k][k])
                col_sub(j, k, q)
                if r:
                    dirty = True
        if dirty:
            continue
        # pivot must divide the remaining submatrix so the factor chain
        # comes out in divisibility order
        offender = None
        for i in range(k + 1, nrows):
            for j in range(k + 1, ncols):
                if d[i][j] % d[k][k]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            d[k] = [x + y for x, y in zip(d[k], d[offender])]
            s[k] = [x + y for x, y in zip(s[k], s[offender])]
            continue
        k += 1
    return (tuple(map(tuple, d)), tuple(map(tuple, s)), tuple(map(tuple, t)))


def integer_kernel_basis(m) -> list[Vec]:
    """Basis of {x in Z^n : m x = 0}; the basis generates the full
    (saturated) integer kernel, not just a finite-index sublattice."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    if ncols == 0:
        return []
    d, _, t = smith_normal_form(m)
    basis = []
    for j in range(ncols):
        diag = d[j][j] if j < min(nrows, ncols) else 0
        if diag == 0:
            basis.append(tuple(t[i][j] for i in range(ncols)))
    return basis


def signed_permutations(n: int):
    """All signed permutation matrices of size n (the standard-basis
    symmetries used as the finite automorphism search family)."""
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            yield tuple(
                tuple(signs[i] if perm[i] == j else 0 for j in range(n))
                for i in range(n)
            )
