"""Exact integer and rational linear algebra on small dense matrices.

Everything here works on plain Python lists of ints / Fractions, which is
plenty fast at the supported problem sizes and keeps all verdicts exact.
Matrices are lists of rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _copy_int_matrix(mat):
    out = []
    for row in mat:
        out.append([int(v) for v in row])
    return out


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a, b):
    """Exact matrix product of two list-of-rows matrices."""
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(rows):
        arow = a[i]
        orow = []
        for j in range(cols):
            s = 0
            for k in range(inner):
                s += arow[k] * b[k][j]
            orow.append(s)
        out.append(orow)
    return out


def transpose(mat):
    return [list(col) for col in zip(*mat)]


def vector_gcd(vec) -> int:
    g = 0
    for v in vec:
        g = gcd(g, abs(int(v)))
    return g


def is_primitive(vec) -> bool:
    return vector_gcd(vec) == 1


def primitive_direction(vec):
    """Scale a nonzero rational vector to a primitive integer vector.

    The sign is normalized so the first nonzero entry is positive.
    """
    fracs = [Fraction(v) for v in vec]
    denom_lcm = 1
    for f in fracs:
        d = f.denominator
        denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
    ints = [int(f * denom_lcm) for f in fracs]
    g = vector_gcd(ints)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    ints = [v // g for v in ints]
    for v in ints:
        if v != 0:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


def rational_rref(mat):
    """Reduced row echelon form over the rationals.

    Returns:
        (rows, pivot_cols) where rows is the RREF as Fractions and
        pivot_cols lists the 0-based pivot columns left to right.
    """
    rows = [[Fraction(v) for v in row] for row in mat]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [v / inv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rational_rank(mat) -> int:
    if not mat:
        return 0
    _, pivots = rational_rref(mat)
    return len(pivots)


def rational_kernel_basis(mat, ncols: int | None = None):
    """Primitive integer basis of the rational kernel {x : mat @ x = 0}.

    The basis vectors are deterministic: one per free column of the RREF,
    ordered by free column index, each scaled to a primitive integer
    vector with positive leading entry.
    """
    if ncols is None:
        if not mat:
            raise ValueError("need ncols for an empty matrix")
        ncols = len(mat[0])
    if not mat:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    rref, pivots = rational_rref(mat)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rref[r][fc]
        basis.append(primitive_direction(vec))
    return basis


def solve_square(mat, rhs):
    """Exact solve of a square nonsingular rational system.

    Returns the solution as a tuple of Fractions, or None if singular.
    """
    n = len(mat)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if aug[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            return None
        aug[c], aug[pivot] = aug[pivot], aug[c]
        inv = aug[c][c]
        aug[c] = [v / inv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return tuple(aug[i][n] for i in range(n))


def determinant(mat) -> Fraction:
    """Exact determinant via Gaussian elimination over the rationals."""
    n = len(mat)
    rows = [[Fraction(v) for v in row] for row in mat]
    det = Fraction(1)
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        inv = rows[c][c]
        rows[c] = [v / inv for v in rows[c]]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def invert_unimodular(mat):
    """Inverse of an integer matrix with determinant +-1, as integers."""
    n = len(mat)
    aug = [[Fraction(v) for v in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(mat)]
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if aug[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        inv = aug[c][c]
        aug[c] = [v / inv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            v = aug[i][n + j]
            if v.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(v))
        out.append(row)
    return out


def hermite_normal_form(mat):
    """Row-style Hermite normal form of the lattice spanned by the rows.

    Pivots are chosen in the leftmost column containing a nonzero entry,
    rows are combined by Euclidean steps, pivot entries are made positive,
    and entries above each pivot are reduced into [0, pivot).

    Returns:
        (rows, pivot_cols): the nonzero HNF rows and their 0-based pivot
        columns in increasing order. Zero input rows are dropped.
    """
    h = _copy_int_matrix(mat)
    m = len(h)
    ncols = len(h[0]) if h else 0
    pivot_row = 0
    pivot_cols = []
    for col in range(ncols):
        if pivot_row == m:
            break
        nz = [i for i in range(pivot_row, m) if h[i][col] != 0]
        if not nz:
            continue
        if nz[0] != pivot_row:
            h[pivot_row], h[nz[0]] = h[nz[0]], h[pivot_row]
        for i in range(pivot_row + 1, m):
            while h[i][col] != 0:
                q = h[pivot_row][col] // h[i][col]
                h[pivot_row] = [a - q * b for a, b in zip(h[pivot_row], h[i])]
                h[pivot_row], h[i] = h[i], h[pivot_row]
        if h[pivot_row][col] < 0:
            h[pivot_row] = [-v for v in h[pivot_row]]
        p = h[pivot_row][col]
        for i in range(pivot_row):
            q = h[i][col] // p
            if q != 0:
                h[i] = [a - q * b for a, b in zip(h[i], h[pivot_row])]
        pivot_cols.append(col)
        pivot_row += 1
    return [h[i] for i in range(pivot_row)], pivot_cols


def smith_normal_form(mat):
    """Smith normal form with transforms: U @ mat @ V = diag(factors).

    Returns:
        (factors, U, V): the invariant factors (nonnegative, each dividing
        the next) and unimodular transforms U (rows) and V (columns).
    """
    a = _copy_int_matrix(mat)
    m = len(a)
    n = len(a[0]) if a else 0
    u = identity_matrix(m)
    v = identity_matrix(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(m, n)
    while t < limit:
        # deterministic pivot: smallest nonzero magnitude, ties by position
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0:
                    key = (abs(a[i][j]), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        if a[t][t] < 0:
            negate_row(t)
        # enforce divisibility of the remaining block by the pivot
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(offender, t, 1)
            continue
        t += 1
    factors = [a[i][i] for i in range(limit) if a[i][i] != 0]
    return factors, u, v


def integer_kernel_basis(mat, ncols: int | None = None):
    """Canonical basis of the integer kernel {x in Z^ncols : mat @ x = 0}.

    The returned rows are the Hermite normal form of the kernel lattice,
    so the basis is deterministic and spans the full (saturated) kernel.
    """
    if ncols is None:
        if not mat:
            raise ValueError("need ncols for an empty matrix")
        ncols = len(mat[0])
    if not mat:
        return [tuple(r) for r in identity_matrix(ncols)]
    factors, _, v = smith_normal_form(mat)
    r = len(factors)
    cols = []
    for j in range(r, ncols):
        cols.append([v[i][j] for i in range(ncols)])
    if not cols:
        return []
    rows, _ = hermite_normal_form(cols)
    return [tuple(row) for row in rows]


def unimodular_row_completion(rows):
    """Extend the lattice spanned by integer rows to a basis of Z^n.

    Requires the row lattice to be saturated (all Smith invariant factors
    equal to 1). Returns a square integer matrix with determinant +-1 whose
    first r rows are the Hermite normal form basis of the input lattice.
    """
    h, _ = hermite_normal_form(rows)
    if not h:
        raise ValueError("zero lattice has no distinguished basis rows")
    n = len(h[0])
    r = len(h)
    factors, _, v = smith_normal_form(h)
    if len(factors) != r or any(f != 1 for f in factors):
        raise ValueError("row lattice is not saturated")
    vinv = invert_unimodular(v)
    comp = [list(h[i]) for i in range(r)]
    for i in range(r, n):
        comp.append(list(vinv[i]))
    det = determinant(comp)
    if abs(det) != 1:
        raise AssertionError("completion construction lost unimodularity")
    return comp
