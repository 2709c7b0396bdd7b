"""Exact linear algebra over the integers and rationals.

Matrices are sequences of equal-length rows.  Everything here is pure
Python big-int / Fraction arithmetic; sizes stay at desk scale (p <= 13).
"""

from __future__ import annotations

from fractions import Fraction


def bareiss_det(matrix) -> int:
    """Determinant of an integer matrix, fraction-free (Bareiss)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def int_rank(matrix) -> int:
    """Rank of an integer (or rational) matrix via exact elimination."""
    rows = [list(map(Fraction, row)) for row in matrix]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / pr[col]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def hnf(matrix):
    """Row-style Hermite normal form of an integer matrix.

    Returns the canonical form as a tuple of tuples: upper triangular
    (in echelon shape), positive pivots, entries above each pivot reduced
    into [0, pivot).  Two bases span the same integer row lattice iff
    their HNFs are equal.
    """
    rows = [list(map(int, row)) for row in matrix]
    if not rows:
        return ()
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        # gcd-eliminate column below position r
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][col] != 0:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
        if r < len(rows) and rows[r][col] != 0:
            if rows[r][col] < 0:
                rows[r] = [-a for a in rows[r]]
            for i in range(r):
                q = rows[i][col] // rows[r][col]
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
            r += 1
            if r == len(rows):
                break
    rows = rows[:r] + [row for row in rows[r:] if any(row)]
    return tuple(tuple(row) for row in rows)


def hnf_diagonal(matrix):
    """Pivot entries of the HNF (quotient group structure for full rank)."""
    h = hnf(matrix)
    diag = []
    col = 0
    for row in h:
        while col < len(row) and row[col] == 0:
            col += 1
        if col < len(row):
            diag.append(row[col])
            col += 1
    return tuple(diag)


def solve_exact(matrix, rhs):
    """Solve matrix^T * y = rhs exactly over the rationals.

    `matrix` rows are basis vectors; returns the coefficient vector y with
    y * matrix = rhs, or None if the system is inconsistent.
    """
    n = len(matrix)
    ncols = len(matrix[0])
    # augmented system over columns: sum_i y_i * matrix[i][j] = rhs[j]
    aug = [[Fraction(matrix[i][j]) for i in range(n)] + [Fraction(rhs[j])]
           for j in range(ncols)]
    row = 0
    pivots = []
    for col in range(n):
        pivot = None
        for i in range(row, len(aug)):
            if aug[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        aug[row], aug[pivot] = aug[pivot], aug[row]
        pr = aug[row]
        for i in range(len(aug)):
            if i != row and aug[i][col] != 0:
                f = aug[i][col] / pr[col]
                aug[i] = [a - f * b for a, b in zip(aug[i], pr)]
        pivots.append((row, col))
        row += 1
    # consistency: zero rows must have zero rhs
    for i in range(row, len(aug)):
        if aug[i][n] != 0:
            return None
    y = [Fraction(0)] * n
    for r, c in pivots:
        y[c] = aug[r][n] / aug[r][c]
    return y


def in_row_span(matrix, vector) -> bool:
    """True iff `vector` is an integer combination of the matrix rows."""
    y = solve_exact(matrix, vector)
    if y is None:
        return False
    return all(c.denominator == 1 for c in y)


def inverse_diagonal(matrix):
    """Diagonal of the inverse of a symmetric positive definite integer
    matrix, as exact Fractions (used for enumeration box bounds)."""
    n = len(matrix)
    det = bareiss_det(matrix)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    out = []
    for i in range(n):
        minor = [[matrix[r][c] for c in range(n) if c != i]
                 for r in range(n) if r != i]
        out.append(Fraction(bareiss_det(minor), det))
    return out


def leading_minors_positive(matrix) -> bool:
    """Sylvester test: all leading principal minors strictly positive."""
    n = len(matrix)
    for k in range(1, n + 1):
        sub = [row[:k] for row in matrix[:k]]
        if bareiss_det(sub) <= 0:
            return False
    return True
