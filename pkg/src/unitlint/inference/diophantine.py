"""Exact solvability of linear systems over the integers and the rationals.

Unit exponents are integers, so a system such as ``2*x = m`` has no solution
even though it does over the rationals.  Integer systems are solved through a
column Hermite normal form ``A U = H`` with ``U`` unimodular.
"""

from __future__ import annotations

from fractions import Fraction


def _xgcd(a: int, b: int):
    """``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_hnf(A: list) -> tuple:
    """Return ``(H, U, pivots)`` with ``A U = H`` in column echelon form.

    ``pivots`` lists ``(row, col)`` of each pivot; entries of a pivot row to
    the right of its pivot are zero.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(r) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j)
        for M in (H, U):
            for row in M:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    pivots = []
    col = 0
    for r in range(m):
        if col >= n:
            break
        for j in range(col + 1, n):
            if H[r][j] == 0:
                continue
            a, b = H[r][col], H[r][j]
            g, x, y = _xgcd(a, b)
            # determinant x*(a/g) + y*(b/g) == 1, so the transform is unimodular
            colop(col, j, x, y, -b // g, a // g)
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            colop(col, col, -1, 0, -1, 0)
        pivots.append((r, col))
        col += 1
    return H, U, pivots


def solve_integer(A: list, b: list) -> list | None:
    """An integer solution of ``A x = b``, or ``None`` if there is none."""
    if not A:
        return []
    n = len(A[0])
    H, U, pivots = column_hnf(A)
    y = [0] * n
    pivot_of_row = dict(pivots)
    for r, row in enumerate(H):
        acc = sum(row[j] * y[j] for j in range(n) if y[j])
        rest = b[r] - acc
        c = pivot_of_row.get(r)
        if c is None:
            if rest != 0:
                return None
            continue
        if rest % row[c]:
            return None
        y[c] = rest // row[c]
    return [sum(U[i][j] * y[j] for j in range(n)) for i in range(n)]


def solve_rational(A: list, b: list) -> list | None:
    """A rational solution of ``A x = b`` (free unknowns set to 0), or ``None``."""
    if not A:
        return []
    m, n = len(A), len(A[0])
    M = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] for i in range(m)]
    where = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, m) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [v * inv for v in M[row]]
        for i in range(m):
            if i != row and M[i][col] != 0:
                f = M[i][col]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[row])]
        where.append(col)
        row += 1
        if row == m:
            break
    for i in range(row, m):
        if M[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, col in enumerate(where):
        x[col] = M[i][n]
    return x
