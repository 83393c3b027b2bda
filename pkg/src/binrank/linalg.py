"""Exact Gaussian elimination over Q and Q(i).

Matrices are lists of rows.  Entries may be ints, Fractions or
GaussianRationals; ints are promoted to Fractions on entry so that division
stays exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _field(x):
    return Fraction(x) if type(x) is int else x


def _rref_integer(rows, ncols: int):
    """Fraction-free Gauss-Jordan on integer rows, contents divided out."""
    m = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row_r = m[r]
        lead = row_r[c]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                row = [lead * a - factor * b for a, b in zip(m[i], row_r)]
                g = 0
                for a in row:
                    g = gcd(g, a)
                    if g == 1:
                        break
                m[i] = [a // g for a in row] if g > 1 else row
        pivots.append(c)
        r += 1
    for i, c in enumerate(pivots):
        lead = m[i][c]
        m[i] = [Fraction(a, lead) for a in m[i]]
    for i in range(len(pivots), len(m)):
        m[i] = [Fraction(0)] * len(m[i])
    return m, pivots


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if rows and all(type(x) is int for row in rows for x in row):
        return _rref_integer(rows, ncols)
    m = [[_field(x) for x in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if lead != 1:
            m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                row_r = m[r]
                m[i] = [a - factor * b for a, b in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows, ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols: int) -> list[list]:
    """Basis of ``{v : rows @ v = 0}``, one vector per free column (ascending)."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def integer_vector(v) -> tuple[int, ...]:
    """Rational vector scaled to coprime integers, first nonzero entry positive."""
    den = 1
    for x in v:
        x = Fraction(x)
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return tuple(x // g for x in ints)


def solve(rows, rhs):
    """Solve ``rows @ x = rhs`` exactly; ``None`` when inconsistent.

    Free variables are set to zero.
    """
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    zero = Fraction(0)
    x = [zero] * n
    for i, pc in enumerate(pivots):
        x[pc] = m[i][n]
    return x

