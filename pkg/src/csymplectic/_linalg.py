"""Small exact linear-algebra kernels over Fraction / GaussQ entries.

Matrices are lists of lists (or numpy object arrays); entries only need the
field operations and ``== 0``.  Float matrices go through numpy instead.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _rows(a):
    return [list(r) for r in a]


def rref(a):
    """Reduced row echelon form. Returns ``(R, pivot_columns)``."""
    m = _rows(a)
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(a) -> int:
    if len(a) == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a, ncols=None, one=Fraction(1), zero=Fraction(0)):
    """Basis of ``{v : a v = 0}`` as a list of column vectors (lists)."""
    if len(a) == 0:
        n = ncols
        return [[one if i == j else zero for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * n
        v[f] = one
        for row, pc in enumerate(pivots):
            v[pc] = -r[row][f]
        basis.append(v)
    return basis


def det(a):
    m = _rows(a)
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign = 1
    acc = None
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return m[0][0] * 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        piv = m[c][c]
        acc = piv if acc is None else acc * piv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return acc if sign > 0 else -acc


def solve(a, b):
    """Solve ``a x = b`` for square nonsingular ``a``; ``b`` may be a matrix."""
    n = len(a)
    b_rows = _rows(b)
    aug = [list(a[i]) + list(b_rows[i]) for i in range(n)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return [row[n:] for row in r[:n]]


def inverse(a, one=Fraction(1), zero=Fraction(0)):
    n = len(a)
    eye = [[one if i == j else zero for j in range(n)] for i in range(n)]
    return solve(a, eye)


def as_object_array(a) -> np.ndarray:
    out = np.empty((len(a), len(a[0])), dtype=object)
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            out[i, j] = x
    return out
