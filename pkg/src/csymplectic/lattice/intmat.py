"""Exact integer and rational matrix routines.

Matrices are lists of rows of Python ints (or Fractions where stated).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def _copy(a):
    return [list(r) for r in a]


def xgcd(a: int, b: int):
    """``(g, x, y)`` with ``a x + b y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def det(a) -> int:
    """Bareiss fraction-free determinant."""
    m = _copy(a)
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank(a) -> int:
    m = [[Fraction(x) for x in r] for r in a]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, rows):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def hermite_normal_form(a) -> list:
    """Row-style HNF of an integer matrix, zero rows dropped.

    Pivots are positive, rows are ordered by pivot column, and entries above
    each pivot lie in ``[0, pivot)``.
    """
    m = _copy(a)
    if not m:
        return []
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        if r == rows:
            break
        for i in range(r + 1, rows):
            if m[i][c] == 0:
                continue
            g, x, y = xgcd(m[r][c], m[i][c])
            p, q = m[r][c] // g, m[i][c] // g
            new_r = [x * u + y * v for u, v in zip(m[r], m[i])]
            new_i = [-q * u + p * v for u, v in zip(m[r], m[i])]
            m[r], m[i] = new_r, new_i
        if m[r][c] == 0:
            continue
        if m[r][c] < 0:
            m[r] = [-v for v in m[r]]
        piv = m[r][c]
        for i in range(r):
            f = m[i][c] // piv
            if f:
                m[i] = [u - f * v for u, v in zip(m[i], m[r])]
        r += 1
    return [row for row in m[:r] if any(row)]


def smith_diagonal(a) -> list:
    """Elementary divisors (nonzero invariant factors) of an integer matrix."""
    m = _copy(a)
    if not m or not m[0]:
        return []
    rows, cols = len(m), len(m[0])
    out = []
    t = 0
    while t < min(rows, cols):
        entries = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        m[t], m[pi] = m[pi], m[t]
        for row in m:
            row[t], row[pj] = row[pj], row[t]
        while True:
            done = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    m[i] = [u - q * v for u, v in zip(m[i], m[t])]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    for row in m:
                        row[j] -= q * row[t]
                    if m[t][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if m[i][j] % m[t][t]), None)
                if bad is None:
                    break
                m[t] = [u + v for u, v in zip(m[t], m[bad[0]])]
        out.append(abs(m[t][t]))
        t += 1
    return out


def integer_kernel(a, ncols: int | None = None) -> list:
    """Saturated basis (rows, in HNF) of ``{v in Z^n : A v = 0}``.

    Unimodular column reduction of ``A`` tracked on an identity block: the
    columns that end up zero on ``A`` give a basis of the kernel lattice, and
    a unimodular transform keeps it saturated.
    """
    rows = [list(r) for r in a]
    n = len(rows[0]) if rows else ncols
    cols = [[rows[i][j] for i in range(len(rows))] + [1 if k == j else 0 for k in range(n)]
            for j in range(n)]
    top = len(rows)
    piv = 0
    for r in range(top):
        if piv == n:
            break
        nz = [j for j in range(piv, n) if cols[j][r] != 0]
        if not nz:
            continue
        cols[piv], cols[nz[0]] = cols[nz[0]], cols[piv]
        for j in range(piv + 1, n):
            if cols[j][r] == 0:
                continue
            g, x, y = xgcd(cols[piv][r], cols[j][r])
            p, q = cols[piv][r] // g, cols[j][r] // g
            a_col, b_col = cols[piv], cols[j]
            cols[piv] = [x * u + y * v for u, v in zip(a_col, b_col)]
            cols[j] = [-q * u + p * v for u, v in zip(a_col, b_col)]
        piv += 1
    kernel = [c[top:] for c in cols[piv:]]
    return hermite_normal_form(kernel) if kernel else []


def scale_to_integer(row) -> list:
    """Primitive integer multiple of a rational row (zero stays zero)."""
    den = 1
    for x in row:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints] if g else ints


def inertia(gram) -> tuple:
    """``(positive, negative, zero)`` counts of a symmetric rational matrix."""
    m = [[Fraction(x) for x in r] for r in gram]
    n = len(m)
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if m[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i != j and m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j: diagonal becomes 2 m_ij != 0
            for c in range(n):
                m[i][c] += m[j][c]
            for r in range(n):
                m[r][i] += m[r][j]
            k = i
        d = m[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(k)
        for i in active:
            f = m[i][k] / d
            if f:
                for c in range(n):
                    m[i][c] -= f * m[k][c]
                for r in range(n):
                    m[r][i] -= f * m[r][k]
    return pos, neg, n - pos - neg
