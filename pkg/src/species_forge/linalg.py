"""Exact rational linear algebra.

Fraction-free (Bareiss) forward elimination with deterministic pivoting:
pivots are chosen as the first nonzero column and, within it, the smallest
row index.  Kernels, ranks, and span membership are all derived from the
same elimination so that every basis this module hands out is reproducible
across runs and platforms.

Matrices are sequences of rows; entries may be ints or Fractions.  Nothing
here mutates its inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _clear_denominators(row: Sequence) -> list[int]:
    fracs = [Fraction(x) for x in row]
    lcm = 1
    for f in fracs:
        d = f.denominator
        g = _gcd(lcm, d)
        lcm = lcm // g * d
    return [int(f * lcm) for f in fracs]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a) if a else 1


def echelon(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Integer row echelon form via Bareiss elimination.

    Returns (matrix, pivot_columns).  Row scaling clears denominators first,
    so the echelon entries are exact integers; exact division keeps growth
    polynomial.
    """
    m = [_clear_denominators(r) for r in rows]
    nrows = len(m)
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        for i in range(r + 1, nrows):
            if all(x == 0 for x in m[i]):
                continue
            for j in range(ncols):
                if j == c:
                    continue
                m[i][j] = (m[i][j] * piv - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = piv
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    _, pivots = echelon(rows, ncols)
    return len(pivots)


def kernel_basis(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {v : M v = 0}, one vector per free column.

    Each basis vector has coefficient 1 at its free column and is obtained by
    back substitution; the result is canonical for the fixed pivoting rule.
    """
    m, pivots = echelon(rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            s = sum((Fraction(m[r][j]) * v[j] for j in range(pc + 1, ncols)), Fraction(0))
            v[pc] = -s / Fraction(m[r][pc])
        basis.append(tuple(v))
    return basis


def in_span(rows: Sequence[Sequence], ncols: int, v: Sequence) -> bool:
    base = rank(rows, ncols)
    return rank(list(rows) + [list(v)], ncols) == base


def spans_equal(rows_a: Sequence[Sequence], rows_b: Sequence[Sequence], ncols: int) -> bool:
    ra = rank(rows_a, ncols)
    rb = rank(rows_b, ncols)
    if ra != rb:
        return False
    return rank(list(rows_a) + list(rows_b), ncols) == ra
