"""Exact elimination, cross-checked against an independent implementation."""

import random
from fractions import Fraction

import sympy

from species_forge import linalg


def random_matrix(rng, rows, cols):
    return [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cols)]
            for _ in range(rows)]


def test_kernel_vectors_annihilate():
    rng = random.Random(7)
    for _ in range(40):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        m = random_matrix(rng, rows, cols)
        for v in linalg.kernel_basis(m, cols):
            for row in m:
                assert sum(a * x for a, x in zip(row, v)) == 0


def test_rank_and_nullity_match_sympy():
    rng = random.Random(11)
    for _ in range(40):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        m = random_matrix(rng, rows, cols)
        sm = sympy.Matrix([[sympy.Rational(x) for x in row] for row in m])
        assert linalg.rank(m, cols) == sm.rank()
        assert len(linalg.kernel_basis(m, cols)) == cols - sm.rank()


def test_kernel_is_deterministic():
    m = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert linalg.kernel_basis(m, 3) == linalg.kernel_basis(m, 3)
    assert linalg.kernel_basis(m, 3) == [(Fraction(-1), Fraction(-1), Fraction(1))]


def test_in_span_and_spans_equal():
    rows = [[1, 0, 1], [0, 1, 1]]
    assert linalg.in_span(rows, 3, [1, 1, 2])
    assert not linalg.in_span(rows, 3, [1, 1, 3])
    assert linalg.spans_equal(rows, [[1, 1, 2], [1, -1, 0]], 3)
    assert not linalg.spans_equal(rows, [[1, 0, 0]], 3)


def test_rank_zero_matrix():
    assert linalg.rank([[0, 0]], 2) == 0
    assert len(linalg.kernel_basis([[0, 0]], 2)) == 2
