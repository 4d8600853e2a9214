import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toriccut import intlinalg as il


def minor_gcd_saturated(rows):
    """Brute-force saturation oracle: full rank and maximal minors coprime."""
    import math

    k = len(rows)
    n = len(rows[0])
    if il.rational_rank(rows) != k:
        return False
    g = 0
    for cols in itertools.combinations(range(n), k):
        sub = [[row[c] for c in cols] for row in rows]
        g = math.gcd(g, abs(int(il.determinant(sub))))
    return g == 1


small_int = st.integers(min_value=-6, max_value=6)


def matrix_strategy(max_rows=4, max_cols=4):
    return st.integers(min_value=1, max_value=max_rows).flatmap(
        lambda m: st.integers(min_value=1, max_value=max_cols).flatmap(
            lambda n: st.lists(
                st.lists(small_int, min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    )


@settings(max_examples=120, deadline=None)
@given(matrix_strategy())
def test_snf_reconstruction(mat):
    factors, u, v = il.smith_normal_form(mat)
    assert abs(il.determinant(u)) == 1
    assert abs(il.determinant(v)) == 1
    d = il.matmul(il.matmul(u, mat), v)
    m, n = len(mat), len(mat[0])
    for i in range(m):
        for j in range(n):
            if i == j and i < len(factors):
                assert d[i][j] == factors[i]
            else:
                assert d[i][j] == 0
    for a, b in zip(factors, factors[1:]):
        assert a > 0 and b % a == 0


@settings(max_examples=120, deadline=None)
@given(matrix_strategy())
def test_hnf_spans_same_lattice(mat):
    h, pivots = il.hermite_normal_form(mat)
    assert pivots == sorted(pivots)
    assert len(h) == il.rational_rank(mat)
    # idempotence: HNF of the HNF is itself
    if h:
        h2, p2 = il.hermite_normal_form(h)
        assert h2 == h and p2 == pivots
    # every original row must be an integer combination of the HNF rows:
    # appending it must not change the canonical form
    for row in mat:
        h3, _ = il.hermite_normal_form(h + [list(row)])
        assert h3 == h or (not h and not any(row))


@settings(max_examples=100, deadline=None)
@given(matrix_strategy())
def test_integer_kernel(mat):
    basis = il.integer_kernel_basis(mat)
    n = len(mat[0])
    assert len(basis) == n - il.rational_rank(mat)
    for vec in basis:
        for row in mat:
            assert sum(a * b for a, b in zip(row, vec)) == 0
    if basis:
        factors, _, _ = il.smith_normal_form([list(v) for v in basis])
        assert all(f == 1 for f in factors)


def test_snf_agrees_with_minor_gcd_oracle():
    rng = random.Random(20260823)
    for _ in range(200):
        k = rng.randint(1, 4)
        n = rng.randint(k, 4)
        rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(k)]
        factors, _, _ = il.smith_normal_form(rows)
        snf_verdict = len(factors) == k and all(f == 1 for f in factors)
        assert snf_verdict == minor_gcd_saturated(rows)


def test_hnf_known_cases():
    h, p = il.hermite_normal_form([[-1, 0]])
    assert h == [[1, 0]] and p == [0]
    h, p = il.hermite_normal_form([[-1, 0], [1, 0]])
    assert h == [[1, 0]] and p == [0]
    h, p = il.hermite_normal_form([[-1, 0], [0, -1], [1, 1]])
    assert h == [[1, 0], [0, 1]] and p == [0, 1]
    h, p = il.hermite_normal_form([[2, 1]])
    assert h == [[2, 1]] and p == [0]


def test_kernel_known_cases():
    assert il.integer_kernel_basis([[1, -1]]) == [(1, 1)]
    assert il.integer_kernel_basis([[1, 0, -1], [0, 1, -1]]) == [(1, 1, 1)]


def test_unimodular_completion():
    comp = il.unimodular_row_completion([[-1, 0]])
    assert comp[0] == [1, 0]
    assert abs(il.determinant(comp)) == 1
    comp = il.unimodular_row_completion([[1, 2]])
    assert comp[0] == [1, 2]
    assert abs(il.determinant(comp)) == 1
    with pytest.raises(ValueError):
        il.unimodular_row_completion([[2, 0]])


def test_primitive_direction():
    assert il.primitive_direction([Fraction(2, 3), Fraction(-4, 3)]) == (1, -2)
    assert il.primitive_direction([0, -2, -4]) == (0, 1, 2)


def test_solve_and_determinant():
    sol = il.solve_square([[0, -1], [1, 1]], [0, 1])
    assert sol == (Fraction(1), Fraction(0))
    assert il.determinant([[0, -1], [1, 1]]) == 1
    assert il.determinant([[0, -1], [2, 1]]) == 2


def test_rational_kernel_basis():
    assert il.rational_kernel_basis([[-1, 0]]) == [(0, 1)]
    assert il.rational_kernel_basis([[-1, 0, 0]]) == [(0, 1, 0), (0, 0, 1)]
    assert il.rational_kernel_basis([[-1, -2]]) == [(2, -1)]
