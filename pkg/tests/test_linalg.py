"""Exact linear algebra: frozen examples plus randomized invariants."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from lieforge.linalg import (
    SparseMatrix,
    invert_dense,
    matvec,
    nullspace,
    rank,
    rat,
    rref,
    solve,
)


def dense(rows):
    return SparseMatrix.from_dense([[rat(v) for v in row] for row in rows])


def test_rat_parsing():
    assert rat("-3/2") == Fraction(-3, 2)
    assert rat(5) == Fraction(5)
    assert rat(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        rat(0.5)


def test_sparse_matrix_drops_zero_entries():
    m = SparseMatrix(2, 2, {(0, 0): 1, (0, 1): 0})
    assert m.nnz() == 1


def test_sparse_matrix_bounds_checked():
    with pytest.raises(ValueError):
        SparseMatrix(2, 2, {(2, 0): 1})
    with pytest.raises(ValueError):
        SparseMatrix(2, 2, {(0, -1): 1})


def test_rank_identity_3():
    assert rank(dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 3


def test_rank_zero_2x2():
    assert rank(SparseMatrix(2, 2)) == 0


def test_rank_dependent_rows():
    assert rank(dense([[1, 2], [2, 4]])) == 1


def test_nullspace_identity_empty():
    assert nullspace(dense([[1, 0], [0, 1]])) == []


def test_nullspace_dependent_rows():
    basis = nullspace(dense([[1, 2], [2, 4]]))
    assert len(basis) == 1
    v = basis[0]
    # proportional to (-2, 1)
    assert v[0] * 1 == v[1] * -2
    assert v != [0, 0]


def test_nullspace_zero_row_has_full_nullity():
    # a single zero constraint on 3 unknowns removes nothing: rank 0,
    # so rank + nullity = cols forces a 3-vector basis
    basis = nullspace(SparseMatrix(1, 3))
    assert len(basis) == 3


def test_solve_identity():
    x = solve(dense([[1, 0], [0, 1]]), [rat("3/2"), rat(-1)])
    assert x == [Fraction(3, 2), Fraction(-1)]


def test_solve_inconsistent_absent():
    assert solve(dense([[1, 2], [2, 4]]), [1, 3]) is None


def test_solve_zero_matrix_zero_rhs():
    m = SparseMatrix(2, 2)
    x = solve(m, [0, 0])
    assert x is not None
    assert matvec(m, x) == [Fraction(0), Fraction(0)]


def test_solve_rhs_length_checked():
    with pytest.raises(ValueError):
        solve(SparseMatrix(2, 2), [0, 0, 0])


def _random_matrix(rng: random.Random, max_dim: int = 6) -> SparseMatrix:
    rows = rng.randint(1, max_dim)
    cols = rng.randint(1, max_dim)
    entries = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < 0.6:
                num = rng.randint(-4, 4)
                den = rng.choice([1, 1, 2, 3])
                entries[(r, c)] = Fraction(num, den)
    return SparseMatrix(rows, cols, entries)


def test_random_rank_transpose_and_nullity():
    rng = random.Random(20260819)
    for _ in range(200):
        m = _random_matrix(rng)
        r = rank(m)
        assert r == rank(m.transpose())
        basis = nullspace(m)
        assert r + len(basis) == m.cols
        for v in basis:
            assert all(x == 0 for x in matvec(m, v))


def test_random_methods_agree():
    # rational Gaussian elimination and fraction-free elimination must land
    # on the same reduced echelon form (it is unique over the rationals)
    rng = random.Random(7)
    for _ in range(200):
        m = _random_matrix(rng)
        assert rref(m, "fraction_free") == rref(m, "rational")


def test_random_solve_consistent_systems():
    rng = random.Random(99)
    for _ in range(100):
        m = _random_matrix(rng)
        x0 = [Fraction(rng.randint(-3, 3), rng.choice([1, 2])) for _ in range(m.cols)]
        b = matvec(m, x0)
        x = solve(m, b)
        assert x is not None
        assert matvec(m, x) == b


def test_sparse_path_agrees_with_rational():
    # 70 cols exceeds the dense threshold, exercising the sparse kernel
    rng = random.Random(3)
    entries = {}
    for r in range(40):
        for _ in range(5):
            entries[(r, rng.randrange(70))] = Fraction(
                rng.randint(-5, 5), rng.choice([1, 2, 3])
            )
    m = SparseMatrix(40, 70, entries)
    assert rref(m, "fraction_free") == rref(m, "rational")
    r = rank(m)
    basis = nullspace(m)
    assert r + len(basis) == 70
    for v in basis[:10]:
        assert all(x == 0 for x in matvec(m, v))


def test_rref_rejects_unknown_method():
    with pytest.raises(ValueError):
        rref(SparseMatrix(1, 1), "float")


def test_invert_dense_roundtrip():
    a = [[rat(2), rat(1)], [rat(1), rat(1)]]
    inv = invert_dense(a)
    assert inv == [[Fraction(1), Fraction(-1)], [Fraction(-1), Fraction(2)]]


def test_invert_dense_singular_none():
    assert invert_dense([[1, 2], [2, 4]]) is None


def test_invert_dense_random():
    rng = random.Random(41)
    found = 0
    while found < 20:
        n = rng.randint(1, 5)
        a = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        inv = invert_dense(a)
        if inv is None:
            continue
        found += 1
        prod = [
            [sum(a[i][k] * inv[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
        ident = [
            [Fraction(1) if i == j else Fraction(0) for j in range(n)]
            for i in range(n)
        ]
        assert prod == ident
