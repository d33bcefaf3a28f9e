import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffmeas.gf2 import (
    BinMatrix,
    BitVector,
    SingularMatrixError,
    in_row_span,
    inverse,
    perm_compose,
    perm_inverse,
    perm_matrix,
    plu_factor,
    rank,
    row_to_str,
    rref,
    solve,
    str_to_row,
)


def np_rank_gf2(a: np.ndarray) -> int:
    a = a.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        piv = [i for i in range(r, a.shape[0]) if a[i, c]]
        if not piv:
            continue
        a[[r, piv[0]]] = a[[piv[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


@st.composite
def matrices(draw, max_n=8, square=False):
    r = draw(st.integers(1, max_n))
    c = r if square else draw(st.integers(1, max_n))
    rows = draw(st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r))
    return BinMatrix(tuple(rows), c)


def test_string_roundtrip_leftmost_is_column_one():
    assert str_to_row("100") == 1
    assert row_to_str(1, 3) == "100"
    m = BinMatrix.from_strings(["110", "011"])
    assert m[0, 0] == 1 and m[0, 2] == 0 and m[1, 2] == 1
    assert m.to_strings() == ["110", "011"]


def test_bitvector_add_and_str():
    a = BitVector.from_string("1010")
    b = BitVector.from_string("0110")
    assert str(a + b) == "1100"
    assert (a + b).to_list() == [1, 1, 0, 0]


def test_inverse_identity_and_known():
    assert inverse(BinMatrix.identity(4)) == BinMatrix.identity(4)
    u = BinMatrix.from_strings(["110", "011", "001"])
    assert inverse(u).to_strings() == ["111", "011", "001"]


def test_singular_reports_dependent_row():
    m = BinMatrix.from_strings(["110", "011", "101"])
    with pytest.raises(SingularMatrixError) as exc:
        inverse(m)
    assert exc.value.row == 2


@given(matrices())
def test_rank_matches_dense_elimination(m):
    assert rank(m) == np_rank_gf2(m.to_numpy())


@given(matrices(square=True))
def test_inverse_is_two_sided(m):
    if rank(m) < m.nrows:
        with pytest.raises(SingularMatrixError):
            inverse(m)
        return
    inv = inverse(m)
    assert m @ inv == BinMatrix.identity(m.nrows)
    assert inv @ m == BinMatrix.identity(m.nrows)


@given(matrices(square=True), st.integers(0, 255))
def test_solve_gives_left_solution(a, bits):
    n = a.nrows
    x_true = BinMatrix((bits & ((1 << n) - 1),), n)
    b = x_true @ a
    x = solve(a, b)
    assert x @ a == b


@given(matrices())
def test_transpose_and_product_rules(m):
    assert m.T.T == m
    ident = BinMatrix.identity(m.ncols)
    assert m @ ident == m
    assert (m @ m.T).T == m @ m.T


@given(matrices())
def test_rref_rows_span_the_same_space(m):
    red, piv = rref(list(m.rows), m.ncols)
    assert len(red) == rank(m)
    assert all(in_row_span(r, red, m.ncols) for r in m.rows)
    for r, c in zip(red, piv):
        assert sum((o >> c) & 1 for o in red) == 1 and (r >> c) & 1


def test_permutation_helpers():
    p = (2, 0, 1)
    pm = perm_matrix(p)
    assert pm @ perm_matrix(perm_inverse(p)) == BinMatrix.identity(3)
    assert perm_compose(p, perm_inverse(p)) == (0, 1, 2)


@given(matrices(square=True))
def test_plu_reconstructs(m):
    if rank(m) < m.nrows:
        return
    perm, lo, up = plu_factor(m)
    assert lo.is_lower_triangular() and lo.is_unit_diagonal()
    assert up.is_upper_triangular()
    assert perm_matrix(perm) @ lo @ up == m


def test_all_invertible_2x2_count():
    count = 0
    for rows in itertools.product(range(4), repeat=2):
        if rank(BinMatrix(rows, 2)) == 2:
            count += 1
    assert count == 6


def test_block_and_diag():
    i2 = BinMatrix.identity(2)
    z2 = BinMatrix.zeros(2, 2)
    b = BinMatrix.block([[i2, z2], [z2, i2]])
    assert b == BinMatrix.identity(4)
    assert BinMatrix.diag([1, 0, 1]).diagonal() == [1, 0, 1]


def test_random_inverse_large():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(20, 64)
        while True:
            m = BinMatrix(tuple(rng.getrandbits(n) for _ in range(n)), n)
            if rank(m) == n:
                break
        assert m @ inverse(m) == BinMatrix.identity(n)
