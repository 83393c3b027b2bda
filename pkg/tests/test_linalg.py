from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

from binrank.exact import GaussianRational as G
from binrank.linalg import integer_vector, nullspace, rank, rref, solve

matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n),
                       min_size=1, max_size=5))


def test_rref_small():
    m, piv = rref([[2, 4], [1, 3]])
    assert piv == [0, 1]
    assert m == [[1, 0], [0, 1]]


def test_nullspace_and_rank():
    rows = [[1, 2, 3], [2, 4, 6]]
    assert rank(rows) == 1
    basis = nullspace(rows, 3)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(a * x for a, x in zip(r, v)) == 0 for r in rows)


def test_integer_vector_normalizes():
    assert integer_vector([F(-1, 2), F(1, 3)]) == (3, -2)
    assert integer_vector([0, F(4), F(6)]) == (0, 2, 3)


def test_solve_consistent_and_not():
    assert solve([[1, 1], [1, -1]], [2, 0]) == [1, 1]
    assert solve([[1, 1], [1, 1]], [1, 2]) is None


def test_gaussian_rank():
    i = G(0, 1)
    rows = [[G(1), 2 * i, G(-1)], [G(1), -2 * i, G(-1)]]
    assert rank(rows, 3) == 2
    assert rank(rows + [[G(1), G(0), G(-1)]], 3) == 2
    assert rank(rows + [[G(1), G(0), G(1)]], 3) == 3


@given(matrices)
def test_rank_nullity(rows):
    n = len(rows[0])
    basis = nullspace(rows, n)
    assert rank(rows, n) + len(basis) == n
    for v in basis:
        assert all(sum(a * x for a, x in zip(r, v)) == 0 for r in rows)


@given(matrices)
def test_integer_and_rational_paths_agree(rows):
    n = len(rows[0])
    assert rref(rows, n) == rref([[F(x) for x in r] for r in rows], n)
