import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relkinv import exactlinalg as el
from relkinv.groupring import (
    GroupIso,
    GroupRingMatrix,
    NoIdentityError,
    NoInverseError,
    NotAssociativeError,
    cyclic_group,
    element_matrix,
    flatten,
    gr_compose,
    group_from_json,
    group_from_table,
    klein_four_group,
    solve_equivariant,
    symmetric_group,
    trivial_group,
)

import oracles

C2 = cyclic_group(2)
ONE, T = [1, 0], [0, 1]


def test_group_from_table_examples():
    assert group_from_table([[0]]).order == 1
    assert group_from_table([[0, 1], [1, 0]]).order == 2
    with pytest.raises(NoInverseError, match="element 1"):
        group_from_table([[0, 1], [1, 1]])


def test_group_errors_are_distinct():
    with pytest.raises(NoIdentityError):
        group_from_table([[1, 0], [0, 1]])
    # a Latin square with identity 0 that is not associative (order 5)
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(NotAssociativeError):
        group_from_table(bad)


def test_group_json_round_trip():
    g = symmetric_group(3)
    assert group_from_json(g.to_json()) == g


@pytest.mark.parametrize("g", [trivial_group(), cyclic_group(4), klein_four_group(), symmetric_group(3)])
def test_builtin_groups_validate(g):
    assert group_from_table(g.mul) == g


def test_compose_examples():
    t = element_matrix(C2, T)
    assert gr_compose(t, t) == element_matrix(C2, ONE)
    a = element_matrix(C2, [1, 1])
    b = element_matrix(C2, [1, -1])
    assert gr_compose(a, b).is_zero()
    assert gr_compose(a, GroupRingMatrix.identity(C2, 1)) == a


def test_flatten_examples():
    g1 = trivial_group()
    m = GroupRingMatrix.from_entries(g1, [[[2], [3]], [[-1], [5]]])
    assert flatten(m).tolist() == [[2, 3], [-1, 5]]
    assert flatten(element_matrix(C2, [1, 1])).tolist() == [[1, 1], [1, 1]]
    assert flatten(element_matrix(C2, [-1, 1])).tolist() == [[-1, 1], [1, -1]]


def test_solve_equivariant_examples():
    a = element_matrix(C2, [1, 1])
    x = solve_equivariant(GroupRingMatrix.identity(C2, 1), a)
    assert x == a
    x = solve_equivariant(a, element_matrix(C2, [2, 2]))
    assert x is not None and gr_compose(a, x) == element_matrix(C2, [2, 2])
    assert solve_equivariant(a, element_matrix(C2, ONE)) is None


def test_iso_validation_c2_and_c3():
    assert GroupIso(C2, C2, (0, 1)).mapping == (0, 1)
    with pytest.raises(ValueError):
        GroupIso(C2, C2, (1, 0))
    c3 = cyclic_group(3)
    valid = []
    for perm in itertools.permutations(range(3)):
        try:
            GroupIso(c3, c3, perm)
            valid.append(perm)
        except ValueError:
            pass
    assert valid == [(0, 1, 2), (0, 2, 1)]


def test_iso_inverse():
    c3 = cyclic_group(3)
    u = GroupIso(c3, c3, (0, 2, 1))
    assert u.inverse().inverse() == u


def random_matrix(draw, g, rows, cols, bound=2):
    coeffs = draw(st.lists(st.integers(-bound, bound), min_size=rows * cols * g.order, max_size=rows * cols * g.order))
    return GroupRingMatrix(g, np.array(coeffs, dtype=object).reshape(rows, cols, g.order))


GROUPS = [trivial_group(), C2, cyclic_group(3), cyclic_group(4), klein_four_group(), symmetric_group(3)]


@st.composite
def composable(draw):
    g = draw(st.sampled_from(GROUPS))
    r, m, c = (draw(st.integers(1, 2)) for _ in range(3))
    return random_matrix(draw, g, r, m), random_matrix(draw, g, m, c), random_matrix(draw, g, m, c)


@given(composable())
def test_flatten_is_multiplicative_and_additive(abc):
    a, b, b2 = abc
    assert (flatten(gr_compose(a, b)) == el.matmul(flatten(a), flatten(b))).all()
    assert (flatten(b + b2) == flatten(b) + flatten(b2)).all()


@given(composable())
def test_compose_matches_convolution(abc):
    """Entry (i, j) of ``a o b`` is ``sum_k b_kj * a_ik`` (right action on images)."""
    a, b, _ = abc
    g = a.group
    prod = gr_compose(a, b)
    for i in range(a.rows):
        for j in range(b.cols):
            ref = [0] * g.order
            for k in range(a.cols):
                term = oracles.group_ring_product(g.mul, list(b.coeffs[k, j]), list(a.coeffs[i, k]))
                ref = [x + y for x, y in zip(ref, term)]
            assert list(prod.coeffs[i, j]) == ref


@given(composable())
def test_solve_equivariant_recovers_products(abc):
    a, b, _ = abc
    rhs = gr_compose(a, b)
    x = solve_equivariant(a, rhs)
    assert x is not None and gr_compose(a, x) == rhs


@given(st.sampled_from(GROUPS), st.data())
def test_matrix_is_equivariant(g, data):
    m = random_matrix(data.draw, g, 2, 2)
    f = flatten(m)
    for gamma in range(g.order):
        # left multiplication by gamma on Z[G]^n as a permutation matrix
        def act(rank):
            p = el.zeros(rank * g.order, rank * g.order)
            for i in range(rank):
                for h in range(g.order):
                    p[i * g.order + g.mul[gamma][h], i * g.order + h] = 1
            return p

        assert (el.matmul(f, act(2)) == el.matmul(act(2), f)).all()
