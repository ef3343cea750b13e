import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relkinv import exactlinalg as el

import oracles


def mat(rows):
    return el.as_matrix(rows)


def small_matrices(max_rows=4, max_cols=4, bound=4):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r
            ).map(lambda rows, c=c: el.as_matrix(rows, (len(rows), c)))
        )
    )


def check_snf(m, snf):
    assert (el.matmul(el.matmul(snf.U, m), snf.V) == snf.S).all()
    assert el.is_unimodular(snf.U) and el.is_unimodular(snf.V)
    d = snf.diagonal
    off = snf.S.copy()
    for i in range(len(d)):
        off[i, i] = 0
    assert not any(off.flat)
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert d[: len(nz)] == nz  # zeros trail
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_snf_empty():
    snf = el.smith_normal_form(el.zeros(0, 0))
    assert snf.U.shape == (0, 0) and snf.V.shape == (0, 0) and snf.diagonal == []


def test_snf_identity():
    snf = el.smith_normal_form(el.identity(3))
    assert (snf.S == el.identity(3)).all()


def test_snf_worked_example():
    m = mat([[2, 4], [6, 8]])
    snf = el.smith_normal_form(m)
    check_snf(m, snf)
    assert snf.diagonal == [2, 4]
    assert oracles.invariant_factors([[2, 4], [6, 8]]) == [2, 4]


def test_snf_is_deterministic():
    m = mat([[3, 5, 7], [2, 4, 6], [1, 0, 9]])
    a, b = el.smith_normal_form(m), el.smith_normal_form(m)
    assert (a.U == b.U).all() and (a.S == b.S).all() and (a.V == b.V).all()


def test_snf_big_entries_do_not_overflow():
    big = 10**30
    m = mat([[big, big + 1], [big - 1, big]])
    snf = el.smith_normal_form(m)
    check_snf(m, snf)
    assert snf.diagonal == [1, 1]


def test_solve_identity():
    b = mat([[1, -2], [3, 4]])
    assert (el.solve_integer_system(el.identity(2), b) == b).all()


def test_solve_parity():
    assert el.solve_integer_system(mat([[2]]), mat([[3]])) is None


def test_solve_bezout():
    x = el.solve_integer_system(mat([[2, 3]]), mat([[1]]))
    assert x is not None and 2 * x[0, 0] + 3 * x[1, 0] == 1


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        el.solve_integer_system(mat([[1, 2]]), mat([[1], [2]]))


def test_kernel_examples():
    assert el.kernel_basis(el.identity(3)).shape == (3, 0)
    assert (el.kernel_basis(el.zeros(2, 3)) == el.identity(3)).all()
    k = el.kernel_basis(mat([[1, 1], [1, 1]]))
    assert k.shape == (2, 1) and abs(k[0, 0]) == 1 and k[0, 0] == -k[1, 0]


def test_cokernel_examples():
    c = el.cokernel_presentation(el.zeros(2, 0))
    assert c.factors == (0, 0)
    assert el.cokernel_presentation(mat([[2]])).factors == (2,)
    c = el.cokernel_presentation(mat([[2, 0], [0, 3]]))
    assert c.factors == (1, 6) and c.nontrivial == (6,)


def test_cokernel_projection_kills_image():
    a = mat([[2, 4, 0], [0, 6, 3], [1, 1, 1]])
    c = el.cokernel_presentation(a)
    img = el.matmul(c.projection, a)
    for i, d in enumerate(c.factors):
        assert all((x % d == 0) if d else x == 0 for x in img[i])


@given(small_matrices())
def test_snf_invariants(m):
    snf = el.smith_normal_form(m)
    check_snf(m, snf)
    assert [d for d in snf.diagonal if d] == oracles.invariant_factors(m.tolist()) if m.size else True


@given(small_matrices())
def test_kernel_saturated_and_complete(m):
    k = el.kernel_basis(m)
    assert not any(el.matmul(m, k).flat) if k.size and m.size else True
    for v in oracles.brute_kernel(m.astype(np.int64) if m.size else np.zeros(m.shape, dtype=np.int64), 2):
        assert oracles.in_lattice(k, v)


@given(small_matrices(max_cols=3), st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_solve_agrees_with_search(m, rhs):
    b = el.as_matrix([rhs[: m.shape[0]]], (1, m.shape[0])).T
    x = el.solve_integer_system(m, b)
    if x is not None:
        assert (el.matmul(m, x) == b).all()
    else:
        assert oracles.brute_solve(m.astype(np.int64), [int(v) for v in b.flat], 5) is None


@given(small_matrices(), small_matrices())
def test_matmul_matches_python(a, b):
    if a.shape[1] != b.shape[0]:
        return
    ref = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(a.shape[1])) for j in range(b.shape[1])] for i in range(a.shape[0])]
    assert el.matmul(a, b).tolist() == ref if a.shape[0] and b.shape[1] else True
