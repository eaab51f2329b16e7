"""Substrate tests: exact arithmetic, canonical kernels/cokernels, kron."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from herdcat.exactlin import (
    FieldSpec, ShapeError, basis_vec, cokernel, cokernel_with_section, eye,
    factor_swap, field_from_name, hstack, inverse, kernel_basis, kron,
    mat, mat_mul, mat_of_ints, rank, rref, solve, transpose, zeros,
)

GF5 = FieldSpec("gf", 5)
GF7 = FieldSpec("gf", 7)
QQ = FieldSpec("q")


def test_field_spec_rejects_nonprime():
    with pytest.raises(ShapeError):
        FieldSpec("gf", 6)
    with pytest.raises(ShapeError):
        FieldSpec("gf", 1)
    with pytest.raises(ShapeError):
        FieldSpec("weird")


def test_field_from_name():
    assert field_from_name("gf5") == GF5
    assert field_from_name("q") == QQ
    with pytest.raises(ShapeError):
        field_from_name("gf4")
    with pytest.raises(ShapeError):
        field_from_name("float")


def test_field_arithmetic_exact():
    # a + (-a) = 0 and a * a^-1 = 1 for every nonzero a
    for F in (GF5, GF7):
        for a in range(F.modulus):
            assert F.add(a, F.neg(a)) == F.zero
            if a:
                assert F.mul(a, F.inv(a)) == F.one
    a = Fraction(-3, 7)
    assert QQ.add(a, QQ.neg(a)) == 0
    assert QQ.mul(a, QQ.inv(a)) == 1


def test_element_serialization_roundtrip():
    assert GF5.parse(GF5.show(3)) == 3
    assert QQ.parse(QQ.show(Fraction(-4, 6))) == Fraction(-2, 3)
    with pytest.raises(ShapeError):
        QQ.parse("2/-3")  # not d > 0
    with pytest.raises(ShapeError):
        QQ.parse("4/6")  # not lowest terms
    with pytest.raises(ShapeError):
        GF5.parse(7)


def test_mat_mul_identity():
    I2 = eye(GF5, 2)
    assert mat_mul(I2, I2) == I2


def test_mat_mul_example_gf5():
    A = mat_of_ints(GF5, [[1, 2], [2, 4]])
    B = mat_of_ints(GF5, [[3], [1]])
    assert mat_mul(A, B) == zeros(GF5, 2, 1)


def test_mat_mul_zero():
    A = mat_of_ints(GF5, [[1, 2], [3, 4]])
    assert mat_mul(A, zeros(GF5, 2, 3)) == zeros(GF5, 2, 3)


def test_mat_mul_errors():
    A = eye(GF5, 2)
    with pytest.raises(ShapeError):
        mat_mul(A, eye(GF5, 3))
    with pytest.raises(ShapeError):
        mat_mul(A, eye(GF7, 2))


def test_kernel_basis_rank_one():
    A = mat_of_ints(GF5, [[1, 2], [2, 4]])
    K = kernel_basis(A)
    assert (K.rows, K.cols) == (2, 1)
    assert K.column(0) == (3, 1)
    assert mat_mul(A, K).is_zero()


def test_kernel_basis_identity_and_zero():
    assert kernel_basis(eye(GF5, 3)).cols == 0
    assert kernel_basis(zeros(GF5, 2, 3)).cols == 3


def test_cokernel_examples():
    proj, dim = cokernel(zeros(GF5, 2, 2))
    assert dim == 2 and proj == eye(GF5, 2)
    _, dim = cokernel(eye(GF5, 2))
    assert dim == 0
    A = mat(QQ, [[Fraction(1)], [Fraction(2)]])
    proj, dim = cokernel(A)
    assert dim == 1
    assert mat_mul(proj, A).is_zero()


def test_cokernel_section():
    A = mat_of_ints(GF5, [[1, 0], [2, 0], [0, 0]])
    proj, section, dim = cokernel_with_section(A)
    assert dim == 2
    assert mat_mul(proj, section) == eye(GF5, 2)
    assert mat_mul(proj, A).is_zero()


def test_kron_dims_and_unit():
    A = zeros(GF5, 2, 3)
    B = zeros(GF5, 4, 5)
    assert (kron(A, B).rows, kron(A, B).cols) == (8, 15)
    C = mat_of_ints(GF5, [[1, 2], [3, 4]])
    assert kron(C, eye(GF5, 1)) == C


def test_kron_index_convention():
    # composite index of (i, j) is i + d1*j with i over the first factor
    e1 = basis_vec(GF5, 2, 1)
    e2 = basis_vec(GF5, 2, 1)
    v = kron(e1, e2)
    assert v.column(0) == (0, 0, 0, 1)  # index 1 + 2*1 = 3


def test_factor_swap():
    A = mat_of_ints(GF5, [[1, 2], [3, 4]])
    B = mat_of_ints(GF5, [[0, 1], [2, 3]])
    P_rows = factor_swap(GF5, A.rows, B.rows)
    P_cols = factor_swap(GF5, A.cols, B.cols)
    assert mat_mul(P_rows, kron(A, B)) == mat_mul(kron(B, A), P_cols)


def test_solve_and_inverse():
    A = mat_of_ints(GF5, [[1, 2], [3, 4]])
    b = mat_of_ints(GF5, [[1], [0]])
    x = solve(A, b)
    assert x is not None and mat_mul(A, x) == b
    Ainv = inverse(A)
    assert Ainv is not None and mat_mul(A, Ainv) == eye(GF5, 2)
    assert inverse(mat_of_ints(GF5, [[1, 2], [2, 4]])) is None
    assert solve(mat_of_ints(GF5, [[1], [2]]), mat_of_ints(GF5, [[0], [1]])) is None


small_gf5_mats = st.integers(0, 3).flatmap(
    lambda r: st.integers(0, 3).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(0, 4), min_size=c, max_size=c),
            min_size=r, max_size=r,
        ).map(lambda rows: mat_of_ints(GF5, rows))
    )
)


@settings(max_examples=60, deadline=None)
@given(small_gf5_mats)
def test_rank_nullity(A):
    assert rank(A) + kernel_basis(A).cols == A.cols
    proj, dim = cokernel(A)
    assert rank(A) + dim == A.rows
    assert mat_mul(proj, A).is_zero() if A.cols else True


@settings(max_examples=40, deadline=None)
@given(small_gf5_mats, small_gf5_mats)
def test_kron_mixed_product(A, B):
    C = mat_of_ints(GF5, [[(i + 2 * j) % 5 for j in range(2)] for i in range(A.cols)])
    D = mat_of_ints(GF5, [[(3 * i + j) % 5 for j in range(2)] for i in range(B.cols)])
    lhs = mat_mul(kron(A, B), kron(C, D))
    rhs = kron(mat_mul(A, C), mat_mul(B, D))
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(small_gf5_mats)
def test_determinism(A):
    # repeated calls on equal inputs give identical results
    assert rref(A) == rref(A)
    assert kernel_basis(A) == kernel_basis(A)
    assert cokernel(A) == cokernel(A)
