"""Tests for rank-revealing linear algebra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import array_shapes, arrays

from mimodof.exceptions import NumericsError
from mimodof.models import Tolerance
from mimodof.numerics import (
    condition_number,
    left_null_basis,
    numerical_rank,
    orthonormalize_columns,
    right_null_basis,
    spectral_norm,
)


@st.composite
def integer_complex_matrices(draw: st.DrawFn) -> np.ndarray:
    """Small Gaussian-integer matrices; exact rank deficiencies are common."""
    shape = draw(array_shapes(min_dims=2, max_dims=2, min_side=0, max_side=6))
    entries = st.integers(min_value=-3, max_value=3)
    re = draw(arrays(np.int64, shape, elements=entries))
    im = draw(arrays(np.int64, shape, elements=entries))
    return re + 1j * im


def random_matrix(rng: np.random.Generator) -> np.ndarray:
    """Gaussian product B @ C of random inner dimension, so ranks vary."""
    m, n = rng.integers(1, 13, size=2)
    r = rng.integers(0, 13)
    b = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
    c = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
    return b @ c


def assert_orthonormal_columns(basis: np.ndarray) -> None:
    gram = basis.conj().T @ basis
    assert np.allclose(gram, np.eye(basis.shape[1]), atol=1e-12)


def assert_small_residual(product: np.ndarray, a: np.ndarray) -> None:
    assert spectral_norm(product) <= 1e-10 * spectral_norm(a) + 1e-12


class TestNumericalRank:
    def test_identity(self) -> None:
        assert numerical_rank(np.eye(4)) == 4

    def test_zero_and_empty(self) -> None:
        assert numerical_rank(np.zeros((3, 2))) == 0
        assert numerical_rank(np.zeros((0, 5))) == 0

    def test_outer_product(self) -> None:
        x = np.array([[1.0], [2.0j], [3.0]])
        assert numerical_rank(x @ x.conj().T) == 1

    def test_cutoff_is_relative(self) -> None:
        a = np.diag([1.0, 1e-12])
        assert numerical_rank(a) == 1
        assert numerical_rank(a, Tolerance(rank_rel_tol=1e-13, zero_rel_tol=1e-8)) == 2

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(NumericsError):
            numerical_rank(np.array([[1.0, np.nan]]))
        with pytest.raises(NumericsError):
            numerical_rank(np.array([[np.inf]]))

    def test_vector_rejected(self) -> None:
        with pytest.raises(NumericsError, match="2-D"):
            numerical_rank(np.ones(3))


class TestNullBases:
    def test_right_null_of_wide_matrix(self) -> None:
        a = np.array([[1.0, 1.0, 0.0]])
        basis = right_null_basis(a)
        assert basis.shape == (3, 2)
        assert_small_residual(a @ basis, a)
        assert_orthonormal_columns(basis)

    def test_left_null_of_tall_matrix(self) -> None:
        a = np.array([[1.0], [1.0j], [0.0]])
        basis = left_null_basis(a)
        assert basis.shape == (2, 3)
        assert_small_residual(basis @ a, a)

    def test_full_rank_square_has_trivial_null_space(self) -> None:
        assert right_null_basis(np.eye(3)).shape == (3, 0)
        assert left_null_basis(np.eye(3)).shape == (0, 3)

    def test_empty_shapes(self) -> None:
        assert right_null_basis(np.zeros((0, 3))).shape == (3, 3)
        assert right_null_basis(np.zeros((2, 0))).shape == (0, 0)
        assert left_null_basis(np.zeros((3, 0))).shape == (3, 3)
        assert left_null_basis(np.zeros((0, 2))).shape == (0, 0)

    def test_left_is_conjugate_transpose_of_right(self) -> None:
        rng = np.random.default_rng(3)
        a = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        left = left_null_basis(a)
        right = right_null_basis(a.conj().T)
        assert np.allclose(left, right.conj().T)

    @given(integer_complex_matrices())
    @settings(max_examples=200, deadline=None)
    def test_rank_nullity_on_integer_matrices(self, a: np.ndarray) -> None:
        m, n = a.shape
        r = numerical_rank(a)
        right = right_null_basis(a)
        left = left_null_basis(a)

        assert right.shape == (n, n - r)
        assert left.shape == (m - r, m)
        assert numerical_rank(a.conj().T) == r
        assert_orthonormal_columns(right)
        assert_orthonormal_columns(left.conj().T)
        assert_small_residual(a @ right, a)
        assert_small_residual(left @ a, a)

    def test_invariants_on_seeded_random_matrices(self) -> None:
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            a = random_matrix(rng)
            m, n = a.shape
            r = numerical_rank(a)
            assert r <= min(m, n)

            right = right_null_basis(a)
            left = left_null_basis(a)
            assert right.shape == (n, n - r)
            assert left.shape == (m - r, m)
            assert_orthonormal_columns(right)
            assert_small_residual(a @ right, a)
            assert_small_residual(left @ a, a)

    def test_generic_product_has_inner_rank(self) -> None:
        rng = np.random.default_rng(11)
        b = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
        c = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
        assert numerical_rank(b @ c) == 2
        assert right_null_basis(b @ c).shape == (5, 3)


class TestConditionNumber:
    def test_unitary_is_one(self) -> None:
        q = orthonormalize_columns(np.array([[1.0, 2.0], [3.0, 4.0j]]))
        assert condition_number(q) == pytest.approx(1.0)

    def test_diagonal(self) -> None:
        assert condition_number(np.diag([4.0, 2.0])) == pytest.approx(2.0)

    def test_singular_is_infinite(self) -> None:
        assert condition_number(np.array([[1.0, 2.0], [2.0, 4.0]])) == math.inf
        assert condition_number(np.zeros((2, 2))) == math.inf

    def test_empty_is_one(self) -> None:
        assert condition_number(np.zeros((0, 0))) == 1.0

    def test_non_square_rejected(self) -> None:
        with pytest.raises(NumericsError, match="square"):
            condition_number(np.ones((2, 3)))


def test_orthonormalize_keeps_span() -> None:
    rng = np.random.default_rng(5)
    a = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    q = orthonormalize_columns(a)
    assert q.shape == (5, 3)
    assert_orthonormal_columns(q)
    # a lies in span(q)
    assert np.allclose(q @ (q.conj().T @ a), a)


def test_spectral_norm() -> None:
    assert spectral_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)
    assert spectral_norm(np.zeros((0, 3))) == 0.0
