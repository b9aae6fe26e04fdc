"""Rank-revealing dense complex linear algebra built on the SVD."""

import logging
import math

import numpy as np
import numpy.typing as npt
import scipy.linalg

from mimodof.exceptions import NumericsError
from mimodof.models import DEFAULT_TOLERANCE, Tolerance

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]


def as_matrix(a: npt.ArrayLike) -> ComplexMatrix:
    """Coerce to a finite 2-D complex128 array."""
    matrix = np.asarray(a, dtype=np.complex128)
    if matrix.ndim != 2:
        raise NumericsError(f"Expected a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NumericsError("Matrix has non-finite entries")
    return matrix


def _singular_values(matrix: ComplexMatrix) -> npt.NDArray[np.float64]:
    if matrix.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(matrix, check_finite=False)


def _rank_from_singular_values(s: npt.NDArray[np.float64], tol: Tolerance) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))


def numerical_rank(a: npt.ArrayLike, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Number of singular values above rank_rel_tol times the largest one."""
    return _rank_from_singular_values(_singular_values(as_matrix(a)), tol)


def spectral_norm(a: npt.ArrayLike) -> float:
    s = _singular_values(as_matrix(a))
    return float(s[0]) if s.size else 0.0


def right_null_basis(a: npt.ArrayLike, tol: Tolerance = DEFAULT_TOLERANCE) -> ComplexMatrix:
    """
    Orthonormal basis of the right null space.

    Args:
        a: m x n matrix
        tol: rank cutoff

    Returns:
        n x (n - r) matrix whose columns x satisfy ||a x|| <= zero_rel_tol * ||a||
    """
    matrix = as_matrix(a)
    m, n = matrix.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if m == 0:
        return np.eye(n, dtype=np.complex128)

    _, s, vh = scipy.linalg.svd(matrix, full_matrices=True, check_finite=False)
    rank = _rank_from_singular_values(s, tol)
    basis = vh[rank:].conj().T
    logger.debug("right null basis of %dx%d matrix: rank %d, width %d", m, n, rank, n - rank)
    return np.ascontiguousarray(basis)


def left_null_basis(a: npt.ArrayLike, tol: Tolerance = DEFAULT_TOLERANCE) -> ComplexMatrix:
    """
    Orthonormal basis of the left null space.

    Returns:
        (m - r) x m matrix whose rows y satisfy ||y a|| <= zero_rel_tol * ||a||
    """
    matrix = as_matrix(a)
    return np.ascontiguousarray(right_null_basis(matrix.conj().T, tol).conj().T)


def condition_number(a: npt.ArrayLike, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """sigma_max / sigma_min, or math.inf when the matrix is numerically singular."""
    matrix = as_matrix(a)
    rows, cols = matrix.shape
    if rows != cols:
        raise NumericsError(f"Condition number needs a square matrix, got {rows}x{cols}")
    if rows == 0:
        return 1.0

    s = _singular_values(matrix)
    if _rank_from_singular_values(s, tol) < rows:
        return math.inf
    return float(s[0] / s[-1])


def orthonormalize_columns(a: npt.ArrayLike) -> ComplexMatrix:
    """Orthonormal basis of the column span (economic QR) of a full-column-rank matrix."""
    matrix = as_matrix(a)
    if matrix.shape[1] == 0:
        return matrix
    q, _ = scipy.linalg.qr(matrix, mode="economic", check_finite=False)
    return q
