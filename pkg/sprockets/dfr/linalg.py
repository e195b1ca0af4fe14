"""
Dense matrix helpers shared by the representations and the readout.

Matrices and vectors are plain :class:`numpy.ndarray` instances of
``float64``.  The helpers in this module validate shapes and values
and implement the closed-form ridge solve used by OMS, RMS and the
output layer.

"""
import numpy as np
from scipy import linalg

from sprockets.dfr import errors


def as_matrix(values, name='matrix'):
    """
    Convert `values` to a validated two-dimensional ``float64`` array.

    :param values: anything :func:`numpy.asarray` accepts
    :param str name: name used in error messages
    :rtype: numpy.ndarray
    :raises sprockets.dfr.errors.DimensionError: if `values` is not a
        non-empty two-dimensional array
    :raises sprockets.dfr.errors.NonFiniteError: if any entry is NaN
        or infinite

    """
    matrix = np.asarray(values, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise errors.DimensionError(
            '{} must be a non-empty 2-D array, got shape {}'.format(
                name, matrix.shape))
    if not np.all(np.isfinite(matrix)):
        raise errors.NonFiniteError('{} contains non-finite entries'.format(
            name))
    return matrix


def as_vector(values, name='vector'):
    """
    Convert `values` to a validated one-dimensional ``float64`` array.

    :rtype: numpy.ndarray
    :raises sprockets.dfr.errors.DimensionError: if `values` is not a
        non-empty one-dimensional array
    :raises sprockets.dfr.errors.NonFiniteError: if any entry is NaN
        or infinite

    """
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] < 1:
        raise errors.DimensionError(
            '{} must be a non-empty 1-D array, got shape {}'.format(
                name, vector.shape))
    if not np.all(np.isfinite(vector)):
        raise errors.NonFiniteError('{} contains non-finite entries'.format(
            name))
    return vector


def matmul(a, b):
    """
    Multiply two matrices.

    :param numpy.ndarray a: left operand of shape ``(n, k)``
    :param numpy.ndarray b: right operand of shape ``(k, m)``
    :returns: the ``(n, m)`` product
    :rtype: numpy.ndarray
    :raises sprockets.dfr.errors.DimensionError: when the inner
        dimensions differ

    """
    a = as_matrix(a, 'left operand')
    b = as_matrix(b, 'right operand')
    if a.shape[1] != b.shape[0]:
        raise errors.DimensionError(
            'cannot multiply {}x{} by {}x{}'.format(
                a.shape[0], a.shape[1], b.shape[0], b.shape[1]))
    return np.dot(a, b)


def ridge_solve(a, b, reg):
    """
    Compute ``A Bᵀ (B Bᵀ + reg E)⁻¹`` without forming the inverse.

    :param numpy.ndarray a: targets, one column per sample
    :param numpy.ndarray b: regressors, one column per sample
    :param float reg: non-negative ridge strength
    :returns: matrix of shape ``(a.rows, b.rows)``
    :rtype: numpy.ndarray
    :raises sprockets.dfr.errors.DimensionError: when `a` and `b`
        have a different number of sample columns
    :raises sprockets.dfr.errors.ConfigurationError: when `reg` is
        negative or NaN
    :raises sprockets.dfr.errors.SingularMatrixError: when the
        regularized Gram matrix is not positive definite

    The system ``W (B Bᵀ + reg E) = A Bᵀ`` is symmetric positive
    definite, so it is solved with a Cholesky factorization of the
    Gram matrix.

    """
    a = as_matrix(a, 'targets')
    b = as_matrix(b, 'regressors')
    if a.shape[1] != b.shape[1]:
        raise errors.DimensionError(
            'targets have {} sample columns but regressors have {}'.format(
                a.shape[1], b.shape[1]))
    reg = float(reg)
    if not reg >= 0.0:
        raise errors.ConfigurationError(
            'ridge strength must be non-negative, got {!r}'.format(reg))

    n = b.shape[0]
    if reg == 0.0 and np.linalg.matrix_rank(b) < n:
        raise errors.SingularMatrixError(
            'singular Gram matrix: {}x{} regressors are rank deficient and '
            'no regularization was requested'.format(*b.shape))

    gram = np.dot(b, b.T)
    gram.flat[::n + 1] += reg
    rhs = np.dot(a, b.T)
    try:
        factor = linalg.cho_factor(gram, lower=True, check_finite=False)
    except linalg.LinAlgError as error:
        raise errors.SingularMatrixError(
            'singular Gram matrix of order {}: {}'.format(n, error))
    solution = linalg.cho_solve(factor, rhs.T, check_finite=False).T
    if not np.all(np.isfinite(solution)):
        raise errors.SingularMatrixError(
            'singular Gram matrix of order {}: solution is not finite'.format(
                n))
    return solution


def flatten(m):
    """
    Rearrange a matrix into a single vector, row by row.

    This is the ``vec`` operator used for OMS, RMS and DPRR; the
    ordering is the same everywhere.

    :rtype: numpy.ndarray

    """
    return np.array(m, dtype=np.float64).reshape(-1)


def unflatten(v, rows, cols):
    """Inverse of :func:`flatten`."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != rows * cols:
        raise errors.DimensionError(
            'cannot reshape {} values into {}x{}'.format(
                v.size, rows, cols))
    return v.reshape(rows, cols).copy()
