# ============================================
# FILE: solver/nullspace.py
# ============================================
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, norm as sparse_norm

import config
from models.errors import ShapeMismatchError
from models.reports import NullSpaceReport
from utils.operators import boundary_shift_column

logger = logging.getLogger(__name__)


def sigma_border(grid):
    """Normalized sigma weights: the border row that fixes the sigma-mean."""
    weights = grid.sigma_weights.ravel()
    return weights / np.sum(weights)


def node_border(grid, node=0):
    row = np.zeros(grid.size)
    row[node] = 1.0
    return row


def bordered_system(operator, border_row, balance=False):
    """[[A, c], [w, 0]] for the m = 0 operator A.

    c is the tau-shift column and w the gauge row. With ``balance`` both are
    rescaled to the mean row norm of A; the last unknown is then no longer
    the tau shift itself.
    """
    column = np.asarray(boundary_shift_column(operator), dtype=float)
    row = np.asarray(border_row, dtype=float)
    if row.shape != (operator.size,):
        raise ShapeMismatchError(f"border row has shape {row.shape}, operator has {operator.size} unknowns")
    if balance:
        scale = float(np.mean(sparse_norm(operator.matrix, axis=1)))
        column = column * scale / np.linalg.norm(column)
        row = row * scale / np.linalg.norm(row)
    return sp.bmat(
        [[operator.matrix, sp.csc_matrix(column[:, None])], [sp.csr_matrix(row[None, :]), None]],
        format='csc',
    ).astype(complex)


def constant_cosine(vector):
    vector = np.asarray(vector)
    norm = np.linalg.norm(vector)
    if norm == 0:
        return 0.0
    return float(abs(np.sum(vector)) / (norm * np.sqrt(vector.size)))


def _dense_spectrum(matrix, k):
    dense = matrix.toarray()
    _, s, vh = scipy.linalg.svd(dense)
    smallest = s[::-1][:k]
    vectors = np.conj(vh[::-1][:k])
    return smallest, vectors, float(s[0])


def _sparse_spectrum(matrix, k):
    """Smallest singular values from shift-inverted eigsh on A^H A."""
    normal = (matrix.conj().T @ matrix).tocsc()
    largest = float(np.sqrt(eigsh(normal, k=1, which='LM', return_eigenvectors=False)[0]))
    shift = -1e-10 * largest ** 2
    values, vectors = eigsh(normal, k=k, sigma=shift, which='LM')
    order = np.argsort(values)
    smallest = np.sqrt(np.clip(values[order], 0.0, None))
    return smallest, vectors[:, order].T, largest


def null_space_probe(operator, m=None, k=None, method='auto', matrix=None):
    """k smallest singular values of the homogeneous system and their vectors.

    ``matrix`` replaces the operator's own matrix, e.g. a bordered m = 0 system.

    Dense SVD below ``DENSE_SVD_MAX`` unknowns, shift-inverted Lanczos on
    A^H A above. A value counts as near-null when it is below
    ``NULLSPACE_RATIO`` times the largest singular value.
    """
    m = operator.m if m is None else int(m)
    k = config.NULLSPACE_K if k is None else int(k)
    bordered = matrix is not None
    matrix = operator.matrix if matrix is None else matrix
    size = matrix.shape[0]
    if method == 'auto':
        method = 'dense' if size <= config.DENSE_SVD_MAX else 'sparse'

    logger.info(f"📊 Null-space probe for m={m} ({method}, {size} unknowns)...")
    converged = True
    try:
        if method == 'dense':
            smallest, vectors, largest = _dense_spectrum(sp.csc_matrix(matrix), k)
        else:
            smallest, vectors, largest = _sparse_spectrum(sp.csc_matrix(matrix), k)
    except ArpackNoConvergence as e:
        logger.error(f"❌ Null-space probe for m={m} did not converge")
        converged = False
        best = np.sqrt(np.clip(np.sort(np.asarray(e.eigenvalues).real), 0.0, None))
        smallest = best if len(best) else np.full(k, np.nan)
        vectors = np.asarray(e.eigenvectors).T if e.eigenvectors is not None and len(best) else None
        largest = float('nan')

    ratios = smallest / largest if largest and np.isfinite(largest) else np.full(len(smallest), np.nan)
    near_null = int(np.sum(ratios < config.NULLSPACE_RATIO))
    cosine = constant_cosine(vectors[0]) if vectors is not None and len(vectors) else None

    report = NullSpaceReport(
        m=m,
        method=method,
        singular_values=[float(s) for s in smallest],
        largest_singular_value=largest,
        ratios=[float(r) for r in ratios],
        near_null_count=near_null,
        threshold_ratio=config.NULLSPACE_RATIO,
        constant_cosine=cosine,
        converged=converged,
        bordered=bordered,
    )
    logger.info(f"✅ m={m}: sigma_min/sigma_max={ratios[0]:.3e}, near-null count {near_null}")
    return report
