# ============================================
# FILE: utils/operators.py
# ============================================
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.sparse as sp

from analysis.modes import (
    make_mode,
    mode_boundary_residual,
    mode_operator_apply,
)
from analysis.reduction import chart_h_phiphi
from models.errors import DomainError, ShapeMismatchError

logger = logging.getLogger(__name__)


@dataclass
class DiscreteOperator:
    """Sparse per-mode system A u = rhs(f_tilde_m, tau_m).

    Rows follow the flat node ordering of ``grid.shape``. ``row_groups``
    maps 'interior', 'axis' and 'boundary' to flat row indices.
    """

    matrix: sp.csc_matrix
    m: int
    grid: object
    cfg: object
    row_groups: dict = field(default_factory=dict)

    @property
    def size(self):
        return self.matrix.shape[0]

    def rhs(self, f_tilde_m, tau_m):
        """Right-hand side from the weighted source mode and boundary data mode."""
        grid = self.grid
        f_tilde_m = np.asarray(f_tilde_m, dtype=complex)
        tau_m = np.asarray(tau_m, dtype=complex)
        if f_tilde_m.shape != grid.shape:
            raise ShapeMismatchError(f"source mode shape {f_tilde_m.shape} != {grid.shape}")
        if tau_m.shape != grid.boundary_shape:
            raise ShapeMismatchError(f"boundary mode shape {tau_m.shape} != {grid.boundary_shape}")

        b = np.array(f_tilde_m, copy=True)
        if grid.n == 2:
            b[0] = 0.25 * (3.0 * f_tilde_m[0] + f_tilde_m[1]) if self.m == 0 else 0.0
            b[-1] = tau_m
            return b.ravel()

        b[:, 0] = 0.0
        b[:, -1] = 0.0
        b[0, :] = 0.0
        if self.m == 0:
            h_t = grid.h_theta
            cap = (1.0 - np.cos(0.5 * h_t)) / (0.5 * h_t)
            b[1:-1, 0] = cap * f_tilde_m[1:-1, 1] / np.sin(h_t)
            b[1:-1, -1] = cap * f_tilde_m[1:-1, -2] / np.sin(h_t)
            w_theta = grid.trapezoid_weights(grid.theta, h_t)
            b[0, 0] = np.sum(w_theta * f_tilde_m[1, :]) / (12.0 * grid.h_r)
        b[-1, :] = tau_m
        return b.ravel()

    def apply(self, values):
        values = np.asarray(values, dtype=complex)
        return (self.matrix @ values.ravel()).reshape(self.grid.shape)

    def max_row_nnz(self, group='interior'):
        rows = self.row_groups.get(group)
        if rows is None or len(rows) == 0:
            return 0
        counts = np.diff(self.matrix.tocsr().indptr)
        return int(counts[rows].max())

    def to_triplets(self):
        """(row, col, re, im) table of the nonzero entries."""
        coo = self.matrix.tocoo()
        return pd.DataFrame({
            'row': coo.row,
            'col': coo.col,
            're': coo.data.real,
            'im': coo.data.imag,
        })

    def dump(self, path):
        self.to_triplets().to_csv(path, sep=' ', index=False, float_format='%.17g')
        logger.info(f"✅ Wrote {self.matrix.nnz} triplets for m={self.m} to {path}")


def matrix_free_apply(values, m, grid, cfg):
    """Interior/axis rows from mode_operator_apply, boundary rows from the
    homogeneous Sommerfeld residual: the oracle the assembled matrix matches."""
    mode = make_mode(m, values)
    out = mode_operator_apply(mode, grid, cfg)
    out[-1] = mode_boundary_residual(mode, np.zeros(grid.boundary_shape), grid, cfg)
    return out


class _Triplets:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, row, col, value):
        self.rows.append(row)
        self.cols.append(col)
        self.vals.append(value)

    def to_csc(self, size):
        return sp.coo_matrix(
            (np.asarray(self.vals, dtype=complex), (self.rows, self.cols)),
            shape=(size, size),
        ).tocsc()


def _sommerfeld_row(trip, row, col_of, m, grid, cfg):
    h = grid.h_r
    trip.add(row, col_of(grid.J), 1.5 / h + cfg.sign * 1j * m * cfg.omega)
    trip.add(row, col_of(grid.J - 1), -2.0 / h)
    trip.add(row, col_of(grid.J - 2), 0.5 / h)


def _assemble_disk(m, grid, cfg):
    J, h = grid.J, grid.h_r
    trip = _Triplets()

    if m == 0:
        trip.add(0, 0, -1.0 / h)
        trip.add(0, 1, 1.0 / h)
    else:
        trip.add(0, 0, 1.0 / h)

    r_half = 0.5 * (grid.r[1:] + grid.r[:-1])
    h_phiphi = chart_h_phiphi(grid.r[1:-1], None, cfg)
    for j in range(1, J):
        west = r_half[j - 1] / h ** 2
        east = r_half[j] / h ** 2
        trip.add(j, j - 1, west)
        trip.add(j, j + 1, east)
        trip.add(j, j, -(west + east) - m ** 2 * h_phiphi[j - 1])

    _sommerfeld_row(trip, J, lambda j: j, m, grid, cfg)

    groups = {
        'axis': np.array([0]),
        'interior': np.arange(1, J),
        'boundary': np.array([J]),
    }
    return trip.to_csc(grid.size), groups


def _assemble_ball(m, grid, cfg):
    J, K = grid.J, grid.K
    h_r, h_t = grid.h_r, grid.h_theta
    idx = grid.flat_index
    trip = _Triplets()

    r_half = 0.5 * (grid.r[1:] + grid.r[:-1])
    s_half = np.sin(0.5 * (grid.theta[1:] + grid.theta[:-1]))
    sin_t = np.sin(grid.theta)
    cap = (1.0 - np.cos(0.5 * h_t)) / (0.5 * h_t)
    polar_axis = np.sin(0.5 * h_t) / (h_t * 0.5 * h_t)

    interior, axis, boundary = [], [], []

    # origin
    if m == 0:
        w_theta = grid.trapezoid_weights(grid.theta, h_t) * sin_t / (2.0 * h_r)
        row = idx(0, 0)
        for k in range(K + 1):
            trip.add(row, idx(1, k), w_theta[k])
        trip.add(row, row, -np.sum(w_theta))
        axis.append(row)
        for k in range(1, K + 1):
            row = idx(0, k)
            trip.add(row, row, 1.0 / h_r)
            trip.add(row, idx(0, 0), -1.0 / h_r)
            axis.append(row)
    else:
        for k in range(K + 1):
            trip.add(idx(0, k), idx(0, k), 1.0 / h_r)
            axis.append(idx(0, k))

    for j in range(1, J):
        r_in, r_out = r_half[j - 1] ** 2, r_half[j] ** 2

        # axis columns theta = 0 and theta = pi
        for k, nb in ((0, 1), (K, K - 1)):
            row = idx(j, k)
            axis.append(row)
            if m != 0:
                trip.add(row, row, 1.0 / h_r)
                continue
            trip.add(row, idx(j - 1, k), cap * r_in / h_r ** 2)
            trip.add(row, idx(j + 1, k), cap * r_out / h_r ** 2)
            trip.add(row, idx(j, nb), polar_axis)
            trip.add(row, row, -cap * (r_in + r_out) / h_r ** 2 - polar_axis)

        h_phiphi = chart_h_phiphi(grid.r[j], grid.theta[1:-1], cfg)
        for k in range(1, K):
            row = idx(j, k)
            interior.append(row)
            west = r_in * sin_t[k] / h_r ** 2
            east = r_out * sin_t[k] / h_r ** 2
            south = s_half[k - 1] / h_t ** 2
            north = s_half[k] / h_t ** 2
            trip.add(row, idx(j - 1, k), west)
            trip.add(row, idx(j + 1, k), east)
            trip.add(row, idx(j, k - 1), south)
            trip.add(row, idx(j, k + 1), north)
            trip.add(row, row, -(west + east + south + north) - m ** 2 * h_phiphi[k - 1])

    for k in range(K + 1):
        row = idx(J, k)
        boundary.append(row)
        _sommerfeld_row(trip, row, lambda j, k=k: idx(j, k), m, grid, cfg)

    groups = {
        'axis': np.array(axis),
        'interior': np.array(interior),
        'boundary': np.array(boundary),
    }
    return trip.to_csc(grid.size), groups


def assemble_mode_system(m, grid, cfg):
    """Sparse system for mode m: flux-form interior rows, regularity rows on
    the axis, Sommerfeld rows on r = R."""
    if cfg.n != grid.n:
        raise DomainError(f"config n={cfg.n} does not match grid n={grid.n}")
    logger.debug(f"📊 Assembling mode m={m} on {grid.size} nodes...")
    if grid.n == 2:
        matrix, groups = _assemble_disk(int(m), grid, cfg)
    else:
        matrix, groups = _assemble_ball(int(m), grid, cfg)
    return DiscreteOperator(matrix=matrix, m=int(m), grid=grid, cfg=cfg, row_groups=groups)


def boundary_shift_column(operator):
    """Indicator of the boundary rows: the direction a constant shift of tau moves the rhs."""
    column = np.zeros(operator.size)
    column[operator.row_groups['boundary']] = 1.0
    return column
