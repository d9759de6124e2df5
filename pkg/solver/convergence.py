# ============================================
# FILE: solver/convergence.py
# ============================================
import logging

import numpy as np
import pandas as pd

import config
from models.problem import HelicalProblem
from models.reports import ConvergenceReport, ConvergenceRow
from solver.solver import solve_full
from utils.grid import build_grid, parse_resolution
from utils.quadrature import sigma_mean, volume_quadrature

logger = logging.getLogger(__name__)


def refinement_resolutions(base, n, refine):
    """``refine`` resolutions starting at ``base``, doubling every dimension."""
    parts = parse_resolution(base, n)
    return [tuple(p * 2 ** level for p in parts) for level in range(refine)]


def relative_l2_error(u, exact, grid):
    """sigma-weighted relative L2 error after aligning the sigma-means."""
    u_aligned = u - sigma_mean(u, grid)
    exact_aligned = exact - sigma_mean(exact, grid)
    sigma = grid.volume_density[..., None]
    error = volume_quadrature(sigma * (u_aligned - exact_aligned) ** 2, grid)
    scale = volume_quadrature(sigma * exact_aligned ** 2, grid)
    if scale <= 0:
        return float(np.sqrt(error))
    return float(np.sqrt(error / scale))


def observed_orders(h, errors):
    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)
    orders = [None]
    for i in range(1, len(h)):
        if errors[i] <= 0 or errors[i - 1] <= 0:
            orders.append(None)
            continue
        orders.append(float(np.log(errors[i - 1] / errors[i]) / np.log(h[i - 1] / h[i])))
    return orders


def convergence_study(cfg, exact, resolutions, M=None, n_phi=None, path='direct', min_order=None):
    """Solve the manufactured problem at each resolution and tabulate (h, error, order)."""
    M = exact.max_mode if M is None else M
    n_phi = n_phi or max(config.DEFAULT_N_PHI, 2 * M + 2)
    min_order = config.MIN_ORDER if min_order is None else min_order
    report = ConvergenceReport(name=exact.name, n=cfg.n, omega=cfg.omega, R=cfg.R, min_order=min_order)

    spacings, errors = [], []
    for resolution in resolutions:
        grid = build_grid(cfg, resolution, n_phi=n_phi)
        problem = HelicalProblem(
            cfg=cfg,
            f=exact.source(grid),
            tau=exact.boundary_data(grid),
            resolution=resolution,
            M=M,
            n_phi=n_phi,
            name=exact.name,
        )
        result = solve_full(problem, path=path, nullspace_modes=())
        error = relative_l2_error(result.field, exact.values(grid), grid)
        spacings.append(grid.spacing)
        errors.append(error)
        logger.info(f"📊 {grid.describe()}: L2 error {error:.3e}")

    for h, resolution, error, order in zip(spacings, resolutions, errors, observed_orders(spacings, errors)):
        report.rows.append(ConvergenceRow(
            h=h,
            resolution=list(parse_resolution(resolution, cfg.n)),
            l2_error=error,
            order=order,
        ))

    report.final_order = report.rows[-1].order if len(report.rows) > 1 else None
    report.passed = report.final_order is not None and report.final_order >= min_order
    status = "✅" if report.passed else "❌"
    logger.info(f"{status} {exact.name}: final observed order {report.final_order}")
    return report


def convergence_table(report):
    return pd.DataFrame([
        {
            'h': row.h,
            'l2_error': row.l2_error,
            'order': np.nan if row.order is None else row.order,
        }
        for row in report.rows
    ])
