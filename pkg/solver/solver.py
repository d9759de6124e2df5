# ============================================
# FILE: solver/solver.py
# ============================================
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres, norm as sparse_norm, spilu, splu

import config
from analysis.modes import analyze_phi, imaginary_residue, mode_numbers, mode_slot, synthesize_phi
from models.errors import ConvergenceError, HelicalError, IncompatibleDataError, SingularSystemError
from models.problem import ModeField
from models.reports import ModeReport, SolveReport
from solver.nullspace import bordered_system, node_border, null_space_probe, sigma_border
from utils.fields import boundary_sigma
from utils.operators import assemble_mode_system, boundary_shift_column
from utils.quadrature import boundary_quadrature, volume_quadrature

logger = logging.getLogger(__name__)

PATHS = ('direct', 'iterative')


# ---------------------------------------------------------------------------
# Compatibility
# ---------------------------------------------------------------------------

def compatibility_residual(problem):
    """int_B f_tilde - int_dB sigma tau."""
    grid = problem.grid
    sigma_tau = boundary_sigma(grid) * problem.tau
    return float(volume_quadrature(problem.f_tilde, grid) - boundary_quadrature(sigma_tau, grid))


def compatibility_threshold(problem):
    """COMPAT_FACTOR * h^2 * (int |f_tilde| + int |sigma tau|)."""
    grid = problem.grid
    scale = volume_quadrature(np.abs(problem.f_tilde), grid)
    scale += boundary_quadrature(np.abs(boundary_sigma(grid) * problem.tau), grid)
    return float(config.COMPAT_FACTOR * grid.spacing ** 2 * scale)


def check_compatibility(problem, report=None):
    residual = compatibility_residual(problem)
    threshold = compatibility_threshold(problem)
    compatible = abs(residual) <= threshold
    if report is not None:
        report.compatibility_residual = residual
        report.compatibility_threshold = threshold
        report.compatible = compatible
    return residual, threshold, compatible


# ---------------------------------------------------------------------------
# Per-mode solves
# ---------------------------------------------------------------------------

@dataclass
class ModeData:
    """Fourier modes of f_tilde and tau, last axis ordered m = -M .. M."""

    f_tilde: np.ndarray
    tau: np.ndarray
    M: int

    def source(self, m):
        return self.f_tilde[..., mode_slot(m, self.M)]

    def boundary(self, m):
        return self.tau[..., mode_slot(m, self.M)]


def mode_data(problem):
    return ModeData(
        f_tilde=analyze_phi(problem.f_tilde, problem.M),
        tau=analyze_phi(problem.tau, problem.M),
        M=problem.M,
    )


def _relative_residual(matrix, x, b):
    residual = np.linalg.norm(matrix @ x - b)
    scale = np.linalg.norm(b)
    return float(residual / scale) if scale > 0 else float(residual)


def _condition_estimate(matrix, lu):
    if matrix.shape[0] <= config.CONDITION_DENSE_MAX:
        return float(np.linalg.cond(matrix.toarray()))
    rng = np.random.default_rng(config.DEFAULT_SEED)
    probes = rng.standard_normal((3, matrix.shape[0]))
    inverse = max(np.linalg.norm(lu.solve(p.astype(complex)), 1) / np.linalg.norm(p, 1) for p in probes)
    return float(sparse_norm(matrix, 1) * inverse)


def _solve_direct(matrix, b):
    try:
        lu = splu(matrix.tocsc())
    except RuntimeError as e:
        raise SingularSystemError(f"factorization failed: {e}", condition_estimate=float('inf')) from e
    x = lu.solve(b)
    return x, _condition_estimate(matrix, lu), None


def _solve_iterative(matrix, b):
    """ILU-preconditioned GMRES with a minimum-degree ordering."""
    matrix = matrix.tocsc()
    try:
        ilu = spilu(
            matrix,
            drop_tol=config.ILU_DROP_TOL,
            fill_factor=config.ILU_FILL_FACTOR,
            permc_spec='MMD_AT_PLUS_A',
        )
    except RuntimeError as e:
        raise SingularSystemError(f"incomplete factorization failed: {e}") from e
    preconditioner = LinearOperator(matrix.shape, ilu.solve, dtype=complex)

    iterations = []
    x, info = gmres(
        matrix, b,
        rtol=config.ITERATIVE_RTOL,
        atol=0.0,
        restart=config.GMRES_RESTART,
        maxiter=config.GMRES_MAXITER,
        M=preconditioner,
        callback=iterations.append,
        callback_type='pr_norm',
    )
    if info != 0:
        residual = _relative_residual(matrix, x, b)
        if residual > config.SOLVER_RTOL:
            raise ConvergenceError(
                f"GMRES stopped (info={info}) at relative residual {residual:.3e}", best=x
            )
        logger.warning(f"⚠️ GMRES info={info}, accepted at relative residual {residual:.3e}")
    return x, None, len(iterations)


def sigma_mode_mean(values, grid):
    weights = grid.sigma_weights
    return np.sum(weights * values) / np.sum(weights)


def solve_mode(m, problem, grid=None, path='direct', allow_incompatible=False, data=None, operator=None):
    """Solve the system of mode m; returns (ModeField, ModeReport).

    m = 0 is solved as a bordered system: a tau-shift column absorbs the
    discrete compatibility defect and the border row fixes the constant,
    either through the sigma-weighted mean (direct) or a single-node border that
    is re-gauged afterwards (iterative).
    """
    if path not in PATHS:
        raise ValueError(f"unknown solve path '{path}', expected one of {PATHS}")
    m = int(m)
    grid = problem.grid if grid is None else grid
    data = mode_data(problem) if data is None else data
    operator = assemble_mode_system(m, grid, problem.cfg) if operator is None else operator
    report = ModeReport(m=m, path=path)

    try:
        if m == 0:
            residual, threshold, compatible = check_compatibility(problem)
            if not compatible and not allow_incompatible:
                raise IncompatibleDataError(
                    f"compatibility residual {residual:.3e} exceeds threshold {threshold:.3e}",
                    residual=residual,
                    threshold=threshold,
                )

        b = operator.rhs(data.source(m), data.boundary(m))
        if m == 0:
            border = sigma_border(grid) if path == 'direct' else node_border(grid)
            matrix = bordered_system(operator, border)
            b = np.append(b, 0.0)
        else:
            matrix = operator.matrix

        solve = _solve_direct if path == 'direct' else _solve_iterative
        x, condition, iterations = solve(matrix, b)
        report.residual_norm = _relative_residual(matrix, x, b)
        report.condition_estimate = condition
        report.iterations = iterations

        if report.residual_norm > config.SOLVER_RTOL:
            raise SingularSystemError(
                f"mode {m} residual {report.residual_norm:.3e} above rtol {config.SOLVER_RTOL:.1e}",
                condition_estimate=condition,
            )

        values = x[:grid.size].reshape(grid.shape)
        if m == 0:
            report.tau_shift = float(x[-1].real)
            gauge = sigma_mode_mean(values, grid)
            values = values - gauge
            report.gauge_constant = float(gauge.real)

        report.ok = True
        logger.debug(f"✅ Mode m={m} ({path}): residual {report.residual_norm:.2e}")
        return ModeField(m=m, values=values), report

    except HelicalError as e:
        report.error = str(e)
        e.mode_report = report
        logger.error(f"❌ Mode m={m} failed: {e}")
        raise


# ---------------------------------------------------------------------------
# Full solves
# ---------------------------------------------------------------------------

@dataclass
class SolveResult:
    field: np.ndarray
    modes: np.ndarray
    report: SolveReport
    grid: object

    def mode(self, m):
        M = (self.modes.shape[-1] - 1) // 2
        return self.modes[..., mode_slot(m, M)]


def _null_space_reports(problem, grid, modes):
    """Spectra of the homogeneous systems of ``modes``; empty above NULLSPACE_SOLVE_MAX unknowns."""
    modes = [int(m) for m in modes if abs(int(m)) <= problem.M]
    if not modes:
        return []
    if grid.size > config.NULLSPACE_SOLVE_MAX:
        logger.info(f"📊 Null-space spectra skipped: {grid.size} unknowns per mode > {config.NULLSPACE_SOLVE_MAX}")
        return []
    reports = []
    for m in modes:
        operator = assemble_mode_system(m, grid, problem.cfg)
        reports.append(null_space_probe(operator))
        if m == 0:
            gauged = bordered_system(operator, sigma_border(grid), balance=True)
            reports.append(null_space_probe(operator, matrix=gauged))
    for entry in reports:
        expected = 1 if entry.m == 0 and not entry.bordered else 0
        if entry.near_null_count != expected:
            logger.warning(f"⚠️ m={entry.m}: {entry.near_null_count} near-null directions, expected {expected}")
    return reports


def solve_full(problem, path='direct', allow_incompatible=False, workers=None, nullspace_modes=(0,)):
    """Analyze f and tau into modes, solve every |m| <= M, synthesize.

    Null-space spectra of ``nullspace_modes`` go into ``report.nullspace``
    while the grid is small enough. The returned report is always filled
    in; on failure it is attached to the raised error as ``error.report``.
    """
    grid = problem.grid
    report = SolveReport.for_problem(problem)
    workers = config.WORKERS if workers is None else max(1, int(workers))
    logger.info(f"📊 Solving {problem.name}: {grid.describe()}, |m| <= {problem.M}, path={path}")
    if problem.cfg.out_of_theory:
        logger.warning("⚠️ Omega*R = 1: reporting as out of theory")

    residual, threshold, compatible = check_compatibility(problem, report)
    if not compatible:
        if not allow_incompatible:
            report.status = 'failed'
            report.error = (
                f"IncompatibleData: compatibility residual {residual:.3e} exceeds {threshold:.3e}"
            )
            logger.error(f"❌ {report.error}")
            raise IncompatibleDataError(report.error, residual=residual, threshold=threshold, report=report)
        report.override_applied = True
        logger.warning("⚠️ Incompatible data accepted: tau's m=0 component will be shifted")

    data = mode_data(problem)
    ms = [int(m) for m in mode_numbers(problem.M)]

    def run(m):
        try:
            return solve_mode(m, problem, grid, path=path, allow_incompatible=True, data=data)
        except HelicalError as e:
            return e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, ms))
    else:
        outcomes = [run(m) for m in ms]

    modes = np.zeros(grid.shape + (len(ms),), dtype=complex)
    first_error = None
    for m, outcome in zip(ms, outcomes):
        if isinstance(outcome, Exception):
            report.modes.append(getattr(outcome, 'mode_report', ModeReport(m=m, path=path, error=str(outcome))))
            first_error = first_error or outcome
            continue
        field, mode_report = outcome
        modes[..., mode_slot(m, problem.M)] = field.values
        report.modes.append(mode_report)
        if m == 0:
            report.tau_shift = mode_report.tau_shift
            report.gauge_constant = mode_report.gauge_constant or 0.0

    report.nullspace = _null_space_reports(problem, grid, nullspace_modes)

    if first_error is not None:
        report.status = 'failed'
        report.error = f"{type(first_error).__name__}: {first_error}"
        first_error.report = report
        raise first_error

    report.imaginary_residue = imaginary_residue(modes, grid.n_phi)
    if report.imaginary_residue > config.IMAG_RESIDUE_TOL:
        logger.warning(f"⚠️ Imaginary residue {report.imaginary_residue:.2e} above tolerance")
    field = synthesize_phi(modes, grid.n_phi)

    report.status = 'ok'
    logger.info(f"✅ Solved {len(ms)} modes, max residual {report.max_residual:.2e}")
    return SolveResult(field=field, modes=modes, report=report, grid=grid)


def linear_residual(result, problem):
    """Max relative residual of the assembled systems at the synthesized modes."""
    data = mode_data(problem)
    worst = 0.0
    for m in mode_numbers(problem.M):
        operator = assemble_mode_system(int(m), result.grid, problem.cfg)
        b = operator.rhs(data.source(m), data.boundary(m))
        u = result.mode(int(m)).ravel()
        if m == 0:
            shift = boundary_shift_column(operator) * (result.report.tau_shift or 0.0)
            b = b - shift
        worst = max(worst, _relative_residual(operator.matrix, u, b))
    return worst
