# ============================================
# FILE: verification/suites.py
# ============================================
"""Verification suites run by ``verify --suite NAME``.

Every suite fills a SuiteReport with named pass/fail checks. Random inputs
are drawn from ``seed + trial`` so each trial sees the same continuum
fields at every resolution.
"""
import logging

import numpy as np

import config
from analysis.energy import energy_report, identity_terms, integrand_table_columns
from analysis.proof import (
    ProofMultiplier,
    boundary_gap,
    proof_boundary_integrand,
    proof_multiplier_contraction,
    proof_volume_integrand,
    uniqueness_certificate,
)
from analysis.reduction import conormal_spherical
from models.errors import HelicalError, IncompatibleDataError, UnknownSuiteError
from models.helical import HelicalConfig
from models.problem import HelicalProblem
from models.reports import SuiteReport
from solver.convergence import refinement_resolutions, relative_l2_error
from solver.nullspace import bordered_system, null_space_probe, sigma_border
from solver.solver import compatibility_residual, solve_full
from utils.data_loader import FieldTables, write_table
from utils.fields import (
    CartesianPolynomial,
    SommerfeldField,
    boundary_sigma,
    constant_source_solution,
    euler_identity_gap,
    identity_field,
    identity_multiplier,
    random_vector_density,
    trig_polynomial_data,
)
from utils.grid import build_grid
from utils.operators import assemble_mode_system
from utils.quadrature import boundary_quadrature, stokes_residual, volume_quadrature

logger = logging.getLogger(__name__)


def _levels(run):
    return refinement_resolutions(run.resolution, run.n, max(3, run.refine))


def _identity_levels(run):
    base = run.identity_resolution or 'x'.join([str(config.IDENTITY_BASE_RESOLUTION)] * (run.n - 1))
    return refinement_resolutions(base, run.n, max(3, config.IDENTITY_LEVELS))


def _n_phi(run):
    return run.n_phi or max(config.DEFAULT_N_PHI, 2 * run.M + 2)


def _halving_check(report, name, coarse, fine, scale):
    """Pass when the error shrinks by MIN_HALVING_RATIO, or already sits at roundoff."""
    at_roundoff = fine <= config.ROUNDOFF_SCALE * max(scale, 1.0)
    ratio = coarse / fine if fine > 0 else np.inf
    passed = at_roundoff or ratio >= config.MIN_HALVING_RATIO
    report.add(name, passed, value=ratio, threshold=config.MIN_HALVING_RATIO,
               detail=f"coarse={coarse:.3e}, fine={fine:.3e}")


def _order_check(report, name, errors, scale):
    """Least-squares order over levels that each halve the spacing."""
    errors = np.asarray(errors, dtype=float)
    levels = ', '.join(f"{e:.3e}" for e in errors)
    if errors[-1] <= config.ROUNDOFF_SCALE * max(scale, 1.0):
        report.add(name, True, threshold=config.MIN_ORDER, detail=f"at roundoff: {levels}")
        return
    slope = np.polyfit(np.arange(len(errors)), np.log2(np.maximum(errors, np.finfo(float).tiny)), 1)[0]
    report.add(name, -slope >= config.MIN_ORDER, value=-slope, threshold=config.MIN_ORDER, detail=levels)


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def energy_suite(run, seed, report):
    cfg = run.helical
    identity_grids = [build_grid(cfg, res, n_phi=config.IDENTITY_N_PHI) for res in _identity_levels(run)]

    for trial in range(run.trials):
        terms = []
        for grid in identity_grids:
            rng = np.random.default_rng(seed + trial)
            u = identity_field(grid, rng)
            terms.append(identity_terms(u, identity_multiplier(grid, rng), grid, cfg))
        residuals = [t.residual for t in terms]
        finest = terms[-1]
        _halving_check(report, f"ibp-halving[{trial}]", residuals[-2], residuals[-1], finest.scale)
        _order_check(report, f"ibp-order[{trial}]", residuals, finest.scale)
        report.add(f"ibp-relative[{trial}]", finest.relative <= config.IBP_RTOL, value=finest.relative,
                   threshold=config.IBP_RTOL, detail=f"residual={finest.residual:.3e}, scale={finest.scale:.3e}")

    grid = identity_grids[0]
    rng = np.random.default_rng(seed)
    u = identity_field(grid, rng)
    mult = identity_multiplier(grid, rng)
    table = FieldTables(grid).fields_frame({'u': u, **integrand_table_columns(u, mult, grid, cfg)})
    write_table(table, run.output('integrand_file'))

    # proof multiplier on fields with zero Sommerfeld residual
    grids = [build_grid(cfg, res, n_phi=_n_phi(run)) for res in _levels(run)]
    for trial in range(run.trials):
        samples, scales = [], []
        for grid in grids:
            rng = np.random.default_rng(seed + trial)
            u = SommerfeldField.random(cfg, rng).values(grid)
            samples.append(float(np.max(np.abs(proof_multiplier_contraction(u, grid, cfg)))))
            scales.append(float(np.max(np.abs(u))) * cfg.R)
        _halving_check(report, f"multiplier-boundary[{trial}]", samples[-2], samples[-1], scales[-1])

    grid = grids[-1]
    rng = np.random.default_rng(seed)
    u = SommerfeldField.random(cfg, rng).values(grid)
    report.energy = energy_report(u, ProofMultiplier(cfg).components(grid), grid, cfg)


# ---------------------------------------------------------------------------
# inequality
# ---------------------------------------------------------------------------

def _sphere_samples(rng, count, n, R):
    """On-sphere (rho, z) with z in R^{n-2}; rho bounded away from zero."""
    direction = rng.standard_normal((count, n - 1))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    rho = R * np.abs(direction[:, 0])
    rho = np.where(rho < 1e-8 * R, 1e-8 * R, rho)
    z = R * direction[:, 1:]
    # project back onto the sphere after the clamp
    z_norm = np.linalg.norm(z, axis=1, keepdims=True)
    target = np.sqrt(np.clip(R ** 2 - rho ** 2, 0.0, None))[:, None]
    z = np.where(z_norm > 0, z / np.where(z_norm > 0, z_norm, 1.0) * target, z)
    return rho, z


def inequality_suite(run, seed, report):
    rng = np.random.default_rng(seed)
    tol = config.INEQUALITY_TOL
    count = run.samples

    for sign in (1, -1):
        cfg = HelicalConfig(n=run.n, omega=run.omega, R=run.R, sign=sign)
        rho = rng.uniform(0.0, cfg.R, count)
        rho = np.where(rho <= 0, cfg.R, rho)
        u_rho, u_phi = rng.standard_normal(count), rng.standard_normal(count)
        u_z = rng.standard_normal((count, cfg.n - 2))
        volume = proof_volume_integrand(rho, u_rho, u_phi, u_z, cfg=cfg)
        report.add(f"volume-nonnegative[sign={sign}]", np.min(volume) >= 0.0, value=np.min(volume), threshold=0.0)

        for n in sorted({cfg.n, 3, 4}):
            rho_b, z = _sphere_samples(rng, count, n, cfg.R)
            u_z = rng.standard_normal((count, n - 2))
            u_phi = rng.standard_normal(count)
            integrand, lower = proof_boundary_integrand(rho_b, z, u_z, u_phi, cfg, n=n, tol=1e-9)
            scale = float(np.max(np.abs(integrand))) or 1.0
            gap = float(np.min(integrand - lower))
            report.add(f"boundary-chain[n={n},sign={sign}]", gap >= -tol * scale, value=gap, threshold=-tol * scale)
            report.add(f"lower-nonnegative[n={n},sign={sign}]", np.min(lower) >= -tol * scale, value=np.min(lower))
            closed = boundary_gap(rho_b, z, u_z, u_phi, cfg, n=n, tol=1e-9)
            mismatch = float(np.max(np.abs(integrand - lower - closed)))
            report.add(f"gap-closed-form[n={n},sign={sign}]", mismatch <= 1e-10 * scale, value=mismatch)

        # equality on the equator of the n = 3 sphere
        u_1, u_phi = rng.standard_normal(1000), rng.standard_normal(1000)
        equator_rho = np.full(1000, cfg.R)
        integrand, lower = proof_boundary_integrand(equator_rho, np.zeros((1000, 1)), u_1, u_phi, cfg, n=3)
        expected = 0.5 * (cfg.R ** 2 * u_1 ** 2 + u_phi ** 2)
        err = float(max(np.max(np.abs(integrand - expected)), np.max(np.abs(integrand - lower))))
        report.add(f"equator-equality[sign={sign}]", err <= 1e-13 * max(1.0, float(np.max(expected))), value=err)

        # orthogonal invariance at n = 4
        rho_b, z = _sphere_samples(rng, 1000, 4, cfg.R)
        u_z, u_phi = rng.standard_normal((1000, 2)), rng.standard_normal(1000)
        q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        before, _ = proof_boundary_integrand(rho_b, z, u_z, u_phi, cfg, n=4, tol=1e-9)
        after, _ = proof_boundary_integrand(rho_b, z @ q.T, u_z @ q.T, u_phi, cfg, n=4, tol=1e-9)
        drift = float(np.max(np.abs(after - before)))
        report.add(f"orthogonal-invariance[sign={sign}]", drift <= tol * max(1.0, float(np.max(np.abs(before)))),
                   value=drift)


# ---------------------------------------------------------------------------
# stokes
# ---------------------------------------------------------------------------

def stokes_suite(run, seed, report):
    cfg = run.helical
    grids = [build_grid(cfg, res, n_phi=_n_phi(run)) for res in _levels(run)]
    for trial in range(run.trials):
        residuals, scales = [], []
        for grid in grids:
            rng = np.random.default_rng(seed + trial)
            V = random_vector_density(grid, rng)
            residuals.append(stokes_residual(V, grid, cfg))
            scales.append(max(float(np.max(np.abs(c))) for c in V))
        _halving_check(report, f"stokes-halving[{trial}]", residuals[-2], residuals[-1], scales[-1])
        _order_check(report, f"stokes-order[{trial}]", residuals, scales[-1])

    # u_r on r = R against (1/R)(rho u_rho + z u_z)
    for field in range(config.EULER_FIELDS):
        gaps = []
        for grid in grids[-2:]:
            rng = np.random.default_rng(seed + field)
            poly = CartesianPolynomial.random(cfg.n, config.TEST_FIELD_DEGREE, rng, scale=1.0 / cfg.R ** 3)
            gaps.append(euler_identity_gap(poly, grid, cfg))
        _halving_check(report, f"euler-identity[{field}]", gaps[0], gaps[1], 1.0)

    rng = np.random.default_rng(seed)
    expected = np.zeros(cfg.n)
    expected[0] = 1.0
    worst = 0.0
    for _ in range(1000):
        angles = [rng.uniform(0.0, np.pi)] if cfg.n == 3 else []
        point = (cfg.R, *angles, rng.uniform(0.0, 2.0 * np.pi))
        worst = max(worst, float(np.max(np.abs(conormal_spherical(point, cfg) - expected))))
    report.add("conormal-is-dr", worst <= config.CONORMAL_TOL, value=worst, threshold=config.CONORMAL_TOL)


# ---------------------------------------------------------------------------
# uniqueness
# ---------------------------------------------------------------------------

def uniqueness_suite(run, seed, report):
    cfg = run.helical
    n_phi = _n_phi(run)
    grid = build_grid(cfg, run.resolution, n_phi=n_phi)
    for trial in range(run.trials):
        f, tau = trig_polynomial_data(grid, seed=seed + trial)
        problem = HelicalProblem(cfg=cfg, f=f, tau=tau, resolution=run.resolution, M=run.M, n_phi=n_phi,
                                 name=f"random-{trial}")
        direct = solve_full(problem, path='direct', workers=run.workers, nullspace_modes=())
        iterative = solve_full(problem, path='iterative', workers=run.workers, nullspace_modes=())
        certificate = uniqueness_certificate(direct.field, iterative.field, problem, tol=run.certificate_rtol)
        report.add(
            f"certificate[{trial}]",
            certificate.passed,
            value=certificate.gradient_norm / certificate.gradient_scale,
            threshold=run.certificate_rtol,
            detail=f"volume={certificate.volume_total:.2e}, boundary={certificate.boundary_total:.2e}",
        )


# ---------------------------------------------------------------------------
# nullspace
# ---------------------------------------------------------------------------

def nullspace_suite(run, seed, report):
    cfg = run.helical
    for resolution in _levels(run)[:2]:
        grid = build_grid(cfg, resolution, n_phi=_n_phi(run))
        label = 'x'.join(str(p) for p in resolution)
        for m in run.nullspace_modes:
            operator = assemble_mode_system(m, grid, cfg)
            spectrum = null_space_probe(operator)
            if m == 0:
                report.add(f"m=0 single near-null [{label}]", spectrum.near_null_count == 1 and spectrum.converged,
                           value=spectrum.ratios[0], threshold=config.NULLSPACE_RATIO)
                cosine = spectrum.constant_cosine or 0.0
                report.add(f"m=0 constant vector [{label}]", cosine >= config.CONSTANT_COSINE_MIN,
                           value=cosine, threshold=config.CONSTANT_COSINE_MIN)
                gauged = bordered_system(operator, sigma_border(grid), balance=True)
                bordered = null_space_probe(operator, matrix=gauged)
                report.add(f"m=0 bordered regular [{label}]", bordered.near_null_count == 0 and bordered.converged,
                           value=bordered.ratios[0], threshold=config.NULLSPACE_RATIO)
            else:
                report.add(f"m={m} regular [{label}]", spectrum.near_null_count == 0 and spectrum.converged,
                           value=spectrum.ratios[0], threshold=config.NULLSPACE_RATIO)


# ---------------------------------------------------------------------------
# compat
# ---------------------------------------------------------------------------

def compat_suite(run, seed, report):
    cfg = run.helical
    n_phi = _n_phi(run)
    grid = build_grid(cfg, run.resolution, n_phi=n_phi)
    exact = constant_source_solution(cfg, run.c)
    f, tau = exact.source(grid), exact.boundary_data(grid)

    ball = np.pi * cfg.R ** 2 if cfg.n == 2 else 4.0 / 3.0 * np.pi * cfg.R ** 3
    expected = ball * run.c
    threshold = max(1e-3, 4.0 * grid.spacing ** 2)
    volume_side = volume_quadrature(grid.volume_density[..., None] * f, grid)
    boundary_side = boundary_quadrature(boundary_sigma(grid) * tau, grid)
    for name, value in (('volume-side', volume_side), ('boundary-side', boundary_side)):
        relative = abs(value - expected) / abs(expected)
        report.add(f"{name} = |B| c", relative <= threshold, value=relative, threshold=threshold,
                   detail=f"{value:.10g} vs {expected:.10g}")

    problem = HelicalProblem(cfg=cfg, f=f, tau=tau, resolution=run.resolution, M=run.M, n_phi=n_phi,
                             name='constant')
    result = solve_full(problem, workers=run.workers)
    error = relative_l2_error(result.field, exact.values(grid), grid)
    report.add("constant-source solution", error <= 10.0 * grid.spacing ** 2, value=error,
               threshold=10.0 * grid.spacing ** 2)

    rejected = problem.with_data(tau=np.zeros_like(tau), name='constant-tau-zero')
    try:
        solve_full(rejected, workers=run.workers)
        report.add("incompatible data rejected", False, detail="solve accepted tau = 0")
    except IncompatibleDataError as e:
        report.add("incompatible data rejected", True, value=abs(e.residual), threshold=e.threshold)

    shifted = solve_full(rejected, allow_incompatible=True, workers=run.workers)
    defect = compatibility_residual(rejected)
    report.add("override absorbs defect", shifted.report.override_applied and shifted.report.tau_shift is not None,
               value=shifted.report.tau_shift, detail=f"compatibility residual {defect:.6e}")


SUITES = {
    'energy': energy_suite,
    'inequality': inequality_suite,
    'stokes': stokes_suite,
    'uniqueness': uniqueness_suite,
    'nullspace': nullspace_suite,
    'compat': compat_suite,
}


def run_suite(name, run, seed=None):
    """Run one named suite and return its (finished) SuiteReport."""
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite '{name}', expected one of {sorted(SUITES)}")
    seed = run.seed if seed is None else int(seed)
    report = SuiteReport(suite=name, seed=seed, n=run.n, omega=run.omega, R=run.R)
    logger.info(f"📊 Running suite '{name}' (seed {seed})...")
    try:
        SUITES[name](run, seed, report)
    except HelicalError as e:
        report.error = f"{type(e).__name__}: {e}"
        logger.error(f"❌ Suite '{name}' aborted: {e}")
    report.finish()
    failed = [check.name for check in report.checks if not check.passed]
    if report.passed:
        logger.info(f"✅ Suite '{name}': {len(report.checks)} checks passed")
    else:
        logger.warning(f"⚠️ Suite '{name}': {len(failed)} failed checks {failed[:5]}")
    return report
