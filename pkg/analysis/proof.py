# ============================================
# FILE: analysis/proof.py
# ============================================
"""Uniqueness apparatus: the proof multiplier, the two non-negative
integrands it produces and the certificate built on them.

Pointwise integrands are cylindrical-chart densities in (rho, z^i, phi)
and take an explicit ``n`` so synthetic n > 3 samples can be checked;
``z`` and ``u_z`` carry a trailing axis of length n - 2.
"""
import logging
from dataclasses import dataclass

import numpy as np

import config
from models.errors import DomainError, ShapeMismatchError
from models.multiplier import Multiplier
from models.reports import CertificateReport
from utils.calculus import chart_gradient, cylindrical_gradient, extrapolate_axis, node_coordinates
from utils.quadrature import boundary_quadrature, sigma_mean, volume_quadrature

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProofMultiplier:
    """a = -1, b = 2/(1 - n) (rho d_rho + z^i d_i + sign R Omega d_phi).

    In the solver chart rho d_rho + z^i d_i = r d_r, so b^r = 2r/(1 - n),
    b^theta = 0 and b^phi = 2 sign R Omega/(1 - n).
    """

    cfg: object

    @property
    def factor(self):
        return 2.0 / (1.0 - self.cfg.n)

    def components(self, grid):
        r, _ = node_coordinates(grid)
        shape = grid.field_shape
        cfg = self.cfg
        b_r = np.broadcast_to(self.factor * r, shape)
        b_phi = np.full(shape, self.factor * cfg.sign * cfg.R * cfg.omega)
        a = -np.ones(shape)
        if grid.n == 2:
            return Multiplier(a=a, b=(b_r, b_phi))
        return Multiplier(a=a, b=(b_r, np.zeros(shape), b_phi))


def proof_multiplier_contraction(u, grid, cfg):
    """b^a u_a on r = R; zero when u_r + sign Omega u_phi = 0 there."""
    grad = chart_gradient(u, grid)
    mult = ProofMultiplier(cfg).components(grid)
    return sum(b[-1] * g[-1] for b, g in zip(mult.b, grad))


def _z_components(values, n, shape, name):
    if n == 2 and values is None:
        return np.zeros(shape + (0,))
    values = np.asarray(values, dtype=float)
    if n == 3 and values.shape == shape:
        values = values[..., None]
    if values.shape[-1:] != (n - 2,):
        raise ShapeMismatchError(f"{name} needs a trailing axis of length {n - 2}, got {values.shape}")
    return values


def proof_volume_integrand(rho, u_rho, u_phi, u_z=None, *, cfg, n=None):
    """(1/(n-1)) rho [u_rho^2 + sum u_i^2 + (1/rho^2 + Omega^2) u_phi^2]."""
    n = cfg.n if n is None else int(n)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("proof volume integrand needs rho > 0")
    u_rho = np.asarray(u_rho, dtype=float)
    u_phi = np.asarray(u_phi, dtype=float)
    shape = np.broadcast_shapes(rho.shape, u_rho.shape, u_phi.shape)
    u_z = _z_components(u_z, n, shape, 'u_z')

    squares = u_rho ** 2 + np.sum(u_z ** 2, axis=-1)
    squares = squares + (1.0 / rho ** 2 + cfg.omega ** 2) * u_phi ** 2
    return rho * squares / (n - 1)


def _boundary_brackets(z, u_z, u_phi, rho, cfg):
    """Square brackets of the boundary integrand, its lower bound and their gap.

    The lower bound rotates z^i onto (|z|, 0, ...): u_1 = z^i u_i / |z|,
    and u_1 = u_z[0] at |z| = 0.
    """
    R, omega, s = cfg.R, cfg.omega, cfg.sign
    zu = np.sum(z * u_z, axis=-1)
    zz = np.sum(z ** 2, axis=-1)
    uu = np.sum(u_z ** 2, axis=-1)
    z_norm = np.sqrt(zz)

    first = u_z[..., 0] if u_z.shape[-1] else np.zeros_like(zu)
    with np.errstate(divide='ignore', invalid='ignore'):
        u_1 = np.where(z_norm > 0, zu / np.where(z_norm > 0, z_norm, 1.0), first)

    bracket = zu ** 2 + rho ** 2 * uu + (1.0 + omega ** 2 * zz) * u_phi ** 2
    bracket = bracket + 2.0 * s * R * omega * zu * u_phi
    lower = u_phi ** 2 + (R * u_1 + s * omega * z_norm * u_phi) ** 2
    gap = rho ** 2 * (uu - u_1 ** 2)
    return bracket, lower, gap


def _boundary_sample(rho, z, u_z, u_phi, cfg, n, tol):
    rho = np.asarray(rho, dtype=float)
    u_phi = np.asarray(u_phi, dtype=float)
    shape = np.broadcast_shapes(rho.shape, u_phi.shape)
    z = _z_components(z, n, shape, 'z')
    u_z = _z_components(u_z, n, shape, 'u_z')
    if np.any(rho <= 0):
        raise DomainError("proof boundary integrand needs rho > 0")
    tol = config.SURFACE_TOL if tol is None else tol
    off = np.abs(rho ** 2 + np.sum(z ** 2, axis=-1) - cfg.R ** 2)
    if np.any(off > tol * cfg.R ** 2):
        raise DomainError(f"boundary sample off the sphere r = {cfg.R} by {float(np.max(off)):.3e}")
    prefactor = cfg.R / ((n - 1) * rho)
    return prefactor, _boundary_brackets(z, u_z, u_phi, rho, cfg)


def proof_boundary_integrand(rho, z, u_z, u_phi, cfg, n=None, tol=None):
    """(integrand, lower_bound) of the boundary form at on-sphere samples.

    integrand = R/((n-1) rho) [(z.u)^2 + rho^2 |u_z|^2 + (1 + Omega^2 |z|^2) u_phi^2
                               + 2 sign R Omega (z.u) u_phi]
    lower     = R/((n-1) rho) [u_phi^2 + (R u_1 + sign Omega |z| u_phi)^2]
    """
    n = cfg.n if n is None else int(n)
    prefactor, (bracket, lower, _) = _boundary_sample(rho, z, u_z, u_phi, cfg, n, tol)
    return prefactor * bracket, prefactor * lower


def boundary_gap(rho, z, u_z, u_phi, cfg, n=None, tol=None):
    """integrand - lower_bound in closed form: R rho/(n-1) (|u_z|^2 - u_1^2)."""
    n = cfg.n if n is None else int(n)
    prefactor, (_, _, gap) = _boundary_sample(rho, z, u_z, u_phi, cfg, n, tol)
    return prefactor * gap


@dataclass
class ProofTotals:
    volume_density: np.ndarray
    boundary_density: np.ndarray
    boundary_lower: np.ndarray
    volume_total: float
    boundary_total: float
    min_volume_integrand: float
    min_boundary_gap: float


def proof_totals(u, grid, cfg):
    """Both integrals of the non-negative form, evaluated on a sampled field.

    Volume densities carry the chart Jacobian (r for n = 3); boundary
    densities are taken per (theta, phi), where the R sin(theta) Jacobian
    cancels the 1/rho of the integrand and the poles need no special case.
    """
    n = grid.n
    u_rho, u_z, u_phi = cylindrical_gradient(u, grid)
    rho = np.broadcast_to(grid.rho[..., None], grid.field_shape)
    axis = rho <= 0
    rho_safe = np.where(axis, 1.0, rho)
    u_z_trailing = None if n == 2 else u_z[..., None]

    cylindrical = proof_volume_integrand(rho_safe, u_rho, u_phi, u_z_trailing, cfg=cfg)
    min_volume = float(np.min(cylindrical[~axis]))
    volume_density = cylindrical if n == 2 else cylindrical * node_coordinates(grid)[0]
    volume_density = extrapolate_axis(np.where(axis, np.nan, volume_density), grid)

    rho_b = rho[-1]
    if n == 2:
        z_b, u_z_b = np.zeros(rho_b.shape + (0,)), np.zeros(rho_b.shape + (0,))
        jacobian = cfg.R / rho_b
    else:
        z_b = np.broadcast_to(grid.z[-1][:, None], rho_b.shape)[..., None]
        u_z_b = u_z[-1][..., None]
        jacobian = cfg.R / (n - 1)
    bracket, lower, _ = _boundary_brackets(z_b, u_z_b, u_phi[-1], rho_b, cfg)
    boundary_density = jacobian * bracket
    boundary_lower = jacobian * lower

    totals = ProofTotals(
        volume_density=volume_density,
        boundary_density=boundary_density,
        boundary_lower=boundary_lower,
        volume_total=float(volume_quadrature(volume_density, grid)),
        boundary_total=float(boundary_quadrature(boundary_density, grid)),
        min_volume_integrand=min_volume,
        min_boundary_gap=float(np.min(boundary_density - boundary_lower)),
    )
    logger.debug(f"📊 Proof totals: volume {totals.volume_total:.3e}, boundary {totals.boundary_total:.3e}")
    return totals


def gradient_max_norm(u, grid):
    """max |grad u| with the phi part u_phi / rho taken off the axis."""
    u_rho, u_z, u_phi = cylindrical_gradient(u, grid)
    rho = grid.rho[..., None]
    squares = u_rho ** 2 + (0.0 if u_z is None else u_z ** 2)
    with np.errstate(divide='ignore', invalid='ignore'):
        angular = np.where(rho > 0, u_phi / np.where(rho > 0, rho, 1.0), 0.0)
    return float(np.sqrt(np.max(squares + angular ** 2)))


def uniqueness_certificate(u1, u2, problem, tol=None):
    """Check that two solutions of one problem differ at most by a constant.

    Passes when the gradient of d = u1 - u2 and the oscillation of d about
    its sigma-mean are below ``tol`` relative to u1, and both proof totals
    of d are below 10 h^2 relative to those of u1.
    """
    tol = config.CERTIFICATE_RTOL if tol is None else tol
    grid, cfg = problem.grid, problem.cfg
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if u1.shape != grid.field_shape or u2.shape != grid.field_shape:
        raise ShapeMismatchError(f"fields must have shape {grid.field_shape}")

    d = u1 - u2
    gradient_norm = gradient_max_norm(d, grid)
    mean_adjusted = float(np.max(np.abs(d - sigma_mean(d, grid))))
    totals = proof_totals(d, grid, cfg)

    reference = proof_totals(u1, grid, cfg)
    gradient_scale = gradient_max_norm(u1, grid) or 1.0
    value_scale = float(np.max(np.abs(u1 - sigma_mean(u1, grid)))) or 1.0
    energy_scale = abs(reference.volume_total) + abs(reference.boundary_total) or 1.0
    energy_bound = 10.0 * grid.spacing ** 2 * energy_scale

    passed = (
        gradient_norm <= tol * gradient_scale
        and mean_adjusted <= tol * value_scale
        and abs(totals.volume_total) <= energy_bound
        and abs(totals.boundary_total) <= energy_bound
    )
    status = "✅" if passed else "❌"
    logger.info(
        f"{status} Uniqueness certificate: |grad d| = {gradient_norm:.3e}, "
        f"|d - mean| = {mean_adjusted:.3e}"
    )
    return CertificateReport(
        gradient_norm=gradient_norm,
        mean_adjusted_difference=mean_adjusted,
        volume_total=totals.volume_total,
        boundary_total=totals.boundary_total,
        gradient_scale=gradient_scale,
        value_scale=value_scale,
        energy_scale=energy_scale,
        tolerance=tol,
        passed=passed,
    )
