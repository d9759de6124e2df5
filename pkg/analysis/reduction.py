# ============================================
# FILE: analysis/reduction.py
# ============================================
"""Coefficient fields of the helically reduced equation.

The reduced equation in density form reads d_a(h^{ab} u_b) = sigma * f with
sigma = rho and, in cylindrical coordinates (rho, phi, z),

    h^{rho rho} = rho,   h^{zz} = rho,   h^{phi phi} = chi / rho,
    chi = 1 - Omega^2 rho^2.

chi vanishes on the light cylinder rho = 1/Omega; the equation is elliptic
inside and hyperbolic outside.
"""
import math

import numpy as np

import config
from models.errors import DomainError
from models.helical import CoefficientSample, RegionTag


def chi(rho, cfg):
    """chi(rho) = 1 - Omega^2 rho^2. Accepts scalars or arrays."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0):
        raise DomainError(f"rho must be non-negative, got min {rho_arr.min()}")
    value = 1.0 - cfg.omega ** 2 * rho_arr ** 2
    return float(value) if value.ndim == 0 else value


def classify_point(rho, cfg, tol=None):
    tol = config.LIGHT_CYLINDER_TOL if tol is None else tol
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    value = chi(rho, cfg)
    if value > tol:
        return RegionTag.ELLIPTIC
    if value < -tol:
        return RegionTag.HYPERBOLIC
    return RegionTag.LIGHT_CYLINDER


def coefficients(rho, cfg):
    """Sample chi, sigma and h^{ab} at a point off the axis."""
    if not rho > 0:
        raise DomainError(f"h^phiphi is singular on the axis; need rho > 0, got {rho}")
    rho = float(rho)
    value = chi(rho, cfg)
    return CoefficientSample(
        rho=rho,
        chi=value,
        sigma=rho,
        h_rho_rho=rho,
        h_phi_phi=1.0 / rho - cfg.omega ** 2 * rho,
        h_zz=rho if cfg.n == 3 else None,
    )


# ---------------------------------------------------------------------------
# Chart coefficients used by the discretization.
#
# n = 2 works in the (rho, phi) chart, n = 3 in the spherical chart
# (r, theta, phi) with (rho, z) = (r sin(theta), r cos(theta)). Changing
# chart multiplies densities by the Jacobian r, so in the spherical chart
#
#     h^{rr} = r^2 sin(theta),  h^{theta theta} = sin(theta),
#     h^{phi phi} = chi / sin(theta),  volume density = r^2 sin(theta).
# ---------------------------------------------------------------------------

def chart_h_rr(r, theta, cfg):
    if cfg.n == 2:
        return np.asarray(r, dtype=float)
    return np.asarray(r, dtype=float) ** 2 * np.sin(theta)


def chart_h_thetatheta(theta):
    return np.sin(theta)


def chart_h_phiphi(r, theta, cfg):
    """h^{phi phi} in the solver chart; only valid off the axis."""
    r = np.asarray(r, dtype=float)
    if cfg.n == 2:
        return 1.0 / r - cfg.omega ** 2 * r
    s = np.sin(theta)
    return 1.0 / s - cfg.omega ** 2 * r ** 2 * s


def chart_dh_phiphi(r, theta, cfg):
    """(d_r, d_theta) of h^{phi phi} in the solver chart."""
    r = np.asarray(r, dtype=float)
    if cfg.n == 2:
        return -1.0 / r ** 2 - cfg.omega ** 2, np.zeros_like(r)
    s, c = np.sin(theta), np.cos(theta)
    d_r = -2.0 * cfg.omega ** 2 * r * s
    d_theta = -c / s ** 2 - cfg.omega ** 2 * r ** 2 * c
    return d_r, d_theta


def chart_dh_rr(r, theta, cfg):
    """(d_r, d_theta) of h^{rr} in the solver chart."""
    r = np.asarray(r, dtype=float)
    if cfg.n == 2:
        return np.ones_like(r), np.zeros_like(r)
    return 2.0 * r * np.sin(theta), r ** 2 * np.cos(theta)


def chart_volume_density(r, theta, cfg):
    """sigma times the chart Jacobian: rho (n=2) or r^2 sin(theta) (n=3)."""
    return chart_h_rr(r, theta, cfg)


# ---------------------------------------------------------------------------
# Metric-free co-normal
# ---------------------------------------------------------------------------

def _levi_civita_contract(tangents):
    """n_b = eps_{b a1 ... a(n-1)} t1^a1 ... t(n-1)^a(n-1).

    The (n-1)! of the general formula cancels the antisymmetrisation of
    xi over the parameter indices, leaving a cofactor expansion.
    """
    tangents = np.atleast_2d(np.asarray(tangents, dtype=float))
    dim = tangents.shape[1]
    conormal = np.empty(dim)
    for beta in range(dim):
        basis = np.zeros(dim)
        basis[beta] = 1.0
        conormal[beta] = np.linalg.det(np.vstack([basis, tangents]))
    return conormal


def _sphere_point_and_tangents(point, cfg):
    """Cartesian embedding of the boundary, tangents and chart Jacobian.

    The phi tangent and the chart density share a factor sin(theta); it is
    divided out of both so the contraction stays regular at the poles.
    """
    R = cfg.R
    if cfg.n == 2:
        _, phi = point
        t_phi = R * np.array([-math.sin(phi), math.cos(phi)])
        jac = np.array([
            [math.cos(phi), -R * math.sin(phi)],
            [math.sin(phi), R * math.cos(phi)],
        ])
        chart_density = R
        return [t_phi], jac, chart_density

    _, theta, phi = point
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    t_theta = R * np.array([ct * cp, ct * sp, -st])
    t_phi_reduced = R * np.array([-sp, cp, 0.0])
    jac = np.array([
        [st * cp, R * ct * cp, -R * st * sp],
        [st * sp, R * ct * sp, R * st * cp],
        [ct, -R * st, 0.0],
    ])
    chart_density = R ** 2
    return [t_theta, t_phi_reduced], jac, chart_density


def conormal_spherical(surface_point, cfg, tol=None):
    """Co-normal n_a of the boundary sphere in spherical chart components.

    ``surface_point`` is (r, phi) for n = 2 or (r, theta, phi) for n = 3.
    The contraction is carried out with the Cartesian volume density, then
    pulled back to the spherical chart, where the volume density is
    normalised to one. The result is dr: (1, 0) or (1, 0, 0).
    """
    tol = config.SURFACE_TOL if tol is None else tol
    point = tuple(float(x) for x in surface_point)
    if len(point) != cfg.n:
        raise DomainError(f"expected {cfg.n} spherical coordinates, got {len(point)}")
    if abs(point[0] - cfg.R) > tol * max(1.0, cfg.R):
        raise DomainError(f"point r={point[0]} is not on the sphere r={cfg.R}")

    tangents, jac, chart_density = _sphere_point_and_tangents(point, cfg)
    conormal_cartesian = _levi_civita_contract(tangents)
    return conormal_cartesian @ jac / chart_density
