# ============================================
# FILE: analysis/energy.py
# ============================================
"""Generalized energy integral and its integration-by-parts expansion.

For a multiplier (a, b) and a field u,

    E[u] = int_B (a u + b^c u_c) d_a(h^{ab} u_b)

splits into a volume term and a boundary flux through r = R. Everything is
evaluated in the solver chart, where h is diagonal. Densities with
removable 1/rho factors are extrapolated onto the axis.
"""
import logging
from dataclasses import dataclass

import numpy as np

import config
from analysis.proof import proof_totals
from analysis.reduction import chart_dh_phiphi, chart_dh_rr, chart_h_phiphi, chart_h_rr
from models.reports import EnergyReport
from utils.calculus import (
    chart_gradient,
    d_phi,
    d_r,
    d_theta,
    extrapolate_axis,
    extrapolate_poles,
    node_coordinates,
    staggered_divergence,
)
from utils.quadrature import boundary_conormals, boundary_quadrature, volume_quadrature

logger = logging.getLogger(__name__)


@dataclass
class ChartMetric:
    """Diagonal h^{aa} of the chart and d_c h^{aa}, on ``grid.field_shape``.

    ``dh[a][c]`` is d_c h^{aa}; the phi derivative is always zero. Axis
    entries of h^{phi phi} are infinite.
    """

    h: list
    dh: list

    @classmethod
    def on_grid(cls, grid, cfg):
        r, theta = node_coordinates(grid)
        shape = grid.field_shape
        zero = np.zeros(shape)
        with np.errstate(divide='ignore', invalid='ignore'):
            h_rr = np.broadcast_to(chart_h_rr(r, theta, cfg), shape)
            h_pp = np.broadcast_to(chart_h_phiphi(r, theta, cfg), shape)
            dr_rr, dt_rr = (np.broadcast_to(x, shape) for x in chart_dh_rr(r, theta, cfg))
            dr_pp, dt_pp = (np.broadcast_to(x, shape) for x in chart_dh_phiphi(r, theta, cfg))
        if grid.n == 2:
            return cls(h=[h_rr, h_pp], dh=[[dr_rr, zero], [dr_pp, zero]])
        h_tt = np.broadcast_to(np.sin(theta), shape)
        dt_tt = np.broadcast_to(np.cos(theta), shape)
        return cls(
            h=[h_rr, h_tt, h_pp],
            dh=[[dr_rr, dt_rr, zero], [zero, dt_tt, zero], [dr_pp, dt_pp, zero]],
        )


def _derivatives(grid):
    """Chart derivative along each coordinate, in chart order."""
    if grid.n == 2:
        return [lambda v: d_r(v, grid), lambda v: d_phi(v, grid)]
    return [lambda v: d_r(v, grid), lambda v: d_theta(v, grid), lambda v: d_phi(v, grid)]


def density_divergence(values, grid, metric):
    """d_a(h^{ab} v_b): staggered fluxes in r and theta, spectral in phi."""
    values = np.asarray(values, dtype=float)
    with np.errstate(invalid='ignore'):
        return staggered_divergence(values, grid) + metric.h[-1] * d_phi(values, grid, order=2)


def _quadratic_form(metric, grad):
    with np.errstate(invalid='ignore'):
        return sum(h * g ** 2 for h, g in zip(metric.h, grad))


def energy_integrand(u, mult, grid, cfg, metric=None):
    """(a u + b^c u_c) d_a(h^{ab} u_b) at every node."""
    metric = metric or ChartMetric.on_grid(grid, cfg)
    grad = chart_gradient(u, grid)
    weight = mult.a * u + sum(b * g for b, g in zip(mult.b, grad))
    with np.errstate(invalid='ignore'):
        integrand = weight * density_divergence(u, grid, metric)
    return extrapolate_axis(integrand, grid)


def energy_direct(u, mult, grid, cfg):
    return float(volume_quadrature(energy_integrand(u, mult, grid, cfg), grid))


def expanded_volume_integrand(u, mult, grid, cfg, metric=None):
    """1/2 d_a(h a_a) u^2 - a h u u + 1/2 d_c(h^{ab} b^c) u_a u_b - b^c_{,a} h^{ab} u_c u_b."""
    metric = metric or ChartMetric.on_grid(grid, cfg)
    grad = chart_gradient(u, grid)
    derivs = _derivatives(grid)
    b = mult.b
    db = [[derivs[a](b_c) for a in range(grid.n)] for b_c in b]
    div_b = sum(db[c][c] for c in range(grid.n))

    with np.errstate(invalid='ignore'):
        a_term = 0.5 * density_divergence(mult.a, grid, metric) * u ** 2
        h_term = -mult.a * _quadratic_form(metric, grad)

        transport = 0.0
        for a in range(grid.n):
            d_hb = sum(metric.dh[a][c] * b[c] for c in range(grid.n)) + metric.h[a] * div_b
            transport = transport + 0.5 * d_hb * grad[a] ** 2

        shear = 0.0
        for c in range(grid.n):
            for a in range(grid.n):
                shear = shear - db[c][a] * metric.h[a] * grad[c] * grad[a]

        integrand = a_term + h_term + transport + shear
    return extrapolate_axis(integrand, grid)


def boundary_flux_density(u, mult, grid, cfg, metric=None):
    """n_a {(a u + b^c u_c) h^{ab} u_b - 1/2 h^{ab} a_b u^2 - 1/2 b^a h^{bc} u_b u_c} on r = R."""
    metric = metric or ChartMetric.on_grid(grid, cfg)
    grad = chart_gradient(u, grid)
    grad_a = chart_gradient(mult.a, grid)
    weight = mult.a * u + sum(b * g for b, g in zip(mult.b, grad))

    with np.errstate(invalid='ignore'):
        energy = _quadratic_form(metric, grad)
        flux = [
            weight * metric.h[a] * grad[a]
            - 0.5 * metric.h[a] * grad_a[a] * u ** 2
            - 0.5 * mult.b[a] * energy
            for a in range(grid.n)
        ]
        conormal = boundary_conormals(grid, cfg)
        density = sum(conormal[..., a] * flux[a][-1] for a in range(grid.n))
    return extrapolate_poles(density, grid)


def energy_expanded(u, mult, grid, cfg):
    """(volume_term, boundary_term)."""
    metric = ChartMetric.on_grid(grid, cfg)
    volume = volume_quadrature(expanded_volume_integrand(u, mult, grid, cfg, metric), grid)
    boundary = boundary_quadrature(boundary_flux_density(u, mult, grid, cfg, metric), grid)
    return float(volume), float(boundary)


@dataclass
class IdentityTerms:
    """Both sides of the integration-by-parts identity on one grid.

    ``scale`` is the integral of |volume integrand|, the reference for the
    relative residual.
    """

    direct: float
    volume: float
    boundary: float
    scale: float

    @property
    def residual(self):
        return abs(self.direct - self.volume - self.boundary)

    @property
    def relative(self):
        return self.residual / max(self.scale, config.ROUNDOFF_SCALE)


def identity_terms(u, mult, grid, cfg):
    metric = ChartMetric.on_grid(grid, cfg)
    expanded = expanded_volume_integrand(u, mult, grid, cfg, metric)
    return IdentityTerms(
        direct=float(volume_quadrature(energy_integrand(u, mult, grid, cfg, metric), grid)),
        volume=float(volume_quadrature(expanded, grid)),
        boundary=float(boundary_quadrature(boundary_flux_density(u, mult, grid, cfg, metric), grid)),
        scale=float(volume_quadrature(np.abs(expanded), grid)),
    )


def ibp_residual(u, mult, grid, cfg):
    return identity_terms(u, mult, grid, cfg).residual


def energy_report(u, mult, grid, cfg):
    terms = identity_terms(u, mult, grid, cfg)
    direct, volume, boundary = terms.direct, terms.volume, terms.boundary
    totals = proof_totals(u, grid, cfg)
    report = EnergyReport(
        E_direct=direct,
        volume_term=volume,
        boundary_term=boundary,
        ibp_residual=terms.residual,
        min_volume_integrand=totals.min_volume_integrand,
        min_boundary_gap=totals.min_boundary_gap,
    )
    logger.debug(f"📊 E={direct:.6e}, volume={volume:.6e}, boundary={boundary:.6e}")
    return report


def integrand_table_columns(u, mult, grid, cfg):
    """Node arrays for the integrand dump: direct and expanded volume densities."""
    metric = ChartMetric.on_grid(grid, cfg)
    return {
        'direct': energy_integrand(u, mult, grid, cfg, metric),
        'expanded': expanded_volume_integrand(u, mult, grid, cfg, metric),
    }
