# ============================================
# FILE: utils/quadrature.py
# ============================================
"""Composite trapezoid rules over the chart of the ball and of its boundary.

Integrands are densities: the chart Jacobian and sigma are already inside
the samples, so quadrature is plain coordinate integration dr dphi (n=2)
or dr dtheta dphi (n=3). phi is periodic and uses the equal-weight rule.
"""
import numpy as np
from scipy.integrate import trapezoid

from analysis.reduction import conormal_spherical
from models.errors import ShapeMismatchError
from utils.calculus import chart_divergence


def _periodic_sum(samples, grid):
    return np.sum(samples, axis=-1) * grid.h_phi


def volume_quadrature(density_samples, grid):
    """Integral of a density over B.

    Accepts samples on ``grid.field_shape`` or phi-independent samples on
    ``grid.shape`` (integrated against 2 pi).
    """
    samples = np.asarray(density_samples)
    if samples.shape == grid.shape:
        reduced = samples * (2.0 * np.pi)
    elif samples.shape == grid.field_shape:
        reduced = _periodic_sum(samples, grid)
    else:
        raise ShapeMismatchError(
            f"density shape {samples.shape} matches neither {grid.shape} nor {grid.field_shape}"
        )
    if grid.n == 3:
        reduced = trapezoid(reduced, dx=grid.h_theta, axis=1)
    value = trapezoid(reduced, dx=grid.h_r, axis=0)
    return value.item() if np.ndim(value) == 0 else value


def boundary_quadrature(density_samples, grid):
    """Integral over the boundary in the (phi) or (theta, phi) parametrisation."""
    samples = np.asarray(density_samples)
    expected = grid.boundary_shape + (grid.n_phi,)
    if samples.shape == grid.boundary_shape:
        reduced = samples * (2.0 * np.pi)
    elif samples.shape == expected:
        reduced = _periodic_sum(samples, grid)
    else:
        raise ShapeMismatchError(f"boundary density shape {samples.shape} != {expected}")
    if grid.n == 3:
        reduced = trapezoid(reduced, dx=grid.h_theta, axis=0)
    value = np.asarray(reduced)
    return value.item() if value.ndim == 0 else value


def boundary_conormals(grid, cfg):
    """Co-normal components at every boundary node, shape boundary_shape + (n_phi, n)."""
    if grid.n == 2:
        rows = [conormal_spherical((grid.R, phi), cfg) for phi in grid.phi]
        return np.asarray(rows)
    rows = [
        [conormal_spherical((grid.R, theta, phi), cfg) for phi in grid.phi]
        for theta in grid.theta
    ]
    return np.asarray(rows)


def stokes_residual(V, grid, cfg):
    """|int_B d_a V^a - int_dB n_a V^a| for a vector density in chart components."""
    components = [np.asarray(c, dtype=float) for c in V]
    if len(components) != grid.n:
        raise ShapeMismatchError(f"expected {grid.n} components, got {len(components)}")
    for comp in components:
        if comp.shape != grid.field_shape:
            raise ShapeMismatchError(f"component shape {comp.shape} != {grid.field_shape}")

    divergence = chart_divergence(components, grid)
    volume = volume_quadrature(divergence, grid)

    conormal = boundary_conormals(grid, cfg)
    on_boundary = np.stack([comp[-1] for comp in components], axis=-1)
    flux = np.sum(conormal * on_boundary, axis=-1)
    boundary = boundary_quadrature(flux, grid)
    return abs(volume - boundary)


def sigma_mean(values, grid):
    """sigma-weighted mean over B of a real field (grid.field_shape) or mode (grid.shape)."""
    weights = grid.sigma_weights
    values = np.asarray(values)
    if values.shape == grid.field_shape:
        weights = weights[..., None] * np.ones(grid.n_phi)
    return np.sum(weights * values) / np.sum(weights)
