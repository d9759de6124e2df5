# ============================================
# FILE: utils/calculus.py
# ============================================
"""Chart derivatives of sampled fields.

Fields live on ``grid.field_shape`` (phi last). Radial and polar
derivatives use second-order central differences with second-order
one-sided differences at the ends; phi derivatives are spectral.
"""
import numpy as np

from analysis.modes import differentiate_phi, radial_flux_divergence, theta_flux_divergence


def d_r(values, grid):
    return np.gradient(values, grid.h_r, axis=0, edge_order=2)


def d_theta(values, grid):
    if grid.n == 2:
        return np.zeros_like(values)
    return np.gradient(values, grid.h_theta, axis=1, edge_order=2)


def d_phi(values, grid, order=1):
    return differentiate_phi(values, order=order)


def chart_gradient(values, grid):
    """Chart components: (u_r, u_phi) for n = 2, (u_r, u_theta, u_phi) for n = 3."""
    values = np.asarray(values, dtype=float)
    if grid.n == 2:
        return d_r(values, grid), d_phi(values, grid)
    return d_r(values, grid), d_theta(values, grid), d_phi(values, grid)


def node_coordinates(grid):
    """(r, theta) broadcast against ``grid.field_shape``."""
    r = grid.r_nodes[..., None]
    theta = grid.theta_nodes[..., None]
    return r, theta


def cylindrical_gradient(values, grid):
    """(u_rho, u_z, u_phi); u_z is None for n = 2.

    For n = 3 the chain rule gives u_rho = sin(theta) u_r + cos(theta) u_theta / r
    and u_z = cos(theta) u_r - sin(theta) u_theta / r. At r = 0 the theta
    term is dropped (u_theta vanishes there for regular fields).
    """
    if grid.n == 2:
        u_r, u_phi = chart_gradient(values, grid)
        return u_r, None, u_phi

    u_r, u_theta, u_phi = chart_gradient(values, grid)
    r, theta = node_coordinates(grid)
    s, c = np.sin(theta), np.cos(theta)
    with np.errstate(divide='ignore', invalid='ignore'):
        scaled = np.where(r > 0, u_theta / np.where(r > 0, r, 1.0), 0.0)
    return s * u_r + c * scaled, c * u_r - s * scaled, u_phi


def extrapolate_axis(values, grid):
    """Overwrite axis entries with quadratic extrapolation from the neighbours.

    Used for densities that are smooth in the chart but carry removable
    1/rho factors. n = 2: the r = 0 row. n = 3: the theta = 0, pi columns
    first, then the r = 0 row.
    """
    out = np.array(values, copy=True)
    if grid.n == 3:
        out[:, 0] = 3.0 * out[:, 1] - 3.0 * out[:, 2] + out[:, 3]
        out[:, -1] = 3.0 * out[:, -2] - 3.0 * out[:, -3] + out[:, -4]
    out[0] = 3.0 * out[1] - 3.0 * out[2] + out[3]
    return out


def extrapolate_poles(values, grid):
    """Quadratic extrapolation to theta = 0, pi of a boundary array (n = 3 only)."""
    out = np.array(values, copy=True)
    if grid.n == 3:
        out[0] = 3.0 * out[1] - 3.0 * out[2] + out[3]
        out[-1] = 3.0 * out[-2] - 3.0 * out[-3] + out[-4]
    return out


def _extend_ends(interior, axis):
    """Append quadratic extrapolations at both ends of ``axis``."""
    v = np.moveaxis(interior, axis, 0)
    first = 3.0 * v[0] - 3.0 * v[1] + v[2]
    last = 3.0 * v[-1] - 3.0 * v[-2] + v[-3]
    return np.moveaxis(np.concatenate([first[None], v, last[None]]), 0, axis)


def staggered_divergence(values, grid):
    """d_r(h^{rr} v_r) (+ d_theta(sin(theta) v_theta)) by staggered flux differences.

    Fluxes sit at half nodes; the end nodes of each direction are
    extrapolated quadratically.
    """
    values = np.asarray(values, dtype=float)
    total = _extend_ends(radial_flux_divergence(values, grid, grid.cfg), axis=0)
    if grid.n == 3:
        total = total + _extend_ends(theta_flux_divergence(values, grid), axis=1)
    return total


def chart_divergence(components, grid):
    """d_r V^r (+ d_theta V^theta) + d_phi V^phi of a vector density."""
    if grid.n == 2:
        v_r, v_phi = components
        return d_r(v_r, grid) + d_phi(v_phi, grid)
    v_r, v_theta, v_phi = components
    return d_r(v_r, grid) + d_theta(v_theta, grid) + d_phi(v_phi, grid)
