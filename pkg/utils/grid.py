# ============================================
# FILE: utils/grid.py
# ============================================
import logging

import numpy as np

import config
from analysis.reduction import chart_volume_density
from models.errors import DomainError, GridResolutionError

logger = logging.getLogger(__name__)


class Grid:
    """Node grid on the ball.

    n = 2: radial nodes r_j = j h_r, j = 0..J, on [0, R].
    n = 3: tensor nodes (r_j, theta_k) on [0, R] x [0, pi], k = 0..K.
    Both carry a uniform periodic phi grid of n_phi points for synthesis.
    Mode arrays have shape ``grid.shape``; real fields ``grid.field_shape``
    with phi as the last axis. ``u[-1]`` is always the boundary r = R.
    """

    def __init__(self, cfg, J, K=None, n_phi=None):
        self.cfg = cfg
        self.n = cfg.n
        self.R = cfg.R
        self.J = int(J)
        self.K = int(K) if K is not None else None
        self.n_phi = int(n_phi or config.DEFAULT_N_PHI)

        self.r = np.linspace(0.0, self.R, self.J + 1)
        self.r[-1] = self.R
        self.h_r = self.R / self.J
        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        self.h_phi = 2.0 * np.pi / self.n_phi

        if self.n == 2:
            self.theta = None
            self.h_theta = None
            self.shape = (self.J + 1,)
            self.rho = self.r.copy()
            self.z = None
            self.theta_nodes = np.full(self.shape, 0.5 * np.pi)
        else:
            self.theta = np.linspace(0.0, np.pi, self.K + 1)
            self.h_theta = np.pi / self.K
            self.shape = (self.J + 1, self.K + 1)
            rr, tt = np.meshgrid(self.r, self.theta, indexing='ij')
            self.rho = rr * np.sin(tt)
            self.z = rr * np.cos(tt)
            # exact zeros on the axis instead of r*sin(pi) roundoff
            self.rho[:, 0] = 0.0
            self.rho[:, -1] = 0.0
            self.theta_nodes = tt

        self.field_shape = self.shape + (self.n_phi,)
        self.size = int(np.prod(self.shape))

    # ------------------------------------------------------------------
    @property
    def r_nodes(self):
        """Radius at every node, shape ``self.shape``."""
        if self.n == 2:
            return self.r
        return np.broadcast_to(self.r[:, None], self.shape)

    @property
    def boundary_shape(self):
        return self.shape[1:]

    @property
    def spacing(self):
        """Dimensionless mesh size max(h_r / R, h_theta / pi)."""
        if self.n == 2:
            return self.h_r / self.R
        return max(self.h_r / self.R, self.h_theta / np.pi)

    @property
    def light_cylinder_interior(self):
        return self.cfg.crosses_light_cylinder

    @property
    def axis_mask(self):
        """Nodes on rho = 0 (the axis and, for n = 3, the origin)."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[0] = True
        if self.n == 3:
            mask[:, 0] = True
            mask[:, -1] = True
        return mask

    @property
    def boundary_pole_mask(self):
        mask = np.zeros(self.boundary_shape, dtype=bool)
        if self.n == 3:
            mask[0] = True
            mask[-1] = True
        return mask

    def trapezoid_weights(self, nodes, spacing):
        weights = np.full(nodes.shape, spacing)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return weights

    @property
    def volume_density(self):
        """sigma in the chart, i.e. rho (n=2) or r^2 sin(theta) (n=3)."""
        density = chart_volume_density(self.r_nodes, self.theta_nodes, self.cfg)
        return np.where(self.axis_mask, 0.0, density)

    @property
    def boundary_density(self):
        """sigma on the boundary in the (phi) or (theta, phi) parametrisation."""
        if self.n == 2:
            return np.asarray(self.R)
        density = self.R ** 2 * np.sin(self.theta)
        density[0] = 0.0
        density[-1] = 0.0
        return density

    @property
    def chart_weights(self):
        """Trapezoid weights of the (r) or (r, theta) chart, without density."""
        w_r = self.trapezoid_weights(self.r, self.h_r)
        if self.n == 2:
            return w_r
        return np.outer(w_r, self.trapezoid_weights(self.theta, self.h_theta))

    @property
    def boundary_weights(self):
        if self.n == 2:
            return np.asarray(1.0)
        return self.trapezoid_weights(self.theta, self.h_theta)

    @property
    def sigma_weights(self):
        """Weights of int_B sigma (.) per unit phi, used for the gauge."""
        return self.chart_weights * self.volume_density

    def flat_index(self, *index):
        return int(np.ravel_multi_index(index, self.shape))

    @property
    def boundary_indices(self):
        """Flat indices of the r = R nodes."""
        if self.n == 2:
            return np.array([self.J])
        return np.ravel_multi_index(
            (np.full(self.K + 1, self.J), np.arange(self.K + 1)), self.shape
        )

    def radial_nodes_across_cylinder(self):
        """(#nodes inside, #nodes outside) the light cylinder along a radial line."""
        rc = self.cfg.light_cylinder_radius
        return int(np.sum(self.r < rc)), int(np.sum(self.r > rc))

    def describe(self):
        dims = f"{self.J + 1}" if self.n == 2 else f"{self.J + 1}x{self.K + 1}"
        return f"n={self.n} grid {dims} nodes, n_phi={self.n_phi}, R={self.R}"


def parse_resolution(resolution, n):
    """Accept 64, (64,), '64', (48, 32) or '48x32'."""
    if isinstance(resolution, str):
        parts = [int(p) for p in resolution.lower().split('x') if p.strip()]
    elif np.isscalar(resolution):
        parts = [int(resolution)]
    else:
        parts = [int(p) for p in resolution]
    if n == 2 and len(parts) != 1:
        raise DomainError(f"n=2 grids take one resolution, got {parts}")
    if n == 3 and len(parts) != 2:
        raise DomainError(f"n=3 grids take (J, K), got {parts}")
    return parts


def build_grid(cfg, resolution, n_phi=None):
    parts = parse_resolution(resolution, cfg.n)
    if min(parts) < config.MIN_RESOLUTION:
        raise GridResolutionError(
            f"resolution {parts} below the minimum of {config.MIN_RESOLUTION} nodes per dimension"
        )

    grid = Grid(cfg, *parts, n_phi=n_phi)

    if grid.light_cylinder_interior:
        inside, outside = grid.radial_nodes_across_cylinder()
        if min(inside, outside) < config.MIN_CYLINDER_NODES:
            raise GridResolutionError(
                f"light cylinder at r={cfg.light_cylinder_radius:.4g} resolved by "
                f"{inside}/{outside} radial nodes, need {config.MIN_CYLINDER_NODES} on each side"
            )
        logger.info(f"📊 {grid.describe()}, light cylinder interior at r={cfg.light_cylinder_radius:.4g}")
    else:
        logger.info(f"📊 {grid.describe()}, fully elliptic")

    if cfg.out_of_theory:
        logger.warning("⚠️ Omega*R = 1: boundary tangent to the light cylinder (out of theory)")
    return grid
