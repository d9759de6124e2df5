import numpy as np
import pytest

from models.errors import ShapeMismatchError
from models.helical import HelicalConfig
from utils.grid import build_grid
from utils.quadrature import (
    boundary_conormals,
    boundary_quadrature,
    sigma_mean,
    stokes_residual,
    volume_quadrature,
)


def test_disk_area_and_perimeter(disk_grid):
    assert volume_quadrature(disk_grid.volume_density, disk_grid) == pytest.approx(np.pi)
    assert boundary_quadrature(disk_grid.boundary_density, disk_grid) == pytest.approx(2 * np.pi)


def test_ball_volume_and_sphere_area(ball_cfg):
    grid = build_grid(ball_cfg, (64, 64), n_phi=8)
    assert volume_quadrature(grid.volume_density, grid) == pytest.approx(4 * np.pi / 3, rel=1e-3)
    assert boundary_quadrature(grid.boundary_density, grid) == pytest.approx(4 * np.pi, rel=1e-3)


def test_phi_dependent_samples_use_periodic_rule(disk_grid):
    density = disk_grid.volume_density[:, None] * (1.0 + np.cos(disk_grid.phi))
    assert volume_quadrature(density, disk_grid) == pytest.approx(np.pi)


def test_quadrature_rejects_wrong_shape(disk_grid):
    with pytest.raises(ShapeMismatchError):
        volume_quadrature(np.zeros(7), disk_grid)
    with pytest.raises(ShapeMismatchError):
        boundary_quadrature(np.zeros(3), disk_grid)


def test_conormals_on_every_boundary_node(ball_grid, ball_cfg):
    conormals = boundary_conormals(ball_grid, ball_cfg)
    assert conormals.shape == (ball_grid.K + 1, ball_grid.n_phi, 3)
    np.testing.assert_allclose(conormals[..., 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(conormals[..., 1:], 0.0, atol=1e-12)


def _disk_residual(J):
    cfg = HelicalConfig(n=2, omega=2.0, R=1.0)
    grid = build_grid(cfg, J, n_phi=8)
    r = grid.r[:, None]
    V = ((r + r ** 3) * (1.0 + np.cos(grid.phi)), np.zeros(grid.field_shape))
    return stokes_residual(V, grid, cfg)


def _ball_residual(resolution):
    cfg = HelicalConfig(n=3, omega=2.0, R=1.0)
    grid = build_grid(cfg, resolution, n_phi=8)
    r = grid.r_nodes[..., None]
    s = np.sin(grid.theta_nodes)[..., None]
    V = (
        np.broadcast_to(r ** 4 * s, grid.field_shape),
        np.zeros(grid.field_shape),
        np.broadcast_to(r ** 2 * np.cos(grid.phi), grid.field_shape),
    )
    return stokes_residual(V, grid, cfg)


def test_divergence_theorem_second_order_on_disk():
    coarse, fine = _disk_residual(32), _disk_residual(64)
    assert coarse / fine >= 3.5
    assert fine < 1e-2


def test_divergence_theorem_second_order_on_ball():
    coarse, fine = _ball_residual((16, 16)), _ball_residual((32, 32))
    assert coarse / fine >= 3.5


def test_sigma_mean_of_constant(ball_grid):
    assert sigma_mean(np.full(ball_grid.field_shape, 2.5), ball_grid) == pytest.approx(2.5)
    assert sigma_mean(np.full(ball_grid.shape, -1.0), ball_grid) == pytest.approx(-1.0)
