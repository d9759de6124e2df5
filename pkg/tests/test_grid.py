import numpy as np
import pytest

from models.errors import DomainError, GridResolutionError
from models.helical import HelicalConfig
from utils.grid import build_grid, parse_resolution


@pytest.mark.parametrize('value, n, expected', [
    (64, 2, [64]),
    ('64', 2, [64]),
    ((48, 32), 3, [48, 32]),
    ('48x32', 3, [48, 32]),
])
def test_parse_resolution(value, n, expected):
    assert parse_resolution(value, n) == expected


def test_parse_resolution_dimension_mismatch():
    with pytest.raises(DomainError):
        parse_resolution('48x32', 2)
    with pytest.raises(DomainError):
        parse_resolution(48, 3)


def test_grid_below_minimum_resolution(disk_cfg):
    with pytest.raises(GridResolutionError):
        build_grid(disk_cfg, 8)


def test_light_cylinder_must_be_resolved():
    cfg = HelicalConfig(n=2, omega=20.0, R=1.0)
    with pytest.raises(GridResolutionError):
        build_grid(cfg, 16)


def test_disk_grid_layout(disk_grid):
    assert disk_grid.shape == (33,)
    assert disk_grid.field_shape == (33, 16)
    assert disk_grid.boundary_shape == ()
    assert disk_grid.r[-1] == 1.0
    assert list(disk_grid.boundary_indices) == [32]


def test_ball_grid_layout(ball_grid):
    assert ball_grid.shape == (17, 17)
    assert ball_grid.boundary_shape == (17,)
    assert np.all(ball_grid.rho[:, 0] == 0.0)
    assert np.all(ball_grid.rho[:, -1] == 0.0)
    assert ball_grid.axis_mask.sum() == 17 + 2 * 16


def test_sigma_weights_integrate_the_ball(disk_grid, ball_grid):
    # trapezoid is exact for the linear density rho
    assert 2 * np.pi * disk_grid.sigma_weights.sum() == pytest.approx(np.pi)
    assert 2 * np.pi * ball_grid.sigma_weights.sum() == pytest.approx(4 * np.pi / 3, rel=1e-2)
