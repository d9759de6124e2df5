import numpy as np
import pytest

from models.errors import ShapeMismatchError
from solver.nullspace import bordered_system, constant_cosine, node_border, null_space_probe, sigma_border
from utils.grid import build_grid
from utils.operators import assemble_mode_system, boundary_shift_column


def test_constant_cosine():
    assert constant_cosine(np.full(10, -3.0)) == pytest.approx(1.0)
    assert constant_cosine(np.array([1.0, -1.0])) == pytest.approx(0.0)
    assert constant_cosine(np.zeros(4)) == 0.0


@pytest.mark.parametrize('grid_name, cfg_name', [('disk_grid', 'disk_cfg'), ('ball_grid', 'ball_cfg')])
def test_axisymmetric_mode_has_one_constant_null_vector(request, grid_name, cfg_name):
    grid, cfg = request.getfixturevalue(grid_name), request.getfixturevalue(cfg_name)
    spectrum = null_space_probe(assemble_mode_system(0, grid, cfg))
    assert spectrum.method == 'dense'
    assert spectrum.near_null_count == 1
    assert spectrum.constant_cosine >= 0.999
    assert not spectrum.bordered


@pytest.mark.parametrize('grid_name, cfg_name', [('disk_grid', 'disk_cfg'), ('ball_grid', 'ball_cfg')])
@pytest.mark.parametrize('m', [1, 2])
def test_nonzero_modes_are_regular(request, grid_name, cfg_name, m):
    grid, cfg = request.getfixturevalue(grid_name), request.getfixturevalue(cfg_name)
    spectrum = null_space_probe(assemble_mode_system(m, grid, cfg))
    assert spectrum.near_null_count == 0


@pytest.mark.parametrize('cfg_name, resolution', [('disk_cfg', 128), ('ball_cfg', (32, 32))])
def test_sigma_border_removes_the_null_vector(request, cfg_name, resolution):
    cfg = request.getfixturevalue(cfg_name)
    grid = build_grid(cfg, resolution, n_phi=8)
    operator = assemble_mode_system(0, grid, cfg)
    spectrum = null_space_probe(operator, matrix=bordered_system(operator, sigma_border(grid), balance=True))
    assert spectrum.bordered
    assert spectrum.near_null_count == 0
    assert spectrum.ratios[0] > 10 * spectrum.threshold_ratio


def test_bordered_system_layout(disk_grid, disk_cfg):
    operator = assemble_mode_system(0, disk_grid, disk_cfg)
    before = operator.matrix.copy()
    matrix = bordered_system(operator, node_border(disk_grid, 5)).toarray()
    assert matrix.shape == (operator.size + 1, operator.size + 1)
    np.testing.assert_array_equal(matrix[:-1, :-1], before.toarray())
    np.testing.assert_array_equal(matrix[:-1, -1], boundary_shift_column(operator))
    assert matrix[-1, 5] == 1.0 and np.count_nonzero(matrix[-1]) == 1
    assert (operator.matrix != before).nnz == 0


def test_balanced_border_keeps_the_solution(disk_grid, disk_cfg, rng):
    operator = assemble_mode_system(0, disk_grid, disk_cfg)
    b = np.append(rng.standard_normal(operator.size), 0.0)
    plain = np.linalg.solve(bordered_system(operator, sigma_border(disk_grid)).toarray(), b)
    balanced = np.linalg.solve(bordered_system(operator, sigma_border(disk_grid), balance=True).toarray(), b)
    np.testing.assert_allclose(balanced[:-1], plain[:-1], rtol=1e-8, atol=1e-10)


def test_border_row_shape_checked(disk_grid, disk_cfg):
    operator = assemble_mode_system(0, disk_grid, disk_cfg)
    with pytest.raises(ShapeMismatchError):
        bordered_system(operator, np.ones(3))


def test_sparse_spectrum_agrees_with_dense(disk_grid, disk_cfg):
    operator = assemble_mode_system(0, disk_grid, disk_cfg)
    dense = null_space_probe(operator, method='dense')
    sparse = null_space_probe(operator, method='sparse')
    assert sparse.converged
    assert sparse.near_null_count == 1
    assert sparse.largest_singular_value == pytest.approx(dense.largest_singular_value, rel=1e-6)
    assert sparse.ratios[1] == pytest.approx(dense.ratios[1], rel=1e-4)
