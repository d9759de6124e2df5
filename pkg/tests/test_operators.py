import numpy as np
import pytest

from models.errors import DomainError, ShapeMismatchError
from models.helical import HelicalConfig
from utils.operators import assemble_mode_system, boundary_shift_column, matrix_free_apply


@pytest.mark.parametrize('m', [0, 1, 2])
def test_disk_matrix_matches_matrix_free_operator(disk_grid, disk_cfg, rng, m):
    values = rng.standard_normal(disk_grid.shape) + 1j * rng.standard_normal(disk_grid.shape)
    operator = assemble_mode_system(m, disk_grid, disk_cfg)
    np.testing.assert_allclose(operator.apply(values), matrix_free_apply(values, m, disk_grid, disk_cfg),
                               rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize('m', [0, 1, 3])
def test_ball_matrix_matches_matrix_free_operator(ball_grid, ball_cfg, rng, m):
    values = rng.standard_normal(ball_grid.shape) + 1j * rng.standard_normal(ball_grid.shape)
    operator = assemble_mode_system(m, ball_grid, ball_cfg)
    np.testing.assert_allclose(operator.apply(values), matrix_free_apply(values, m, ball_grid, ball_cfg),
                               rtol=1e-12, atol=1e-9)


def test_constants_annihilated_for_m0(ball_grid, ball_cfg):
    operator = assemble_mode_system(0, ball_grid, ball_cfg)
    np.testing.assert_allclose(operator.apply(np.ones(ball_grid.shape)), 0.0, atol=1e-10)


def test_sommerfeld_row_coefficients(disk_grid, disk_cfg):
    operator = assemble_mode_system(2, disk_grid, disk_cfg)
    row = operator.matrix.tocsr()[disk_grid.J].toarray().ravel()
    h = disk_grid.h_r
    assert row[-1] == pytest.approx(1.5 / h + 2j * disk_cfg.omega)
    assert row[-2] == pytest.approx(-2.0 / h)
    assert row[-3] == pytest.approx(0.5 / h)


def test_ingoing_branch_flips_the_phase(disk_grid):
    cfg = HelicalConfig(n=2, omega=2.0, R=1.0, sign=-1)
    row = assemble_mode_system(1, disk_grid, cfg).matrix.tocsr()[disk_grid.J].toarray().ravel()
    assert row[-1].imag == pytest.approx(-cfg.omega)


def test_stencil_is_local(disk_grid, disk_cfg, ball_grid, ball_cfg):
    assert assemble_mode_system(1, disk_grid, disk_cfg).max_row_nnz() == 3
    assert assemble_mode_system(1, ball_grid, ball_cfg).max_row_nnz() == 5
    assert assemble_mode_system(0, ball_grid, ball_cfg).max_row_nnz('boundary') == 3


def test_rhs_places_tau_on_boundary_rows(ball_grid, ball_cfg):
    operator = assemble_mode_system(1, ball_grid, ball_cfg)
    tau = np.arange(ball_grid.K + 1, dtype=float)
    b = operator.rhs(np.ones(ball_grid.shape), tau).reshape(ball_grid.shape)
    np.testing.assert_allclose(b[-1], tau)
    # |m| >= 1 regularity rows are homogeneous
    assert np.all(b[0] == 0)
    assert np.all(b[:, 0] == 0)


def test_rhs_shape_checked(disk_grid, disk_cfg):
    operator = assemble_mode_system(0, disk_grid, disk_cfg)
    with pytest.raises(ShapeMismatchError):
        operator.rhs(np.zeros(5), np.asarray(0.0))


def test_dimension_mismatch_rejected(disk_grid, ball_cfg):
    with pytest.raises(DomainError):
        assemble_mode_system(0, disk_grid, ball_cfg)


def test_shift_column_and_triplet_dump(tmp_path, disk_grid, disk_cfg):
    operator = assemble_mode_system(1, disk_grid, disk_cfg)
    column = boundary_shift_column(operator)
    assert column.sum() == 1.0 and column[-1] == 1.0

    path = tmp_path / 'm1.txt'
    operator.dump(path)
    lines = path.read_text().splitlines()
    assert lines[0] == 'row col re im'
    assert len(lines) == operator.matrix.nnz + 1
