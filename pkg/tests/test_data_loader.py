import numpy as np
import pytest

from models.errors import ConfigError, ShapeMismatchError
from models.run_config import RunConfig
from utils.data_loader import FieldTables, read_table, write_table
from utils.preprocessor import ProblemPreprocessor


def test_field_table_layout(tmp_path, ball_grid):
    values = np.arange(np.prod(ball_grid.field_shape), dtype=float).reshape(ball_grid.field_shape)
    path = write_table(FieldTables(ball_grid).field_frame(values), tmp_path / 'u.txt')
    frame = read_table(path)
    assert list(frame.columns) == ['r', 'theta', 'phi', 'u']
    assert len(frame) == values.size
    # phi varies fastest
    assert frame['phi'].iloc[1] == pytest.approx(ball_grid.h_phi)


def test_read_field_accepts_shuffled_rows(tmp_path, disk_grid, rng):
    values = rng.standard_normal(disk_grid.field_shape)
    frame = FieldTables(disk_grid).field_frame(values, column='f').sample(frac=1.0, random_state=0)
    write_table(frame, tmp_path / 'f.txt')
    np.testing.assert_array_equal(FieldTables(disk_grid).read_field(tmp_path / 'f.txt'), values)


def test_written_values_read_back_bit_exact(tmp_path, ball_grid, rng):
    values = rng.standard_normal(ball_grid.field_shape) * np.logspace(-8, 8, ball_grid.n_phi)
    path = write_table(FieldTables(ball_grid).field_frame(values), tmp_path / 'u.txt')
    read = read_table(path)['u'].to_numpy().reshape(ball_grid.field_shape)
    assert np.array_equal(read, values)


def test_read_field_rejects_other_grid(tmp_path, disk_grid, disk_cfg):
    from utils.grid import build_grid

    other = build_grid(disk_cfg, 40, n_phi=disk_grid.n_phi)
    write_table(FieldTables(other).field_frame(np.zeros(other.field_shape), column='f'), tmp_path / 'f.txt')
    with pytest.raises(ShapeMismatchError):
        FieldTables(disk_grid).read_field(tmp_path / 'f.txt')


def test_boundary_and_mode_tables(ball_grid):
    tables = FieldTables(ball_grid)
    boundary = tables.boundary_frame(np.ones(ball_grid.boundary_shape + (ball_grid.n_phi,)))
    assert list(boundary.columns) == ['theta', 'phi', 'tau']
    modes = np.zeros(ball_grid.shape + (5,), dtype=complex)
    frame = tables.mode_frame(modes)
    assert list(frame.columns) == ['m', 'r', 'theta', 're', 'im']
    assert sorted(frame['m'].unique()) == [-2, -1, 0, 1, 2]
    with pytest.raises(ShapeMismatchError):
        tables.field_frame(np.zeros(3))


def test_preprocessor_reads_tabular_data(tmp_path, disk_grid, rng):
    f = rng.standard_normal(disk_grid.field_shape)
    tables = FieldTables(disk_grid)
    write_table(tables.field_frame(f, column='f'), tmp_path / 'f.txt')
    write_table(tables.boundary_frame(np.full(disk_grid.n_phi, 0.5)), tmp_path / 'tau.txt')
    run = RunConfig(n=2, omega=2.0, resolution='32', M=4, n_phi=16, preset=None,
                    source_file=str(tmp_path / 'f.txt'), boundary_file=str(tmp_path / 'tau.txt'))
    problem, exact = ProblemPreprocessor(run).prepare()
    assert exact is None
    np.testing.assert_array_equal(problem.f, f)
    np.testing.assert_allclose(problem.tau, 0.5)


def test_preprocessor_presets():
    run = RunConfig(n=2, omega=2.0, resolution='32', M=3, preset='manufactured-3')
    preprocessor = ProblemPreprocessor(run)
    assert preprocessor.n_phi == 32
    problem, exact = preprocessor.prepare(resolution=64)
    assert problem.grid.J == 64
    assert exact.max_mode == 3
    assert problem.name == 'run:manufactured-3'


def test_preprocessor_unknown_preset():
    run = RunConfig(preset='gaussian')
    with pytest.raises(ConfigError):
        ProblemPreprocessor(run).prepare()
