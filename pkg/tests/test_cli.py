import json

import numpy as np
import pytest

from api.cli import main
from utils.data_loader import read_table


@pytest.fixture
def disk_run(write_config):
    def _make(**entries):
        base = dict(N=2, OMEGA=2.0, RESOLUTION=32, M=2, PRESET='constant')
        base.update(entries)
        return write_config(**base)
    return _make


def _report(tmp_path):
    return json.loads((tmp_path / 'out' / 'report.json').read_text())


def test_solve_writes_field_modes_and_report(tmp_path, disk_run):
    assert main(['solve', '--config', str(disk_run())]) == 0

    field = read_table(tmp_path / 'out' / 'field.txt')
    assert list(field.columns) == ['r', 'phi', 'u']
    offset = field['u'] - field['r'] ** 2 / 4
    assert np.ptp(offset) < 1e-8

    modes = read_table(tmp_path / 'out' / 'modes.txt')
    assert sorted(modes['m'].unique()) == [-2, -1, 0, 1, 2]

    report = _report(tmp_path)
    assert report['status'] == 'ok'
    assert report['light_cylinder_interior'] is True
    assert len(report['modes']) == 5
    assert [entry['m'] for entry in report['nullspace']] == [0, 0, 1, 2]
    assert report['nullspace'][0]['near_null_count'] == 1


def test_incompatible_data_fails_with_report(tmp_path, disk_run):
    assert main(['solve', '--config', str(disk_run(ZERO_BOUNDARY='true'))]) == 1
    report = _report(tmp_path)
    assert report['status'] == 'failed'
    assert 'IncompatibleData' in report['error']
    assert not (tmp_path / 'out' / 'field.txt').exists()


def test_override_flag_accepts_incompatible_data(tmp_path, disk_run):
    path = disk_run(ZERO_BOUNDARY='true')
    assert main(['solve', '--config', str(path), '--allow-incompatible']) == 0
    report = _report(tmp_path)
    assert report['override_applied'] is True
    assert report['tau_shift'] == pytest.approx(-0.5, abs=1e-8)


def test_zero_preset_gives_zero_field(tmp_path, disk_run):
    assert main(['solve', '--config', str(disk_run(PRESET='zero'))]) == 0
    field = read_table(tmp_path / 'out' / 'field.txt')
    assert np.all(field['u'] == 0)


def test_verify_inequality_is_reproducible(tmp_path, disk_run):
    path = disk_run(SAMPLES=20000)
    assert main(['verify', '--config', str(path), '--suite', 'inequality', '--seed', '7']) == 0
    first = _report(tmp_path)
    assert first['passed'] and first['seed'] == 7
    assert main(['verify', '--config', str(path), '--suite', 'inequality', '--seed', '7']) == 0
    assert _report(tmp_path) == first


def test_convergence_command(tmp_path, disk_run):
    path = disk_run(PRESET='manufactured-4', M=4, REFINE=3)
    assert main(['convergence', '--config', str(path)]) == 0
    table = read_table(tmp_path / 'out' / 'convergence.txt')
    assert len(table) == 3
    assert _report(tmp_path)['final_order'] >= 1.8


@pytest.mark.parametrize('argv_tail, entries', [
    (['verify', '--suite', 'nope'], {}),
    (['verify'], {}),
    (['solve'], {'OMEGA': '-2'}),
    (['convergence'], {'PRESET': 'zero'}),
])
def test_usage_errors_exit_two(disk_run, argv_tail, entries):
    path = disk_run(**entries)
    assert main(argv_tail[:1] + ['--config', str(path)] + argv_tail[1:]) == 2


def test_missing_config_exits_two(tmp_path):
    assert main(['solve', '--config', str(tmp_path / 'missing.env')]) == 2
