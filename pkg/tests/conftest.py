import numpy as np
import pytest

from models.helical import HelicalConfig
from utils.grid import build_grid


@pytest.fixture
def disk_cfg():
    return HelicalConfig(n=2, omega=2.0, R=1.0, sign=1)


@pytest.fixture
def ball_cfg():
    return HelicalConfig(n=3, omega=2.0, R=1.0, sign=1)


@pytest.fixture
def disk_grid(disk_cfg):
    return build_grid(disk_cfg, 32, n_phi=16)


@pytest.fixture
def ball_grid(ball_cfg):
    return build_grid(ball_cfg, (16, 16), n_phi=16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def write_config(tmp_path):
    """Write a KEY=value run file under tmp_path; OUTPUT_DIR defaults to tmp_path/out."""

    def _write(name='run.env', **entries):
        entries.setdefault('OUTPUT_DIR', str(tmp_path / 'out'))
        path = tmp_path / name
        path.write_text(''.join(f"{key}={value}\n" for key, value in entries.items()))
        return path

    return _write
