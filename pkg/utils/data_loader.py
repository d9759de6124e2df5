# ============================================
# FILE: utils/data_loader.py
# ============================================
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from analysis.modes import mode_numbers
from models.errors import ShapeMismatchError

logger = logging.getLogger(__name__)


def write_table(frame, path):
    """Header line, then whitespace-separated numeric rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep=' ', index=False, float_format='%.17g')
    logger.info(f"✅ Wrote {len(frame)} rows to {path}")
    return path


def read_table(path):
    # values are written with 17 significant digits; parse them back bit-exact
    return pd.read_csv(path, sep=r'\s+', float_precision='round_trip')


class FieldTables:
    """Tabular node format for fields on one grid.

    Volume tables have columns r [theta] phi <value>; boundary tables
    [theta] phi <value>; mode tables m r [theta] re im.
    """

    def __init__(self, grid):
        self.grid = grid

    @property
    def _chart_columns(self):
        return ['r', 'phi'] if self.grid.n == 2 else ['r', 'theta', 'phi']

    @property
    def _boundary_columns(self):
        return ['phi'] if self.grid.n == 2 else ['theta', 'phi']

    def _volume_coordinates(self):
        grid = self.grid
        axes = [grid.r] if grid.n == 2 else [grid.r, grid.theta]
        mesh = np.meshgrid(*axes, grid.phi, indexing='ij')
        return {name: m.ravel() for name, m in zip(self._chart_columns, mesh)}

    def _boundary_coordinates(self):
        grid = self.grid
        if grid.n == 2:
            return {'phi': grid.phi.copy()}
        tt, pp = np.meshgrid(grid.theta, grid.phi, indexing='ij')
        return {'theta': tt.ravel(), 'phi': pp.ravel()}

    # ------------------------------------------------------------------
    def field_frame(self, values, column='u'):
        values = np.asarray(values, dtype=float)
        if values.shape != self.grid.field_shape:
            raise ShapeMismatchError(f"field shape {values.shape} != {self.grid.field_shape}")
        frame = pd.DataFrame(self._volume_coordinates())
        frame[column] = values.ravel()
        return frame

    def fields_frame(self, columns):
        """Several node arrays side by side, e.g. integrand dumps."""
        frame = pd.DataFrame(self._volume_coordinates())
        for name, values in columns.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.grid.field_shape:
                raise ShapeMismatchError(f"column {name}: shape {values.shape} != {self.grid.field_shape}")
            frame[name] = values.ravel()
        return frame

    def boundary_frame(self, values, column='tau'):
        values = np.asarray(values, dtype=float)
        expected = self.grid.boundary_shape + (self.grid.n_phi,)
        if values.shape != expected:
            raise ShapeMismatchError(f"boundary shape {values.shape} != {expected}")
        frame = pd.DataFrame(self._boundary_coordinates())
        frame[column] = values.ravel()
        return frame

    def mode_frame(self, modes):
        """Per-mode complex samples; ``modes`` has the mode index last (m = -M..M)."""
        grid = self.grid
        modes = np.asarray(modes, dtype=complex)
        M = (modes.shape[-1] - 1) // 2
        axes = [grid.r] if grid.n == 2 else [grid.r, grid.theta]
        mesh = np.meshgrid(*axes, indexing='ij')
        frames = []
        for slot, m in enumerate(mode_numbers(M)):
            frame = pd.DataFrame({'m': int(m)}, index=range(grid.size))
            for name, coords in zip(self._chart_columns[:-1], mesh):
                frame[name] = coords.ravel()
            frame['re'] = modes[..., slot].real.ravel()
            frame['im'] = modes[..., slot].imag.ravel()
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    # ------------------------------------------------------------------
    def _values_from(self, frame, keys, column, shape, path):
        missing = [c for c in keys + [column] if c not in frame.columns]
        if missing:
            raise ShapeMismatchError(f"{path}: missing columns {missing}")
        if len(frame) != int(np.prod(shape)):
            raise ShapeMismatchError(f"{path}: {len(frame)} rows, grid needs {int(np.prod(shape))}")
        frame = frame.sort_values(keys, kind='stable')
        values = frame[column].to_numpy(dtype=float).reshape(shape)
        return frame, values

    def read_field(self, path, column='f'):
        """Volume samples from a node table, in ``grid.field_shape``."""
        frame = read_table(path)
        frame, values = self._values_from(frame, self._chart_columns, column, self.grid.field_shape, path)
        expected = self._volume_coordinates()
        for name in self._chart_columns:
            if not np.allclose(frame[name].to_numpy(), expected[name], atol=1e-9):
                raise ShapeMismatchError(f"{path}: column {name} does not match the grid nodes")
        logger.info(f"✅ Loaded {column} from {path}")
        return values

    def read_boundary(self, path, column='tau'):
        frame = read_table(path)
        shape = self.grid.boundary_shape + (self.grid.n_phi,)
        frame, values = self._values_from(frame, self._boundary_columns, column, shape, path)
        expected = self._boundary_coordinates()
        for name in self._boundary_columns:
            if not np.allclose(frame[name].to_numpy(), expected[name], atol=1e-9):
                raise ShapeMismatchError(f"{path}: column {name} does not match the boundary nodes")
        logger.info(f"✅ Loaded {column} from {path}")
        return values
