# ============================================
# FILE: utils/preprocessor.py
# ============================================
import logging

import numpy as np

import config
from models.errors import ConfigError
from models.problem import HelicalProblem
from utils.data_loader import FieldTables
from utils.fields import preset_data
from utils.grid import build_grid

logger = logging.getLogger(__name__)


class ProblemPreprocessor:
    """Turns a RunConfig into a HelicalProblem at a given resolution.

    Data come from tabular files when SOURCE_FILE is set, otherwise from the
    named preset. ``exact`` is the analytic solution when the preset has one.
    """

    def __init__(self, run):
        self.run = run
        self.cfg = run.helical

    @property
    def n_phi(self):
        return self.run.n_phi or max(config.DEFAULT_N_PHI, 2 * self.run.M + 2)

    def prepare(self, resolution=None):
        run = self.run
        resolution = run.resolution if resolution is None else resolution
        grid = build_grid(self.cfg, resolution, n_phi=self.n_phi)

        if run.source_file:
            tables = FieldTables(grid)
            f = tables.read_field(run.source_file, column='f')
            if run.boundary_file:
                tau = tables.read_boundary(run.boundary_file, column='tau')
            else:
                tau = np.zeros(grid.boundary_shape + (grid.n_phi,))
            exact = None
            name = run.name
        else:
            try:
                data = preset_data(
                    run.preset, self.cfg, grid, c=run.c, seed=run.seed, compatible=not run.zero_boundary
                )
            except ValueError as e:
                raise ConfigError(str(e)) from e
            f, tau, exact = data.f, data.tau, data.exact
            name = f"{run.name}:{run.preset}"

        problem = HelicalProblem(
            cfg=self.cfg,
            f=f,
            tau=tau,
            resolution=resolution,
            M=run.M,
            n_phi=grid.n_phi,
            name=name,
            metadata={'preset': run.preset, 'seed': run.seed},
        )
        logger.info(f"📊 Prepared {name} on {grid.describe()}")
        return problem, exact
