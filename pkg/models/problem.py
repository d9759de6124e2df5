# ============================================
# FILE: models/problem.py
# ============================================
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

import config
from models.errors import ShapeMismatchError
from models.helical import HelicalConfig


@dataclass
class ModeField:
    """One Fourier mode u_m of a field, sampled on ``grid.shape``."""

    m: int
    values: np.ndarray

    def __post_init__(self):
        self.m = int(self.m)
        self.values = np.asarray(self.values, dtype=complex)


@dataclass
class HelicalProblem:
    """Source f (un-weighted) over B and boundary data tau over the boundary.

    ``f`` has shape ``grid.field_shape`` and ``tau`` has shape
    ``grid.boundary_shape + (n_phi,)``; phi is the last axis of both.
    """

    cfg: HelicalConfig
    f: np.ndarray
    tau: np.ndarray
    resolution: tuple
    M: int = config.DEFAULT_MODES
    n_phi: Optional[int] = None
    name: str = 'problem'
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        from utils.grid import parse_resolution

        self.resolution = tuple(parse_resolution(self.resolution, self.cfg.n))
        self.f = np.asarray(self.f, dtype=float)
        self.tau = np.asarray(self.tau, dtype=float)
        if self.n_phi is None:
            self.n_phi = self.f.shape[-1]
        if self.f.shape != self.grid.field_shape:
            raise ShapeMismatchError(f"source shape {self.f.shape} != grid {self.grid.field_shape}")
        expected = self.grid.boundary_shape + (self.grid.n_phi,)
        if self.tau.shape != expected:
            raise ShapeMismatchError(f"boundary data shape {self.tau.shape} != {expected}")
        if self.n_phi < 2 * self.M + 1:
            raise ShapeMismatchError(
                f"n_phi={self.n_phi} cannot represent modes |m| <= {self.M}; need {2 * self.M + 1}"
            )

    @cached_property
    def grid(self):
        from utils.grid import build_grid

        return build_grid(self.cfg, self.resolution, n_phi=self.n_phi)

    @property
    def f_tilde(self):
        """sigma f in the solver chart."""
        return self.grid.volume_density[..., None] * self.f

    def with_data(self, f=None, tau=None, name=None):
        return HelicalProblem(
            cfg=self.cfg,
            f=self.f if f is None else f,
            tau=self.tau if tau is None else tau,
            resolution=self.resolution,
            M=self.M,
            n_phi=self.n_phi,
            name=name or self.name,
            metadata=dict(self.metadata),
        )
