# ============================================
# FILE: models/multiplier.py
# ============================================
from dataclasses import dataclass

import numpy as np


@dataclass
class Multiplier:
    """Energy multiplier a u + b^c u_c sampled on a grid.

    ``b`` holds chart components: (b^r, b^phi) for n = 2, which coincide
    with (b^rho, b^phi), and (b^r, b^theta, b^phi) for n = 3. Every array
    has ``grid.field_shape``.
    """

    a: np.ndarray
    b: tuple

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = tuple(np.broadcast_to(np.asarray(c, dtype=float), self.a.shape) for c in self.b)

    @classmethod
    def zero_vector(cls, a, n):
        a = np.asarray(a, dtype=float)
        return cls(a=a, b=tuple(np.zeros_like(a) for _ in range(n)))
