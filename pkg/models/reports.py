# ============================================
# FILE: models/reports.py
# ============================================
from typing import List, Optional

from pydantic import BaseModel, Field

import config


class Report(BaseModel):
    schema_version: int = config.REPORT_SCHEMA_VERSION

    def to_json(self):
        return self.model_dump_json(indent=2)

    def write(self, path):
        with open(path, 'w') as handle:
            handle.write(self.to_json())


class ModeReport(BaseModel):
    m: int
    path: str = 'direct'
    residual_norm: Optional[float] = None
    condition_estimate: Optional[float] = None
    iterations: Optional[int] = None
    gauge_constant: Optional[float] = None
    tau_shift: Optional[float] = None
    ok: bool = False
    error: Optional[str] = None


class NullSpaceReport(Report):
    m: int
    method: str
    singular_values: List[float]
    largest_singular_value: float
    ratios: List[float]
    near_null_count: int
    threshold_ratio: float
    constant_cosine: Optional[float] = None
    converged: bool = True
    bordered: bool = False


class SolveReport(Report):
    name: str = 'problem'
    n: int
    omega: float
    R: float
    sign: int
    resolution: List[int]
    M: int
    n_phi: int
    light_cylinder_interior: bool = False
    out_of_theory: bool = False
    compatibility_residual: Optional[float] = None
    compatibility_threshold: Optional[float] = None
    compatible: Optional[bool] = None
    override_applied: bool = False
    tau_shift: Optional[float] = None
    gauge_constant: float = 0.0
    modes: List[ModeReport] = Field(default_factory=list)
    imaginary_residue: Optional[float] = None
    nullspace: List[NullSpaceReport] = Field(default_factory=list)
    status: str = 'pending'
    error: Optional[str] = None

    @classmethod
    def for_problem(cls, problem):
        cfg = problem.cfg
        return cls(
            name=problem.name,
            n=cfg.n,
            omega=cfg.omega,
            R=cfg.R,
            sign=cfg.sign,
            resolution=list(problem.resolution),
            M=problem.M,
            n_phi=problem.n_phi,
            light_cylinder_interior=cfg.crosses_light_cylinder,
            out_of_theory=cfg.out_of_theory,
        )

    def mode(self, m):
        for entry in self.modes:
            if entry.m == m:
                return entry
        return None

    @property
    def max_residual(self):
        values = [entry.residual_norm for entry in self.modes if entry.residual_norm is not None]
        return max(values) if values else None


class EnergyReport(Report):
    E_direct: float
    volume_term: float
    boundary_term: float
    ibp_residual: float
    min_volume_integrand: Optional[float] = None
    min_boundary_gap: Optional[float] = None


class CertificateReport(Report):
    gradient_norm: float
    mean_adjusted_difference: float
    volume_total: float
    boundary_total: float
    gradient_scale: float
    value_scale: float
    energy_scale: float
    tolerance: float
    passed: bool


class ConvergenceRow(BaseModel):
    h: float
    resolution: List[int]
    l2_error: float
    order: Optional[float] = None


class ConvergenceReport(Report):
    name: str
    n: int
    omega: float
    R: float
    rows: List[ConvergenceRow] = Field(default_factory=list)
    final_order: Optional[float] = None
    min_order: float = config.MIN_ORDER
    passed: bool = False


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: Optional[str] = None


class SuiteReport(Report):
    suite: str
    seed: int
    n: int
    omega: float
    R: float
    checks: List[CheckResult] = Field(default_factory=list)
    energy: Optional[EnergyReport] = None
    passed: bool = False
    error: Optional[str] = None

    def add(self, name, passed, value=None, threshold=None, detail=None):
        self.checks.append(CheckResult(
            name=name,
            passed=bool(passed),
            value=None if value is None else float(value),
            threshold=None if threshold is None else float(threshold),
            detail=detail,
        ))

    def finish(self):
        self.passed = bool(self.checks) and all(check.passed for check in self.checks) and self.error is None
        return self
