import numpy as np
import pytest

from analysis.proof import (
    ProofMultiplier,
    boundary_gap,
    gradient_max_norm,
    proof_boundary_integrand,
    proof_multiplier_contraction,
    proof_totals,
    proof_volume_integrand,
    uniqueness_certificate,
)
from models.errors import DomainError, ShapeMismatchError
from models.helical import HelicalConfig
from models.problem import HelicalProblem
from utils.fields import SommerfeldField, regular_field, trig_polynomial_data
from utils.grid import build_grid


def _sphere(rng, count, n, R=1.0):
    direction = rng.standard_normal((count, n - 1))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    rho = R * np.abs(direction[:, 0])
    return rho, R * direction[:, 1:]


def test_volume_integrand_value():
    cfg = HelicalConfig(n=2, omega=1.0)
    assert proof_volume_integrand(1.0, 1.0, 1.0, cfg=cfg) == pytest.approx(3.0)
    assert proof_volume_integrand(0.5, 0.0, 0.0, cfg=cfg) == 0.0


def test_volume_integrand_nonnegative(rng, ball_cfg):
    rho = rng.uniform(1e-6, 1.0, 10_000)
    values = proof_volume_integrand(rho, rng.standard_normal(10_000), rng.standard_normal(10_000),
                                    rng.standard_normal((10_000, 1)), cfg=ball_cfg)
    assert values.min() >= 0.0


def test_volume_integrand_needs_positive_rho(disk_cfg):
    with pytest.raises(DomainError):
        proof_volume_integrand(0.0, 1.0, 1.0, cfg=disk_cfg)


@pytest.mark.parametrize('n', [3, 4, 5])
@pytest.mark.parametrize('sign', [1, -1])
def test_boundary_integrand_dominates_lower_bound(rng, n, sign):
    cfg = HelicalConfig(n=3, omega=1.3, R=1.0, sign=sign)
    rho, z = _sphere(rng, 5000, n)
    u_z, u_phi = rng.standard_normal((5000, n - 2)), rng.standard_normal(5000)
    integrand, lower = proof_boundary_integrand(rho, z, u_z, u_phi, cfg, n=n, tol=1e-9)
    scale = np.max(np.abs(integrand))
    assert np.min(lower) >= 0.0
    assert np.min(integrand - lower) >= -1e-12 * scale
    gap = boundary_gap(rho, z, u_z, u_phi, cfg, n=n, tol=1e-9)
    np.testing.assert_allclose(integrand - lower, gap, atol=1e-10 * scale)


def test_gap_closes_at_three_dimensions(rng, ball_cfg):
    rho, z = _sphere(rng, 1000, 3)
    gap = boundary_gap(rho, z, rng.standard_normal(1000), rng.standard_normal(1000), ball_cfg, tol=1e-9)
    np.testing.assert_allclose(gap, 0.0, atol=1e-10)


def test_equator_equality(ball_cfg):
    u_1, u_phi = np.array([0.3, -2.0]), np.array([1.5, 0.25])
    integrand, lower = proof_boundary_integrand(np.ones(2), np.zeros(2), u_1, u_phi, ball_cfg)
    expected = 0.5 * (u_1 ** 2 + u_phi ** 2)
    np.testing.assert_allclose(integrand, expected, rtol=1e-14)
    np.testing.assert_allclose(lower, expected, rtol=1e-14)


def test_boundary_samples_must_lie_on_sphere(ball_cfg):
    with pytest.raises(DomainError):
        proof_boundary_integrand(0.5, 0.5, 1.0, 1.0, ball_cfg)
    with pytest.raises(ShapeMismatchError):
        proof_boundary_integrand(np.ones(2), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(2), ball_cfg)


def test_orthogonal_invariance(rng):
    cfg = HelicalConfig(n=3, omega=0.8, R=1.0)
    rho, z = _sphere(rng, 500, 4)
    u_z, u_phi = rng.standard_normal((500, 2)), rng.standard_normal(500)
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    before, _ = proof_boundary_integrand(rho, z, u_z, u_phi, cfg, n=4, tol=1e-9)
    after, _ = proof_boundary_integrand(rho, z @ q.T, u_z @ q.T, u_phi, cfg, n=4, tol=1e-9)
    np.testing.assert_allclose(after, before, rtol=1e-10, atol=1e-12)


def test_proof_multiplier_components(disk_grid, disk_cfg, ball_grid, ball_cfg):
    mult = ProofMultiplier(disk_cfg).components(disk_grid)
    np.testing.assert_allclose(mult.a, -1.0)
    np.testing.assert_allclose(mult.b[0][:, 0], -2.0 * disk_grid.r)
    np.testing.assert_allclose(mult.b[1], -2.0 * disk_cfg.omega * disk_cfg.R)

    mult = ProofMultiplier(ball_cfg).components(ball_grid)
    assert ProofMultiplier(ball_cfg).factor == -1.0
    assert not np.any(mult.b[1])


def _contraction(J):
    cfg = HelicalConfig(n=2, omega=2.0, R=1.0)
    grid = build_grid(cfg, J, n_phi=16)
    u = SommerfeldField.random(cfg, np.random.default_rng(21)).values(grid)
    return float(np.max(np.abs(proof_multiplier_contraction(u, grid, cfg))))


def test_multiplier_tangent_to_boundary_condition():
    assert _contraction(64) / _contraction(128) >= 3.5


def test_proof_totals_nonnegative(ball_grid, ball_cfg, rng):
    u = regular_field(ball_grid, rng)
    totals = proof_totals(u, ball_grid, ball_cfg)
    assert totals.volume_total > 0
    assert totals.boundary_total > 0
    assert totals.min_volume_integrand >= 0
    assert totals.min_boundary_gap >= -1e-10 * np.max(np.abs(totals.boundary_density))


def test_gradient_norm_of_linear_field(disk_grid):
    x = disk_grid.rho[:, None] * np.cos(disk_grid.phi)
    assert gradient_max_norm(2.0 * x, disk_grid) == pytest.approx(2.0)


class TestUniquenessCertificate:
    @pytest.fixture
    def problem(self, disk_cfg):
        grid = build_grid(disk_cfg, 32, n_phi=16)
        f, tau = trig_polynomial_data(grid, seed=3)
        return HelicalProblem(cfg=disk_cfg, f=f, tau=tau, resolution=32, M=3, n_phi=16)

    def test_constant_offset_passes(self, problem, rng):
        u = regular_field(problem.grid, rng)
        report = uniqueness_certificate(u, u + 7.0, problem)
        assert report.passed

    def test_non_constant_difference_fails(self, problem, rng):
        u = regular_field(problem.grid, rng)
        x = problem.grid.rho[:, None] * np.cos(problem.grid.phi)
        report = uniqueness_certificate(u, u + 1e-3 * x, problem)
        assert not report.passed
        assert report.gradient_norm == pytest.approx(1e-3, rel=1e-6)

    def test_shapes_checked(self, problem):
        with pytest.raises(ShapeMismatchError):
            uniqueness_certificate(np.zeros(3), np.zeros(3), problem)


def test_volume_integrand_requires_config():
    with pytest.raises(TypeError):
        proof_volume_integrand(0.5, 1.0, 1.0)
