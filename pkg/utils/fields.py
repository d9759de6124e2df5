# ============================================
# FILE: utils/fields.py
# ============================================
"""Smooth test fields, manufactured solutions and data presets.

Regular fields are polynomials in the Cartesian coordinates (x, y[, z]) with
x + i y = rho e^{i phi}; a polynomial of total degree d only excites modes
|m| <= d and is smooth through the axis.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

import config
from analysis.modes import boundary_radial_derivative, euler_radial_derivative
from models.errors import DomainError
from models.multiplier import Multiplier
from utils.quadrature import boundary_quadrature, volume_quadrature


def cartesian_nodes(grid):
    """(x, y, z) on ``grid.field_shape``; z is None for n = 2."""
    rho = grid.rho[..., None]
    x = rho * np.cos(grid.phi)
    y = rho * np.sin(grid.phi)
    if grid.n == 2:
        return x, y, None
    z = np.broadcast_to(grid.z[..., None], grid.field_shape)
    return x, y, z


def _pad_to(coef, shape):
    return np.pad(coef, [(0, s - c) for s, c in zip(shape, coef.shape)])


@dataclass
class CartesianPolynomial:
    """sum c[i, j(, k)] x^i y^j (z^k)."""

    coef: np.ndarray

    def __post_init__(self):
        self.coef = np.asarray(self.coef, dtype=float)

    @property
    def dim(self):
        return self.coef.ndim

    @property
    def degree(self):
        nonzero = np.argwhere(self.coef != 0)
        return int(nonzero.sum(axis=1).max()) if len(nonzero) else 0

    @classmethod
    def random(cls, n, degree, rng, scale=1.0):
        shape = (degree + 1,) * n
        total = np.indices(shape).sum(axis=0)
        coef = np.where(total <= degree, rng.standard_normal(shape), 0.0)
        return cls(scale * coef)

    @classmethod
    def monomial(cls, powers, value=1.0):
        coef = np.zeros(tuple(p + 1 for p in powers))
        coef[tuple(powers)] = value
        return cls(coef)

    def __call__(self, x, y, z=None):
        if self.dim == 2:
            return P.polyval2d(x, y, self.coef)
        return P.polyval3d(x, y, z, self.coef)

    def __add__(self, other):
        shape = tuple(max(a, b) for a, b in zip(self.coef.shape, other.coef.shape))
        return CartesianPolynomial(_pad_to(self.coef, shape) + _pad_to(other.coef, shape))

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor):
        return CartesianPolynomial(factor * self.coef)

    def derivative(self, axis):
        return CartesianPolynomial(P.polyder(self.coef, axis=axis))

    def times_coordinate(self, axis):
        pad = [(0, 0)] * self.dim
        pad[axis] = (1, 0)
        return CartesianPolynomial(np.pad(self.coef, pad))

    def laplacian(self):
        total = self.derivative(0).derivative(0)
        for axis in range(1, self.dim):
            total = total + self.derivative(axis).derivative(axis)
        return total

    def rotation(self):
        """d/dphi = x d/dy - y d/dx."""
        return self.derivative(1).times_coordinate(0) - self.derivative(0).times_coordinate(1)

    def euler(self):
        """x^a d_a, equal to r d/dr."""
        total = self.derivative(0).times_coordinate(0)
        for axis in range(1, self.dim):
            total = total + self.derivative(axis).times_coordinate(axis)
        return total

    def on_grid(self, grid):
        if self.dim != grid.n:
            raise DomainError(f"{self.dim}-variable polynomial on an n={grid.n} grid")
        return self(*cartesian_nodes(grid))


@dataclass
class ManufacturedSolution:
    """Exact solution u* with the source and boundary data it induces.

    f = (Laplacian - Omega^2 d_phi^2) u*, the reduced operator divided by
    sigma, and tau = u*_r + sign Omega u*_phi on r = R.
    """

    cfg: object
    solution: CartesianPolynomial
    name: str = 'manufactured'

    def source_polynomial(self):
        rotation2 = self.solution.rotation().rotation()
        return self.solution.laplacian() - rotation2.scaled(self.cfg.omega ** 2)

    def values(self, grid):
        return self.solution.on_grid(grid)

    def source(self, grid):
        return self.source_polynomial().on_grid(grid)

    def boundary_data(self, grid):
        radial = self.solution.euler().scaled(1.0 / self.cfg.R)
        data = radial + self.solution.rotation().scaled(self.cfg.sign * self.cfg.omega)
        return data.on_grid(grid)[-1]

    @property
    def max_mode(self):
        return self.solution.degree


def constant_source_solution(cfg, c=1.0):
    """u* = c rho^2 / 4, so that f = c and tau = c rho^2 / (2R)."""
    base = CartesianPolynomial.monomial((2,) + (0,) * (cfg.n - 1), 0.25 * c)
    base = base + CartesianPolynomial.monomial((0, 2) + (0,) * (cfg.n - 2), 0.25 * c)
    return ManufacturedSolution(cfg=cfg, solution=base, name='constant')


def manufactured_solution(cfg, max_mode, seed=None):
    """Random regular polynomial solution exciting modes |m| <= max_mode."""
    rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
    poly = CartesianPolynomial.random(cfg.n, max_mode, rng, scale=1.0 / cfg.R ** max_mode)
    return ManufacturedSolution(cfg=cfg, solution=poly, name=f'manufactured-{max_mode}')


@dataclass
class SommerfeldField:
    """Real field sum_t Re[c_t (x + i y)^{m_t} z^{k_t} (1 + beta_t r^2)].

    beta_t is chosen so that u_r + sign Omega u_phi = 0 on r = R exactly:
    with d = m + k, beta = -(d + i s m Omega R) / (R^2 (d + 2 + i s m Omega R)).
    """

    cfg: object
    terms: list

    @classmethod
    def random(cls, cfg, rng, max_mode=3, max_z_degree=2):
        terms = []
        for m in range(max_mode + 1):
            k = int(rng.integers(0, max_z_degree + 1)) if cfg.n == 3 else 0
            coeff = complex(rng.standard_normal(), rng.standard_normal() if m else 0.0)
            terms.append((m, k, coeff))
        return cls(cfg=cfg, terms=terms)

    def beta(self, m, d):
        phase = 1j * self.cfg.sign * m * self.cfg.omega * self.cfg.R
        return -(d + phase) / (self.cfg.R ** 2 * (d + 2 + phase))

    def values(self, grid):
        x, y, z = cartesian_nodes(grid)
        r2 = x ** 2 + y ** 2 + (0.0 if z is None else z ** 2)
        total = np.zeros(grid.field_shape)
        for m, k, coeff in self.terms:
            if m == 0 and k == 0:
                # axisymmetric term uses H = r^2, d = 2
                term = coeff * r2 * (1.0 + self.beta(0, 2) * r2)
            else:
                term = coeff * (x + 1j * y) ** m * (1.0 + self.beta(m, m + k) * r2)
            if k:
                term = term * z ** k
            total = total + term.real
        return total


def _radial(grid, rng, degree):
    return Polynomial(rng.standard_normal(degree + 1), domain=[0, grid.R], window=[0, 1])


def _polar(rng, degree):
    return Polynomial(rng.standard_normal(degree + 1), domain=[0, np.pi], window=[0, 1])


def _trig(grid, rng, first, last):
    """Random trigonometric polynomial in phi with modes first..last."""
    total = np.zeros(grid.n_phi)
    for m in range(first, last + 1):
        if m == 0:
            total = total + rng.standard_normal()
            continue
        total = total + rng.standard_normal() * np.cos(m * grid.phi) + rng.standard_normal() * np.sin(m * grid.phi)
    return total


def chart_trig_field(grid, rng, degree=None, modes=2):
    """p(r) q(cos theta) t(phi): a chart-smooth scalar with random polynomial factors."""
    degree = config.TEST_FIELD_DEGREE if degree is None else degree
    values = _radial(grid, rng, degree)(grid.r_nodes)[..., None]
    if grid.n == 3:
        polar = Polynomial(rng.standard_normal(degree + 1))
        values = values * polar(np.cos(grid.theta_nodes))[..., None]
    return values * _trig(grid, rng, 0, modes)


def regular_field(grid, rng, degree=None):
    """Random Cartesian polynomial sampled on the grid, of order one on the ball."""
    degree = config.TEST_FIELD_DEGREE if degree is None else degree
    return CartesianPolynomial.random(grid.n, degree, rng, scale=1.0 / grid.R ** degree).on_grid(grid)


def random_vector_density(grid, rng, degree=None):
    """Chart vector density with V^r = 0 at r = 0 and V^theta = 0 on the axis.

    V^r = r p(r) q(cos theta) t(phi) with p quadratic, q = 1 + small quadratic
    and t of unit mean; V^theta = theta (pi - theta) p(r) t(phi); V^phi is a
    chart-smooth scalar. The discrete Stokes residual is then exactly
    (3/2) p_2 h^2 (R - 2h) times the angular integral of q t.
    """
    r = grid.r_nodes[..., None]
    t = 1.0 + _trig(grid, rng, 1, 2)
    radial = r * _radial(grid, rng, 2)(r)
    components = []
    if grid.n == 2:
        components.append(radial * t)
    else:
        polar = Polynomial(np.concatenate([[1.0], 0.5 * rng.standard_normal(2)]))
        components.append(radial * polar(np.cos(grid.theta_nodes))[..., None] * t)
        theta = grid.theta_nodes[..., None]
        components.append(theta * (np.pi - theta) * _radial(grid, rng, 2)(r) * t)
    components.append(chart_trig_field(grid, rng, degree))
    return tuple(components)


def identity_field(grid, rng):
    """Scalar for the energy identity, at most quadratic along every r and theta line.

    n = 2: alpha(r) + r l(r) t(phi); n = 3: alpha(r) + r l(r) [q(theta) +
    theta (pi - theta) t(phi)/(pi/2)^2]. alpha and q are quadratic, l is
    linear and t is a zero-mean trigonometric polynomial of degree 2, so
    u_phi vanishes at r = 0 and on the axis and u_theta vanishes at r = 0.
    """
    r = grid.r_nodes[..., None]
    alpha = _radial(grid, rng, 2)(r)
    slope = r * _radial(grid, rng, 1)(r)
    t = _trig(grid, rng, 1, 2)
    if grid.n == 2:
        return alpha + slope * t
    theta = grid.theta_nodes[..., None]
    cap = theta * (np.pi - theta) / (0.25 * np.pi ** 2)
    return alpha + slope * (_polar(rng, 2)(theta) + cap * t)


def identity_multiplier(grid, rng):
    """a drawn like ``identity_field``; b^c = p(r) q(theta) t(phi), p and q quadratic, t of degree 1."""
    a = identity_field(grid, rng)
    b = []
    for _ in range(grid.n):
        component = _radial(grid, rng, 2)(grid.r_nodes)[..., None]
        if grid.n == 3:
            component = component * _polar(rng, 2)(grid.theta_nodes)[..., None]
        b.append(component * _trig(grid, rng, 0, 1))
    return Multiplier(a=a, b=tuple(b))


def euler_identity_gap(poly, grid, cfg):
    """max |u_r - (1/R)(rho u_rho + z u_z)| over r = R for a Cartesian polynomial.

    u_r is the one-sided difference of the sampled field, the right side uses
    the exact Cartesian derivatives.
    """
    x, y, z = (None if c is None else c[-3:] for c in cartesian_nodes(grid))
    args = (x, y) if grid.n == 2 else (x, y, z)
    samples = poly(*args)
    u_r = boundary_radial_derivative(samples, grid.h_r)

    rho = np.asarray(grid.rho[-1])[..., None]
    rho_u_rho = poly.derivative(0)(*args)[-1] * x[-1] + poly.derivative(1)(*args)[-1] * y[-1]
    with np.errstate(divide='ignore', invalid='ignore'):
        u_rho = np.where(rho > 0, rho_u_rho / np.where(rho > 0, rho, 1.0), 0.0)
    if grid.n == 2:
        euler = euler_radial_derivative(u_rho, None, rho, None, cfg.R)
    else:
        euler = euler_radial_derivative(u_rho, poly.derivative(2)(*args)[-1], rho, z[-1], cfg.R)
    return float(np.max(np.abs(u_r - euler)))


def bump_field(grid, radius, power=4):
    """(1 - (r/radius)^2)^power inside r < radius, zero outside; times (1 + 0.3 x/radius)."""
    if not 0 < radius <= grid.R:
        raise DomainError(f"bump radius {radius} must lie in (0, {grid.R}]")
    x, _, _ = cartesian_nodes(grid)
    r = np.broadcast_to(grid.r_nodes[..., None], grid.field_shape)
    profile = np.where(r < radius, np.clip(1.0 - (r / radius) ** 2, 0.0, None) ** power, 0.0)
    return profile * (1.0 + 0.3 * x / radius)


def boundary_sigma(grid):
    """sigma on the boundary chart, broadcast over phi."""
    return np.broadcast_to(np.asarray(grid.boundary_density)[..., None], grid.boundary_shape + (grid.n_phi,))


def compatible_boundary_data(f, tau, grid):
    """Shift tau by a constant so the discrete compatibility integral balances."""
    f_tilde = grid.volume_density[..., None] * f
    sigma_b = boundary_sigma(grid)
    defect = volume_quadrature(f_tilde, grid) - boundary_quadrature(sigma_b * tau, grid)
    return tau + defect / boundary_quadrature(sigma_b, grid)


def trig_polynomial_data(grid, seed=None, degree=None):
    """Random regular (f, tau) made compatible by a constant shift of tau."""
    degree = config.TEST_FIELD_DEGREE if degree is None else degree
    rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
    f = CartesianPolynomial.random(grid.n, degree, rng).on_grid(grid)
    tau = CartesianPolynomial.random(grid.n, degree, rng).on_grid(grid)[-1]
    return f, compatible_boundary_data(f, tau, grid)


@dataclass
class PresetData:
    f: np.ndarray
    tau: np.ndarray
    exact: Optional[ManufacturedSolution] = None


def preset_data(name, cfg, grid, c=1.0, seed=None, compatible=True):
    """Data for the named presets: zero, constant, manufactured-<k>, trig-polynomial."""
    if name == 'zero':
        return PresetData(np.zeros(grid.field_shape), np.zeros(grid.boundary_shape + (grid.n_phi,)))
    if name == 'constant':
        exact = constant_source_solution(cfg, c)
        tau = exact.boundary_data(grid) if compatible else np.zeros(grid.boundary_shape + (grid.n_phi,))
        return PresetData(exact.source(grid), tau, exact if compatible else None)
    if name.startswith('manufactured'):
        _, _, k = name.partition('-')
        exact = manufactured_solution(cfg, int(k or 2), seed=seed)
        return PresetData(exact.source(grid), exact.boundary_data(grid), exact)
    if name == 'trig-polynomial':
        f, tau = trig_polynomial_data(grid, seed=seed)
        return PresetData(f, tau)
    raise DomainError(f"unknown data preset '{name}'")
