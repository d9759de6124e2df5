# ============================================
# FILE: analysis/modes.py
# ============================================
"""Fourier modes in the helical angle and the per-mode reduced operator.

Convention: u(phi) = sum_m u_m exp(+i m phi), with the coefficients carrying
the full field, so u_0 is the phi-average and a real cos(phi) has
u_{+1} = u_{-1} = 1/2. Mode arrays are ordered m = -M .. M.
"""
import numpy as np

import config
from analysis.reduction import chart_h_phiphi, chart_h_rr
from models.errors import ConjugateSymmetryError, DomainError, ShapeMismatchError
from models.problem import ModeField


def mode_numbers(M):
    return np.arange(-M, M + 1)


def mode_slot(m, M):
    return int(m) + int(M)


def _phase(n_phi, M, sign):
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return np.exp(sign * 1j * np.outer(phi, mode_numbers(M)))


def analyze_phi(samples, M):
    """Fourier coefficients u_m, |m| <= M, of real samples on a uniform phi grid (last axis)."""
    samples = np.asarray(samples, dtype=float)
    n_phi = samples.shape[-1]
    if n_phi < 2 * M + 1:
        raise DomainError(f"n_phi={n_phi} too small for M={M}; need at least {2 * M + 1}")
    return samples @ _phase(n_phi, M, -1.0) / n_phi


def synthesize_phi(modes, n_phi, tol=None):
    """Real field on the phi grid from conjugate-symmetric coefficients (last axis)."""
    tol = config.CONJUGATE_TOL if tol is None else tol
    modes = np.asarray(modes, dtype=complex)
    M = (modes.shape[-1] - 1) // 2
    if modes.shape[-1] != 2 * M + 1:
        raise ShapeMismatchError(f"expected an odd number of modes, got {modes.shape[-1]}")
    if n_phi < 2 * M + 1:
        raise DomainError(f"n_phi={n_phi} too small for M={M}")

    scale = max(float(np.max(np.abs(modes), initial=0.0)), np.finfo(float).tiny)
    asymmetry = float(np.max(np.abs(modes - np.conj(modes[..., ::-1])), initial=0.0))
    if asymmetry > tol * scale:
        raise ConjugateSymmetryError(
            f"coefficients are not conjugate symmetric (residue {asymmetry / scale:.3e} relative)"
        )

    field = modes @ _phase(n_phi, M, 1.0).T
    return field.real


def imaginary_residue(modes, n_phi):
    """max|Im| / max|Re| of the synthesis, the conjugate-symmetry diagnostic."""
    modes = np.asarray(modes, dtype=complex)
    M = (modes.shape[-1] - 1) // 2
    field = modes @ _phase(n_phi, M, 1.0).T
    scale = max(float(np.max(np.abs(field.real), initial=0.0)), np.finfo(float).tiny)
    return float(np.max(np.abs(field.imag), initial=0.0)) / scale


def differentiate_phi(samples, order=1):
    """Spectral phi derivative of real samples along the last axis."""
    samples = np.asarray(samples, dtype=float)
    n_phi = samples.shape[-1]
    wavenumbers = np.fft.rfftfreq(n_phi, d=1.0 / n_phi)
    factor = (1j * wavenumbers) ** order
    if n_phi % 2 == 0 and order % 2 == 1:
        factor[-1] = 0.0
    return np.fft.irfft(np.fft.rfft(samples, axis=-1) * factor, n=n_phi, axis=-1)


def boundary_radial_derivative(values, h):
    """Second-order one-sided d/dr at the last radial node (axis 0)."""
    values = np.asarray(values)
    return (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)


# ---------------------------------------------------------------------------
# Per-mode operator, matrix-free
# ---------------------------------------------------------------------------

def _check_mode(mode, grid, cfg):
    if cfg.n != grid.n:
        raise DomainError(f"config n={cfg.n} does not match grid n={grid.n}")
    if mode.values.shape != grid.shape:
        raise ShapeMismatchError(f"mode shape {mode.values.shape} != grid {grid.shape}")


def _trailing(coefficient, u):
    return coefficient.reshape(coefficient.shape + (1,) * (np.ndim(u) - coefficient.ndim))


def radial_flux_divergence(u, grid, cfg):
    """[h_{j+1/2}(u_{j+1}-u_j) - h_{j-1/2}(u_j-u_{j-1})] / h^2 at interior j.

    Extra trailing axes of ``u`` (e.g. phi samples) are carried along.
    """
    h = grid.h_r
    r_half = 0.5 * (grid.r[1:] + grid.r[:-1])
    if grid.n == 2:
        h_half = chart_h_rr(r_half, None, cfg)
    else:
        h_half = (r_half ** 2)[:, None] * np.sin(grid.theta)[None, :]
    flux = _trailing(h_half, u) * np.diff(u, axis=0) / h
    return (flux[1:] - flux[:-1]) / h


def theta_flux_divergence(u, grid):
    h = grid.h_theta
    s_half = np.sin(0.5 * (grid.theta[1:] + grid.theta[:-1]))
    flux = _trailing(s_half[None, :], u) * np.diff(u, axis=1) / h
    return (flux[:, 1:] - flux[:, :-1]) / h


def _axis_row_2d(u, m, grid):
    """Half-cell balance on [0, h/2] divided by h/2 (m = 0), else u_0/h."""
    h = grid.h_r
    if m == 0:
        return (u[1] - u[0]) / h
    return u[0] / h


def mode_operator_apply(mode, grid, cfg):
    """Apply the density-weighted per-mode operator (phi-derivative -> i m).

    n = 2: returns d_rho(rho d_rho u) - m^2 (chi/rho) u.

    n = 3: returns r times the cylindrical expression, that is
    r [d_rho(rho d_rho u) + d_z(rho d_z u) - m^2 (chi/rho) u], which in the
    (r, theta, phi) chart reads

        d_r(r^2 sin(theta) u_r) + d_theta(sin(theta) u_theta) - m^2 (chi/sin(theta)) u.

    Axis and origin entries hold the regularity rows the assembled system
    uses; boundary entries are zero (they carry the Sommerfeld rows, see
    ``mode_boundary_residual``).
    """
    _check_mode(mode, grid, cfg)
    u = mode.values
    m = mode.m
    out = np.zeros(grid.shape, dtype=complex)

    if grid.n == 2:
        rho = grid.r[1:-1]
        out[1:-1] = radial_flux_divergence(u, grid, cfg) - m ** 2 * chart_h_phiphi(rho, None, cfg) * u[1:-1]
        out[0] = _axis_row_2d(u, m, grid)
        return out

    r_in = grid.r[1:-1][:, None]
    th_in = grid.theta[1:-1][None, :]
    radial = radial_flux_divergence(u, grid, cfg)[:, 1:-1]
    polar = theta_flux_divergence(u, grid)[1:-1, :]
    out[1:-1, 1:-1] = radial + polar - m ** 2 * chart_h_phiphi(r_in, th_in, cfg) * u[1:-1, 1:-1]

    out[1:-1, 0] = _axis_row_3d(u, m, grid, 0)
    out[1:-1, -1] = _axis_row_3d(u, m, grid, -1)
    out[0, :] = _origin_rows_3d(u, m, grid)
    return out


def _axis_row_3d(u, m, grid, k):
    """Axis rows at theta = 0 (k = 0) or theta = pi (k = -1), interior radii.

    m = 0: half-cell balance over theta in [0, h_theta/2] (mirrored at pi),
    divided by h_theta/2. |m| >= 1: u = 0, scaled by 1/h_r.
    """
    if m != 0:
        return u[1:-1, k] / grid.h_r
    h_r, h_t = grid.h_r, grid.h_theta
    nb = 1 if k == 0 else -2
    cap = (1.0 - np.cos(0.5 * h_t)) / (0.5 * h_t)
    r_half = 0.5 * (grid.r[1:] + grid.r[:-1])
    flux = r_half ** 2 * np.diff(u[:, k]) / h_r
    radial = cap * (flux[1:] - flux[:-1]) / h_r
    polar = np.sin(0.5 * h_t) * (u[1:-1, nb] - u[1:-1, k]) / h_t / (0.5 * h_t)
    return radial + polar


def _origin_rows_3d(u, m, grid):
    """Origin rows: a ball balance on r <= h_r/2 plus ties u_{0,k} = u_{0,0} (m = 0)."""
    h_r = grid.h_r
    if m != 0:
        return u[0, :] / h_r
    rows = np.empty(grid.K + 1, dtype=complex)
    w_theta = grid.trapezoid_weights(grid.theta, grid.h_theta) * np.sin(grid.theta)
    rows[0] = np.sum(w_theta * (u[1, :] - u[0, 0])) / (2.0 * h_r)
    rows[1:] = (u[0, 1:] - u[0, 0]) / h_r
    return rows


def mode_boundary_residual(mode, tau_m, grid, cfg):
    """u_r + sign i m Omega u - tau at every boundary node.

    u_r is the outward radial derivative, which on r = R equals the Euler
    operator (1/R)(rho u_rho + z^i u_i).
    """
    _check_mode(mode, grid, cfg)
    tau_m = np.asarray(tau_m, dtype=complex)
    if tau_m.shape != grid.boundary_shape:
        raise ShapeMismatchError(f"tau shape {tau_m.shape} != boundary {grid.boundary_shape}")
    u = mode.values
    u_r = boundary_radial_derivative(u, grid.h_r)
    return u_r + cfg.sign * 1j * mode.m * cfg.omega * u[-1] - tau_m


def euler_radial_derivative(u_rho, u_z, rho, z, R):
    """(1/R)(rho u_rho + z^i u_i); equals u_r on r = R."""
    total = rho * u_rho
    if z is not None:
        total = total + z * u_z
    return total / R


def make_mode(m, values):
    return ModeField(m=m, values=values)
