"""Plug-in asymptotic covariance of (ξ̂, σ̂).

The covariance is the sandwich N·(∇h M ∇hᵀ)·Nᵀ / T where h is the determinant as a
function of the pseudo-moments, M = A⁻¹ Γ₁ A⁻¹ᵀ, Γ₁ the long-run covariance of the
per-sample moment terms (Newey-West, Bartlett kernel), and N collects the criterion
derivatives at the estimate. Complex quantities are handled as interleaved (re, im)
real vectors.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from core.errors import DeconvError, ErrorCode
from core.estimator import CriterionData
from core.moment_engine import filter_l2_norm, moment_contributions, z_series
from core.models import (
    ComplexSeries,
    CovarianceReport,
    Diagnostic,
    EstimationResult,
    PseudoMomentMatrix,
    Severity,
)
from core.pseudo_moment import build_A_inverse, pseudo_moment_matrix

logger = logging.getLogger(__name__)

HESSIAN_COND_LIMIT = 1e12
FD_RELATIVE_STEP = 1e-4

Criterion = Callable[[float, np.ndarray], float]


@dataclass
class CriterionDerivatives:
    """Finite-difference derivatives of J at one point."""

    d_sigma: float
    d_xi: np.ndarray
    d_xi_xi: np.ndarray
    d_sigma_xi: np.ndarray


@dataclass
class FdSteps:
    """Central-difference step sizes."""

    h_sigma: float
    h_xi: np.ndarray

    @classmethod
    def default(cls, sigma: float, xi: np.ndarray) -> "FdSteps":
        """Steps scaled by max(1, |coordinate|)."""
        return cls(
            h_sigma=FD_RELATIVE_STEP * max(1.0, abs(sigma)),
            h_xi=FD_RELATIVE_STEP * np.maximum(1.0, np.abs(xi)),
        )


def det_gradient(matrix: PseudoMomentMatrix | np.ndarray) -> np.ndarray:
    """Gradient of det with respect to the flat pseudo-moment entries.

    With ``matrix[k][j] = d̃[j(p+1)+k]`` the derivative with respect to d̃[j(p+1)+k] is
    the (k, j) cofactor. Cofactors are computed from minors so singular matrices are fine.
    """
    entries = matrix.entries if isinstance(matrix, PseudoMomentMatrix) else np.asarray(matrix)
    size = entries.shape[0]
    if entries.shape != (size, size):
        raise DeconvError(ErrorCode.INVALID_CONFIG, "det_gradient needs a square matrix")
    if size == 1:
        return np.ones(1, dtype=entries.dtype)
    cofactors = np.empty_like(entries)
    for row in range(size):
        for col in range(size):
            minor = np.delete(np.delete(entries, row, axis=0), col, axis=1)
            cofactors[row, col] = (-1) ** (row + col) * np.linalg.det(minor)
    # cofactors[k, j] belongs to flat index j*(p+1)+k
    return cofactors.T.reshape(-1)


def criterion_derivatives(
    sigma: float, xi: np.ndarray, criterion: Criterion, steps: FdSteps | None = None
) -> CriterionDerivatives:
    """Central finite differences of a criterion J(σ, ξ).

    ``criterion`` is any callable of (σ, ξ); the pipeline passes J_n for one series.
    """
    xi = np.asarray(xi, dtype=np.float64)
    steps = steps or FdSteps.default(sigma, xi)
    hs = steps.h_sigma
    d = xi.size
    basis = np.eye(d) * steps.h_xi[:, None]

    def f(ds: float, dxi: np.ndarray) -> float:
        return criterion(sigma + ds, xi + dxi)

    center = f(0.0, np.zeros(d))
    d_sigma = (f(hs, np.zeros(d)) - f(-hs, np.zeros(d))) / (2 * hs)

    d_xi = np.empty(d)
    d_sigma_xi = np.empty(d)
    d_xi_xi = np.empty((d, d))
    for i in range(d):
        hi, ei = steps.h_xi[i], basis[i]
        plus, minus = f(0.0, ei), f(0.0, -ei)
        d_xi[i] = (plus - minus) / (2 * hi)
        d_xi_xi[i, i] = (plus - 2 * center + minus) / hi**2
        d_sigma_xi[i] = (f(hs, ei) - f(hs, -ei) - f(-hs, ei) + f(-hs, -ei)) / (4 * hs * hi)
        for j in range(i):
            hj, ej = steps.h_xi[j], basis[j]
            value = (f(0.0, ei + ej) - f(0.0, ei - ej) - f(0.0, ej - ei) + f(0.0, -ei - ej)) / (
                4 * hi * hj
            )
            d_xi_xi[i, j] = d_xi_xi[j, i] = value
    return CriterionDerivatives(d_sigma, d_xi, d_xi_xi, d_sigma_xi)


def realify(values: np.ndarray) -> np.ndarray:
    """Interleave real and imaginary parts along the last axis."""
    values = np.asarray(values)
    stacked = np.stack([values.real, values.imag], axis=-1)
    return stacked.reshape(*values.shape[:-1], 2 * values.shape[-1])


def complex_covariance(real_cov: np.ndarray) -> np.ndarray:
    """Hermitian covariance E[x x^H] from the covariance of interleaved (re, im) parts."""
    rr = real_cov[0::2, 0::2]
    ii = real_cov[1::2, 1::2]
    ri = real_cov[0::2, 1::2]
    ir = real_cov[1::2, 0::2]
    return rr + ii + 1j * (ir - ri)


def default_bandwidth(n: int) -> int:
    """floor(n^(1/3)) lags."""
    return int(np.floor(n ** (1.0 / 3.0)))


def hac_gamma1(per_t_contributions: np.ndarray, bandwidth: int) -> np.ndarray:
    """Newey-West long-run covariance with Bartlett weights 1 - l/(L+1).

    Complex contributions are mapped to interleaved real vectors first, so the result is
    always a real symmetric matrix.

    Raises:
        DeconvError: SERIES_TOO_SHORT when the sequence is not longer than 2·bandwidth.
    """
    x = np.asarray(per_t_contributions)
    if x.ndim == 1:
        x = x[:, None]
    if np.iscomplexobj(x):
        x = realify(x)
    t = x.shape[0]
    if t <= 2 * bandwidth:
        raise DeconvError(
            ErrorCode.SERIES_TOO_SHORT,
            "sequence too short for the HAC bandwidth",
            length=t,
            bandwidth=bandwidth,
        )
    u = x - x.mean(axis=0)
    gamma = u.T @ u / t
    for lag in range(1, bandwidth + 1):
        weight = 1.0 - lag / (bandwidth + 1.0)
        cross = u[lag:].T @ u[:-lag] / t
        gamma += weight * (cross + cross.T)
    return 0.5 * (gamma + gamma.T)


def plug_in_covariance(
    estimate: EstimationResult,
    y: ComplexSeries,
    p: int,
    steps: FdSteps | None = None,
    bandwidth: int | None = None,
) -> CovarianceReport:
    """Plug-in covariance of (ξ̂, σ̂) at the normalized estimate.

    Derivatives are taken at ``theta_root``, where J_n(σ̂, ·) vanishes. The ξ block lives on
    the tangent space of the unit sphere there because the criterion is homogeneous in ξ;
    the returned matrix is expressed in the window of θ̂, so a delay shift moves the block
    and the dropped leading taps get no entry.

    Raises:
        DeconvError: SINGULAR_HESSIAN when the tangent Hessian is numerically singular.
    """
    provider = CriterionData(y, estimate.half_width, p)
    theta = estimate.theta_root
    sigma = estimate.sigma_hat
    steps = steps or FdSteps.default(sigma, theta)
    diagnostics: list[Diagnostic] = []

    derivs = criterion_derivatives(sigma, theta, provider.criterion, steps)
    alpha = -derivs.d_sigma
    if alpha <= 0:
        message = f"∂σJ = {derivs.d_sigma:.3g} is not negative at the estimate"
        diagnostics.append(Diagnostic(ErrorCode.NEGATIVE_ALPHA, Severity.WARNING, message))
        logger.warning(message)

    d = theta.size
    tangent = linalg.null_space(theta[None, :])
    if tangent.shape[1]:
        hessian = tangent.T @ derivs.d_xi_xi @ tangent
        cond = np.linalg.cond(hessian)
        if not np.isfinite(cond) or cond > HESSIAN_COND_LIMIT:
            raise DeconvError(
                ErrorCode.SINGULAR_HESSIAN, "criterion Hessian in ξ is singular", condition=float(cond)
            )
        eta = linalg.solve(hessian, tangent.T @ derivs.d_sigma_xi, assume_a="sym")
        n_xi = tangent @ eta
    else:
        n_xi = np.zeros(d)
    n_vec = np.concatenate([n_xi, [1.0]]) / alpha

    spec = estimate.root_spec
    z = z_series(spec, y)
    contributions = moment_contributions(z, p)
    bandwidth = default_bandwidth(len(z)) if bandwidth is None else bandwidth
    gamma1_real = hac_gamma1(contributions, bandwidth)

    inverse = np.kron(build_A_inverse(sigma * filter_l2_norm(spec), p), np.eye(2))
    middle = inverse @ gamma1_real @ inverse.T

    d_n, _ = provider(theta)
    gradient = det_gradient(pseudo_moment_matrix(sigma, spec, d_n))
    # J = Re det, so ∂J/∂Re = Re g and ∂J/∂Im = -Im g
    g_real = np.empty(2 * gradient.size)
    g_real[0::2] = gradient.real
    g_real[1::2] = -gradient.imag
    variance = float(g_real @ middle @ g_real)

    cov = np.outer(n_vec, n_vec) * variance / len(z)
    if estimate.delay_shift:
        shift_map = np.eye(d + 1)
        shift_map[:d, :d] = np.eye(d, k=estimate.delay_shift)
        cov = shift_map @ cov @ shift_map.T
    cov = 0.5 * (cov + cov.T)
    return CovarianceReport(
        cov=cov,
        alpha_hat=float(alpha),
        gamma1_hat=complex_covariance(gamma1_real),
        gamma1_real=gamma1_real,
        fd_step=(steps.h_sigma, float(np.max(steps.h_xi))),
        bandwidth=bandwidth,
        n_used=len(z),
        diagnostics=diagnostics,
    )
