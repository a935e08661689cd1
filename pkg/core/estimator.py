"""Joint estimation of the noise level and the inverse filter.

σ̂ is the smallest σ at which J_n(σ, ξ) vanishes for some admissible ξ. For a fixed ξ the
inner search scans a σ grid for the first sign change of J_n and refines it by bisection;
the outer search minimizes that root over ξ with bounded Nelder-Mead from random starts
on the unit sphere.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from core.config import RootSearchConfig
from core.errors import DeconvError, ErrorCode
from core.model_sim import START_STREAM, make_rng
from core.moment_engine import empirical_moments, filter_l2_norm, z_series
from core.models import (
    ComplexSeries,
    Diagnostic,
    EstimationResult,
    FilterSpec,
    MomentVector,
    Severity,
)
from core.pseudo_moment import criterion_curve, criterion_J

logger = logging.getLogger(__name__)

NO_ROOT_PENALTY = 4.0
DELAY_TOL = 1e-3


class CriterionData:
    """Supplies d_n(ξ) and ‖s̄(ξ)‖₂ for one observation series."""

    def __init__(self, y: ComplexSeries, half_width: int, p: int) -> None:
        """Initialize the provider.

        Args:
            y: Observations.
            half_width: Truncation half-width k(n).
            p: Alphabet size.
        """
        if len(y) < 2 * half_width + 1:
            raise DeconvError(
                ErrorCode.SERIES_TOO_SHORT,
                "series shorter than the truncation window",
                samples=len(y),
                window=2 * half_width + 1,
            )
        self.y = y
        self.half_width = half_width
        self.p = p

    def spec(self, xi: np.ndarray) -> FilterSpec:
        """Filter spec for a parameter vector."""
        return FilterSpec(half_width=self.half_width, xi=xi)

    def __call__(self, xi: np.ndarray) -> tuple[MomentVector, float]:
        spec = self.spec(xi)
        return empirical_moments(z_series(spec, self.y), self.p), filter_l2_norm(spec)

    def criterion(self, sigma: float, xi: np.ndarray) -> float:
        """J_n(σ, ξ)."""
        spec = self.spec(xi)
        return criterion_J(sigma, spec, empirical_moments(z_series(spec, self.y), self.p))


@dataclass
class RootSearch:
    """Smallest root of σ ↦ J_n(σ, ξ) with its final bracket."""

    sigma: float
    bracket: tuple[float, float]


def default_sigma_max(y: ComplexSeries) -> float:
    """Three sample standard deviations of |Y| (floored to stay positive)."""
    return max(3.0 * float(np.std(np.abs(y.samples), ddof=1)) if len(y) > 1 else 0.0, 1e-3)


def find_sigma_root(
    xi: np.ndarray, provider: CriterionData, cfg: RootSearchConfig, sigma_max: float
) -> RootSearch:
    """Locate the smallest σ in (0, sigma_max] where J_n(·, ξ) changes sign.

    Raises:
        DeconvError: NO_ROOT when no sign change is found, even on the extended grid.
    """
    d_n, norm = provider(xi)
    j_zero = float(criterion_curve(np.zeros(1), norm, d_n)[0])
    if j_zero <= 0:
        return RootSearch(sigma=0.0, bracket=(0.0, 0.0))

    def j_of_sigma(sigma: float) -> float:
        return float(criterion_curve(np.array([sigma]), norm, d_n)[0])

    ceiling = sigma_max
    for _ in range(cfg.grid_extensions + 1):
        grid = np.linspace(0.0, ceiling, cfg.grid_steps + 1)
        values = criterion_curve(grid[1:], norm, d_n)
        crossings = np.flatnonzero(values <= 0)
        if crossings.size:
            i = int(crossings[0])
            low, high = float(grid[i]), float(grid[i + 1])
            if values[i] == 0:
                return RootSearch(sigma=high, bracket=(low, high))
            root = optimize.bisect(j_of_sigma, low, high, xtol=cfg.bisect_tol)
            return RootSearch(sigma=float(root), bracket=(low, high))
        ceiling *= 2.0
    raise DeconvError(
        ErrorCode.NO_ROOT,
        "J_n does not change sign on the σ grid",
        sigma_max=ceiling / 2.0,
    )


def sigma_root(
    xi: np.ndarray, provider: CriterionData, cfg: RootSearchConfig, sigma_max: float | None = None
) -> float:
    """σ*(ξ): smallest σ with J_n(σ, ξ) = 0, refined to ``cfg.bisect_tol``."""
    ceiling = sigma_max or cfg.sigma_max or default_sigma_max(provider.y)
    return find_sigma_root(np.asarray(xi, dtype=np.float64), provider, cfg, ceiling).sigma


def normalize_filter(theta_raw: np.ndarray) -> np.ndarray:
    """Scale to unit norm and make the largest-magnitude coefficient positive.

    Raises:
        DeconvError: ZERO_FILTER for an all-zero vector.
    """
    theta = np.asarray(theta_raw, dtype=np.float64)
    norm = float(np.linalg.norm(theta))
    if norm == 0 or not math.isfinite(norm):
        raise DeconvError(ErrorCode.ZERO_FILTER, "cannot normalize a zero filter")
    theta = theta / norm
    if theta[int(np.argmax(np.abs(theta)))] < 0:
        theta = -theta
    return theta


def align_delay(theta: np.ndarray, tol: float = DELAY_TOL) -> tuple[np.ndarray, int]:
    """Move the first significant tap to the start of the window.

    Only leading taps with ``|θ_i| < tol · max|θ|`` are dropped, so the aligned filter is
    the same inverse filter up to a delay. When the first tap is already significant the
    filter comes back unchanged with shift 0.

    Returns:
        Aligned unit-norm filter and the number of positions shifted.
    """
    theta = np.asarray(theta, dtype=np.float64)
    magnitude = np.abs(theta)
    shift = int(np.flatnonzero(magnitude >= tol * magnitude.max())[0])
    if shift == 0:
        return theta, 0
    aligned = np.concatenate([theta[shift:], np.zeros(shift)])
    return normalize_filter(aligned), shift


def unit_sphere_starts(dimension: int, count: int, seed: int) -> np.ndarray:
    """Random start directions, uniformly distributed on the unit sphere."""
    rng = make_rng(seed, START_STREAM)
    draws = rng.standard_normal((count, dimension))
    return draws / np.linalg.norm(draws, axis=1, keepdims=True)


@dataclass
class _StartOutcome:
    index: int
    sigma: float
    xi: np.ndarray
    residual: float
    success: bool
    found: bool


def _run_start(
    index: int,
    x0: np.ndarray,
    provider: CriterionData,
    cfg: RootSearchConfig,
    sigma_max: float,
) -> _StartOutcome:
    penalty = NO_ROOT_PENALTY * sigma_max

    def objective(xi: np.ndarray) -> float:
        try:
            return find_sigma_root(xi, provider, cfg, sigma_max).sigma
        except DeconvError as exc:
            if exc.code not in (ErrorCode.NO_ROOT, ErrorCode.ZERO_FILTER):
                raise
            return penalty

    low, high = cfg.xi_box
    x0 = np.clip(x0, low, high)
    simplex = np.vstack([x0, x0 + cfg.simplex_step * np.eye(x0.size)])
    result = optimize.minimize(
        objective,
        x0,
        method="Nelder-Mead",
        bounds=[(low, high)] * x0.size,
        options={
            "xatol": cfg.simplex_tol,
            "fatol": cfg.simplex_tol,
            "maxiter": cfg.max_iter,
            "initial_simplex": np.clip(simplex, low, high),
        },
    )
    xi = np.asarray(result.x, dtype=np.float64)
    sigma = float(result.fun)
    found = sigma < penalty and bool(np.any(xi))
    residual = abs(provider.criterion(sigma, xi)) if found else math.inf
    logger.debug(
        "Start %d: sigma=%.6g found=%s nfev=%d success=%s",
        index,
        sigma,
        found,
        result.nfev,
        result.success,
    )
    return _StartOutcome(index, sigma, xi, residual, bool(result.success), found)


def estimate(
    y: ComplexSeries, spec_family: FilterSpec, p: int, cfg: RootSearchConfig
) -> EstimationResult:
    """Estimate (σ̂, ξ̂) and the normalized inverse filter θ̂.

    Args:
        y: Observations.
        spec_family: Template fixing the family and half-width; its ξ is ignored.
        p: Alphabet size.
        cfg: Search hyperparameters.

    Returns:
        EstimationResult with θ̂ normalized for scale, sign and delay.

    Raises:
        DeconvError: ALL_STARTS_FAILED when no start finds a root.
    """
    provider = CriterionData(y, spec_family.half_width, p)
    sigma_max = cfg.sigma_max or default_sigma_max(y)
    starts = unit_sphere_starts(spec_family.dimension, cfg.n_starts, cfg.seed)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(
                pool.map(
                    lambda item: _run_start(item[0], item[1], provider, cfg, sigma_max),
                    enumerate(starts),
                )
            )
    else:
        outcomes = [_run_start(i, x0, provider, cfg, sigma_max) for i, x0 in enumerate(starts)]

    found = [o for o in outcomes if o.found]
    if not found:
        raise DeconvError(
            ErrorCode.ALL_STARTS_FAILED,
            "no start located a root of J_n",
            n_starts=cfg.n_starts,
            sigma_max=sigma_max,
        )
    best = min(found, key=lambda o: (o.sigma, o.residual, o.index))

    theta_root = normalize_filter(best.xi)
    theta, shift = align_delay(theta_root, cfg.delay_tol)
    root = find_sigma_root(best.xi, provider, cfg, sigma_max)
    threshold = cfg.residual_rtol * abs(provider.criterion(0.0, best.xi))
    converged = best.success and best.residual <= threshold

    diagnostics: list[Diagnostic] = []
    if not converged:
        diagnostics.append(
            Diagnostic(
                code=ErrorCode.NO_ROOT,
                severity=Severity.WARNING,
                message=f"outer search did not converge (|J|={best.residual:.3g}, threshold={threshold:.3g})",
            )
        )
        logger.warning("Estimate not converged: |J|=%.3g threshold=%.3g", best.residual, threshold)

    logger.info("Estimated sigma=%.6g from start %d (shift %d)", best.sigma, best.index, shift)
    return EstimationResult(
        sigma_hat=best.sigma,
        xi_hat=best.xi,
        theta_hat=theta,
        theta_root=theta_root,
        j_residual=best.residual,
        residual_threshold=threshold,
        start_used=best.index,
        converged=converged,
        half_width=spec_family.half_width,
        delay_shift=shift,
        delay_tol=cfg.delay_tol,
        root_bracket=root.bracket,
        start_sigmas=[o.sigma for o in outcomes],
        diagnostics=diagnostics,
    )
