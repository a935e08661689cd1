"""Filtered process Z_t(s̄(ξ)) and its empirical conjugate moments."""

import logging

import numpy as np

from core.errors import DeconvError, ErrorCode
from core.model_sim import apply_filter
from core.models import ComplexSeries, DiscreteComplexDist, FilterSpec, MomentVector

logger = logging.getLogger(__name__)


def z_series(spec: FilterSpec, y: ComplexSeries) -> ComplexSeries:
    """Apply the truncated filter: Z_t = sum_{|k| <= k(n)} s_k Y_{t-k}.

    For observations indexed 1..n the result covers t = 1+k(n) .. n-k(n).

    Raises:
        DeconvError: SERIES_TOO_SHORT when the series is shorter than the window.
    """
    width = 2 * spec.half_width + 1
    if len(y) < width:
        raise DeconvError(
            ErrorCode.SERIES_TOO_SHORT,
            "series shorter than the truncation window",
            samples=len(y),
            window=width,
        )
    return apply_filter(spec.taps, y)


def moment_contributions(z: ComplexSeries, p: int) -> np.ndarray:
    """Per-sample terms Z_t^k conj(Z_t)^j, shape (T, (p+1)^2), column j*(p+1)+k."""
    powers = np.vander(z.samples, p + 1, increasing=True)
    terms = powers.conj()[:, :, None] * powers[:, None, :]
    return terms.reshape(len(z), (p + 1) ** 2)


def empirical_moments(z: ComplexSeries, p: int) -> MomentVector:
    """Empirical conjugate moment vector of the filtered process."""
    if p < 1:
        raise DeconvError(ErrorCode.INVALID_CONFIG, "alphabet size must be at least 1", p=p)
    terms = moment_contributions(z, p)
    # pairwise summation only applies along the contiguous axis
    sums = np.ascontiguousarray(terms.T).sum(axis=1)
    return MomentVector(entries=sums / len(z), p=p)


def filter_l2_norm(spec: FilterSpec) -> float:
    """Euclidean norm of the truncated coefficients."""
    return float(np.linalg.norm(spec.taps.coeffs))


def population_moments(dist: DiscreteComplexDist, p: int) -> MomentVector:
    """Exact moments sum_i pi_i a_i^k conj(a_i)^j of the alphabet distribution."""
    powers = np.vander(dist.points, p + 1, increasing=True)
    entries = np.einsum("i,ij,ik->jk", dist.weights, powers.conj(), powers)
    return MomentVector(entries=entries.reshape(-1), p=p)


def noisy_population_moments(dist: DiscreteComplexDist, p: int, beta: float) -> MomentVector:
    """Exact moments of X + beta * W, i.e. A(beta) applied to the population moments."""
    from core.pseudo_moment import build_A  # pseudo_moment depends on this module

    clean = population_moments(dist, p)
    return MomentVector(entries=build_A(beta, p) @ clean.entries, p=p)


def moments_to_csv_rows(moments: MomentVector) -> list[list[str]]:
    """Header plus (j, k, re, im) rows with round-trip float formatting."""
    rows = [["j", "k", "re", "im"]]
    rows.extend([str(j), str(k), repr(re), repr(im)] for j, k, re, im in moments.to_rows())
    return rows
