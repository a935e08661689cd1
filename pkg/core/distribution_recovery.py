"""Recovery of the input alphabet and its probabilities from pseudo-moments."""

import logging

import numpy as np
from numpy.polynomial import polynomial
from scipy import linalg

from core.errors import DeconvError, ErrorCode
from core.models import AlphabetEstimate, MomentVector, PseudoMomentMatrix, WeightEstimate
from core.pseudo_moment import hankel_matrix

logger = logging.getLogger(__name__)

LEADING_COEFF_TOL = 1e-10
DISTINCT_POINTS_TOL = 1e-10


def canonical_order(points: np.ndarray | list[complex]) -> np.ndarray:
    """Indices ordering points by descending real part, then descending imaginary part."""
    values = np.asarray(points, dtype=np.complex128).reshape(-1)
    return np.lexsort((-values.imag, -values.real))


def canonical_sort(points: np.ndarray | list[complex]) -> np.ndarray:
    """Points in canonical order."""
    values = np.asarray(points, dtype=np.complex128).reshape(-1)
    return values[canonical_order(values)]


def support_points(d_tilde: PseudoMomentMatrix) -> AlphabetEstimate:
    """Alphabet as the roots of the smallest-eigenvalue eigenvector polynomial.

    The eigenproblem is solved for conj(D̃) (the transpose of the Hermitian D̃): its
    null direction v satisfies Σ_j v_j a^j = 0 at every support point a.

    Raises:
        DeconvError: DEGENERATE_LEADING_COEFF when the polynomial loses its top degree.
    """
    eigenvalues, eigenvectors = linalg.eigh(d_tilde.entries.conj())
    v = eigenvectors[:, 0]
    lead = v[-1]
    if abs(lead) < LEADING_COEFF_TOL:
        raise DeconvError(
            ErrorCode.DEGENERATE_LEADING_COEFF,
            "leading coefficient of the eigenvector polynomial vanishes",
            leading=float(abs(lead)),
        )
    v = v * (abs(lead) / lead)
    v = v / np.linalg.norm(v)
    companion = polynomial.polycompanion(v / v[-1])
    roots = np.linalg.eigvals(np.atleast_2d(companion))
    return AlphabetEstimate(
        points=canonical_sort(roots),
        eigvec=v,
        min_eigenvalue=float(eigenvalues[0]),
    )


def weights(d_tilde: MomentVector, points: np.ndarray) -> WeightEstimate:
    """Solve Σ_i q_i a_i^k = d̃(j=0, k) for k = 0..p-1.

    Raises:
        DeconvError: SINGULAR_VANDERMONDE when two points coincide.
    """
    points = np.asarray(points, dtype=np.complex128)
    p = points.size
    gaps = np.abs(points[:, None] - points[None, :]) + np.eye(p)
    if np.min(gaps) < DISTINCT_POINTS_TOL:
        raise DeconvError(ErrorCode.SINGULAR_VANDERMONDE, "support points coincide")
    vandermonde = np.vander(points, p, increasing=True).T
    rhs = d_tilde.entries[:p]
    solution = linalg.solve(vandermonde, rhs)
    real = np.real(solution)
    negative = bool(np.any(real < 0))
    if negative:
        logger.warning("Recovered weights contain negative values: %s", np.round(real, 4))
    return WeightEstimate(
        weights=real,
        imag_residual=float(np.max(np.abs(np.imag(solution)))),
        negative_flag=negative,
    )


def recover_distribution(d_tilde: MomentVector) -> tuple[AlphabetEstimate, WeightEstimate]:
    """Alphabet and weights from a pseudo-moment vector at (σ̂, θ̂)."""
    alphabet = support_points(hankel_matrix(d_tilde))
    return alphabet, weights(d_tilde, alphabet.points)
