"""Noise deconvolution of conjugate moments and the determinant criterion J_n.

A(β) maps pseudo-moments to moments of Z = R + β V with V standard complex Gaussian;
A⁻¹(β) has the closed form of complex Hermite polynomials. Both are sums
Σ_r β^{2r} T_r of integer coefficient tensors cached per alphabet size.
"""

import logging
import math
from functools import lru_cache

import numpy as np

from core.errors import DeconvError, ErrorCode
from core.moment_engine import filter_l2_norm
from core.models import FilterSpec, MomentVector, PseudoMomentMatrix

logger = logging.getLogger(__name__)

MAX_ALPHABET = 12
ASYMMETRY_TOL = 1e-10
DET_IMAG_TOL = 1e-10


def _check_size(p: int) -> None:
    if not 1 <= p <= MAX_ALPHABET:
        raise DeconvError(
            ErrorCode.INVALID_CONFIG, f"alphabet size must be in 1..{MAX_ALPHABET}", p=p
        )


def _gamma(m: int, l: int) -> int:
    """E[W^l conj(W)^m] for standard complex Gaussian W."""
    return math.factorial(m) if m == l else 0


@lru_cache(maxsize=None)
def _forward_terms(p: int) -> np.ndarray:
    """T_r with A(β) = Σ_r β^{2r} T_r; rows (j, k), columns (m, l)."""
    size = p + 1
    terms = np.zeros((size, size**2, size**2))
    for j in range(size):
        for k in range(size):
            for m in range(j + 1):
                for l in range(k + 1):
                    g = _gamma(j - m, k - l)
                    if g:
                        coeff = math.comb(k, l) * math.comb(j, m) * g
                        terms[j - m, j * size + k, m * size + l] = coeff
    terms.flags.writeable = False
    return terms


@lru_cache(maxsize=None)
def _inverse_terms(p: int) -> np.ndarray:
    """T_r with A⁻¹(β) = Σ_r β^{2r} T_r.

    Row (j, k) reaches column (m, k-j+m) for (j-k)∨0 <= m <= j, which keeps every
    column index inside the (p+1)^2 range.
    """
    size = p + 1
    terms = np.zeros((size, size**2, size**2))
    for j in range(size):
        for k in range(size):
            for m in range(max(j - k, 0), j + 1):
                r = j - m
                coeff = (-1) ** r * math.comb(k, r) * math.comb(j, m) * math.factorial(r)
                terms[r, j * size + k, m * size + (k - r)] = coeff
    terms.flags.writeable = False
    return terms


def _even_powers(beta: np.ndarray, p: int) -> np.ndarray:
    return np.asarray(beta, dtype=np.float64)[..., None] ** (2 * np.arange(p + 1))


def build_A(beta: float, p: int) -> np.ndarray:
    """Dense A(β) with d = A(β) d̃."""
    _check_size(p)
    if beta < 0:
        raise DeconvError(ErrorCode.INVALID_CONFIG, "beta must be nonnegative")
    return np.tensordot(_even_powers(np.float64(beta), p), _forward_terms(p), axes=1)


def build_A_inverse(beta: float, p: int) -> np.ndarray:
    """Closed-form A⁻¹(β) with d̃ = A⁻¹(β) d."""
    _check_size(p)
    if beta < 0:
        raise DeconvError(ErrorCode.INVALID_CONFIG, "beta must be nonnegative")
    return np.tensordot(_even_powers(np.float64(beta), p), _inverse_terms(p), axes=1)


def pseudo_moments(d_n: MomentVector, sigma: float, norm: float) -> MomentVector:
    """Pseudo-moments d̃ = A⁻¹(σ‖s̄‖₂) d_n."""
    inverse = build_A_inverse(sigma * norm, d_n.p)
    return MomentVector(entries=inverse @ d_n.entries, p=d_n.p)


def _arrange(entries: np.ndarray, p: int) -> np.ndarray:
    # flat j*(p+1)+k reshapes to [j][k]; rows must be k
    return np.swapaxes(entries.reshape(*entries.shape[:-1], p + 1, p + 1), -1, -2)


def _symmetrize(raw: np.ndarray) -> np.ndarray:
    return 0.5 * (raw + np.swapaxes(raw.conj(), -1, -2))


def hankel_matrix(d_tilde: MomentVector) -> PseudoMomentMatrix:
    """Arrange d̃ with ``entry[k][j] = d̃[j(p+1)+k]`` and symmetrize it."""
    raw = _arrange(d_tilde.entries, d_tilde.p)
    scale = max(1.0, float(np.max(np.abs(raw))))
    asymmetry = float(np.max(np.abs(raw - raw.conj().T))) / scale
    if asymmetry > ASYMMETRY_TOL:
        logger.warning("Pseudo-moment matrix asymmetry %.3g exceeds tolerance", asymmetry)
    return PseudoMomentMatrix(entries=_symmetrize(raw), raw_asymmetry=asymmetry)


def pseudo_moment_matrix(sigma: float, spec: FilterSpec, d_n: MomentVector) -> PseudoMomentMatrix:
    """D̃_n(σ, s̄(ξ)) for the given filter and empirical moments."""
    return hankel_matrix(pseudo_moments(d_n, sigma, filter_l2_norm(spec)))


def _real_determinant(det: complex, matrix: np.ndarray) -> float:
    scale = max(abs(det), float(np.linalg.norm(matrix)) ** matrix.shape[0], np.finfo(float).tiny)
    if abs(det.imag) > DET_IMAG_TOL * scale:
        logger.warning("Determinant imaginary part %.3g above tolerance", det.imag)
    return float(det.real)


def criterion_J(sigma: float, spec: FilterSpec, d_n: MomentVector) -> float:
    """J_n(σ, ξ) = det D̃_n(σ, s̄(ξ)), real part of the Hermitian determinant."""
    matrix = pseudo_moment_matrix(sigma, spec, d_n).entries
    return _real_determinant(complex(np.linalg.det(matrix)), matrix)


def criterion_curve(sigmas: np.ndarray, norm: float, d_n: MomentVector) -> np.ndarray:
    """J_n evaluated on a σ grid at once, for a filter of l2-norm ``norm``."""
    sigmas = np.asarray(sigmas, dtype=np.float64)
    inverses = np.tensordot(_even_powers(sigmas * norm, d_n.p), _inverse_terms(d_n.p), axes=1)
    d_tilde = inverses @ d_n.entries
    matrices = _symmetrize(_arrange(d_tilde, d_n.p))
    return np.linalg.det(matrices).real


def g_transform(j_value: float) -> float:
    """sign(J) * log(|J| + 1): same sign and roots as J, log-compressed."""
    return float(np.sign(j_value) * np.log1p(abs(j_value)))


def hermitian_form(matrix: PseudoMomentMatrix, v: np.ndarray) -> float:
    """Q_v = Σ_{k,j} D̃[k][j] v_k conj(v_j)."""
    v = np.asarray(v, dtype=np.complex128)
    return float(np.real(v @ matrix.entries @ v.conj()))
