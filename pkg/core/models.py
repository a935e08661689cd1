"""Shared data models for the noisy blind deconvolution pipeline."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from core.errors import DeconvError, ErrorCode

WEIGHT_SUM_TOL = 1e-12


def complex_to_dict(value: complex) -> dict[str, float]:
    """Serialize a complex number as a JSON-friendly mapping."""
    return {"re": float(np.real(value)), "im": float(np.imag(value))}


class Severity(str, Enum):
    """Severity levels for diagnostics attached to results."""

    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass
class Diagnostic:
    """A non-fatal finding recorded while computing a result."""

    code: ErrorCode
    severity: Severity
    message: str

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"code": self.code.value, "severity": self.severity.value, "message": self.message}


@dataclass
class DiscreteComplexDist:
    """Finite-alphabet distribution of the input signal."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.complex128).reshape(-1)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if self.points.size < 1:
            raise DeconvError(ErrorCode.INVALID_DISTRIBUTION, "alphabet must have at least one point")
        if self.points.size != self.weights.size:
            raise DeconvError(
                ErrorCode.INVALID_DISTRIBUTION,
                "points and weights differ in length",
                points=self.points.size,
                weights=self.weights.size,
            )
        if np.unique(self.points).size != self.points.size:
            raise DeconvError(ErrorCode.INVALID_DISTRIBUTION, "alphabet points must be distinct")
        if np.any(self.weights <= 0):
            raise DeconvError(ErrorCode.INVALID_DISTRIBUTION, "weights must be strictly positive")
        if abs(float(np.sum(self.weights)) - 1.0) > WEIGHT_SUM_TOL:
            raise DeconvError(
                ErrorCode.INVALID_DISTRIBUTION,
                "weights must sum to 1",
                total=float(np.sum(self.weights)),
            )

    @property
    def p(self) -> int:
        """Alphabet size."""
        return int(self.points.size)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "points": [complex_to_dict(z) for z in self.points],
            "weights": [float(w) for w in self.weights],
        }


@dataclass
class ComplexSeries:
    """Finite complex sequence with the time index of its first sample."""

    samples: np.ndarray
    origin: int = 1

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.complex128).reshape(-1)
        if self.samples.size < 1:
            raise DeconvError(ErrorCode.INVALID_SERIES, "series must contain at least one sample")
        if not np.all(np.isfinite(self.samples)):
            raise DeconvError(ErrorCode.INVALID_SERIES, "series contains non-finite samples")

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def times(self) -> np.ndarray:
        """Time indices of the samples."""
        return np.arange(self.origin, self.origin + len(self))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "origin": self.origin,
            "re": self.samples.real.tolist(),
            "im": self.samples.imag.tolist(),
        }


@dataclass
class FilterTaps:
    """Finite filter: ``coeffs[m]`` is the tap at time index ``origin + m``."""

    coeffs: np.ndarray
    origin: int = 0

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs).reshape(-1)
        if self.coeffs.size < 1:
            raise DeconvError(ErrorCode.INVALID_FILTER, "filter must have at least one tap")

    def __len__(self) -> int:
        return int(self.coeffs.size)


@dataclass
class ModelConfig:
    """Parameters of one simulated observation sequence.

    Exactly one of ``filter_u`` (direct FIR filter) and ``ar_coeffs`` (finite inverse
    filter, simulated through its recursion) is used; both unset means the identity filter.
    """

    dist: DiscreteComplexDist
    sigma0: float
    n: int
    seed: int
    filter_u: FilterTaps | None = None
    ar_coeffs: np.ndarray | None = None
    burn_in: int = 200

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DeconvError(ErrorCode.INVALID_CONFIG, "n must be at least 1", n=self.n)
        if self.sigma0 < 0:
            raise DeconvError(ErrorCode.INVALID_CONFIG, "sigma0 must be nonnegative")
        if self.filter_u is not None and self.ar_coeffs is not None:
            raise DeconvError(ErrorCode.INVALID_CONFIG, "give either filter_u or ar_coeffs, not both")


class FilterFamily(str, Enum):
    """Parametric inverse-filter families."""

    FIR_DIRECT = "fir_direct"


@dataclass
class FilterSpec:
    """Truncated inverse filter s̄(ξ) on the window ``-half_width .. half_width``."""

    half_width: int
    xi: np.ndarray
    family: FilterFamily = FilterFamily.FIR_DIRECT

    def __post_init__(self) -> None:
        self.xi = np.asarray(self.xi, dtype=np.float64).reshape(-1)
        if self.half_width < 0:
            raise DeconvError(ErrorCode.INVALID_FILTER, "half_width must be nonnegative")
        if self.xi.size != 2 * self.half_width + 1:
            raise DeconvError(
                ErrorCode.INVALID_FILTER,
                "parameter dimension does not match the truncation window",
                half_width=self.half_width,
                dimension=self.xi.size,
            )
        if not np.any(self.xi):
            raise DeconvError(ErrorCode.ZERO_FILTER, "filter coefficients are all zero")

    @classmethod
    def identity(cls, half_width: int) -> "FilterSpec":
        """Delta filter with its single tap at the start of the window."""
        xi = np.zeros(2 * half_width + 1)
        xi[0] = 1.0
        return cls(half_width=half_width, xi=xi)

    @property
    def dimension(self) -> int:
        """Dimension d of the parameter vector."""
        return int(self.xi.size)

    @property
    def taps(self) -> FilterTaps:
        """Truncated coefficients with their time origin."""
        return FilterTaps(coeffs=self.xi.copy(), origin=-self.half_width)

    def with_xi(self, xi: np.ndarray) -> "FilterSpec":
        """Same family and window, new parameter."""
        return FilterSpec(half_width=self.half_width, xi=xi, family=self.family)


@dataclass
class MomentVector:
    """(Pseudo-)conjugate moments, ``entries[j*(p+1)+k] = E[Z^k conj(Z)^j]``."""

    entries: np.ndarray
    p: int

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=np.complex128).reshape(-1)
        if self.entries.size != (self.p + 1) ** 2:
            raise DeconvError(
                ErrorCode.INVALID_CONFIG,
                "moment vector length must be (p+1)^2",
                p=self.p,
                length=self.entries.size,
            )

    def entry(self, j: int, k: int) -> complex:
        """Moment of order k in Z and j in conj(Z)."""
        return complex(self.entries[j * (self.p + 1) + k])

    def as_jk(self) -> np.ndarray:
        """Entries reshaped so that ``out[j, k]`` is ``entry(j, k)``."""
        return self.entries.reshape(self.p + 1, self.p + 1)

    def to_rows(self) -> list[tuple[int, int, float, float]]:
        """Rows (j, k, re, im) for CSV dumps."""
        size = self.p + 1
        return [
            (j, k, float(self.entries[j * size + k].real), float(self.entries[j * size + k].imag))
            for j in range(size)
            for k in range(size)
        ]


@dataclass
class PseudoMomentMatrix:
    """Hankel-type matrix ``entries[k][j] = d̃[j*(p+1)+k]`` after Hermitian symmetrization."""

    entries: np.ndarray
    raw_asymmetry: float = 0.0

    @property
    def p(self) -> int:
        """Alphabet size."""
        return int(self.entries.shape[0]) - 1


@dataclass
class EstimationResult:
    """Estimated noise level and inverse filter.

    ``theta_root`` is ξ̂ normalized for scale and sign at the delay where the search found
    the root; ``theta_hat`` additionally drops leading taps below ``delay_tol`` of the peak.
    """

    sigma_hat: float
    xi_hat: np.ndarray
    theta_hat: np.ndarray
    theta_root: np.ndarray
    j_residual: float
    residual_threshold: float
    start_used: int
    converged: bool
    half_width: int
    delay_shift: int = 0
    delay_tol: float = 1e-3
    root_bracket: tuple[float, float] = (0.0, 0.0)
    start_sigmas: list[float] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def spec(self) -> FilterSpec:
        """Filter spec of the normalized estimate."""
        return FilterSpec(half_width=self.half_width, xi=self.theta_hat)

    @property
    def root_spec(self) -> FilterSpec:
        """Filter spec at which J_n(σ̂, ·) vanishes."""
        return FilterSpec(half_width=self.half_width, xi=self.theta_root)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        if self.delay_shift:
            alignment = f"dropped {self.delay_shift} leading taps below {self.delay_tol:g} of the peak"
        else:
            alignment = "no delay shift applied"
        return {
            "sigma_hat": self.sigma_hat,
            "xi_hat": self.xi_hat.tolist(),
            "theta_hat": self.theta_hat.tolist(),
            "theta_root": self.theta_root.tolist(),
            "j_residual": self.j_residual,
            "residual_threshold": self.residual_threshold,
            "start_used": self.start_used,
            "converged": self.converged,
            "half_width": self.half_width,
            "delay_shift": self.delay_shift,
            "normalization": "unit norm, largest tap positive",
            "delay_alignment": alignment,
            "root_bracket": list(self.root_bracket),
            "start_sigmas": self.start_sigmas,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }


@dataclass
class AlphabetEstimate:
    """Support points recovered from the smallest-eigenvalue eigenvector."""

    points: np.ndarray
    eigvec: np.ndarray
    min_eigenvalue: float

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "points": [complex_to_dict(z) for z in self.points],
            "eigvec": [complex_to_dict(z) for z in self.eigvec],
            "min_eigenvalue": self.min_eigenvalue,
        }


@dataclass
class WeightEstimate:
    """Probabilities of the recovered support points."""

    weights: np.ndarray
    imag_residual: float
    negative_flag: bool

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "weights": self.weights.tolist(),
            "imag_residual": self.imag_residual,
            "negative_flag": self.negative_flag,
        }


@dataclass
class CovarianceReport:
    """Plug-in asymptotic covariance of (ξ̂, σ̂), already divided by the sample size."""

    cov: np.ndarray
    alpha_hat: float
    gamma1_hat: np.ndarray
    gamma1_real: np.ndarray
    fd_step: tuple[float, float]
    bandwidth: int
    n_used: int
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def std_errors(self) -> np.ndarray:
        """Standard errors, last entry for σ̂."""
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))

    @property
    def sigma_std(self) -> float:
        """Standard error of σ̂."""
        return float(self.std_errors[-1])

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "cov": self.cov.tolist(),
            "std_errors": self.std_errors.tolist(),
            "alpha_hat": self.alpha_hat,
            "fd_step": list(self.fd_step),
            "bandwidth": self.bandwidth,
            "n_used": self.n_used,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }


@dataclass
class RunRecord:
    """Outcome of one Monte Carlo replication."""

    index: int
    seed: int
    sigma_hat: float = float("nan")
    theta_hat: np.ndarray = field(default_factory=lambda: np.zeros(0))
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    negative_flag: bool = False
    failed: bool = False
    error: str = ""
    sigma_std: float | None = None

    @property
    def kept(self) -> bool:
        """Whether the run enters the Monte Carlo averages."""
        return not self.failed and not self.negative_flag


@dataclass
class ParameterSummary:
    """Monte Carlo mean and standard deviation of one parameter."""

    name: str
    mean: complex
    std: float | None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"parameter": self.name, "mean": complex_to_dict(self.mean), "std": self.std}


@dataclass
class McSummary:
    """Aggregated Monte Carlo results."""

    parameters: list[ParameterSummary]
    n_elim: int
    n_failed: int
    runs: list[RunRecord] = field(default_factory=list)

    @property
    def n_kept(self) -> int:
        """Number of runs entering the averages."""
        return sum(1 for r in self.runs if r.kept)

    def get(self, name: str) -> ParameterSummary:
        """Look up a parameter summary by name."""
        for summary in self.parameters:
            if summary.name == name:
                return summary
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "parameters": [s.to_dict() for s in self.parameters],
            "n_elim": self.n_elim,
            "n_failed": self.n_failed,
            "n_kept": self.n_kept,
        }

    def format_report(self) -> str:
        """Format the summary as a human-readable table."""
        lines = [
            "=" * 60,
            "MONTE CARLO SUMMARY",
            "=" * 60,
            f"{'parameter':<12} {'mean':>28} {'std':>12}",
            "-" * 60,
        ]
        for s in self.parameters:
            mean = f"{s.mean.real:.4f}{s.mean.imag:+.4f}i" if s.mean.imag else f"{s.mean.real:.4f}"
            std = f"{s.std:.4f}" if s.std is not None else "-"
            lines.append(f"{s.name:<12} {mean:>28} {std:>12}")
        lines.extend(
            [
                "-" * 60,
                f"N_elim:   {self.n_elim}",
                f"N_failed: {self.n_failed}",
                "=" * 60,
            ]
        )
        return "\n".join(lines)


@dataclass
class GCurve:
    """Tabulated criterion and its log-compressed transform over a σ grid."""

    sigmas: np.ndarray
    j_values: np.ndarray
    g_values: np.ndarray

    @property
    def sign_changes(self) -> int:
        """Number of sign changes of J along the grid."""
        signs = np.sign(self.j_values)
        signs = signs[signs != 0]
        return int(np.count_nonzero(signs[1:] != signs[:-1]))
