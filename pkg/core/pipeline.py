"""End-to-end estimation of one observation series."""

import logging
from dataclasses import dataclass
from typing import Any

from core.asymptotics import plug_in_covariance
from core.config import RootSearchConfig
from core.distribution_recovery import recover_distribution
from core.estimator import CriterionData, estimate
from core.models import (
    AlphabetEstimate,
    ComplexSeries,
    CovarianceReport,
    EstimationResult,
    FilterSpec,
    WeightEstimate,
)
from core.pseudo_moment import pseudo_moments

logger = logging.getLogger(__name__)


@dataclass
class EstimateReport:
    """Everything the pipeline recovers from one series."""

    result: EstimationResult
    alphabet: AlphabetEstimate
    weights: WeightEstimate
    covariance: CovarianceReport | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        data = {
            "estimate": self.result.to_dict(),
            "alphabet": self.alphabet.to_dict(),
            "weights": self.weights.to_dict(),
        }
        if self.covariance is not None:
            data["covariance"] = self.covariance.to_dict()
        return data

    def format_report(self) -> str:
        """Format the estimate as a human-readable report."""
        r = self.result
        lines = [
            "=" * 60,
            "DECONVOLUTION ESTIMATE",
            "=" * 60,
            f"sigma_hat:   {r.sigma_hat:.6f}",
            f"theta_hat:   {', '.join(f'{v:.4f}' for v in r.theta_hat)}",
            f"delay shift: {r.delay_shift}",
            f"converged:   {r.converged} (|J| = {r.j_residual:.3g}, start {r.start_used})",
            "-" * 60,
            f"{'point':>28} {'weight':>12}",
        ]
        for z, w in zip(self.alphabet.points, self.weights.weights, strict=True):
            lines.append(f"{f'{z.real:.4f}{z.imag:+.4f}i':>28} {w:>12.4f}")
        if self.weights.negative_flag:
            lines.append("WARNING: negative weights recovered")
        if self.covariance is not None:
            lines.extend(
                [
                    "-" * 60,
                    f"std(sigma_hat): {self.covariance.sigma_std:.6f}",
                    f"std(theta_hat): {', '.join(f'{v:.4f}' for v in self.covariance.std_errors[:-1])}",
                ]
            )
        for diag in r.diagnostics:
            lines.append(f"[{diag.severity.value.upper()}] {diag.message}")
        lines.append("=" * 60)
        return "\n".join(lines)


def run_estimate(
    y: ComplexSeries,
    p: int,
    kn: int,
    search: RootSearchConfig,
    with_cov: bool = False,
) -> EstimateReport:
    """Estimate σ̂ and θ̂, then the alphabet and weights, optionally with standard errors.

    Raises:
        DeconvError: from any stage; covariance failures included when ``with_cov`` is set.
    """
    result = estimate(y, FilterSpec.identity(kn), p, search)
    d_n, norm = CriterionData(y, kn, p)(result.theta_root)
    alphabet, weights = recover_distribution(pseudo_moments(d_n, result.sigma_hat, norm))
    covariance = plug_in_covariance(result, y, p) if with_cov else None
    logger.info("Recovered %d support points (negative weights: %s)", p, weights.negative_flag)
    return EstimateReport(result=result, alphabet=alphabet, weights=weights, covariance=covariance)
