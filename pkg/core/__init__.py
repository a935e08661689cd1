"""Core modules for noisy blind deconvolution."""

from core.config import ExperimentConfig, RootSearchConfig, load_experiment_config
from core.errors import DeconvError, ErrorCode
from core.models import (
    AlphabetEstimate,
    ComplexSeries,
    CovarianceReport,
    DiscreteComplexDist,
    EstimationResult,
    FilterSpec,
    McSummary,
    MomentVector,
    PseudoMomentMatrix,
    WeightEstimate,
)
from core.pipeline import EstimateReport, run_estimate

__all__ = [
    "AlphabetEstimate",
    "ComplexSeries",
    "CovarianceReport",
    "DeconvError",
    "DiscreteComplexDist",
    "ErrorCode",
    "EstimateReport",
    "EstimationResult",
    "ExperimentConfig",
    "FilterSpec",
    "McSummary",
    "MomentVector",
    "PseudoMomentMatrix",
    "RootSearchConfig",
    "WeightEstimate",
    "load_experiment_config",
    "run_estimate",
]
