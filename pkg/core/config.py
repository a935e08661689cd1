"""Configuration models for root search and Monte Carlo experiments."""

import logging
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from core.errors import DeconvError, ErrorCode

logger = logging.getLogger(__name__)

PresetName = Literal["mixture", "ar2"]


class RootSearchConfig(BaseModel):
    """Hyperparameters of the nested (σ, ξ) search.

    ``xi_box`` realizes the compact parameter set as a coordinate box.
    ``sigma_max`` left unset means three times the sample standard deviation of |Y|.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma_max: float | None = Field(default=None, gt=0, description="Ceiling of the σ scan")
    grid_steps: int = Field(default=200, ge=2, description="Points in the coarse σ grid")
    grid_extensions: int = Field(default=1, ge=0, description="Times the grid is doubled on NO_ROOT")
    bisect_tol: float = Field(default=1e-6, gt=0, description="Absolute σ tolerance of bisection")
    n_starts: int = Field(default=4, ge=1, description="Random starts of the outer search")
    simplex_tol: float = Field(default=1e-6, gt=0, description="Nelder-Mead xatol and fatol")
    simplex_step: float = Field(default=0.1, gt=0, description="Edge of the initial simplex")
    max_iter: int = Field(default=2000, ge=1, description="Nelder-Mead iteration cap per start")
    xi_box: tuple[float, float] = Field(default=(-2.0, 2.0), description="Bounds of every ξ coordinate")
    residual_rtol: float = Field(default=1e-3, gt=0, description="|J| threshold relative to J(0, ξ̂)")
    delay_tol: float = Field(
        default=1e-3, ge=0, lt=1, description="Leading taps below this fraction of the peak may be dropped"
    )
    seed: int = Field(default=0, ge=0, description="Seed of the random start directions")
    workers: int = Field(default=1, ge=1, description="Concurrent outer searches")

    @model_validator(mode="after")
    def _check_box(self) -> "RootSearchConfig":
        low, high = self.xi_box
        if not low < 0 < high:
            raise ValueError("xi_box must strictly contain 0")
        return self


class ExperimentConfig(BaseModel):
    """One Monte Carlo experiment on a named simulation preset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    preset: PresetName = "mixture"
    sigma0: float = Field(default=0.05, ge=0)
    n: int = Field(default=2000, ge=1)
    kn: int = Field(default=1, ge=0, description="Truncation half-width k(n)")
    replications: int = Field(default=20, ge=1)
    seed: int = Field(default=20240517, ge=0)
    search: RootSearchConfig = Field(default_factory=RootSearchConfig)
    output_dir: Path = Path("results")
    workers: int = Field(default=1, ge=1, description="Concurrent replications")
    with_scatter: bool = False
    with_cov: bool = False

    @model_validator(mode="after")
    def _check_window(self) -> "ExperimentConfig":
        if self.n < 2 * self.kn + 1:
            raise ValueError("n must cover the truncation window 2*kn+1")
        return self


def _read_mapping(path: Path) -> dict[str, Any]:
    with open(path) as f:
        data = yaml.safe_load(f)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise DeconvError(ErrorCode.INVALID_CONFIG, f"{path} does not contain a mapping")
    return data


def load_experiment_config(path: str | Path, **overrides: Any) -> ExperimentConfig:
    """Load an experiment configuration from a JSON or YAML file.

    Args:
        path: Configuration file; JSON is read through the YAML loader.
        **overrides: Top-level fields replacing file values (``None`` values are ignored).

    Returns:
        Validated ExperimentConfig.

    Raises:
        DeconvError: INVALID_CONFIG when the file does not validate.
    """
    path = Path(path)
    data = _read_mapping(path)
    data.update({k: v for k, v in overrides.items() if v is not None})
    logger.debug("Loaded experiment config from %s", path)
    return build_experiment_config(data)


def build_experiment_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a mapping into an ExperimentConfig, raising DeconvError on failure."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise DeconvError(ErrorCode.INVALID_CONFIG, str(exc)) from exc


def build_search_config(**fields: Any) -> RootSearchConfig:
    """Validate keyword fields into a RootSearchConfig (``None`` values are ignored)."""
    try:
        return RootSearchConfig.model_validate({k: v for k, v in fields.items() if v is not None})
    except ValidationError as exc:
        raise DeconvError(ErrorCode.INVALID_CONFIG, str(exc)) from exc
