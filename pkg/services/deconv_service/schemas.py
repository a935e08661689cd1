"""Pydantic schemas for the deconvolution service API."""

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator


class SimulateRequest(BaseModel):
    """Parameters of a simulated observation sequence."""

    preset: Literal["mixture", "ar2"] = Field(default="mixture", description="Simulation preset")
    sigma0: float = Field(default=0.05, ge=0, description="Noise level")
    n: int = Field(default=2000, ge=1, le=1_000_000, description="Number of observations")
    seed: int = Field(default=0, ge=0, description="Seed of the signal and noise streams")


class Series(BaseModel):
    """Complex observations split into real and imaginary parts."""

    re: list[float] = Field(..., min_length=1, description="Real parts")
    im: list[float] = Field(..., min_length=1, description="Imaginary parts")
    origin: int = Field(default=1, description="Time index of the first sample")

    @model_validator(mode="after")
    def _same_length(self) -> "Series":
        if len(self.re) != len(self.im):
            raise ValueError("re and im must have the same length")
        return self


class SearchOverrides(BaseModel):
    """Optional root-search hyperparameters."""

    sigma_max: float | None = Field(default=None, gt=0)
    n_starts: int | None = Field(default=None, ge=1, le=64)
    seed: int | None = Field(default=None, ge=0)
    bisect_tol: float | None = Field(default=None, gt=0)


class EstimateRequest(Series):
    """Observations plus estimation settings."""

    p: int = Field(default=3, ge=1, le=12, description="Alphabet size")
    kn: int = Field(default=1, ge=0, description="Truncation half-width k(n)")
    search: SearchOverrides = Field(default_factory=SearchOverrides)
    with_cov: bool = Field(default=False, description="Add plug-in standard errors")


class EstimateResponse(BaseModel):
    """Estimation result, recovered alphabet and weights."""

    estimate: dict[str, Any]
    alphabet: dict[str, Any]
    weights: dict[str, Any]
    covariance: dict[str, Any] | None = None


class HTTPError(BaseModel):
    """Error response carrying the pipeline error code."""

    detail: str = Field(..., description="Error message")
    code: str = Field(..., description="Error code")
