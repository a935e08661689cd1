"""Pytest configuration and fixtures."""

from pathlib import Path

import numpy as np
import pytest

from core.config import RootSearchConfig
from core.estimator import estimate
from core.model_sim import preset_distribution, preset_model, simulate_model
from core.models import ComplexSeries, DiscreteComplexDist, EstimationResult, FilterSpec


@pytest.fixture
def project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent


@pytest.fixture
def configs_dir(project_root: Path) -> Path:
    """Get the directory of the shipped experiment configurations."""
    return project_root / "configs"


@pytest.fixture
def spec_path(project_root: Path) -> Path:
    """Get the path to the OpenAPI contract."""
    return project_root / "spec" / "openapi.yaml"


@pytest.fixture
def mixture_dist() -> DiscreteComplexDist:
    """Three-point alphabet of the simulation presets."""
    return preset_distribution()


@pytest.fixture
def two_point_dist() -> DiscreteComplexDist:
    """Symmetric binary alphabet {1, -1}."""
    return DiscreteComplexDist(points=np.array([1.0, -1.0]), weights=np.array([0.5, 0.5]))


@pytest.fixture(scope="session")
def mixture_series() -> ComplexSeries:
    """Mixture preset, sigma0 = 0.05, n = 2000."""
    return simulate_model(preset_model("mixture", 0.05, 2000, seed=1))


@pytest.fixture(scope="session")
def short_mixture_series() -> ComplexSeries:
    """Mixture preset, sigma0 = 0.05, n = 500."""
    return simulate_model(preset_model("mixture", 0.05, 500, seed=2))


@pytest.fixture
def quick_search() -> RootSearchConfig:
    """Search settings small enough for unit tests."""
    return RootSearchConfig(n_starts=2, grid_steps=100, seed=3)


@pytest.fixture(scope="session")
def mixture_estimate(mixture_series: ComplexSeries) -> EstimationResult:
    """Estimate on the n = 2000 mixture series with k(n) = 1."""
    return estimate(mixture_series, FilterSpec.identity(1), 3, RootSearchConfig(n_starts=3, seed=5))
