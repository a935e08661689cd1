"""Tests for experiment and search configuration."""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from core.config import (
    ExperimentConfig,
    RootSearchConfig,
    build_experiment_config,
    build_search_config,
    load_experiment_config,
)
from core.errors import DeconvError, ErrorCode


class TestRootSearchConfig:
    """Tests for search hyperparameters."""

    def test_defaults(self) -> None:
        """Test the documented defaults."""
        cfg = RootSearchConfig()

        assert cfg.sigma_max is None
        assert cfg.grid_steps == 200
        assert cfg.grid_extensions == 1
        assert cfg.bisect_tol == 1e-6
        assert cfg.n_starts == 4
        assert cfg.xi_box == (-2.0, 2.0)
        assert cfg.delay_tol == 1e-3

    def test_box_must_contain_origin(self) -> None:
        """Test that a box excluding 0 is rejected."""
        with pytest.raises(ValidationError):
            RootSearchConfig(xi_box=(0.0, 1.0))

    def test_unknown_field(self) -> None:
        """Test that typos in field names are rejected."""
        with pytest.raises(ValidationError):
            RootSearchConfig(n_start=3)

    def test_frozen(self) -> None:
        """Test that configurations are immutable."""
        cfg = RootSearchConfig()
        with pytest.raises(ValidationError):
            cfg.n_starts = 9

    def test_build_ignores_none(self) -> None:
        """Test that None values fall back to defaults."""
        cfg = build_search_config(n_starts=None, sigma_max=2.0)
        assert cfg.n_starts == 4
        assert cfg.sigma_max == 2.0

    def test_build_invalid(self) -> None:
        """Test INVALID_CONFIG for out-of-range values."""
        with pytest.raises(DeconvError) as exc_info:
            build_search_config(grid_steps=1)
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG


class TestExperimentConfig:
    """Tests for Monte Carlo experiment configuration."""

    @pytest.mark.parametrize(
        "name", ["mixture.json", "mixture_kn2.json", "mixture_sigma1.json", "ar2.json", "ar2_kn2.json"]
    )
    def test_shipped_configs_load(self, configs_dir: Path, name: str) -> None:
        """Test that every shipped configuration validates."""
        cfg = load_experiment_config(configs_dir / name)
        assert cfg.seed == 20240517
        assert cfg.preset in ("mixture", "ar2")

    def test_mixture_values(self, configs_dir: Path) -> None:
        """Test the mixture experiment parameters."""
        cfg = load_experiment_config(configs_dir / "mixture.json")

        assert cfg.sigma0 == 0.05
        assert cfg.n == 2000
        assert cfg.kn == 1
        assert cfg.replications == 20
        assert cfg.with_scatter
        assert cfg.search.n_starts == 4

    def test_overrides(self, configs_dir: Path, tmp_path: Path) -> None:
        """Test that keyword overrides replace file values and None is ignored."""
        cfg = load_experiment_config(
            configs_dir / "mixture.json", replications=2, output_dir=tmp_path, seed=None
        )

        assert cfg.replications == 2
        assert cfg.output_dir == tmp_path
        assert cfg.seed == 20240517

    def test_yaml(self, tmp_path: Path) -> None:
        """Test loading the same fields from YAML."""
        path = tmp_path / "exp.yaml"
        path.write_text("preset: ar2\nn: 1000\nsearch:\n  n_starts: 6\n")
        cfg = load_experiment_config(path)

        assert cfg.preset == "ar2"
        assert cfg.search.n_starts == 6

    def test_empty_file(self, tmp_path: Path) -> None:
        """Test that an empty file gives the defaults."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_experiment_config(path) == ExperimentConfig()

    def test_not_a_mapping(self, tmp_path: Path) -> None:
        """Test INVALID_CONFIG for a list at the top level."""
        path = tmp_path / "list.json"
        path.write_text(json.dumps([1, 2]))
        with pytest.raises(DeconvError) as exc_info:
            load_experiment_config(path)
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG

    def test_unknown_preset(self) -> None:
        """Test INVALID_CONFIG for an unknown preset."""
        with pytest.raises(DeconvError) as exc_info:
            build_experiment_config({"preset": "qam16"})
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG

    def test_window_longer_than_series(self) -> None:
        """Test that n must cover 2*kn+1 samples."""
        with pytest.raises(DeconvError) as exc_info:
            build_experiment_config({"n": 4, "kn": 2})
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG

    def test_nested_unknown_field(self) -> None:
        """Test that unknown search fields are rejected."""
        with pytest.raises(DeconvError):
            build_experiment_config({"search": {"n_start": 2}})
