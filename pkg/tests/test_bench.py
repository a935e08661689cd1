"""Tests for the Monte Carlo harness and its emitters."""

import csv
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from core.bench import emit_g_curve, emit_runs, emit_scatter, emit_table, run_ladder, run_monte_carlo, summarize
from core.config import ExperimentConfig, RootSearchConfig
from core.errors import DeconvError, ErrorCode
from core.models import AlphabetEstimate, ComplexSeries, DiscreteComplexDist, RunRecord


def _record(index: int, sigma: float, points: list[complex], weights: list[float], **kwargs) -> RunRecord:
    return RunRecord(
        index=index,
        seed=100 + index,
        sigma_hat=sigma,
        theta_hat=np.array([1.0]),
        points=np.array(points, dtype=complex),
        weights=np.array(weights),
        **kwargs,
    )


@pytest.fixture
def crafted_runs() -> list[RunRecord]:
    """Four replications: two kept, one with negative weights, one failed."""
    return [
        _record(2, 0.06, [-1.0, 1.0 + 1j], [0.4, 0.6]),
        _record(0, 0.04, [1.0 - 1j, -1.0], [0.5, 0.5]),
        _record(1, 0.5, [0.0, 3.0], [-0.1, 1.1], negative_flag=True),
        RunRecord(index=3, seed=103, failed=True, error="no_root"),
    ]


@pytest.fixture
def tiny_experiment(tmp_path: Path) -> ExperimentConfig:
    """Three short mixture replications."""
    return ExperimentConfig(
        preset="mixture",
        sigma0=0.05,
        n=300,
        kn=1,
        replications=3,
        seed=11,
        search=RootSearchConfig(n_starts=1, grid_steps=100),
        output_dir=tmp_path / "mc",
    )


class TestSummarize:
    """Tests for Monte Carlo aggregation."""

    def test_means_and_unbiased_std(self, crafted_runs: list[RunRecord]) -> None:
        """Test mean and N-1 std over the kept runs only."""
        summary = summarize(crafted_runs, p=2, half_width=0)
        sigma = summary.get("sigma0")

        assert sigma.mean == pytest.approx(0.05)
        assert sigma.std == pytest.approx(math.sqrt(0.0002))
        assert summary.n_elim == 1
        assert summary.n_failed == 1
        assert summary.n_kept == 2

    def test_points_in_canonical_order(self, crafted_runs: list[RunRecord]) -> None:
        """Test that a_i averages canonically sorted points and pi_i follows its point."""
        summary = summarize(crafted_runs, p=2, half_width=0)

        assert summary.get("a_1").mean == pytest.approx(1.0)
        assert summary.get("a_2").mean == pytest.approx(-1.0)
        assert summary.get("pi_1").mean == pytest.approx(0.55)

    def test_complex_std(self, crafted_runs: list[RunRecord]) -> None:
        """Test the std of a complex parameter from |x - mean|^2."""
        summary = summarize(crafted_runs, p=2, half_width=0)
        assert summary.get("a_1").std == pytest.approx(math.sqrt(2.0))

    def test_single_run_has_no_std(self, crafted_runs: list[RunRecord]) -> None:
        """Test that one kept run gives std None."""
        summary = summarize(crafted_runs[:1], p=2, half_width=0)
        assert summary.get("sigma0").std is None
        assert summary.get("sigma0").mean == pytest.approx(0.06)

    def test_runs_sorted_by_index(self, crafted_runs: list[RunRecord]) -> None:
        """Test that records are kept in index order."""
        summary = summarize(crafted_runs, p=2, half_width=0)
        assert [r.index for r in summary.runs] == [0, 1, 2, 3]


class TestEmitTable:
    """Tests for the CSV tables."""

    def test_table_layout(self, crafted_runs: list[RunRecord], tmp_path: Path) -> None:
        """Test the header, parameter rows and the elimination counts."""
        path = emit_table(summarize(crafted_runs, p=2, half_width=0), tmp_path / "table.csv")
        with open(path) as f:
            rows = list(csv.reader(f))

        assert rows[0] == ["parameter", "mean_re", "mean_im", "std"]
        assert [r[0] for r in rows[1:]] == ["sigma0", "theta_0", "a_1", "a_2", "pi_1", "pi_2", "N_elim", "N_failed"]
        assert rows[1] == ["sigma0", "0.0500000000", "0.0000000000", f"{math.sqrt(0.0002):.10f}"]
        assert rows[-2] == ["N_elim", "1", "0", ""]
        assert rows[-1] == ["N_failed", "1", "0", ""]

    def test_table_byte_stable(self, crafted_runs: list[RunRecord], tmp_path: Path) -> None:
        """Test identical bytes for identical summaries."""
        first = emit_table(summarize(crafted_runs, 2, 0), tmp_path / "a.csv").read_bytes()
        second = emit_table(summarize(list(reversed(crafted_runs)), 2, 0), tmp_path / "b.csv").read_bytes()
        assert first == second

    def test_runs_file(self, crafted_runs: list[RunRecord], tmp_path: Path) -> None:
        """Test one row per replication including failures."""
        path = emit_runs(summarize(crafted_runs, p=2, half_width=0), tmp_path / "runs.csv")
        with open(path) as f:
            rows = list(csv.DictReader(f))

        assert len(rows) == 4
        assert rows[0]["points"] == "1.0000000000-1.0000000000i -1.0000000000+0.0000000000i"
        assert rows[1]["negative_flag"] == "1"
        assert rows[3]["failed"] == "1"
        assert rows[3]["error"] == "no_root"
        assert rows[3]["sigma_hat"] == ""


class TestRunMonteCarlo:
    """Tests for the experiment driver."""

    def test_writes_outputs(self, tiny_experiment: ExperimentConfig) -> None:
        """Test that table, runs and config files are written."""
        summary = run_monte_carlo(tiny_experiment)
        out = tiny_experiment.output_dir

        assert (out / "table.csv").exists()
        assert (out / "runs.csv").exists()
        assert ExperimentConfig.model_validate_json((out / "config.json").read_text()) == tiny_experiment
        assert len(summary.runs) == 3
        assert summary.n_kept + summary.n_elim + summary.n_failed == 3

    def test_deterministic(self, tiny_experiment: ExperimentConfig, tmp_path: Path) -> None:
        """Test byte-identical tables across reruns and worker counts."""
        run_monte_carlo(tiny_experiment)
        again = tiny_experiment.model_copy(update={"output_dir": tmp_path / "again", "workers": 2})
        run_monte_carlo(again)

        for name in ("table.csv", "runs.csv"):
            assert (tiny_experiment.output_dir / name).read_bytes() == (again.output_dir / name).read_bytes()

    def test_no_write(self, tiny_experiment: ExperimentConfig) -> None:
        """Test that write=False leaves the output directory alone."""
        run_monte_carlo(tiny_experiment.model_copy(update={"replications": 1}), write=False)
        assert not tiny_experiment.output_dir.exists()

    def test_ladder(self, tiny_experiment: ExperimentConfig) -> None:
        """Test one table per sample size and the combined ladder file."""
        cfg = tiny_experiment.model_copy(update={"replications": 1})
        summaries = run_ladder(cfg, [200, 300])

        assert sorted(summaries) == [200, 300]
        assert (cfg.output_dir / "n200" / "table.csv").exists()
        with open(cfg.output_dir / "ladder.csv") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["n", "parameter", "mean_re", "mean_im", "std"]
        assert {r[0] for r in rows[1:]} == {"200", "300"}


class TestFigures:
    """Tests for the SVG and G-curve emitters."""

    def test_scatter_is_reproducible_svg(
        self, short_mixture_series: ComplexSeries, mixture_dist: DiscreteComplexDist, tmp_path: Path
    ) -> None:
        """Test that the scatter parses as SVG and is byte-identical across runs."""
        est = AlphabetEstimate(points=mixture_dist.points + 0.01, eigvec=np.zeros(4), min_eigenvalue=0.0)
        first = emit_scatter(short_mixture_series, mixture_dist, est, tmp_path / "a.svg")
        second = emit_scatter(short_mixture_series, mixture_dist, est, tmp_path / "b.svg")

        assert ET.parse(first).getroot().tag.endswith("svg")
        assert first.read_bytes() == second.read_bytes()

    def test_g_curve_csv(self, short_mixture_series: ComplexSeries, tmp_path: Path) -> None:
        """Test the (sigma, J, G) table and a sign change near the noise level."""
        grid = np.linspace(0.0, 0.2, 41)
        curve = emit_g_curve(
            np.array([1.0, 0.0, 0.0]),
            short_mixture_series,
            3,
            1,
            grid,
            tmp_path / "g.csv",
            svg_path=tmp_path / "g.svg",
            expect_root=True,
        )
        with open(tmp_path / "g.csv") as f:
            rows = list(csv.reader(f))

        assert rows[0] == ["sigma", "J", "G"]
        assert len(rows) == 42
        assert float(rows[1][1]) > 0
        assert curve.sign_changes >= 1
        assert (tmp_path / "g.svg").exists()

    def test_g_curve_without_root(self, short_mixture_series: ComplexSeries, tmp_path: Path) -> None:
        """Test NO_ROOT when the grid stops below the noise level."""
        with pytest.raises(DeconvError) as exc_info:
            emit_g_curve(
                np.array([1.0, 0.0, 0.0]),
                short_mixture_series,
                3,
                1,
                np.linspace(0.0, 0.01, 11),
                tmp_path / "g.csv",
                expect_root=True,
            )
        assert exc_info.value.code == ErrorCode.NO_ROOT

    def test_empty_grid(self, short_mixture_series: ComplexSeries, tmp_path: Path) -> None:
        """Test that an empty grid is rejected."""
        with pytest.raises(DeconvError) as exc_info:
            emit_g_curve(np.array([1.0]), short_mixture_series, 3, 0, np.array([]), tmp_path / "g.csv")
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG
