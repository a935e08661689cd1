"""Tests for the model simulator."""

import math
from pathlib import Path

import numpy as np
import pytest

from core.errors import DeconvError, ErrorCode
from core.model_sim import (
    AR2_THETA,
    add_noise,
    apply_filter,
    complex_gaussian,
    invert_recursion,
    make_rng,
    preset_inverse_filter,
    preset_model,
    read_series_csv,
    replication_seed,
    series_from_parts,
    simulate_model,
    simulate_signal,
    write_series_csv,
)
from core.models import ComplexSeries, DiscreteComplexDist, FilterTaps, ModelConfig


class TestSimulateSignal:
    """Tests for i.i.d. symbol generation."""

    def test_frequencies_match_weights(self, mixture_dist: DiscreteComplexDist) -> None:
        """Test that empirical symbol frequencies agree with the weights."""
        n = 2000
        x = simulate_signal(mixture_dist, n, seed=11)

        for point, weight in zip(mixture_dist.points, mixture_dist.weights, strict=True):
            freq = np.mean(x.samples == point)
            assert abs(freq - weight) < 4 * np.sqrt(weight * (1 - weight) / n)

    def test_only_alphabet_values(self, mixture_dist: DiscreteComplexDist) -> None:
        """Test that every sample is one of the alphabet points."""
        x = simulate_signal(mixture_dist, 500, seed=1)
        assert np.all(np.isin(x.samples, mixture_dist.points))
        assert x.origin == 1

    def test_same_seed_same_draws(self, mixture_dist: DiscreteComplexDist) -> None:
        """Test that a seed fully determines the sequence."""
        a = simulate_signal(mixture_dist, 300, seed=42)
        b = simulate_signal(mixture_dist, 300, seed=42)
        c = simulate_signal(mixture_dist, 300, seed=43)

        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_invalid_length(self, mixture_dist: DiscreteComplexDist) -> None:
        """Test that n < 1 is rejected."""
        with pytest.raises(DeconvError) as exc_info:
            simulate_signal(mixture_dist, 0, seed=1)
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG


class TestNoise:
    """Tests for complex Gaussian noise."""

    def test_unit_power_and_circularity(self) -> None:
        """Test E|W|^2 = 1 and E[W^2] = 0."""
        w = complex_gaussian(100_000, seed=5)
        assert abs(np.mean(np.abs(w) ** 2) - 1.0) < 0.02
        assert abs(np.mean(w**2)) < 0.02
        assert abs(np.mean(w)) < 0.02

    @pytest.mark.parametrize("l", range(4))
    @pytest.mark.parametrize("m", range(4))
    def test_conjugate_moments(self, l: int, m: int) -> None:
        """Test E[W^l conj(W)^m] = m! 1{m = l} within 5 Monte Carlo standard errors."""
        w = complex_gaussian(100_000, seed=21)
        terms = w**l * np.conj(w) ** m
        expected = math.factorial(m) if m == l else 0.0
        std_error = np.sqrt(np.mean(np.abs(terms - terms.mean()) ** 2) / terms.size)

        assert abs(terms.mean() - expected) <= 5 * std_error + 1e-12

    def test_noise_independent_of_signal_stream(self) -> None:
        """Test that the noise and signal streams of one seed differ."""
        signal_draws = make_rng(9, 0).standard_normal(10)
        noise_draws = make_rng(9, 1).standard_normal(10)
        assert not np.allclose(signal_draws, noise_draws)

    def test_zero_noise_is_copy(self) -> None:
        """Test that sigma0 = 0 leaves the series unchanged."""
        y = ComplexSeries(samples=np.array([1 + 1j, 2.0]))
        out = add_noise(y, 0.0, seed=1)
        np.testing.assert_array_equal(out.samples, y.samples)
        assert out.samples is not y.samples

    def test_negative_sigma_rejected(self) -> None:
        """Test that a negative noise level is rejected."""
        with pytest.raises(DeconvError):
            add_noise(ComplexSeries(samples=np.ones(3)), -0.1, seed=1)


class TestApplyFilter:
    """Tests for finite convolution."""

    def test_identity_filter(self) -> None:
        """Test that a single unit tap returns the input."""
        x = ComplexSeries(samples=np.array([1 + 2j, 3 - 1j, -2j]))
        out = apply_filter(FilterTaps(coeffs=np.array([1.0])), x)
        np.testing.assert_array_equal(out.samples, x.samples)
        assert out.origin == x.origin

    def test_valid_indices_and_values(self) -> None:
        """Test output origin and values against the convolution sum."""
        x = ComplexSeries(samples=np.arange(1, 6) * (1 + 1j), origin=1)
        taps = FilterTaps(coeffs=np.array([1.0, 2.0, 3.0]), origin=-1)
        out = apply_filter(taps, x)

        # t = 2..4, Z_t = sum_m c_m X_{t - (m - 1)}
        assert out.origin == 2
        assert len(out) == 3
        expected = [
            sum(taps.coeffs[m] * x.samples[t - (m - 1) - 1] for m in range(3)) for t in (2, 3, 4)
        ]
        np.testing.assert_allclose(out.samples, expected)

    def test_linearity(self) -> None:
        """Test that filtering commutes with linear combinations of inputs."""
        rng = make_rng(7, 0)
        x1 = ComplexSeries(samples=rng.standard_normal(200) + 1j * rng.standard_normal(200))
        x2 = ComplexSeries(samples=rng.standard_normal(200) + 1j * rng.standard_normal(200))
        taps = FilterTaps(coeffs=np.array([0.5, -1.2, 0.3]), origin=-1)
        a, b = 2.0 - 0.5j, -0.75

        combined = apply_filter(taps, ComplexSeries(samples=a * x1.samples + b * x2.samples))
        separate = a * apply_filter(taps, x1).samples + b * apply_filter(taps, x2).samples
        np.testing.assert_allclose(combined.samples, separate, rtol=0, atol=1e-13 * np.max(np.abs(separate)))

    def test_empty_overlap(self) -> None:
        """Test that a filter longer than the series raises EMPTY_OVERLAP."""
        x = ComplexSeries(samples=np.ones(2))
        with pytest.raises(DeconvError) as exc_info:
            apply_filter(FilterTaps(coeffs=np.ones(3)), x)
        assert exc_info.value.code == ErrorCode.EMPTY_OVERLAP


class TestRecursion:
    """Tests for the AR(2) preset generator."""

    def test_filter_reproduces_input(self, mixture_dist: DiscreteComplexDist) -> None:
        """Test that applying theta to the recursion output recovers X."""
        x = simulate_signal(mixture_dist, 1000, seed=3)
        y = invert_recursion(np.array(AR2_THETA), x)
        back = apply_filter(FilterTaps(coeffs=np.array(AR2_THETA)), y)

        assert np.max(np.abs(back.samples - x.samples[2:])) < 1e-10

    def test_ar2_output_is_stationary(self) -> None:
        """Test that the AR(2) preset produces bounded observations."""
        y = simulate_model(preset_model("ar2", 0.05, 5000, seed=4))
        assert len(y) == 5000
        assert np.max(np.abs(y.samples)) < 50

    def test_zero_leading_coefficient(self) -> None:
        """Test that theta_0 = 0 is rejected."""
        with pytest.raises(DeconvError):
            invert_recursion(np.array([0.0, 1.0]), ComplexSeries(samples=np.ones(4)))


class TestPresets:
    """Tests for preset models and seeds."""

    def test_unknown_preset(self) -> None:
        """Test that an unknown preset name raises INVALID_CONFIG."""
        with pytest.raises(DeconvError) as exc_info:
            preset_model("bogus", 0.05, 100, seed=1)
        assert exc_info.value.code == ErrorCode.INVALID_CONFIG

    def test_preset_inverse_filter(self) -> None:
        """Test the true inverse filters on the truncation window."""
        np.testing.assert_array_equal(preset_inverse_filter("mixture", 1), [1.0, 0.0, 0.0])
        np.testing.assert_allclose(preset_inverse_filter("ar2", 2), [6 / 7, -2 / 7, 3 / 7, 0, 0])
        with pytest.raises(DeconvError):
            preset_inverse_filter("ar2", 0)

    def test_fir_model_length(self, mixture_dist: DiscreteComplexDist) -> None:
        """Test that a direct FIR filter still yields n observations."""
        cfg = ModelConfig(
            dist=mixture_dist,
            sigma0=0.1,
            n=400,
            seed=2,
            filter_u=FilterTaps(coeffs=np.array([1.0, 0.5])),
        )
        assert len(simulate_model(cfg)) == 400

    def test_replication_seeds(self) -> None:
        """Test that replication seeds are deterministic and distinct."""
        seeds = [replication_seed(7, r) for r in range(50)]
        assert seeds == [replication_seed(7, r) for r in range(50)]
        assert len(set(seeds)) == 50
        assert replication_seed(8, 0) != seeds[0]


class TestSeriesCsv:
    """Tests for series CSV input/output."""

    def test_write_and_read(self, tmp_path: Path) -> None:
        """Test that a written series reads back exactly."""
        y = simulate_model(preset_model("mixture", 0.05, 50, seed=1))
        path = write_series_csv(y, tmp_path / "y.csv")

        assert path.read_text().splitlines()[0] == "t,re,im"
        back = read_series_csv(path)
        np.testing.assert_array_equal(back.samples, y.samples)
        assert back.origin == 1

    def test_empty_file(self, tmp_path: Path) -> None:
        """Test that a header-only file is rejected."""
        path = tmp_path / "empty.csv"
        path.write_text("t,re,im\n")
        with pytest.raises(DeconvError) as exc_info:
            read_series_csv(path)
        assert exc_info.value.code == ErrorCode.INVALID_SERIES

    def test_series_from_parts(self) -> None:
        """Test assembling a series from real and imaginary lists."""
        y = series_from_parts([1.0, 2.0], [0.5, -0.5], origin=3)
        np.testing.assert_array_equal(y.samples, [1 + 0.5j, 2 - 0.5j])
        assert list(y.times) == [3, 4]
        with pytest.raises(DeconvError):
            series_from_parts([1.0], [1.0, 2.0])
