"""Synthetic data from the noisy blind deconvolution model.

Y_t = (u * X)_t + sigma0 * W_t, with X i.i.d. on a finite complex alphabet and W
standard complex Gaussian (independent real and imaginary parts of variance 1/2).
"""

import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from scipy import signal

from core.errors import DeconvError, ErrorCode
from core.models import ComplexSeries, DiscreteComplexDist, FilterTaps, ModelConfig

logger = logging.getLogger(__name__)

SIGNAL_STREAM = 0
NOISE_STREAM = 1
START_STREAM = 2

MIXTURE_POINTS = (4 + 1j, -1 + 3j, -2 - 1j)
MIXTURE_WEIGHTS = (0.6, 0.25, 0.15)
AR2_THETA = (6 / 7, -2 / 7, 3 / 7)
PRESETS = ("mixture", "ar2")


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for one named stream of a seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=stream)))


def replication_seed(master_seed: int, index: int) -> int:
    """Independent 64-bit seed for replication ``index`` of an experiment."""
    state = np.random.SeedSequence(master_seed, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0])


def preset_distribution() -> DiscreteComplexDist:
    """Three-point alphabet shared by both simulation presets."""
    return DiscreteComplexDist(points=np.array(MIXTURE_POINTS), weights=np.array(MIXTURE_WEIGHTS))


def preset_model(name: str, sigma0: float, n: int, seed: int) -> ModelConfig:
    """Model configuration of a named preset.

    ``mixture`` uses the identity filter; ``ar2`` generates the output through the
    recursion X_t = sum_k theta_k Ytilde_{t-k} with theta = (6/7, -2/7, 3/7).
    """
    if name == "mixture":
        return ModelConfig(dist=preset_distribution(), sigma0=sigma0, n=n, seed=seed)
    if name == "ar2":
        return ModelConfig(
            dist=preset_distribution(),
            sigma0=sigma0,
            n=n,
            seed=seed,
            ar_coeffs=np.array(AR2_THETA),
        )
    raise DeconvError(ErrorCode.INVALID_CONFIG, f"unknown preset '{name}'", known=list(PRESETS))


def preset_inverse_filter(name: str, half_width: int) -> np.ndarray:
    """True inverse filter of a preset laid out on the truncation window."""
    taps = (1.0,) if name == "mixture" else AR2_THETA
    width = 2 * half_width + 1
    if len(taps) > width:
        raise DeconvError(ErrorCode.INVALID_FILTER, "window too narrow for the true inverse filter")
    theta = np.zeros(width)
    theta[: len(taps)] = taps
    return theta


def simulate_signal(dist: DiscreteComplexDist, n: int, seed: int) -> ComplexSeries:
    """Draw ``n`` i.i.d. symbols from the alphabet."""
    if n < 1:
        raise DeconvError(ErrorCode.INVALID_CONFIG, "n must be at least 1", n=n)
    rng = make_rng(seed, SIGNAL_STREAM)
    labels = rng.choice(dist.p, size=n, p=dist.weights)
    return ComplexSeries(samples=dist.points[labels], origin=1)


def apply_filter(coeffs: FilterTaps, x: ComplexSeries) -> ComplexSeries:
    """Convolve ``x`` with a finite filter, keeping only fully covered output indices.

    Raises:
        DeconvError: EMPTY_OVERLAP when the filter is longer than the series.
    """
    if len(coeffs) > len(x):
        raise DeconvError(
            ErrorCode.EMPTY_OVERLAP,
            "no output index is covered by the input",
            taps=len(coeffs),
            samples=len(x),
        )
    out = np.convolve(x.samples, coeffs.coeffs.astype(np.complex128), mode="valid")
    return ComplexSeries(samples=out, origin=x.origin + coeffs.origin + len(coeffs) - 1)


def invert_recursion(theta: np.ndarray, x: ComplexSeries) -> ComplexSeries:
    """Solve x_t = sum_k theta_k y_{t-k} for y with zero initial conditions."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta[0] == 0:
        raise DeconvError(ErrorCode.INVALID_FILTER, "leading recursion coefficient must be nonzero")
    y = signal.lfilter([1.0], theta, x.samples)
    return ComplexSeries(samples=y, origin=x.origin)


def add_noise(y: ComplexSeries, sigma0: float, seed: int) -> ComplexSeries:
    """Add sigma0 * W with E|W|^2 = 1."""
    if sigma0 < 0:
        raise DeconvError(ErrorCode.INVALID_CONFIG, "sigma0 must be nonnegative")
    if sigma0 == 0:
        return ComplexSeries(samples=y.samples.copy(), origin=y.origin)
    w = complex_gaussian(len(y), seed)
    return ComplexSeries(samples=y.samples + sigma0 * w, origin=y.origin)


def complex_gaussian(n: int, seed: int) -> np.ndarray:
    """Standard complex Gaussian draws from the noise stream of ``seed``."""
    rng = make_rng(seed, NOISE_STREAM)
    parts = rng.normal(scale=np.sqrt(0.5), size=(2, n))
    return parts[0] + 1j * parts[1]


def simulate_model(cfg: ModelConfig) -> ComplexSeries:
    """Simulate ``cfg.n`` observations of the noisy model."""
    if cfg.ar_coeffs is not None:
        x = simulate_signal(cfg.dist, cfg.n + cfg.burn_in, cfg.seed)
        full = invert_recursion(cfg.ar_coeffs, x)
        clean = ComplexSeries(samples=full.samples[cfg.burn_in :], origin=1)
    elif cfg.filter_u is not None:
        x = simulate_signal(cfg.dist, cfg.n + len(cfg.filter_u) - 1, cfg.seed)
        filtered = apply_filter(cfg.filter_u, x)
        clean = ComplexSeries(samples=filtered.samples, origin=1)
    else:
        clean = simulate_signal(cfg.dist, cfg.n, cfg.seed)
    observed = add_noise(clean, cfg.sigma0, cfg.seed)
    logger.debug("Simulated %d observations (sigma0=%.4g, seed=%d)", cfg.n, cfg.sigma0, cfg.seed)
    return observed


def write_series_csv(series: ComplexSeries, path: str | Path) -> Path:
    """Write a series as CSV with columns t, re, im."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "re", "im"])
        for t, z in zip(series.times, series.samples, strict=True):
            writer.writerow([int(t), repr(float(z.real)), repr(float(z.imag))])
    return path


def read_series_csv(path: str | Path) -> ComplexSeries:
    """Read a series written by :func:`write_series_csv`."""
    times: list[int] = []
    values: list[complex] = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            times.append(int(row["t"]))
            values.append(complex(float(row["re"]), float(row["im"])))
    if not values:
        raise DeconvError(ErrorCode.INVALID_SERIES, f"{path} holds no samples")
    return ComplexSeries(samples=np.array(values), origin=times[0])


def series_from_parts(re: Sequence[float], im: Sequence[float], origin: int = 1) -> ComplexSeries:
    """Build a series from separate real and imaginary parts."""
    if len(re) != len(im):
        raise DeconvError(ErrorCode.INVALID_SERIES, "re and im differ in length")
    return ComplexSeries(samples=np.asarray(re) + 1j * np.asarray(im), origin=origin)
