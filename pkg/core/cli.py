"""Command-line entry point: simulate, estimate, bench, gcurve and ladder."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from core.bench import emit_g_curve, run_ladder, run_monte_carlo
from core.config import ExperimentConfig, build_experiment_config, build_search_config, load_experiment_config
from core.errors import DeconvError, ErrorCode
from core.model_sim import PRESETS, preset_model, read_series_csv, simulate_model, write_series_csv
from core.models import FilterSpec
from core.pipeline import run_estimate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# estimation failures; every other code means the input was unusable
RUN_FAILURES = {
    ErrorCode.NO_ROOT,
    ErrorCode.ALL_STARTS_FAILED,
    ErrorCode.DEGENERATE_LEADING_COEFF,
    ErrorCode.SINGULAR_VANDERMONDE,
    ErrorCode.SINGULAR_HESSIAN,
}


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",") if part.strip()])
    except ValueError as exc:
        raise DeconvError(ErrorCode.INVALID_CONFIG, f"not a comma-separated list of numbers: {text}") from exc


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "output_dir": args.output_dir,
        "replications": args.replications,
        "workers": args.workers,
        "seed": args.seed,
        "n": args.n,
        "sigma0": args.sigma0,
        "kn": args.kn,
        "with_cov": args.with_cov or None,
        "with_scatter": args.with_scatter or None,
    }
    if args.config:
        return load_experiment_config(args.config, **overrides)
    return build_experiment_config({k: v for k, v in overrides.items() if v is not None})


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate a preset and write the observations as CSV."""
    y = simulate_model(preset_model(args.preset, args.sigma0, args.n, args.seed))
    path = write_series_csv(y, args.output)
    logger.info("Wrote %d observations to %s", len(y), path)
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    """Estimate the noise level, filter, alphabet and weights of a series."""
    y = read_series_csv(args.input)
    search = build_search_config(
        sigma_max=args.sigma_max,
        n_starts=args.starts,
        seed=args.seed,
        bisect_tol=args.tol,
        workers=args.workers,
    )
    report = run_estimate(y, args.p, args.kn, search, with_cov=args.with_cov)
    document = json.dumps(report.to_dict(), indent=2)
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(document)
        logger.info("Wrote estimate to %s", args.output)
    print(document if args.json else report.format_report())
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Run a Monte Carlo experiment and write its tables."""
    cfg = _experiment_config(args)
    summary = run_monte_carlo(cfg)
    print(summary.format_report())
    return EXIT_FAILED if summary.n_failed else EXIT_OK


def cmd_ladder(args: argparse.Namespace) -> int:
    """Run the Monte Carlo experiment for several sample sizes."""
    cfg = _experiment_config(args)
    n_values = [int(v) for v in _parse_floats(args.n_values)]
    summaries = run_ladder(cfg, n_values)
    for n, summary in summaries.items():
        print(f"n = {n}")
        print(summary.format_report())
    return EXIT_FAILED if any(s.n_failed for s in summaries.values()) else EXIT_OK


def cmd_gcurve(args: argparse.Namespace) -> int:
    """Tabulate the log-compressed criterion over a σ grid."""
    y = read_series_csv(args.input)
    xi = _parse_floats(args.xi) if args.xi else FilterSpec.identity(args.kn).xi
    grid = np.linspace(args.sigma_min, args.sigma_max, args.steps)
    curve = emit_g_curve(xi, y, args.p, args.kn, grid, args.output, svg_path=args.svg)
    logger.info("G curve with %d sign change(s) written to %s", curve.sign_changes, args.output)
    return EXIT_OK


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Experiment configuration (JSON or YAML)")
    parser.add_argument("--output-dir", type=Path, help="Directory for tables and plots")
    parser.add_argument("--replications", type=int, help="Number of replications N")
    parser.add_argument("--workers", type=int, help="Concurrent replications")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--n", type=int, help="Observations per replication")
    parser.add_argument("--sigma0", type=float, help="Noise level")
    parser.add_argument("--kn", type=int, help="Truncation half-width k(n)")
    parser.add_argument("--with-cov", action="store_true", help="Plug-in std of sigma per run")
    parser.add_argument("--with-scatter", action="store_true", help="Scatter plot of one run")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for the ``deconv`` command."""
    parser = argparse.ArgumentParser(
        prog="deconv",
        description="Noisy blind deconvolution: simulation, estimation and Monte Carlo studies",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sim = subparsers.add_parser("simulate", help="Simulate observations from a preset")
    sim.add_argument("--preset", choices=PRESETS, default="mixture")
    sim.add_argument("--sigma0", type=float, default=0.05)
    sim.add_argument("--n", type=int, default=2000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("-o", "--output", required=True, help="Output CSV (t, re, im)")
    sim.set_defaults(handler=cmd_simulate)

    est = subparsers.add_parser("estimate", help="Estimate from an observation CSV")
    est.add_argument("--input", required=True, help="Observation CSV (t, re, im)")
    est.add_argument("--p", type=int, default=3, help="Alphabet size")
    est.add_argument("--kn", type=int, default=1, help="Truncation half-width k(n)")
    est.add_argument("--sigma-max", type=float, help="Ceiling of the sigma scan")
    est.add_argument("--starts", type=int, help="Random starts of the outer search")
    est.add_argument("--seed", type=int, help="Seed of the start directions")
    est.add_argument("--tol", type=float, help="Bisection tolerance on sigma")
    est.add_argument("--workers", type=int, help="Concurrent outer searches")
    est.add_argument("--with-cov", action="store_true", help="Add plug-in standard errors")
    est.add_argument("--json", action="store_true", help="Print JSON instead of the text report")
    est.add_argument("-o", "--output", help="Write the JSON document to this file")
    est.set_defaults(handler=cmd_estimate)

    bench = subparsers.add_parser("bench", help="Monte Carlo experiment")
    _add_experiment_flags(bench)
    bench.set_defaults(handler=cmd_bench)

    ladder = subparsers.add_parser("ladder", help="Monte Carlo over several sample sizes")
    _add_experiment_flags(ladder)
    ladder.add_argument("--n-values", default="250,1000,4000", help="Comma-separated sample sizes")
    ladder.set_defaults(handler=cmd_ladder)

    gcurve = subparsers.add_parser("gcurve", help="Tabulate sign(J) log(|J|+1) over sigma")
    gcurve.add_argument("--input", required=True, help="Observation CSV (t, re, im)")
    gcurve.add_argument("--xi", help="Comma-separated filter coefficients (default: identity)")
    gcurve.add_argument("--p", type=int, default=3)
    gcurve.add_argument("--kn", type=int, default=1)
    gcurve.add_argument("--sigma-min", type=float, default=0.0)
    gcurve.add_argument("--sigma-max", type=float, default=1.0)
    gcurve.add_argument("--steps", type=int, default=201)
    gcurve.add_argument("-o", "--output", required=True, help="Output CSV (sigma, J, G)")
    gcurve.add_argument("--svg", help="Optional SVG plot")
    gcurve.set_defaults(handler=cmd_gcurve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        return int(args.handler(args))
    except DeconvError as exc:
        logger.error("%s", exc)
        return EXIT_FAILED if exc.code in RUN_FAILURES else EXIT_INVALID
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
