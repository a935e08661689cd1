"""Monte Carlo harness and the CSV/SVG emitters behind the simulation tables and figures."""

import csv
import json
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from core.asymptotics import plug_in_covariance  # noqa: E402
from core.config import ExperimentConfig, RootSearchConfig  # noqa: E402
from core.distribution_recovery import canonical_order  # noqa: E402
from core.errors import DeconvError, ErrorCode  # noqa: E402
from core.estimator import CriterionData  # noqa: E402
from core.model_sim import (  # noqa: E402
    preset_distribution,
    preset_model,
    replication_seed,
    simulate_model,
)
from core.models import (  # noqa: E402
    AlphabetEstimate,
    ComplexSeries,
    DiscreteComplexDist,
    GCurve,
    McSummary,
    ParameterSummary,
    RunRecord,
)
from core.pipeline import run_estimate  # noqa: E402
from core.pseudo_moment import criterion_curve, g_transform  # noqa: E402

logger = logging.getLogger(__name__)

PRESET_ALPHABET_SIZE = 3

plt.rcParams["svg.hashsalt"] = "deconv"
SVG_METADATA = {"Date": None}


def run_replication(cfg: ExperimentConfig, index: int) -> RunRecord:
    """simulate → estimate → recover for one replication.

    Estimation failures are recorded on the run, never raised, so one bad replication
    does not abort the experiment.
    """
    seed = replication_seed(cfg.seed, index)
    record = RunRecord(index=index, seed=seed)
    y = simulate_model(preset_model(cfg.preset, cfg.sigma0, cfg.n, seed))
    try:
        report = run_estimate(y, PRESET_ALPHABET_SIZE, cfg.kn, _search_for(cfg, seed))
    except DeconvError as exc:
        logger.warning("Replication %d failed: %s", index, exc)
        record.failed = True
        record.error = exc.code.value
        return record
    result = report.result
    record.sigma_hat = result.sigma_hat
    record.theta_hat = result.theta_hat
    record.points = report.alphabet.points
    record.weights = report.weights.weights
    record.negative_flag = report.weights.negative_flag
    if cfg.with_cov:
        try:
            record.sigma_std = plug_in_covariance(result, y, PRESET_ALPHABET_SIZE).sigma_std
        except DeconvError as exc:
            logger.warning("Replication %d: no plug-in covariance (%s)", index, exc.code.value)
    logger.debug("Replication %d: sigma_hat=%.5g negative=%s", index, result.sigma_hat, record.negative_flag)
    return record


def _search_for(cfg: ExperimentConfig, seed: int) -> RootSearchConfig:
    # the start directions follow the replication seed
    return cfg.search.model_copy(update={"seed": seed})


def _run_indexed(args: tuple[ExperimentConfig, int]) -> RunRecord:
    return run_replication(*args)


def _mean_std(values: Sequence[complex]) -> tuple[complex, float | None]:
    count = len(values)
    if count == 0:
        return complex(math.nan, 0.0), None
    mean = complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values)) / count
    if count == 1:
        return mean, None
    spread = math.fsum(abs(v - mean) ** 2 for v in values)
    return mean, math.sqrt(spread / (count - 1))


def summarize(runs: Sequence[RunRecord], p: int, half_width: int) -> McSummary:
    """Mean and unbiased std of every parameter over the kept runs, in index order."""
    runs = sorted(runs, key=lambda r: r.index)
    kept = [r for r in runs if r.kept]
    columns: list[tuple[str, list[complex]]] = [("sigma0", [complex(r.sigma_hat) for r in kept])]
    for i in range(2 * half_width + 1):
        columns.append((f"theta_{i}", [complex(r.theta_hat[i]) for r in kept]))
    orders = [canonical_order(r.points) for r in kept]
    for i in range(p):
        columns.append((f"a_{i + 1}", [complex(r.points[o[i]]) for r, o in zip(kept, orders, strict=True)]))
    for i in range(p):
        columns.append((f"pi_{i + 1}", [complex(r.weights[o[i]]) for r, o in zip(kept, orders, strict=True)]))
    parameters = []
    for name, values in columns:
        mean, std = _mean_std(values)
        parameters.append(ParameterSummary(name=name, mean=mean, std=std))
    return McSummary(
        parameters=parameters,
        n_elim=sum(1 for r in runs if r.negative_flag and not r.failed),
        n_failed=sum(1 for r in runs if r.failed),
        runs=list(runs),
    )


def run_monte_carlo(cfg: ExperimentConfig, write: bool = True) -> McSummary:
    """Run ``cfg.replications`` independent pipelines and aggregate them.

    Replication seeds derive from (master seed, index), so the summary does not depend
    on the number of workers.
    """
    logger.info(
        "Monte Carlo: preset=%s sigma0=%g n=%d kn=%d N=%d",
        cfg.preset,
        cfg.sigma0,
        cfg.n,
        cfg.kn,
        cfg.replications,
    )
    jobs = [(cfg, i) for i in range(cfg.replications)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(_run_indexed, jobs))
    else:
        runs = [_run_indexed(job) for job in jobs]
    summary = summarize(runs, PRESET_ALPHABET_SIZE, cfg.kn)
    logger.info("Monte Carlo done: N_elim=%d N_failed=%d", summary.n_elim, summary.n_failed)
    if write:
        out = Path(cfg.output_dir)
        emit_table(summary, out / "table.csv")
        emit_runs(summary, out / "runs.csv")
        (out / "config.json").write_text(json.dumps(cfg.model_dump(mode="json"), indent=2, sort_keys=True))
        if cfg.with_scatter:
            first = next((r for r in summary.runs if r.kept), None)
            if first is None:
                logger.warning("No kept replication to plot")
            else:
                scatter_for_run(cfg, first, out / "scatter.svg")
    return summary


def run_ladder(cfg: ExperimentConfig, n_values: Sequence[int], write: bool = True) -> dict[int, McSummary]:
    """Monte Carlo over a ladder of sample sizes; writes ``ladder.csv``."""
    summaries: dict[int, McSummary] = {}
    for n in n_values:
        sub = cfg.model_copy(update={"n": n, "output_dir": Path(cfg.output_dir) / f"n{n}"})
        summaries[n] = run_monte_carlo(sub, write=write)
    if write:
        path = Path(cfg.output_dir) / "ladder.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["n", "parameter", "mean_re", "mean_im", "std"])
            for n, summary in summaries.items():
                for row in _table_rows(summary):
                    writer.writerow([n, *row])
    return summaries


def _fmt(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.10f}"


def _table_rows(summary: McSummary) -> list[list[str]]:
    rows = [
        [s.name, _fmt(s.mean.real), _fmt(s.mean.imag), _fmt(s.std)] for s in summary.parameters
    ]
    rows.append(["N_elim", str(summary.n_elim), "0", ""])
    rows.append(["N_failed", str(summary.n_failed), "0", ""])
    return rows


def emit_table(summary: McSummary, path: str | Path) -> Path:
    """Write the summary table with columns parameter, mean_re, mean_im, std."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["parameter", "mean_re", "mean_im", "std"])
        writer.writerows(_table_rows(summary))
    return path


def emit_runs(summary: McSummary, path: str | Path) -> Path:
    """Write one row per replication."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(
            [
                "index",
                "seed",
                "sigma_hat",
                "sigma_std",
                "theta_hat",
                "points",
                "weights",
                "negative_flag",
                "failed",
                "error",
            ]
        )
        for r in summary.runs:
            writer.writerow(
                [
                    r.index,
                    r.seed,
                    _fmt(r.sigma_hat),
                    _fmt(r.sigma_std),
                    " ".join(_fmt(float(v)) for v in r.theta_hat),
                    " ".join(f"{z.real:.10f}{z.imag:+.10f}i" for z in r.points),
                    " ".join(_fmt(float(w)) for w in r.weights),
                    int(r.negative_flag),
                    int(r.failed),
                    r.error,
                ]
            )
    return path


def emit_scatter(
    y: ComplexSeries,
    truth: DiscreteComplexDist,
    est: AlphabetEstimate,
    path: str | Path,
) -> Path:
    """Complex-plane scatter of observations, true points and estimated points (SVG)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(y.samples.real, y.samples.imag, s=2, c="0.6", label="observations")
    ax.scatter(truth.points.real, truth.points.imag, marker="x", s=80, c="tab:red", label="true points")
    ax.scatter(
        est.points.real,
        est.points.imag,
        marker="o",
        s=80,
        facecolors="none",
        edgecolors="tab:blue",
        label="estimated points",
    )
    ax.set_xlabel("real part")
    ax.set_ylabel("imaginary part")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def g_curve(xi: np.ndarray, y: ComplexSeries, p: int, half_width: int, sigma_grid: np.ndarray) -> GCurve:
    """J_n(σ, ξ) and G(σ) over a σ grid."""
    sigma_grid = np.asarray(sigma_grid, dtype=np.float64)
    if sigma_grid.size == 0:
        raise DeconvError(ErrorCode.INVALID_CONFIG, "σ grid is empty")
    d_n, norm = CriterionData(y, half_width, p)(np.asarray(xi, dtype=np.float64))
    j_values = criterion_curve(sigma_grid, norm, d_n)
    g_values = np.array([g_transform(v) for v in j_values])
    return GCurve(sigmas=sigma_grid, j_values=j_values, g_values=g_values)


def emit_g_curve(
    xi: np.ndarray,
    y: ComplexSeries,
    p: int,
    half_width: int,
    sigma_grid: np.ndarray,
    path: str | Path,
    svg_path: str | Path | None = None,
    expect_root: bool = False,
) -> GCurve:
    """Tabulate G over the grid as CSV (sigma, J, G), optionally plotted as SVG.

    Raises:
        DeconvError: NO_ROOT when ``expect_root`` is set and J never changes sign.
    """
    curve = g_curve(xi, y, p, half_width, sigma_grid)
    if expect_root and curve.sign_changes == 0:
        raise DeconvError(ErrorCode.NO_ROOT, "G curve has no sign change on the grid")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["sigma", "J", "G"])
        for s, j, g in zip(curve.sigmas, curve.j_values, curve.g_values, strict=True):
            writer.writerow([repr(float(s)), repr(float(j)), repr(float(g))])
    if svg_path is not None:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(curve.sigmas, curve.g_values, color="tab:blue")
        ax.axhline(0.0, color="0.4", linewidth=0.8)
        ax.set_xlabel("sigma")
        ax.set_ylabel("sign(J) log(|J| + 1)")
        fig.tight_layout()
        Path(svg_path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(svg_path, format="svg", metadata=SVG_METADATA)
        plt.close(fig)
    return curve


def scatter_for_run(cfg: ExperimentConfig, record: RunRecord, path: str | Path) -> Path:
    """Plot a finished replication against the truth; its series is re-simulated from the seed."""
    y = simulate_model(preset_model(cfg.preset, cfg.sigma0, cfg.n, record.seed))
    alphabet = AlphabetEstimate(points=record.points, eigvec=np.zeros(0), min_eigenvalue=math.nan)
    return emit_scatter(y, preset_distribution(), alphabet, path)
