"""Replication loop and performance summaries.

Replication ``r`` draws from its own substream ``mix64(seed, r)``, so a
result depends only on ``(config, r, seed)`` and never on how replications
are scheduled across workers. Aggregation is a fixed-order fold.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Optional, Sequence

from . import __version__
from .dgm import assign_arms, generate_cohort, mix64
from .configio import scenario_to_dict
from .model import ScenarioConfig, validate_scenario
from .outcomes import realized_outcomes
from .statcore import mcse_mean, mcse_proportion, pooled_t_test, sample_sd

log = logging.getLogger(__name__)

WORKERS_ENV = "ESTIMANDSIM_MAX_WORKERS"
REP_CSV_COLUMNS = ("rep_index", "theta_hat", "p_value", "rejected", "excess_count")

# second substream within a replication, used for the allocation permutation
_ALLOCATION_STREAM = 1


@dataclass(frozen=True)
class RepResult:
    rep_index: int
    theta_hat: float
    p_value: float
    rejected: bool
    excess_count: int


@dataclass(frozen=True)
class PerformanceSummary:
    n_reps: int
    mean_rd: float
    mcse_rd: float
    rejection_fraction: float
    mcse_rej: float
    mean_excess: float
    mcse_excess: float
    seed: int
    preset: Optional[str] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        # percentage-point units alongside the raw ones
        out["percentage_points"] = {
            "mean_rd": 100.0 * self.mean_rd,
            "mcse_rd": 100.0 * self.mcse_rd,
            "rejection_fraction": 100.0 * self.rejection_fraction,
            "mcse_rej": 100.0 * self.mcse_rej,
        }
        return out


def run_rep(config: ScenarioConfig, rep_index: int, master_seed: Optional[int] = None) -> RepResult:
    seed = config.seed if master_seed is None else master_seed
    rep_seed = mix64(seed, rep_index)
    cohort = generate_cohort(config, rep_seed)
    cohort = assign_arms(cohort, mix64(rep_seed, _ALLOCATION_STREAM))
    y_treat, y_control, excess = realized_outcomes(cohort)
    test = pooled_t_test(y_treat, y_control, config.alpha, pooled=config.pooled_variance)
    return RepResult(
        rep_index=rep_index,
        theta_hat=test.estimate,
        p_value=test.p_value,
        rejected=test.p_value < config.alpha,
        excess_count=excess,
    )


def _run_chunk(args) -> list[RepResult]:
    config, indices, seed = args
    return [run_rep(config, r, seed) for r in indices]


def max_workers() -> int:
    cap = os.environ.get(WORKERS_ENV)
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def run_reps(config: ScenarioConfig, indices: Sequence[int], seed: int, workers: int = 1) -> list[RepResult]:
    """Run the given replications, serially or over a process pool."""
    indices = list(indices)
    if workers <= 1 or len(indices) < 2:
        return [run_rep(config, r, seed) for r in indices]
    n_chunks = min(len(indices), workers * 4)
    size = math.ceil(len(indices) / n_chunks)
    chunks = [(config, indices[i:i + size], seed) for i in range(0, len(indices), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, chunks))
    results = [r for part in parts for r in part]
    results.sort(key=lambda r: r.rep_index)
    return results


def summarize(results: Iterable[RepResult], seed: int, preset: Optional[str] = None) -> PerformanceSummary:
    """Fold replication results into a summary; input order is irrelevant."""
    ordered = sorted(results, key=lambda r: r.rep_index)
    n = len(ordered)
    if n < 2:
        raise ValueError(f"a summary needs at least 2 replications, got {n}")
    thetas = [r.theta_hat for r in ordered]
    excess = [float(r.excess_count) for r in ordered]
    rej = sum(1 for r in ordered if r.rejected) / n
    return PerformanceSummary(
        n_reps=n,
        mean_rd=math.fsum(thetas) / n,
        mcse_rd=mcse_mean(thetas),
        rejection_fraction=rej,
        mcse_rej=mcse_proportion(rej, n),
        mean_excess=math.fsum(excess) / n,
        mcse_excess=mcse_mean(excess),
        seed=seed,
        preset=preset,
    )


def run_simulation(
    config: ScenarioConfig,
    preset: Optional[str] = None,
    workers: Optional[int] = None,
) -> tuple[list[RepResult], PerformanceSummary]:
    validate_scenario(config)
    if config.n_reps < 2:
        raise ValueError("run_simulation needs n_reps >= 2")
    if workers is None:
        workers = max_workers()
    log.info("running %d replications on %d worker(s)", config.n_reps, workers)
    results = run_reps(config, range(config.n_reps), config.seed, workers)
    return results, summarize(results, config.seed, preset)


def estimate_required_reps(config: ScenarioConfig, target_mcse: float, pilot_reps: int = 500) -> int:
    """Replications needed for the MCSE of the mean estimate to reach ``target_mcse``."""
    if pilot_reps < 2:
        raise ValueError("pilot_reps must be at least 2")
    if target_mcse <= 0:
        raise ValueError("target_mcse must be positive")
    pilot = run_reps(replace(config, n_reps=pilot_reps), range(pilot_reps), config.seed)
    sd = sample_sd([r.theta_hat for r in pilot])
    return max(1, math.ceil((sd / target_mcse) ** 2))


# -- serialization ---------------------------------------------------------

def reps_to_csv(results: Iterable[RepResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REP_CSV_COLUMNS)
    for r in results:
        writer.writerow([r.rep_index, repr(r.theta_hat), repr(r.p_value), int(r.rejected), r.excess_count])
    return buf.getvalue()


def reps_from_csv(text: str) -> list[RepResult]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != REP_CSV_COLUMNS:
        raise ValueError(f"unexpected per-rep CSV header {reader.fieldnames}")
    return [
        RepResult(
            rep_index=int(row["rep_index"]),
            theta_hat=float(row["theta_hat"]),
            p_value=float(row["p_value"]),
            rejected=row["rejected"] == "1",
            excess_count=int(row["excess_count"]),
        )
        for row in reader
    ]


def summary_document(summary: PerformanceSummary, config: ScenarioConfig) -> dict:
    return {
        "artifact_version": __version__,
        "preset": summary.preset,
        "config": scenario_to_dict(config),
        "summary": summary.to_dict(),
    }


def summary_to_json(summary: PerformanceSummary, config: ScenarioConfig) -> str:
    return json.dumps(summary_document(summary, config), indent=2, sort_keys=True) + "\n"
