"""Parameter sweeps: many independent runs per (eta, lam) grid cell.

Per-run seeds are derived from the master seed and the cell/run indices
alone, so the schedule, the worker count, and the completion order have
no influence on any result. Aggregation is a deterministic fold over
runs sorted by index.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor

from .engine import HaltReason, Params, RunResult, run_simulation, warmup
from .rng import derive_run_seed

#: Selection-strength values named in the headline survival analysis.
DEFAULT_GRID = (0.01, 0.05, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 0.99)


def dense_grid(step: float = 0.05):
    """Evenly spaced strengths in the open interval (0, 1)."""
    if not 0.0 < step < 1.0:
        raise ValueError(f"step must be in (0, 1), got {step}")
    count = int(round(1.0 / step)) - 1
    return tuple(round(i * step, 12) for i in range(1, count + 1))


def _check_grid(name, grid):
    if len(grid) == 0:
        raise ValueError(f"{name} must not be empty")
    for value in grid:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} values must be in [0, 1], got {value}")


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    """Grid, replication count, and shared run settings for one sweep."""

    eta_grid: tuple = DEFAULT_GRID
    lambda_grid: tuple = DEFAULT_GRID
    runs_per_cell: int = 100
    master_seed: int = 0
    base: Params = Params()
    trajectory_thinning: int = 1
    worker_count_hint: int = 1

    def __post_init__(self):
        object.__setattr__(self, "eta_grid", tuple(float(x) for x in self.eta_grid))
        object.__setattr__(self, "lambda_grid",
                           tuple(float(x) for x in self.lambda_grid))
        _check_grid("eta_grid", self.eta_grid)
        _check_grid("lambda_grid", self.lambda_grid)
        if self.runs_per_cell < 1:
            raise ValueError(f"runs_per_cell must be >= 1, got {self.runs_per_cell}")
        if not isinstance(self.master_seed, int):
            raise ValueError("master_seed must be an integer")
        if self.trajectory_thinning < 1:
            raise ValueError(
                f"trajectory_thinning must be >= 1, got {self.trajectory_thinning}"
            )
        if self.worker_count_hint < 1:
            raise ValueError(
                f"worker_count_hint must be >= 1, got {self.worker_count_hint}"
            )


@dataclasses.dataclass(frozen=True)
class CellSummary:
    """Aggregates for one (eta, lam) cell."""

    eta: float
    lam: float
    runs: int
    mean_log2_survival: float
    mean_final_c_t: float
    mean_final_c_s: float
    barrier_fraction: float
    survivor_fraction: float
    ceiling_fraction: float


def survival_generations(result: RunResult) -> int:
    """Survival time of a run, in generations.

    A ceiling-halted run is credited with the full generation bound, and
    every run counts at least its initial generation.
    """
    if result.halt is HaltReason.COMPLEXITY_CEILING:
        return max(1, result.params.max_generations)
    return max(1, result.generations)


def summarize_cell(results) -> CellSummary:
    """Fold one cell's runs into a :class:`CellSummary`.

    The fold consumes runs sorted by (run_index, seed), so any ordering
    of the same results produces the identical summary.
    """
    results = sorted(results, key=lambda r: (r.run_index, r.params.seed))
    if not results:
        raise ValueError("summarize_cell needs at least one run")
    n = len(results)
    barrier = sum(1 for r in results if r.halt is HaltReason.ABSORBING_BARRIER)
    ceiling = sum(1 for r in results if r.halt is HaltReason.COMPLEXITY_CEILING)
    survivor = sum(1 for r in results if r.halt is HaltReason.MAX_GENERATIONS)
    log2_sum = math.fsum(math.log2(survival_generations(r)) for r in results)
    c_t_sum = math.fsum(r.final_c_t for r in results)
    c_s_sum = math.fsum(r.final_c_s for r in results)
    return CellSummary(
        eta=results[0].params.eta,
        lam=results[0].params.lam,
        runs=n,
        mean_log2_survival=log2_sum / n,
        mean_final_c_t=c_t_sum / n,
        mean_final_c_s=c_s_sum / n,
        barrier_fraction=barrier / n,
        survivor_fraction=survivor / n,
        ceiling_fraction=ceiling / n,
    )


def _cell_jobs(config: SweepConfig):
    for eta_index, eta in enumerate(config.eta_grid):
        for lambda_index, lam in enumerate(config.lambda_grid):
            for run_index in range(config.runs_per_cell):
                seed = derive_run_seed(config.master_seed, eta_index,
                                       lambda_index, run_index)
                params = dataclasses.replace(config.base, eta=eta, lam=lam,
                                             seed=seed)
                yield params, run_index


def run_sweep(config: SweepConfig):
    """Execute the full grid; returns (results, summaries).

    Results arrive in deterministic (eta, lam, run) order; summaries
    follow the same cell order.
    """
    warmup()
    jobs = list(_cell_jobs(config))
    thin = config.trajectory_thinning

    def _one(job):
        params, run_index = job
        return run_simulation(params, thin=thin, run_index=run_index)

    if config.worker_count_hint == 1:
        results = [_one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.worker_count_hint) as pool:
            results = list(pool.map(_one, jobs))

    k = config.runs_per_cell
    summaries = []
    for cell_start in range(0, len(results), k):
        summaries.append(summarize_cell(results[cell_start:cell_start + k]))
    return results, summaries
