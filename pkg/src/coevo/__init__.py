"""Deterministic simulator of co-adapting technology and goal bitstrings.

A society carries a technology string and a goal string. Effectiveness
is their inverted, length-normalised edit distance; it sets resource
production, which buys edit iterations; selection strengths decide how
strictly each side demands improvement. Runs end at a generation bound,
a complexity ceiling, or the absorbing barrier once a finite endowment
is spent.

Hot paths run as compiled kernels when numba is importable; set
``COEVO_BACKEND=numpy`` to force the pure-Python/numpy path. Both give
bit-identical results.
"""

from .backend import active_backend, default_backend, use_backend
from .bits import (
    Bitstring,
    EditProposal,
    ProposalKind,
    apply_proposal,
    random_bitstring,
    sample_proposal,
)
from .cli import ConfigError, main, parse_config
from .distance import (
    EXCEEDED,
    DeltaOutcome,
    classify_delta,
    effectiveness,
    effectiveness_from_distance,
    levenshtein,
    levenshtein_bounded,
)
from .engine import (
    ChargePolicy,
    GenerationRecord,
    HaltReason,
    Params,
    RemovePolicy,
    RunResult,
    SocietyState,
    Trajectory,
    adopt_decision,
    initial_state,
    iteration_budget,
    resources,
    run_generation,
    run_simulation,
    step_iteration,
    warmup,
)
from .report import (
    RunTrace,
    TrajectoryTable,
    read_summary,
    read_trajectories,
    render_heatmap,
    render_trajectories,
    write_summary,
    write_trajectories,
)
from .rng import SplitMix64, derive_run_seed
from .sweep import (
    DEFAULT_GRID,
    CellSummary,
    SweepConfig,
    dense_grid,
    run_sweep,
    summarize_cell,
    survival_generations,
)

__version__ = "0.1.0"

__all__ = [
    "Bitstring", "EditProposal", "ProposalKind", "random_bitstring",
    "sample_proposal", "apply_proposal",
    "EXCEEDED", "DeltaOutcome", "levenshtein", "levenshtein_bounded",
    "effectiveness", "effectiveness_from_distance", "classify_delta",
    "Params", "RemovePolicy", "ChargePolicy", "HaltReason", "SocietyState",
    "GenerationRecord", "Trajectory", "RunResult", "resources",
    "iteration_budget", "adopt_decision", "step_iteration",
    "run_generation", "run_simulation", "initial_state", "warmup",
    "SweepConfig", "CellSummary", "DEFAULT_GRID", "dense_grid",
    "run_sweep", "summarize_cell", "survival_generations",
    "derive_run_seed", "SplitMix64",
    "RunTrace", "TrajectoryTable", "write_trajectories",
    "read_trajectories", "write_summary", "read_summary",
    "render_heatmap", "render_trajectories",
    "active_backend", "default_backend", "use_backend",
    "ConfigError", "main", "parse_config",
    "__version__",
]
