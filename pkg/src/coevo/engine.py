"""Generation and iteration dynamics for a single society.

A society holds a technology string and a goal string. Each generation
it produces resources from how well the two match, converts them into
an iteration budget, and spends every iteration proposing one edit to
one of the strings: a fair coin picks the side, the side's selection
strength decides how strictly improvements are required, and adopted
edits update the cached distance. Production at or below zero draws on
a finite starting endowment; once that is gone the society is absorbed.

Two execution paths produce bit-identical results: the plain-Python
loop in this module (the readable reference) and the compiled kernel in
:mod:`._kernels_numba`. Both consume the random stream in the same
fixed order per iteration: allocation coin, proposal kind, position,
expand bit when applicable, adoption uniform. The adoption uniform is
drawn even when the edit is a forced adopt or a rejected no-op, so the
two paths and both remove policies stay stream-aligned.
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from .backend import active_backend
from .bits import Bitstring, EditProposal, ProposalKind, apply_proposal, random_bitstring
from .distance import (
    DeltaOutcome,
    classify_delta,
    effectiveness_from_distance,
    levenshtein,
)
from .rng import MASK64, SplitMix64


class HaltReason(enum.Enum):
    """Why a run stopped; exactly one applies per run."""

    MAX_GENERATIONS = "max_generations"
    COMPLEXITY_CEILING = "complexity_ceiling"
    ABSORBING_BARRIER = "absorbing_barrier"


class RemovePolicy(enum.Enum):
    """What to do when a removal is drawn against a length-1 string.

    RESAMPLE redraws the kind uniformly over modify/expand so every
    iteration proposes a change. REJECT keeps the draw and treats it as
    a no-op iteration.
    """

    RESAMPLE = "resample"
    REJECT = "reject"


class ChargePolicy(enum.Enum):
    """How the endowment pays for a generation run at a deficit.

    Production funds iterations at one resource unit each; when it is
    zero or negative the society still gets a single iteration. Under
    DEFICIT_PLUS_FUNDING the endowment covers the shortfall plus that
    iteration's unit cost, so even a break-even generation costs one
    unit. Under DEFICIT it covers the shortfall alone and break-even
    generations are free; societies idling at zero production then never
    starve, which inflates survival times well past the reference
    behaviour, so the funded variant is the default.
    """

    DEFICIT_PLUS_FUNDING = "deficit_plus_funding"
    DEFICIT = "deficit"


@dataclasses.dataclass(frozen=True)
class Params:
    """Full configuration of one simulation run."""

    eta: float = 0.5
    lam: float = 0.5
    seed: int = 0
    init_complexity: int = 2
    endowment0: float = 100.0
    max_generations: int = 10_000
    max_complexity: int = 10_000
    remove_at_min: RemovePolicy = RemovePolicy.RESAMPLE
    charge: ChargePolicy = ChargePolicy.DEFICIT_PLUS_FUNDING

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {type(self.seed).__name__}")
        if self.init_complexity < 1:
            raise ValueError(
                f"init_complexity must be >= 1, got {self.init_complexity}"
            )
        if self.max_generations < 0:
            raise ValueError(
                f"max_generations must be >= 0, got {self.max_generations}"
            )
        if self.max_complexity <= self.init_complexity:
            raise ValueError(
                "max_complexity must exceed init_complexity, got "
                f"{self.max_complexity} <= {self.init_complexity}"
            )
        if not math.isfinite(self.endowment0):
            raise ValueError(f"endowment0 must be finite, got {self.endowment0}")
        if not isinstance(self.remove_at_min, RemovePolicy):
            raise ValueError("remove_at_min must be a RemovePolicy")
        if not isinstance(self.charge, ChargePolicy):
            raise ValueError("charge must be a ChargePolicy")


@dataclasses.dataclass
class SocietyState:
    """Mutable state of one society between generations."""

    t: Bitstring
    s: Bitstring
    endowment: float
    generation: int
    cached_ld: int


@dataclasses.dataclass(frozen=True)
class GenerationRecord:
    """One generation's bookkeeping row.

    Lengths, effectiveness and resources are the values the generation
    started from (they drive its budget); endowment is the balance after
    any deficit charge; the adopted counts partition the accepted edits
    by side.
    """

    generation: int
    c_t: int
    c_s: int
    effectiveness: float
    resources: float
    endowment: float
    iterations: int
    adopted_t: int
    adopted_s: int


_RECORD_COLUMNS = (
    ("generation", np.int64),
    ("c_t", np.int64),
    ("c_s", np.int64),
    ("effectiveness", np.float64),
    ("resources", np.float64),
    ("endowment", np.float64),
    ("iterations", np.int64),
    ("adopted_t", np.int64),
    ("adopted_s", np.int64),
)


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Column-oriented view of a run's (possibly thinned) records."""

    generation: np.ndarray
    c_t: np.ndarray
    c_s: np.ndarray
    effectiveness: np.ndarray
    resources: np.ndarray
    endowment: np.ndarray
    iterations: np.ndarray
    adopted_t: np.ndarray
    adopted_s: np.ndarray

    @classmethod
    def from_records(cls, records):
        cols = {
            name: np.array([getattr(r, name) for r in records], dtype=dt)
            for name, dt in _RECORD_COLUMNS
        }
        return cls(**cols)

    @classmethod
    def from_arrays(cls, **cols):
        return cls(**{
            name: np.ascontiguousarray(cols[name], dtype=dt)
            for name, dt in _RECORD_COLUMNS
        })

    def __len__(self):
        return self.generation.size

    def __getitem__(self, i) -> GenerationRecord:
        return GenerationRecord(
            generation=int(self.generation[i]),
            c_t=int(self.c_t[i]),
            c_s=int(self.c_s[i]),
            effectiveness=float(self.effectiveness[i]),
            resources=float(self.resources[i]),
            endowment=float(self.endowment[i]),
            iterations=int(self.iterations[i]),
            adopted_t=int(self.adopted_t[i]),
            adopted_s=int(self.adopted_s[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))


@dataclasses.dataclass(frozen=True)
class RunResult:
    """Everything a finished run reports."""

    params: Params
    halt: HaltReason
    generations: int
    final_t: Bitstring
    final_s: Bitstring
    final_ld: int
    final_endowment: float
    max_c_t: int
    max_c_s: int
    trajectory: Trajectory
    run_index: int = 0

    @property
    def final_c_t(self) -> int:
        return len(self.final_t)

    @property
    def final_c_s(self) -> int:
        return len(self.final_s)


def resources(c_t: int, c_s: int, e: float) -> float:
    """Net resource production for one generation.

    Payoff scales with goal complexity met at rate ``e``; the unmet
    remainder is charged at technology complexity.
    """
    return c_s * e - c_t * (1.0 - e)


def iteration_budget(
    r: float,
    endowment: float,
    charge: ChargePolicy = ChargePolicy.DEFICIT_PLUS_FUNDING,
):
    """Turn production into an iteration count.

    :returns: ``(iterations, endowment_after, barrier)``. Positive
        production grants ``max(1, floor(r))`` iterations out of income.
        Otherwise a single iteration is granted against the endowment:
        the default policy charges the deficit plus the iteration's unit
        cost (``endowment + r - 1``), the DEFICIT variant charges the
        deficit alone. With nothing left to charge, the barrier flag is
        set and no iterations are granted.
    """
    if r > 0.0:
        return max(1, int(math.floor(r))), endowment, False
    if endowment > 0.0:
        if charge is ChargePolicy.DEFICIT_PLUS_FUNDING:
            return 1, endowment + r - 1.0, False
        return 1, endowment + r, False
    return 0, endowment, True


def adopt_decision(improved: bool, strength: float, rng: SplitMix64) -> bool:
    """Adoption rule: improvements always pass, the rest pass with
    probability ``1 - strength``. The uniform is drawn unconditionally
    to keep the stream position independent of the outcome."""
    u = rng.next_double()
    return improved or u < 1.0 - strength


def _draw_proposal(length: int, policy: RemovePolicy, rng: SplitMix64):
    """Draw one edit proposal; ``None`` marks a rejected no-op."""
    if policy is RemovePolicy.REJECT or length > 1:
        kind = ProposalKind(rng.next_below(3))
    else:
        kind = ProposalKind(1 + rng.next_below(2))
    if kind is ProposalKind.EXPAND:
        position = rng.next_below(length + 1)
        return EditProposal(kind, position, rng.next_bit())
    position = rng.next_below(length)
    if kind is ProposalKind.REMOVE and length == 1:
        return None
    return EditProposal(kind, position)


def _step(state: SocietyState, params: Params, rng: SplitMix64):
    """One iteration; returns (acted_on_t, adopted)."""
    on_t = rng.next_bit() == 0
    if on_t:
        cur, oth, strength = state.t, state.s, params.eta
    else:
        cur, oth, strength = state.s, state.t, params.lam
    proposal = _draw_proposal(len(cur), params.remove_at_min, rng)
    if proposal is None:
        rng.next_double()
        return on_t, False
    candidate = apply_proposal(cur, proposal)
    outcome, new_ld = classify_delta(cur, oth, state.cached_ld, candidate)
    if adopt_decision(outcome is DeltaOutcome.IMPROVED, strength, rng):
        if on_t:
            state.t = candidate
        else:
            state.s = candidate
        state.cached_ld = new_ld
        return on_t, True
    return on_t, False


def step_iteration(state: SocietyState, params: Params, rng: SplitMix64) -> SocietyState:
    """Public single-iteration entry point; mutates and returns ``state``."""
    _step(state, params, rng)
    return state


def run_generation(state: SocietyState, params: Params, rng: SplitMix64):
    """Advance one generation, or report why the run halts instead.

    :returns: ``(state, record, halt)``; exactly one of ``record`` and
        ``halt`` is not ``None``.

    Checks happen in a fixed order: the generation bound, then the
    complexity ceiling on either string, then production and budget.
    Production is computed once from the state at generation start;
    edits adopted mid-generation change later adoption decisions but
    never the running generation's budget.
    """
    if state.generation >= params.max_generations:
        return state, None, HaltReason.MAX_GENERATIONS
    if (len(state.t) >= params.max_complexity
            or len(state.s) >= params.max_complexity):
        return state, None, HaltReason.COMPLEXITY_CEILING
    e = effectiveness_from_distance(state.cached_ld, len(state.t), len(state.s))
    r = resources(len(state.t), len(state.s), e)
    iters, endowment_after, barrier = iteration_budget(r, state.endowment, params.charge)
    if barrier:
        return state, None, HaltReason.ABSORBING_BARRIER
    state.endowment = endowment_after
    c_t0 = len(state.t)
    c_s0 = len(state.s)
    adopted_t = 0
    adopted_s = 0
    for _ in range(iters):
        on_t, adopted = _step(state, params, rng)
        if adopted:
            if on_t:
                adopted_t += 1
            else:
                adopted_s += 1
    state.generation += 1
    record = GenerationRecord(
        generation=state.generation,
        c_t=c_t0,
        c_s=c_s0,
        effectiveness=e,
        resources=r,
        endowment=state.endowment,
        iterations=iters,
        adopted_t=adopted_t,
        adopted_s=adopted_s,
    )
    return state, record, None


def initial_state(params: Params, rng: SplitMix64) -> SocietyState:
    """Fresh society: both strings drawn independently, distance cached."""
    t = random_bitstring(params.init_complexity, rng)
    s = random_bitstring(params.init_complexity, rng)
    return SocietyState(
        t=t,
        s=s,
        endowment=params.endowment0,
        generation=0,
        cached_ld=levenshtein(t, s),
    )


def run_simulation(params: Params, thin: int = 1, run_index: int = 0) -> RunResult:
    """Run one society from a fresh start to its halt.

    ``thin`` keeps every n-th generation record (the final completed
    generation is always kept). The active backend decides whether the
    compiled kernel or the Python loop executes; outputs are identical.
    """
    if thin < 1:
        raise ValueError(f"thin must be >= 1, got {thin}")
    if active_backend() == "numba":
        return _run_numba(params, thin, run_index)
    return _run_python(params, thin, run_index)


def _run_python(params: Params, thin: int, run_index: int) -> RunResult:
    rng = SplitMix64(params.seed)
    state = initial_state(params, rng)
    max_c_t = len(state.t)
    max_c_s = len(state.s)
    records = []
    pending = None
    while True:
        state, record, halt = run_generation(state, params, rng)
        if halt is not None:
            break
        if len(state.t) > max_c_t:
            max_c_t = len(state.t)
        if len(state.s) > max_c_s:
            max_c_s = len(state.s)
        if (record.generation - 1) % thin == 0:
            records.append(record)
            pending = None
        else:
            pending = record
    if pending is not None:
        records.append(pending)
    return RunResult(
        params=params,
        halt=halt,
        generations=state.generation,
        final_t=state.t,
        final_s=state.s,
        final_ld=state.cached_ld,
        final_endowment=state.endowment,
        max_c_t=max_c_t,
        max_c_s=max_c_s,
        trajectory=Trajectory.from_records(records),
        run_index=run_index,
    )


_HALT_FROM_CODE = {
    0: HaltReason.MAX_GENERATIONS,
    1: HaltReason.COMPLEXITY_CEILING,
    2: HaltReason.ABSORBING_BARRIER,
}


def _bitstring_from_words(words: np.ndarray, length: int) -> Bitstring:
    nwords = (length + 63) // 64
    raw = words[:nwords].tobytes()
    value = int.from_bytes(raw, "little") & ((1 << length) - 1)
    return Bitstring(value, length)


def _run_numba(params: Params, thin: int, run_index: int) -> RunResult:
    from . import _kernels_numba as kernels

    (halt_code, generations, endowment, ld, t_len, s_len, t_words, s_words,
     max_c_t, max_c_s, n_rec, r_gen, r_ct, r_cs, r_eff, r_res, r_end,
     r_it, r_at, r_as) = kernels.simulate(
        params.seed & MASK64, params.eta, params.lam,
        params.init_complexity, params.endowment0, params.max_generations,
        params.max_complexity, params.remove_at_min is RemovePolicy.REJECT,
        params.charge is ChargePolicy.DEFICIT,
        thin,
    )
    trajectory = Trajectory.from_arrays(
        generation=r_gen[:n_rec],
        c_t=r_ct[:n_rec],
        c_s=r_cs[:n_rec],
        effectiveness=r_eff[:n_rec],
        resources=r_res[:n_rec],
        endowment=r_end[:n_rec],
        iterations=r_it[:n_rec],
        adopted_t=r_at[:n_rec],
        adopted_s=r_as[:n_rec],
    )
    return RunResult(
        params=params,
        halt=_HALT_FROM_CODE[int(halt_code)],
        generations=int(generations),
        final_t=_bitstring_from_words(t_words, int(t_len)),
        final_s=_bitstring_from_words(s_words, int(s_len)),
        final_ld=int(ld),
        final_endowment=float(endowment),
        max_c_t=int(max_c_t),
        max_c_s=int(max_c_s),
        trajectory=trajectory,
        run_index=run_index,
    )


def warmup() -> None:
    """Compile the kernels eagerly so worker threads never race the JIT."""
    if active_backend() != "numba":
        return
    from . import _kernels_numba as kernels

    kernels.simulate(1, 0.5, 0.5, 2, 5.0, 3, 50, False, False, 1)
    kernels.simulate(1, 0.5, 0.5, 2, 5.0, 3, 50, True, False, 1)
    kernels.rng_stream(1, 1)
    kernels.apply_edit(np.zeros(1, np.uint64), 1, 2, 0, 1)
