"""Deterministic 64-bit random streams.

Every stochastic draw in this package goes through SplitMix64: a
counter-based generator that is trivial to seed, has full 2**64 period,
and is small enough to carry a second, bit-identical copy inside the
compiled kernels. Keeping the two copies in lockstep is what makes the
accelerated and fallback engines interchangeable down to the last draw.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """Finalizing scramble of SplitMix64; bijective on 64-bit values."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 over plain Python ints masked to 64 bits."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return mix64(self._state)

    def next_bit(self) -> int:
        return self.next_uint64() & 1

    def next_below(self, bound: int) -> int:
        """Uniform draw from [0, bound).

        Plain modulo reduction: the bias is below 1e-15 for the bounds
        used here (at most a few times 1e4) and the compiled engine can
        reproduce it with one instruction.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_uint64() % bound

    def next_double(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_uint64() >> 11) * 2.0 ** -53

    @property
    def state(self) -> int:
        return self._state


def derive_run_seed(master_seed: int, eta_index: int, lambda_index: int,
                    run_index: int) -> int:
    """Per-run seed from the master seed and the run's grid coordinates.

    Grid indices rather than grid values enter the mix, so grids that
    repeat a value still hand every run its own stream, and the result
    does not depend on float formatting.
    """
    s = master_seed & MASK64
    for v in (eta_index, lambda_index, run_index):
        s = mix64(s ^ (((v + 1) * _GOLDEN) & MASK64))
    return s
