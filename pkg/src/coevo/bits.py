"""Bitstrings and single-edit proposals.

A technology string and the goal string it is matched against are both
immutable sequences of bits; the length of a string is its complexity.
Values are stored as one Python integer (bit i of the integer is symbol
i), which keeps every edit exact at any length and makes strings cheap
to hash and compare. The compiled kernels use a packed uint64-word
layout instead; ``to_word_array`` bridges the two.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64


class ProposalKind(enum.IntEnum):
    """The three single-edit moves. Integer codes are shared with the
    compiled engine and with the draw mapping (value = draw % 3)."""

    REMOVE = 0
    MODIFY = 1
    EXPAND = 2


@dataclass(frozen=True)
class EditProposal:
    """One candidate change: drop, flip, or insert a single bit.

    ``position`` indexes symbols for REMOVE and MODIFY, and the
    ``length + 1`` insertion gaps (both ends included) for EXPAND.
    ``new_bit`` is only meaningful for EXPAND.
    """

    kind: ProposalKind
    position: int
    new_bit: int | None = None

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError(f"position must be non-negative, got {self.position}")
        if self.kind is ProposalKind.EXPAND:
            if self.new_bit not in (0, 1):
                raise ValueError("an expand proposal needs new_bit 0 or 1")
        elif self.new_bit is not None:
            raise ValueError(f"new_bit is only valid for expand, not {self.kind.name}")


class Bitstring:
    """Immutable binary string; index 0 is the leftmost symbol."""

    __slots__ = ("_value", "_length")

    def __init__(self, value: int, length: int) -> None:
        if length < 1:
            raise ValueError("a bitstring holds at least one symbol")
        if value < 0 or value >> length:
            raise ValueError("value has bits set outside the declared length")
        self._value = value
        self._length = length

    @classmethod
    def from01(cls, text: str) -> "Bitstring":
        """Parse an ASCII '0'/'1' string, leftmost symbol first."""
        if not text:
            raise ValueError("empty text")
        stripped = set(text) - {"0", "1"}
        if stripped:
            raise ValueError(f"invalid symbols in bitstring text: {sorted(stripped)}")
        return cls(int(text[::-1], 2), len(text))

    def to01(self) -> str:
        return format(self._value, f"0{self._length}b")[::-1]

    @property
    def value(self) -> int:
        return self._value

    def __len__(self) -> int:
        return self._length

    def bit(self, position: int) -> int:
        if not 0 <= position < self._length:
            raise IndexError(f"position {position} outside [0, {self._length})")
        return (self._value >> position) & 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bitstring):
            return NotImplemented
        return self._length == other._length and self._value == other._value

    def __hash__(self) -> int:
        return hash((self._value, self._length))

    def __repr__(self) -> str:
        if self._length <= 64:
            return f"Bitstring({self.to01()!r})"
        return f"Bitstring(length={self._length})"

    def to_word_array(self) -> np.ndarray:
        """Packed uint64 words, bit i at word i >> 6, lane i & 63."""
        nwords = (self._length + 63) >> 6
        raw = self._value.to_bytes(nwords * 8, "little")
        return np.frombuffer(raw, dtype="<u8").copy()

    def to_bit_array(self) -> np.ndarray:
        """One uint8 per symbol, index order preserved."""
        nwords = (self._length + 63) >> 6
        raw = self._value.to_bytes(nwords * 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return bits[: self._length]


def random_bitstring(length: int, rng: SplitMix64) -> Bitstring:
    """Fresh string of independent fair bits, drawn lowest index first."""
    if length < 1:
        raise ValueError("length must be at least 1")
    value = 0
    for i in range(length):
        value |= rng.next_bit() << i
    return Bitstring(value, length)


def sample_proposal(current_length: int, rng: SplitMix64) -> EditProposal:
    """Draw a proposal: kind, then position, then the inserted bit.

    The three kinds are equally likely, except at length 1 where a
    removal would empty the string; there the kind draw covers modify
    and expand only, each with probability one half. The draw order is
    part of the reproducibility contract and matches the compiled
    engine draw for draw.
    """
    if current_length < 1:
        raise ValueError("current_length must be at least 1")
    if current_length == 1:
        kind = ProposalKind(1 + rng.next_below(2))
    else:
        kind = ProposalKind(rng.next_below(3))
    if kind is ProposalKind.EXPAND:
        position = rng.next_below(current_length + 1)
        return EditProposal(kind, position, rng.next_bit())
    return EditProposal(kind, rng.next_below(current_length))


def apply_proposal(s: Bitstring, p: EditProposal) -> Bitstring:
    """Apply one edit, returning a new string; the input is untouched."""
    v, n = s.value, len(s)
    pos = p.position
    if p.kind is ProposalKind.MODIFY:
        if pos >= n:
            raise ValueError(f"modify position {pos} outside [0, {n})")
        return Bitstring(v ^ (1 << pos), n)
    if p.kind is ProposalKind.REMOVE:
        if n == 1:
            raise ValueError("cannot remove the last symbol")
        if pos >= n:
            raise ValueError(f"remove position {pos} outside [0, {n})")
        low = v & ((1 << pos) - 1)
        return Bitstring(low | ((v >> (pos + 1)) << pos), n - 1)
    # expand
    if pos > n:
        raise ValueError(f"expand position {pos} outside [0, {n}]")
    low = v & ((1 << pos) - 1)
    return Bitstring(low | (p.new_bit << pos) | ((v >> pos) << (pos + 1)), n + 1)
