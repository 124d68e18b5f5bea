"""Edit distance and effectiveness scoring between bitstrings.

Effectiveness is the inverted, length-normalised edit distance: two
identical strings score 1.0, maximally distant strings score 0.0. The
heavy lifting happens in the backend kernels; this module owns the
public signatures, the Exceeded convention (``None``), and the exact
rational comparison used to rank candidate edits.
"""

from __future__ import annotations

import enum

from .backend import active_backend
from .bits import Bitstring

#: Marker returned by :func:`levenshtein_bounded` when the distance
#: exceeds the requested threshold.
EXCEEDED = None


class DeltaOutcome(enum.Enum):
    """Effect of a candidate edit on effectiveness."""

    IMPROVED = "improved"
    TIED = "tied"
    WORSENED = "worsened"


def _bounded(a: Bitstring, b: Bitstring, k: int) -> int:
    if active_backend() == "numba":
        from . import _kernels_numba as kernels

        return kernels.bounded_distance(
            a.to_word_array(), len(a), b.to_word_array(), len(b), k
        )
    from . import _kernels_numpy as kernels

    return kernels.bounded_distance(a.to_bit_array(), b.to_bit_array(), k)


def levenshtein(a: Bitstring, b: Bitstring) -> int:
    """Exact edit distance (insertions, deletions, substitutions)."""
    # LD never exceeds the longer length, so this threshold is free
    return _bounded(a, b, max(len(a), len(b)))


def levenshtein_bounded(a: Bitstring, b: Bitstring, k: int):
    """Edit distance when it is at most ``k``, else :data:`EXCEEDED`.

    :param a: first string.
    :param b: second string.
    :param k: non-negative threshold; work is banded to O((2k+1) * min length).
    :returns: the exact distance as an ``int``, or ``None``.
    """
    if k < 0:
        raise ValueError(f"threshold must be >= 0, got {k}")
    d = _bounded(a, b, k)
    return d if d >= 0 else EXCEEDED


def effectiveness_from_distance(ld: int, c_t: int, c_s: int) -> float:
    """Effectiveness given a precomputed distance and both lengths."""
    m = c_t if c_t >= c_s else c_s
    return 1.0 - ld / m


def effectiveness(t: Bitstring, s: Bitstring) -> float:
    """How well the first string matches the second, in [0, 1]."""
    return effectiveness_from_distance(levenshtein(t, s), len(t), len(s))


def classify_delta(current: Bitstring, other: Bitstring, cached_ld: int,
                   candidate: Bitstring):
    """Rank a single-edit candidate against the string it would replace.

    A single edit moves the distance by at most one, so the new distance
    is found with a banded pass at threshold ``cached_ld + 1``; when the
    length gap alone already forces ``cached_ld + 1``, no distance pass
    runs at all. Because an edit can change the normalising length, the
    comparison is on effectiveness, not raw distance, and is carried out
    exactly on cross-multiplied integers: with m = max length before and
    m' = max length after, E' > E iff new_ld * m < cached_ld * m'.

    :param current: the string the candidate would replace.
    :param other: the fixed string both are scored against.
    :param candidate: ``current`` with one edit applied.
    :param cached_ld: known distance between ``current`` and ``other``.
    :returns: ``(outcome, new_ld)`` where outcome is a :class:`DeltaOutcome`.
    :raises ValueError: if ``cached_ld`` is negative, or provably stale
        (the banded pass cannot come out above ``cached_ld + 1`` when the
        cache is coherent and the candidate is one edit away).
    """
    if cached_ld < 0:
        raise ValueError(f"cached distance must be >= 0, got {cached_ld}")
    gap = abs(len(candidate) - len(other))
    if gap == cached_ld + 1:
        new_ld = cached_ld + 1
    else:
        new_ld = _bounded(candidate, other, cached_ld + 1)
        if new_ld < 0:
            raise ValueError(
                "cached distance is stale: candidate is more than "
                f"{cached_ld + 1} edits from the reference string"
            )
    m_old = max(len(current), len(other))
    m_new = max(len(candidate), len(other))
    lhs = new_ld * m_old
    rhs = cached_ld * m_new
    if lhs < rhs:
        return DeltaOutcome.IMPROVED, new_ld
    if lhs == rhs:
        return DeltaOutcome.TIED, new_ld
    return DeltaOutcome.WORSENED, new_ld
