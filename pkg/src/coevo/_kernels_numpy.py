"""Pure-numpy fallback kernel for threshold-bounded edit distance.

Row-banded dynamic programming over uint8 bit arrays. Rows sweep the
shorter string; each row touches only the columns within threshold
distance of the diagonal, so work stays O((2k+1) * min(len_a, len_b)).
Cells outside the band are treated as unreachable via a large sentinel,
which can only overestimate; any final value at or below the threshold
is therefore exact.
"""

from __future__ import annotations

import numpy as np


def bounded_distance(a: np.ndarray, b: np.ndarray, k: int) -> int:
    """Edit distance between bit arrays if it is <= k, else -1."""
    if a.size < b.size:
        a, b = b, a
    m = a.size
    n = b.size
    if m - n > k:
        return -1
    if n == 0:
        return m
    inf = m + n + 1
    pjlo = 0
    prev = np.arange(min(m, k) + 1, dtype=np.int64)
    pjhi = prev.size - 1
    for i in range(1, n + 1):
        jlo = i - k if i - k > 1 else 1
        jhi = i + k if i + k < m else m
        width = jhi - jlo + 1
        pseg = np.full(width + 1, inf, dtype=np.int64)
        c0 = max(jlo - 1, pjlo)
        c1 = min(jhi, pjhi)
        if c0 <= c1:
            pseg[c0 - jlo + 1:c1 - jlo + 2] = prev[c0 - pjlo:c1 - pjlo + 1]
        # column 0 is never stored in a window; patch its boundary value
        if jlo == 1:
            pseg[0] = i - 1 if i - 1 <= k else inf
        sub = pseg[:width] + (a[jlo - 1:jhi] != b[i - 1])
        up = pseg[1:] + 1
        base = np.minimum(sub, up)
        jcols = np.arange(jlo, jhi + 1, dtype=np.int64)
        shifted = np.empty(width + 1, dtype=np.int64)
        # column 0 holds i deletions, but only while it is inside the band
        seed = i if jlo == 1 and i <= k else inf
        shifted[0] = seed - (jlo - 1)
        shifted[1:] = base - jcols
        # running minimum turns the left-neighbour recurrence into one pass
        curr = np.minimum.accumulate(shifted)[1:] + jcols
        slack = curr + np.abs((n - i) - (m - jcols))
        if int(slack.min()) > k:
            return -1
        prev = curr
        pjlo = jlo
        pjhi = jhi
    d = int(prev[m - pjlo])
    return d if d <= k else -1
