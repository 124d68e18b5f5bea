"""Compiled kernels: packed-word edit distance and the full run loop.

Strings live in uint64 word arrays (bit i sits at word i >> 6, lane
i & 63). The distance kernel is a block bit-parallel scheme banded to a
threshold: rows outside the band are seeded with worst-case vertical
deltas, which can only overestimate, so any in-band result at or below
the threshold is exact. The run loop mirrors the reference engine in
`engine.py` draw for draw; every stochastic choice consumes the same
SplitMix64 stream position in both.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U0 = np.uint64(0)
U1 = np.uint64(1)
U2 = np.uint64(2)
U3 = np.uint64(3)
U11 = np.uint64(11)
U27 = np.uint64(27)
U30 = np.uint64(30)
U31 = np.uint64(31)
U63 = np.uint64(63)
ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
DOUBLE_SCALE = 2.0 ** -53

HALT_MAX_GENERATIONS = 0
HALT_COMPLEXITY_CEILING = 1
HALT_ABSORBING_BARRIER = 2


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> U30)) * MIX1
    z = (z ^ (z >> U27)) * MIX2
    return z ^ (z >> U31)


@njit(cache=True, nogil=True)
def _next_u64(state):
    state = state + GOLDEN
    return state, _mix64(state)


@njit(cache=True, nogil=True)
def _copy_words(src, dst, nwords):
    for w in range(nwords):
        dst[w] = src[w]


@njit(cache=True, nogil=True)
def _flip_bit(words, pos):
    words[pos >> 6] ^= U1 << np.uint64(pos & 63)


@njit(cache=True, nogil=True)
def _remove_bit(src, length, pos, dst):
    # drop the bit at pos; bits above it slide down one lane
    old_nw = (length + 63) >> 6
    new_len = length - 1
    new_nw = (new_len + 63) >> 6
    wi = pos >> 6
    bi = pos & 63
    for w in range(wi):
        dst[w] = src[w]
    low_mask = (U1 << np.uint64(bi)) - U1
    if bi == 63:
        word = src[wi] & low_mask
    else:
        word = (src[wi] & low_mask) | ((src[wi] >> np.uint64(bi + 1)) << np.uint64(bi))
    if wi + 1 < old_nw:
        word |= (src[wi + 1] & U1) << U63
    dst[wi] = word
    for w in range(wi + 1, new_nw):
        word = src[w] >> U1
        if w + 1 < old_nw:
            word |= (src[w + 1] & U1) << U63
        dst[w] = word
    tail = new_len - ((new_nw - 1) << 6)
    if tail < 64:
        dst[new_nw - 1] &= (U1 << np.uint64(tail)) - U1
    return new_len


@njit(cache=True, nogil=True)
def _insert_bit(src, length, pos, bit, dst):
    # insert bit before pos; bits at and above pos slide up one lane
    old_nw = (length + 63) >> 6
    new_len = length + 1
    new_nw = (new_len + 63) >> 6
    wi = pos >> 6
    bi = pos & 63
    for w in range(wi):
        dst[w] = src[w]
    srcw = src[wi] if wi < old_nw else U0
    low_mask = (U1 << np.uint64(bi)) - U1
    carry = srcw >> U63
    dst[wi] = (srcw & low_mask) | (np.uint64(bit) << np.uint64(bi)) | ((srcw & ~low_mask) << U1)
    for w in range(wi + 1, new_nw):
        nxt = src[w] if w < old_nw else U0
        dst[w] = (nxt << U1) | carry
        carry = nxt >> U63
    tail = new_len - ((new_nw - 1) << 6)
    if tail < 64:
        dst[new_nw - 1] &= (U1 << np.uint64(tail)) - U1
    return new_len


@njit(cache=True, nogil=True)
def _banded_distance(pw, plen, tw, tlen, k, vp, vn, sc):
    """Distance between packed strings, exact while at most k, else -1.

    Row blocks of 64 advance column by column over the shorter string.
    Only blocks touching the band |row - col| <= k are updated; a block
    entering at the bottom is seeded from the exact score above it with
    all-increment deltas, an upper bound that leaves in-band cells on
    any optimal path untouched.
    """
    if plen < tlen:
        pw, tw = tw, pw
        plen, tlen = tlen, plen
    if plen - tlen > k:
        return -1
    if tlen == 0:
        return plen
    nb = (plen + 63) >> 6
    last_bits = plen - ((nb - 1) << 6)
    if last_bits == 64:
        last_mask = ONES
    else:
        last_mask = (U1 << np.uint64(last_bits)) - U1
    anchor = np.uint64(last_bits - 1)
    for b in range(nb):
        vp[b] = ONES
        vn[b] = U0
        sc[b] = (b + 1) << 6
    sc[nb - 1] = plen
    prev_bhi = -1
    for j in range(1, tlen + 1):
        lo = j - k
        if lo < 1:
            lo = 1
        hi = j + k
        if hi > plen:
            hi = plen
        blo = (lo - 1) >> 6
        bhi = (hi - 1) >> 6
        if prev_bhi >= 0 and bhi > prev_bhi:
            # fresh bottom block: worst-case deltas off the exact anchor
            if bhi == nb - 1:
                sc[bhi] = sc[bhi - 1] + (plen - ((nb - 1) << 6))
            else:
                sc[bhi] = sc[bhi - 1] + 64
        prev_bhi = bhi
        tbit = (tw[(j - 1) >> 6] >> np.uint64((j - 1) & 63)) & U1
        hin = 1
        for b in range(blo, bhi + 1):
            wmask = last_mask if b == nb - 1 else ONES
            if tbit != U0:
                eq0 = pw[b] & wmask
            else:
                eq0 = (~pw[b]) & wmask
            pv = vp[b]
            mv = vn[b]
            xv = eq0 | mv
            eq = eq0 | U1 if hin < 0 else eq0
            xh = (((eq & pv) + pv) ^ pv) | eq
            ph = mv | ~(xh | pv)
            mh = pv & xh
            abit = anchor if b == nb - 1 else U63
            hout = 0
            if ((ph >> abit) & U1) != U0:
                hout = 1
            if ((mh >> abit) & U1) != U0:
                hout = -1
            sc[b] += hout
            ph = ph << U1
            mh = mh << U1
            if hin > 0:
                ph |= U1
            elif hin < 0:
                mh |= U1
            vp[b] = mh | ~(xv | ph)
            vn[b] = ph & xv
            hin = hout
    d = sc[nb - 1]
    return d if d <= k else -1


@njit(cache=True, nogil=True)
def _apply_edit(src, length, kind, pos, bit, dst):
    if kind == 0:
        return _remove_bit(src, length, pos, dst)
    if kind == 1:
        _copy_words(src, dst, (length + 63) >> 6)
        _flip_bit(dst, pos)
        return length
    return _insert_bit(src, length, pos, bit, dst)


@njit(cache=True, nogil=True)
def _fill_stream(seed, out):
    state = seed
    for i in range(out.size):
        state, z = _next_u64(state)
        out[i] = z


@njit(cache=True, nogil=True)
def _simulate(seed, eta, lam, init_c, endow0, max_gen, max_c, reject_at_min,
              charge_deficit_only, thin):
    # within one generation each string can grow by at most the
    # iteration budget, which is itself below the ceiling
    cap_words = ((2 * max_c + 2) + 63) >> 6
    nb_cap = cap_words + 1
    t_words = np.zeros(cap_words, np.uint64)
    s_words = np.zeros(cap_words, np.uint64)
    cand = np.zeros(cap_words, np.uint64)
    vp = np.empty(nb_cap, np.uint64)
    vn = np.empty(nb_cap, np.uint64)
    sc = np.empty(nb_cap, np.int64)

    n_slots = (max_gen + thin - 1) // thin + 1
    if n_slots < 1:
        n_slots = 1
    rec_gen = np.empty(n_slots, np.int64)
    rec_ct = np.empty(n_slots, np.int64)
    rec_cs = np.empty(n_slots, np.int64)
    rec_eff = np.empty(n_slots, np.float64)
    rec_res = np.empty(n_slots, np.float64)
    rec_end = np.empty(n_slots, np.float64)
    rec_it = np.empty(n_slots, np.int64)
    rec_at = np.empty(n_slots, np.int64)
    rec_as = np.empty(n_slots, np.int64)
    n_rec = 0

    state = seed
    for i in range(init_c):
        state, z = _next_u64(state)
        if (z & U1) != U0:
            t_words[i >> 6] |= U1 << np.uint64(i & 63)
    for i in range(init_c):
        state, z = _next_u64(state)
        if (z & U1) != U0:
            s_words[i >> 6] |= U1 << np.uint64(i & 63)
    t_len = init_c
    s_len = init_c
    ld = _banded_distance(t_words, t_len, s_words, s_len, init_c, vp, vn, sc)
    max_ct = t_len
    max_cs = s_len
    endow = endow0
    generation = 0
    halt = HALT_MAX_GENERATIONS
    pend = False
    p_gen = 0
    p_ct = 0
    p_cs = 0
    p_eff = 0.0
    p_res = 0.0
    p_end = 0.0
    p_it = 0
    p_at = 0
    p_as = 0

    while True:
        if generation >= max_gen:
            halt = HALT_MAX_GENERATIONS
            break
        if t_len >= max_c or s_len >= max_c:
            halt = HALT_COMPLEXITY_CEILING
            break
        m = t_len if t_len >= s_len else s_len
        e = 1.0 - ld / m
        r = s_len * e - t_len * (1.0 - e)
        if r > 0.0:
            iters = int(np.floor(r))
            if iters < 1:
                iters = 1
        elif endow > 0.0:
            iters = 1
            if charge_deficit_only:
                endow = endow + r
            else:
                endow = endow + r - 1.0
        else:
            halt = HALT_ABSORBING_BARRIER
            break
        start_ct = t_len
        start_cs = s_len
        adopted_t = 0
        adopted_s = 0
        for _ in range(iters):
            state, z = _next_u64(state)
            on_t = (z & U1) == U0
            cur = t_words if on_t else s_words
            cur_len = t_len if on_t else s_len
            oth = s_words if on_t else t_words
            oth_len = s_len if on_t else t_len
            strength = eta if on_t else lam
            state, z = _next_u64(state)
            if reject_at_min or cur_len > 1:
                kind = int(z % U3)
            else:
                kind = 1 + int(z % U2)
            skip = False
            new_len = cur_len
            if kind == 2:
                state, z = _next_u64(state)
                pos = int(z % np.uint64(cur_len + 1))
                state, z = _next_u64(state)
                new_len = _insert_bit(cur, cur_len, pos, int(z & U1), cand)
            else:
                state, z = _next_u64(state)
                pos = int(z % np.uint64(cur_len))
                if kind == 0:
                    if cur_len == 1:
                        skip = True
                    else:
                        new_len = _remove_bit(cur, cur_len, pos, cand)
                else:
                    _copy_words(cur, cand, (cur_len + 63) >> 6)
                    _flip_bit(cand, pos)
            state, z = _next_u64(state)
            u = np.float64(z >> U11) * DOUBLE_SCALE
            if skip:
                continue
            m_old = cur_len if cur_len >= oth_len else oth_len
            m_new = new_len if new_len >= oth_len else oth_len
            gap = new_len - oth_len
            if gap < 0:
                gap = -gap
            if gap == ld + 1:
                new_ld = ld + 1
            else:
                new_ld = _banded_distance(cand, new_len, oth, oth_len, ld + 1, vp, vn, sc)
            improved = new_ld * m_old < ld * m_new
            if improved or u < 1.0 - strength:
                _copy_words(cand, cur, (new_len + 63) >> 6)
                ld = new_ld
                if on_t:
                    t_len = new_len
                    adopted_t += 1
                else:
                    s_len = new_len
                    adopted_s += 1
        generation += 1
        if t_len > max_ct:
            max_ct = t_len
        if s_len > max_cs:
            max_cs = s_len
        p_gen = generation
        p_ct = start_ct
        p_cs = start_cs
        p_eff = e
        p_res = r
        p_end = endow
        p_it = iters
        p_at = adopted_t
        p_as = adopted_s
        if (generation - 1) % thin == 0:
            rec_gen[n_rec] = p_gen
            rec_ct[n_rec] = p_ct
            rec_cs[n_rec] = p_cs
            rec_eff[n_rec] = p_eff
            rec_res[n_rec] = p_res
            rec_end[n_rec] = p_end
            rec_it[n_rec] = p_it
            rec_at[n_rec] = p_at
            rec_as[n_rec] = p_as
            n_rec += 1
            pend = False
        else:
            pend = True
    if pend:
        rec_gen[n_rec] = p_gen
        rec_ct[n_rec] = p_ct
        rec_cs[n_rec] = p_cs
        rec_eff[n_rec] = p_eff
        rec_res[n_rec] = p_res
        rec_end[n_rec] = p_end
        rec_it[n_rec] = p_it
        rec_at[n_rec] = p_at
        rec_as[n_rec] = p_as
        n_rec += 1
    return (halt, generation, endow, ld, t_len, s_len, t_words, s_words,
            max_ct, max_cs, n_rec, rec_gen, rec_ct, rec_cs, rec_eff,
            rec_res, rec_end, rec_it, rec_at, rec_as)


def bounded_distance(words_a, len_a, words_b, len_b, k):
    """Python-facing wrapper allocating scratch for one query."""
    nb = (max(len_a, len_b) + 63) // 64 + 1
    vp = np.empty(nb, np.uint64)
    vn = np.empty(nb, np.uint64)
    sc = np.empty(nb, np.int64)
    return int(_banded_distance(words_a, len_a, words_b, len_b, k, vp, vn, sc))


def apply_edit(words, length, kind, pos, bit):
    """Test harness for the packed edit routines."""
    dst = np.zeros((length + 1 + 63) // 64 + 1, np.uint64)
    new_len = _apply_edit(words, length, kind, pos, bit, dst)
    return dst, int(new_len)


def rng_stream(seed, count):
    """Test harness exposing the in-kernel generator."""
    out = np.empty(count, np.uint64)
    _fill_stream(np.uint64(seed), out)
    return out


def simulate(seed, eta, lam, init_c, endow0, max_gen, max_c, reject_at_min,
             charge_deficit_only, thin):
    """Run one society start to halt; returns the packed result tuple."""
    return _simulate(np.uint64(seed), float(eta), float(lam), int(init_c),
                     float(endow0), int(max_gen), int(max_c),
                     bool(reject_at_min), bool(charge_deficit_only), int(thin))
