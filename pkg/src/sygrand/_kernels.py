"""Compiled Monte Carlo kernels.

Mirrors :func:`sygrand.decoder.decode` on packed ``uint64`` words so that
millions of trials fit in a desk-scale budget. Syndromes must fit in one
word (``n - k <= 64``); codewords may be any length.

Status codes match :class:`sygrand.decoder.Status` in declaration order.
"""

import math

import numba
import numpy as np
from numba import njit, prange

from .streams import draw_bits, draw_normals, trial_key

ORBGRAND, SYGRAND, ORDEPT = 0, 1, 2
HIT, TERMINATED, FULL, ABANDONED = 0, 1, 2, 3
LN2 = math.log(2.0)
LLR_MAX = 700.0


# --- pattern enumeration ----------------------------------------------------

@njit(cache=True)
def _fill_first(parts, start, count, lo, total, n):
    """Lexicographically smallest increasing run of ``count`` values in
    ``[lo, n]`` summing to ``total``, written at ``parts[start:]``."""
    for j in range(count):
        r = count - j
        top = (2 * n - r + 2) * (r - 1) // 2
        a = max(lo, total - top)
        if a > n or a + (2 * a + r) * (r - 1) // 2 > total:
            return False
        parts[start + j] = a
        total -= a
        lo = a + 1
    return total == 0


@njit(cache=True)
def _next_same(parts, c, n):
    """Advance to the next subset with the same size and sum."""
    suffix = parts[c - 1]
    for i in range(c - 2, -1, -1):
        suffix += parts[i]
        new = parts[i] + 1
        r = c - i - 1
        rem = suffix - new
        lo_sum = (2 * (new + 1) + r - 1) * r // 2
        hi_sum = (2 * n - r + 1) * r // 2
        if lo_sum <= rem <= hi_sum:
            parts[i] = new
            _fill_first(parts, i + 1, r, new + 1, rem, n)
            return True
    return False


@njit(cache=True)
def advance_pattern(st, parts, n, parity):
    """Step the rank-subset iterator. ``st = [weight, size, started]``;
    ``parity`` is -1 for no filter. Returns False when exhausted."""
    w = st[0]
    c = st[1]
    if st[2] == 1 and c >= 2 and _next_same(parts, c, n):
        return True
    if st[2] == 0:
        st[2] = 1
        c = -1
    max_w = n * (n + 1) // 2
    while w <= max_w:
        c += 1
        if c > n or c * (c + 1) // 2 > w:
            w += 1
            c = -1
            continue
        if parity >= 0 and (c & 1) != parity:
            continue
        if _fill_first(parts, 0, c, 1, w, n):
            st[0] = w
            st[1] = c
            return True
    st[0] = w
    st[1] = c
    return False


# --- helpers ----------------------------------------------------------------

@njit(cache=True)
def _p_missing(remaining, list_mass, redundancy):
    if list_mass <= 0.0:
        return 1.0
    if remaining <= 0.0:
        return 0.0
    x = math.log(list_mass) - math.log(remaining) + redundancy * LN2
    if x > 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


@njit(cache=True)
def _lookup_column(keys, s):
    """Index of the first entry equal to ``s`` in sorted ``keys``, or -1."""
    lo = 0
    hi = keys.size
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < s:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.size and keys[lo] == s:
        return lo
    return -1


@njit(cache=True)
def _words_equal(a, b):
    for i in range(a.size):
        if a[i] != b[i]:
            return False
    return True


@njit(cache=True)
def _find_row(store, size, w):
    for i in range(size):
        if _words_equal(store[i], w):
            return i
    return -1


@njit(cache=True)
def _neumaier(total, comp, x):
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp


@njit(cache=True)
def _syndrome_of(w, n, cols):
    """Syndrome recomputed from scratch, independent of the incremental one."""
    s = np.uint64(0)
    for i in range(n):
        if (w[i >> 6] >> np.uint64(i & 63)) & np.uint64(1):
            s ^= cols[i]
    return s


# --- single decode ----------------------------------------------------------

@njit(cache=True)
def decode_one(llr, n, k, cols, col_keys, col_pos, even_weight, use_parity,
               variant, theta, l_max, t_budget, max_queries,
               truth, out_word, trace_p, trace_ok, trace_q):
    """Decode one LLR vector.

    ``truth`` holds the transmitted codeword words (or is empty); it only
    feeds the ``in_list`` flag and the trace. ``l_max`` < 0 means unbounded.
    Returns ``(queries, queries_to_first, list_size, status, p_hat,
    in_list, n_events, n_invalid)``; the decoded word is written to
    ``out_word``. ``n_invalid`` counts list entries and direct hits whose
    recomputed syndrome is nonzero, and is always 0 for a correct kernel.
    """
    nw = out_word.size
    redundancy = n - k
    have_truth = truth.size == nw
    trace_cap = trace_p.size

    mag = np.empty(n)
    hd = np.zeros(nw, dtype=np.uint64)
    s0 = np.uint64(0)
    base = 0.0
    hd_weight = 0
    for i in range(n):
        m = abs(llr[i])
        mag[i] = m
        base -= math.log1p(math.exp(-m))
        if llr[i] <= 0.0:
            hd[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
            s0 ^= cols[i]
            hd_weight += 1
    order = np.argsort(mag, kind="mergesort")

    parity = -1
    if use_parity and even_weight and variant == ORBGRAND:
        parity = hd_weight & 1

    st = np.zeros(3, dtype=np.int64)
    parts = np.zeros(n + 1, dtype=np.int64)
    guess = np.empty(nw, dtype=np.uint64)
    cand = np.empty(nw, dtype=np.uint64)

    cap = 8
    store = np.empty((cap, nw), dtype=np.uint64)
    store_ll = np.empty(cap)
    size = 0
    best = -1
    list_mass = 0.0
    list_comp = 0.0
    rem = 1.0
    rem_comp = 0.0
    q = 0
    q_first = -1
    n_events = 0
    n_invalid = 0
    status = ABANDONED
    p_hat = 1.0
    done = False

    while q < max_queries:
        if not advance_pattern(st, parts, n, parity):
            break
        q += 1
        c = st[1]
        s = s0
        ll = base
        for j in range(nw):
            guess[j] = hd[j]
        for j in range(c):
            p = order[parts[j] - 1]
            s ^= cols[p]
            ll -= mag[p]
            guess[p >> 6] ^= np.uint64(1) << np.uint64(p & 63)
        if c == 0:
            rem = -math.expm1(ll)
            rem_comp = 0.0
        else:
            rem, rem_comp = _neumaier(rem, rem_comp, -math.exp(ll))

        if s == 0:
            if _syndrome_of(guess, n, cols) != 0:
                n_invalid += 1
            if q_first < 0:
                q_first = q
            found = _find_row(store, size, guess)
            outside = list_mass + list_comp
            if found >= 0:
                outside -= math.exp(ll)
            else:
                list_mass, list_comp = _neumaier(list_mass, list_comp, math.exp(ll))
                size += 1
            p_hat = _p_missing(rem + rem_comp - outside, list_mass + list_comp, redundancy)
            for j in range(nw):
                out_word[j] = guess[j]
            in_list = False
            if have_truth:
                in_list = _words_equal(guess, truth) or (
                    _find_row(store, size if found >= 0 else size - 1, truth) >= 0)
            return q, q_first, size, HIT, p_hat, in_list, n_events, n_invalid

        if variant == ORBGRAND:
            continue

        idx = _lookup_column(col_keys, s)
        while idx >= 0 and idx < col_keys.size and col_keys[idx] == s:
            p = col_pos[idx]
            idx += 1
            for j in range(nw):
                cand[j] = guess[j]
            cand[p >> 6] ^= np.uint64(1) << np.uint64(p & 63)
            # flipping p back to the hard decision gains |llr_p|
            bit = np.uint64(1) << np.uint64(p & 63)
            if (guess[p >> 6] ^ hd[p >> 6]) & bit:
                ll_w = ll + mag[p]
            else:
                ll_w = ll - mag[p]
            if _find_row(store, size, cand) >= 0:
                continue
            if _syndrome_of(cand, n, cols) != 0:
                n_invalid += 1
            if size == cap:
                cap *= 2
                grown = np.empty((cap, nw), dtype=np.uint64)
                grown[:size] = store[:size]
                store = grown
                grown_ll = np.empty(cap)
                grown_ll[:size] = store_ll[:size]
                store_ll = grown_ll
            store[size] = cand
            store_ll[size] = ll_w
            if best < 0 or ll_w > store_ll[best]:
                best = size
            size += 1
            list_mass, list_comp = _neumaier(list_mass, list_comp, math.exp(ll_w))
            if q_first < 0:
                q_first = q
            mass = list_mass + list_comp
            p_hat = _p_missing(rem + rem_comp - mass, mass, redundancy)
            if n_events < trace_cap:
                trace_p[n_events] = p_hat
                trace_q[n_events] = q
                trace_ok[n_events] = have_truth and _words_equal(store[best], truth)
            n_events += 1
            if variant == SYGRAND and p_hat <= theta:
                status = TERMINATED
                done = True
                break
            if l_max >= 0 and size >= l_max:
                status = FULL
                done = True
                break
        if done:
            break
        if variant == ORDEPT and q >= t_budget:
            status = TERMINATED if size > 0 else ABANDONED
            done = True
            break

    if not done:
        status = TERMINATED if size > 0 else ABANDONED
    mass = list_mass + list_comp
    p_hat = _p_missing(rem + rem_comp - mass, mass, redundancy)
    in_list = False
    if size > 0:
        for j in range(nw):
            out_word[j] = store[best, j]
        if have_truth:
            in_list = _find_row(store, size, truth) >= 0
    else:
        for j in range(nw):
            out_word[j] = hd[j]
    return q, q_first, size, status, p_hat, in_list, n_events, n_invalid


# --- batch simulation -------------------------------------------------------

@njit(cache=True)
def _trial_channel(key, k, n, g_rows, sigma2, ubits, z, cw, llr):
    nxt = draw_bits(key, 0, ubits)
    cw[:] = 0
    for i in range(k):
        if ubits[i]:
            for j in range(cw.size):
                cw[j] ^= g_rows[i, j]
    draw_normals(key, nxt, z)
    sd = math.sqrt(sigma2)
    for i in range(n):
        bit = (cw[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)
        x = 1.0 - 2.0 * float(bit)
        v = 2.0 * (x + sd * z[i]) / sigma2
        if v > LLR_MAX:
            v = LLR_MAX
        elif v < -LLR_MAX:
            v = -LLR_MAX
        llr[i] = v


def _batch_body(n, k, cols, col_keys, col_pos, g_rows, even_weight, use_parity,
                variant, theta, l_max, t_budget, max_queries,
                sigma2, seed, point, t0,
                err, queries, q_first, list_size, status, p_hat, in_list,
                words, trace_p, trace_ok, trace_q, n_events, n_invalid):
    count = err.size
    nw = g_rows.shape[1]
    keep_words = words.shape[0] == count
    for i in prange(count):
        key = trial_key(np.uint64(seed), np.uint64(point), np.uint64(t0 + i))
        ubits = np.empty(k, dtype=np.uint8)
        z = np.empty(n)
        cw = np.zeros(nw, dtype=np.uint64)
        llr = np.empty(n)
        _trial_channel(key, k, n, g_rows, sigma2, ubits, z, cw, llr)
        out = np.empty(nw, dtype=np.uint64)
        qq, qf, ls, stt, ph, il, ne, ni = decode_one(
            llr, n, k, cols, col_keys, col_pos, even_weight, use_parity,
            variant, theta, l_max, t_budget, max_queries,
            cw, out, trace_p[i], trace_ok[i], trace_q[i])
        err[i] = not _words_equal(out, cw)
        queries[i] = qq
        q_first[i] = qf
        list_size[i] = ls
        status[i] = stt
        p_hat[i] = ph
        in_list[i] = il
        n_events[i] = ne
        n_invalid[i] = ni
        if keep_words:
            words[i] = out


batch_serial = njit(cache=True)(_batch_body)
# The TBB layer is skipped: older TBB builds only produce a warning.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
batch_parallel = njit(cache=True, parallel=True)(_batch_body)


def _channel_body(n, k, g_rows, sigma2, seed, point, t0, code_bits, llrs):
    count = llrs.shape[0]
    nw = g_rows.shape[1]
    for i in prange(count):
        key = trial_key(np.uint64(seed), np.uint64(point), np.uint64(t0 + i))
        ubits = np.empty(k, dtype=np.uint8)
        z = np.empty(n)
        cw = np.zeros(nw, dtype=np.uint64)
        _trial_channel(key, k, n, g_rows, sigma2, ubits, z, cw, llrs[i])
        for j in range(n):
            code_bits[i, j] = (cw[j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


channel_batch = njit(cache=True)(_channel_body)
