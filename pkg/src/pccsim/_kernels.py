"""Compiled batch kernels shared by the decoders and the Monte Carlo loop.

Every kernel works on arrays of shape (blocks, n). ``HARD``, ``FLIP`` and
``SOFT_ML`` are the integer decoder codes understood by :func:`count_errors`.
"""

import numba as nb
import numpy as np

HARD, FLIP, SOFT_ML = 0, 1, 2


@nb.njit(cache=True, nogil=True)
def _flip_into(r, h, out):
    n = r.size
    odd = 0
    jmin = 0
    for i in range(n):
        b = 1 if r[i] < 0.0 else 0
        out[i] = b
        odd ^= b
        if h[i] < h[jmin]:
            jmin = i
    if odd:
        out[jmin] ^= 1
        return jmin
    return -1


@nb.njit(cache=True, nogil=True)
def _soft_index(r, h, v):
    # Gray-code walk over all 2^k data words; each step flips one data bit
    # and the parity bit, so the correlation metric updates in O(1).
    # v[i] holds h[i] * r[i] * x[i] for the current codeword, vk the parity term.
    n = r.size
    k = n - 1
    metric = 0.0
    for i in range(n):
        v[i] = h[i] * r[i]
        metric += v[i]
    vk = v[k]
    best = metric
    best_m = 0
    g = 0
    for step in range(1, 1 << k):
        b = 0
        while not (step >> b) & 1:
            b += 1
        j = k - 1 - b
        metric -= 2.0 * (v[j] + vk)
        v[j] = -v[j]
        vk = -vk
        g ^= 1 << b
        # branch-free update keeps the cost per codeword flat in k
        better = (metric > best) | ((metric == best) & (g < best_m))
        best_m = g if better else best_m
        best = metric if better else best
    return best_m


@nb.njit(cache=True, nogil=True)
def _index_into(m, k, out):
    odd = 0
    for i in range(k):
        b = (m >> (k - 1 - i)) & 1
        out[i] = b
        odd ^= b
    out[k] = odd


@nb.njit(cache=True, nogil=True)
def hard_batch(r):
    out = np.empty(r.shape, np.uint8)
    for t in range(r.shape[0]):
        for i in range(r.shape[1]):
            out[t, i] = 1 if r[t, i] < 0.0 else 0
    return out


@nb.njit(cache=True, nogil=True)
def flip_batch(r, h):
    out = np.empty(r.shape, np.uint8)
    flipped = np.empty(r.shape[0], np.int64)
    for t in range(r.shape[0]):
        flipped[t] = _flip_into(r[t], h[t], out[t])
    return out, flipped


@nb.njit(cache=True, nogil=True)
def soft_batch(r, h):
    blocks, n = r.shape
    out = np.empty(r.shape, np.uint8)
    v = np.empty(n)
    for t in range(blocks):
        _index_into(_soft_index(r[t], h[t], v), n - 1, out[t])
    return out


@nb.njit(cache=True, nogil=True)
def count_errors(data, h, w, decoder):
    """Encode, modulate, decode one batch.

    Returns (data bit errors, all bit errors, block errors).
    """
    blocks, k = data.shape
    n = k + 1
    c = np.empty(n, np.uint8)
    r = np.empty(n)
    est = np.empty(n, np.uint8)
    v = np.empty(n)
    data_err = 0
    all_err = 0
    block_err = 0
    for t in range(blocks):
        odd = 0
        for i in range(k):
            c[i] = data[t, i]
            odd ^= c[i]
        c[k] = odd
        for i in range(n):
            x = 1.0 - 2.0 * c[i]
            r[i] = h[t, i] * x + w[t, i]
        if decoder == HARD:
            for i in range(n):
                est[i] = 1 if r[i] < 0.0 else 0
        elif decoder == FLIP:
            _flip_into(r, h[t], est)
        else:
            _index_into(_soft_index(r, h[t], v), k, est)
        wrong = 0
        for i in range(k):
            if est[i] != c[i]:
                wrong += 1
        data_err += wrong
        if est[k] != c[k]:
            wrong += 1
        all_err += wrong
        if wrong:
            block_err += 1
    return data_err, all_err, block_err
