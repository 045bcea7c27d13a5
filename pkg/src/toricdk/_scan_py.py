"""Pure numpy implementation of the half-space mask scan.

Same contract as the compiled ``_scan`` extension; see ``kernels.py``.
"""

import numpy as np

CHUNK = 1 << 16


def _prefix_block(lo, hi, start, stop):
    shape = tuple(int(b - a + 1) for a, b in zip(lo, hi))
    idx = np.arange(start, stop, dtype=np.int64)
    coords = np.stack(np.unravel_index(idx, shape), axis=1).astype(np.int64)
    return coords + np.asarray(lo, dtype=np.int64)


def mask_scan(G, h, lo, hi):
    G = np.ascontiguousarray(G, dtype=np.int64)
    h = np.ascontiguousarray(h, dtype=np.int64)
    lo = np.ascontiguousarray(lo, dtype=np.int64)
    hi = np.ascontiguousarray(hi, dtype=np.int64)
    k, n = G.shape
    size = 1 << k
    counts = np.zeros(size, dtype=np.int64)
    first = np.zeros((size, n), dtype=np.int64)
    seen = np.zeros(size, dtype=np.uint8)
    if np.any(hi < lo):
        return counts, first, seen

    lo_n, hi_n = int(lo[-1]), int(hi[-1])
    span = hi_n - lo_n + 1
    g = G[:, -1]
    pre_lo, pre_hi = lo[:-1], hi[:-1]
    n_prefix = int(np.prod(pre_hi - pre_lo + 1)) if n > 1 else 1
    best = np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
    bits = (np.int64(1) << np.arange(k, dtype=np.int64))

    for start in range(0, n_prefix, CHUNK):
        stop = min(start + CHUNK, n_prefix)
        if n > 1:
            P = _prefix_block(pre_lo, pre_hi, start, stop)
            partial = P @ G[:, :-1].T
        else:
            P = np.zeros((1, 0), dtype=np.int64)
            partial = np.zeros((1, k), dtype=np.int64)
        rows = partial.shape[0]
        rhs = h[None, :] - partial
        pos = np.full((rows, k), hi_n + 1, dtype=np.int64)
        with np.errstate(divide="ignore"):
            gpos = g > 0
            gneg = g < 0
            safe = np.where(g == 0, 1, g)
            up = -((-rhs) // safe)
            down = rhs // safe + 1
        pos = np.where(gpos[None, :], up, pos)
        pos = np.where(gneg[None, :], down, pos)
        pos = np.where((pos <= lo_n) | (pos > hi_n), hi_n + 1, pos)

        init = ((partial + g[None, :] * lo_n) >= h[None, :]).astype(np.int64) @ bits
        order = np.argsort(pos, axis=1, kind="stable")
        spos = np.take_along_axis(pos, order, axis=1)
        toggles = bits[order]
        toggles = np.where(spos > hi_n, 0, toggles)
        masks = np.concatenate([init[:, None], toggles], axis=1)
        masks = np.bitwise_xor.accumulate(masks, axis=1)
        bounds = np.concatenate(
            [np.full((rows, 1), lo_n, dtype=np.int64), spos], axis=1
        )
        ends = np.concatenate(
            [spos, np.full((rows, 1), hi_n + 1, dtype=np.int64)], axis=1
        )
        lengths = ends - bounds
        keep = lengths > 0
        flat_masks = masks[keep]
        np.add.at(counts, flat_masks, lengths[keep])
        prefix_id = np.broadcast_to(
            np.arange(start, stop, dtype=np.int64)[:, None], masks.shape
        )[keep]
        key = prefix_id * span + (bounds[keep] - lo_n)
        np.minimum.at(best, flat_masks, key)

    hit = best != np.iinfo(np.int64).max
    seen[hit] = 1
    for m in np.nonzero(hit)[0]:
        pid, off = divmod(int(best[m]), span)
        if n > 1:
            first[m, :-1] = _prefix_block(pre_lo, pre_hi, pid, pid + 1)[0]
        first[m, -1] = lo_n + off
    return counts, first, seen
