"""Compiled inner loops for the bilateral and non-local-means filters.

Inputs arrive already padded (reflect-101) so the loops never branch on
borders.  All functions release the GIL.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def bilateral(padded, h, w, r, spatial, color_lut, out):
    """Weighted average over a (2r+1)^2 window.

    ``spatial[dy + r, dx + r]`` is the distance weight and ``color_lut[d]`` the
    range weight for an L1 color difference ``d`` summed over channels.
    """
    nc = padded.shape[2]
    acc = np.zeros(nc)
    for y in range(h):
        for x in range(w):
            for c in range(nc):
                acc[c] = 0.0
            wsum = 0.0
            for dy in range(2 * r + 1):
                for dx in range(2 * r + 1):
                    d = 0
                    for c in range(nc):
                        d += abs(np.int32(padded[y + r, x + r, c]) - np.int32(padded[y + dy, x + dx, c]))
                    wt = spatial[dy, dx] * color_lut[d]
                    wsum += wt
                    for c in range(nc):
                        acc[c] += wt * padded[y + dy, x + dx, c]
            for c in range(nc):
                out[y, x, c] = acc[c] / wsum


@numba.njit(cache=True, nogil=True)
def bilateral3(padded, h, w, r, spatial, color_lut, out):
    """Three-channel ``bilateral`` with scalar accumulators (same arithmetic order)."""
    k = 2 * r + 1
    for y in range(h):
        for x in range(w):
            c0 = np.int32(padded[y + r, x + r, 0])
            c1 = np.int32(padded[y + r, x + r, 1])
            c2 = np.int32(padded[y + r, x + r, 2])
            a0 = 0.0
            a1 = 0.0
            a2 = 0.0
            wsum = 0.0
            for dy in range(k):
                row = padded[y + dy]
                srow = spatial[dy]
                for dx in range(k):
                    p0 = np.int32(row[x + dx, 0])
                    p1 = np.int32(row[x + dx, 1])
                    p2 = np.int32(row[x + dx, 2])
                    wt = srow[dx] * color_lut[abs(c0 - p0) + abs(c1 - p1) + abs(c2 - p2)]
                    wsum += wt
                    a0 += wt * p0
                    a1 += wt * p1
                    a2 += wt * p2
            out[y, x, 0] = a0 / wsum
            out[y, x, 1] = a1 / wsum
            out[y, x, 2] = a2 / wsum


@numba.njit(cache=True, nogil=True)
def nlm_plane(padded, h, w, tr, sr, lut, out):
    """Non-local means on one plane.

    ``padded`` is the plane extended by ``sr + tr`` on every side.  For each
    search offset the squared-difference image is box-summed over the
    template (running column sums, then a row prefix sum) and ``lut[ssd]``
    maps the integer patch SSD straight to a weight.
    """
    k = 2 * tr + 1
    eh = h + 2 * tr
    ew = w + 2 * tr
    acc = np.zeros((h, w))
    wsum = np.zeros((h, w))
    d2 = np.empty((eh, ew), np.int64)
    colsum = np.empty(ew, np.int64)
    prefix = np.empty(ew + 1, np.int64)
    # offsets are kept non-negative (oy = dy + sr) so the row loops vectorize
    for oy in range(2 * sr + 1):
        for ox in range(2 * sr + 1):
            for y in range(eh):
                ra = padded[y + sr, sr:]
                rb = padded[y + oy, ox:]
                dr = d2[y]
                for x in range(ew):
                    a = np.int64(ra[x]) - np.int64(rb[x])
                    dr[x] = a * a
            for x in range(ew):
                colsum[x] = 0
            for y in range(k):
                dr = d2[y]
                for x in range(ew):
                    colsum[x] += dr[x]
            for y in range(h):
                prefix[0] = 0
                s = 0
                for x in range(ew):
                    s += colsum[x]
                    prefix[x + 1] = s
                src = padded[y + tr + oy, tr + ox:]
                ar = acc[y]
                wr = wsum[y]
                hi = prefix[k:]
                for x in range(w):
                    wt = lut[hi[x] - prefix[x]]
                    ar[x] += wt * src[x]
                    wr[x] += wt
                if y + 1 < h:
                    add = d2[y + k]
                    sub = d2[y]
                    for x in range(ew):
                        colsum[x] += add[x] - sub[x]
    for y in range(h):
        for x in range(w):
            out[y, x] = acc[y, x] / wsum[y, x]


@numba.njit(cache=True, nogil=True)
def _exchange(buf, pairs, n):
    for p in range(pairs.shape[0]):
        lo = buf[pairs[p, 0]]
        hi = buf[pairs[p, 1]]
        for t in range(n):
            a = lo[t]
            b = hi[t]
            lo[t] = min(a, b)
            hi[t] = max(a, b)


@numba.njit(cache=True, nogil=True)
def _copy(dst, src, n):
    # plain loop over views: vectorizes, unlike sliced assignment
    for t in range(n):
        dst[t] = src[t]


@numba.njit(cache=True, nogil=True)
def median_rows(padded, k, column_net, window_net, out):
    """Exact k x k median, one output row at a time.

    Per row the ``k`` vertical neighbours of every padded column are sorted
    with ``column_net``; window column ``c`` then reads the sorted columns
    shifted by ``c`` and ``window_net`` selects the middle wire.  Rows are
    flattened over (x, channel) so comparator loops run over contiguous bytes.
    """
    h, w, nc = out.shape
    pw = padded.shape[1] * nc
    n = w * nc
    cols = np.empty((k, pw), np.uint8)
    wires = np.empty((k * k, n), np.uint8)
    flat = padded.reshape(padded.shape[0], pw)
    flat_out = out.reshape(h, n)
    mid = (k * k) // 2
    for y in range(h):
        for a in range(k):
            _copy(cols[a], flat[y + a], pw)
        _exchange(cols, column_net, pw)
        for c in range(k):
            for a in range(k):
                _copy(wires[c * k + a], cols[a, c * nc:], n)
        _exchange(wires, window_net, n)
        _copy(flat_out[y], wires[mid], n)
