"""Slow, definitional reference implementations used as test oracles.

Nothing here imports the routine it checks; each oracle is written from the
textbook definition with explicit loops or per-pixel gathers.
"""

import math
from collections import Counter
from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------- rounding


def round_away(v: float) -> int:
    """Nearest integer, ties away from zero, clipped to [0, 255]."""
    r = math.floor(abs(v) + 0.5)
    r = r if v >= 0 else -r
    return min(255, max(0, r))


# ---------------------------------------------------------------- borders


def reflect(i: int, n: int) -> int:
    """Reflect-101 by repeated folding (… 2 1 | 0 1 2 … n-1 | n-2 …)."""
    if n == 1:
        return 0
    while i < 0 or i >= n:
        if i < 0:
            i = -i
        if i >= n:
            i = 2 * (n - 1) - i
    return i


def reflect_map(n: int, pad: int) -> np.ndarray:
    return np.array([reflect(i, n) for i in range(-pad, n + pad)])


# ---------------------------------------------------------------- linear filters


def convolve(p: np.ndarray, k: np.ndarray) -> np.ndarray:
    """out[y, x] = sum_ij k[i, j] * p[y - (i - ry), x - (j - rx)] with reflect-101."""
    h, w = p.shape
    kh, kw = k.shape
    ry, rx = kh // 2, kw // 2
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            s = 0.0
            for i in range(kh):
                for j in range(kw):
                    s += k[i, j] * p[reflect(y - (i - ry), h), reflect(x - (j - rx), w)]
            out[y, x] = s
    return out


def _window(a: np.ndarray, y: int, x: int, r: int) -> np.ndarray:
    h, w = a.shape[:2]
    rows = [reflect(y + d, h) for d in range(-r, r + 1)]
    cols = [reflect(x + d, w) for d in range(-r, r + 1)]
    return a[np.ix_(rows, cols)]


def _per_pixel(samples: np.ndarray, fn) -> np.ndarray:
    h, w, c = samples.shape
    out = np.zeros((h, w, c), dtype=np.uint8)
    for ch in range(c):
        a = samples[:, :, ch].astype(np.float64)
        for y in range(h):
            for x in range(w):
                out[y, x, ch] = round_away(fn(a, y, x))
    return out


def mean_filter(samples: np.ndarray, k: int) -> np.ndarray:
    return _per_pixel(samples, lambda a, y, x: _window(a, y, x, k // 2).sum() / (k * k))


def gaussian_weights(k: int, sigma=None) -> np.ndarray:
    if sigma is None:
        sigma = 0.3 * ((k - 1) / 2 - 1) + 0.8
    r = k // 2
    g = np.array([math.exp(-(d * d) / (2 * sigma * sigma)) for d in range(-r, r + 1)])
    g2 = np.outer(g, g)
    return g2 / g2.sum()


def gaussian_filter(samples: np.ndarray, k: int, sigma=None) -> np.ndarray:
    wts = gaussian_weights(k, sigma)
    return _per_pixel(samples, lambda a, y, x: float((_window(a, y, x, k // 2) * wts).sum()))


def median_filter(samples: np.ndarray, k: int) -> np.ndarray:
    return _per_pixel(samples, lambda a, y, x: sorted(_window(a, y, x, k // 2).ravel())[k * k // 2])


def bilateral_filter(samples: np.ndarray, d: int, sigma_color: float, sigma_space: float) -> np.ndarray:
    h, w, c = samples.shape
    r = d // 2
    a = samples.astype(np.float64)
    out = np.zeros((h, w, c), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            num = np.zeros(c)
            den = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    q = a[reflect(y + dy, h), reflect(x + dx, w)]
                    dist = float(np.abs(q - a[y, x]).sum())
                    wt = math.exp(-(dy * dy + dx * dx) / (2 * sigma_space ** 2)) * math.exp(
                        -(dist * dist) / (2 * sigma_color ** 2))
                    num += wt * q
                    den += wt
            for ch in range(c):
                out[y, x, ch] = round_away(num[ch] / den)
    return out


def nlm_plane(plane: np.ndarray, strength: float, template: int, search: int) -> np.ndarray:
    """Float NLM: w(q) = exp(-max(mean patch sq diff, 0) / h^2), self-weight included."""
    h, w = plane.shape
    tr, sr = template // 2, search // 2
    pad = tr + sr
    ry, rx = reflect_map(h, pad), reflect_map(w, pad)
    p = plane.astype(np.float64)[np.ix_(ry, rx)]
    t = np.arange(-tr, tr + 1)
    s = np.arange(-sr, sr + 1)
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            yc, xc = y + pad, x + pad
            ref = p[yc + t[:, None], xc + t[None, :]]
            qy = yc + s[:, None, None, None] + t[None, None, :, None]
            qx = xc + s[None, :, None, None] + t[None, None, None, :]
            patches = p[qy, qx]
            dist = ((patches - ref) ** 2).mean(axis=(2, 3))
            wts = np.exp(-np.maximum(dist, 0.0) / (strength * strength))
            centers = p[yc + s[:, None], xc + s[None, :]]
            out[y, x] = (wts * centers).sum() / wts.sum()
    return out


# ---------------------------------------------------------------- color


def rgb_to_ycc(r, g, b):
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return y, cb, cr


def ycc_to_rgb(y, cb, cr):
    return (y + 1.402 * (cr - 128),
            y - 0.344136 * (cb - 128) - 0.714136 * (cr - 128),
            y + 1.772 * (cb - 128))


def nlm_color(samples: np.ndarray, h_luma: float, h_chroma: float, template: int, search: int) -> np.ndarray:
    a = samples.astype(np.float64)
    ycc = np.stack(rgb_to_ycc(a[..., 0], a[..., 1], a[..., 2]), axis=-1)
    ycc_q = np.vectorize(round_away)(ycc).astype(np.float64)
    filt = np.stack([nlm_plane(ycc_q[..., c], h_luma if c == 0 else h_chroma, template, search)
                     for c in range(3)], axis=-1)
    filt_q = np.vectorize(round_away)(filt).astype(np.float64)
    rgb = np.stack(ycc_to_rgb(filt_q[..., 0], filt_q[..., 1], filt_q[..., 2]), axis=-1)
    return np.vectorize(round_away)(rgb).astype(np.uint8)


# ---------------------------------------------------------------- metrics


def ssim_channel(x: np.ndarray, y: np.ndarray, win=7, L=255.0, k1=0.01, k2=0.03) -> float:
    c1, c2 = (k1 * L) ** 2, (k2 * L) ** 2
    h, w = x.shape
    scores = []
    for i in range(h - win + 1):
        for j in range(w - win + 1):
            a = x[i:i + win, j:j + win].astype(np.float64).ravel()
            b = y[i:i + win, j:j + win].astype(np.float64).ravel()
            ma, mb = a.mean(), b.mean()
            va, vb = a.var(ddof=1), b.var(ddof=1)
            cov = ((a - ma) * (b - mb)).sum() / (a.size - 1)
            scores.append(((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma ** 2 + mb ** 2 + c1) * (va + vb + c2)))
    return float(np.mean(scores))


def ssim(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean([ssim_channel(x[..., c], y[..., c]) for c in range(x.shape[2])]))


def nrmse(ref: np.ndarray, test: np.ndarray) -> float:
    r = ref.astype(np.float64)
    t = test.astype(np.float64)
    return math.sqrt(((r - t) ** 2).sum() / (r ** 2).sum())


def nmi(ref: np.ndarray, test: np.ndarray, bins=100) -> float:
    def b(v):
        return min(bins - 1, math.floor(Fraction(int(v) * bins, 255)))

    pairs = Counter((b(u), b(v)) for u, v in zip(ref.ravel(), test.ravel()))
    n = sum(pairs.values())
    ma, mb = Counter(), Counter()
    for (u, v), c in pairs.items():
        ma[u] += c
        mb[v] += c

    def ent(counter):
        return -sum(c / n * math.log(c / n) for c in counter.values())

    hj = ent(pairs)
    return 1.0 if hj == 0 else (ent(ma) + ent(mb)) / hj


# ---------------------------------------------------------------- equalization


def histogram_equalize(v: np.ndarray) -> np.ndarray:
    vals = v.ravel().tolist()
    n = len(vals)
    hist = [0] * 256
    for t in vals:
        hist[t] += 1
    cdf, run = [], 0
    for c in hist:
        run += c
        cdf.append(run)
    lo = min(vals)
    cmin = cdf[lo]
    if cmin == n:
        return v.copy()
    lut = [round_away((cdf[i] - cmin) / (n - cmin) * 255) for i in range(256)]
    return np.array([lut[t] for t in vals], dtype=np.uint8).reshape(v.shape)


def _equalize_hist(hist):
    n = sum(hist)
    cdf, run = [], 0
    for c in hist:
        run += c
        cdf.append(run)
    first = next(i for i, c in enumerate(hist) if c > 0)
    cmin = cdf[first]
    if cmin == n:
        return list(range(256))
    return [round_away((cdf[i] - cmin) / (n - cmin) * 255) for i in range(256)]


def clahe_gray(v: np.ndarray, clip: float, gx: int, gy: int) -> np.ndarray:
    """Step-by-step CLAHE on a 2-D uint8 array."""
    h, w = v.shape
    ph = h if h % gy == 0 else h + gy - h % gy
    pw = w if w % gx == 0 else w + gx - w % gx
    padded = [[int(v[reflect(y, h), reflect(x, w)]) for x in range(pw)] for y in range(ph)]
    th, tw = ph // gy, pw // gx
    limit = max(1, math.floor(clip * th * tw / 256 + 0.5))
    luts = {}
    for ty in range(gy):
        for tx in range(gx):
            hist = [0] * 256
            for y in range(ty * th, (ty + 1) * th):
                for x in range(tx * tw, (tx + 1) * tw):
                    hist[padded[y][x]] += 1
            excess = 0
            for i in range(256):
                if hist[i] > limit:
                    excess += hist[i] - limit
                    hist[i] = limit
            for i in range(256):
                hist[i] += excess // 256
            for i in range(excess % 256):
                hist[i] += 1
            luts[ty, tx] = _equalize_hist(hist)
    out = np.zeros((h, w), dtype=np.uint8)
    for y in range(h):
        fy = (y + 0.5) / th - 0.5
        ty0 = math.floor(fy)
        ay = fy - ty0
        ty0c, ty1c = min(max(ty0, 0), gy - 1), min(max(ty0 + 1, 0), gy - 1)
        for x in range(w):
            fx = (x + 0.5) / tw - 0.5
            tx0 = math.floor(fx)
            ax = fx - tx0
            tx0c, tx1c = min(max(tx0, 0), gx - 1), min(max(tx0 + 1, 0), gx - 1)
            val = int(v[y, x])
            top = (1 - ax) * luts[ty0c, tx0c][val] + ax * luts[ty0c, tx1c][val]
            bot = (1 - ax) * luts[ty1c, tx0c][val] + ax * luts[ty1c, tx1c][val]
            out[y, x] = round_away((1 - ay) * top + ay * bot)
    return out


# ---------------------------------------------------------------- generators


def splitmix64_seq(seed: int, n: int):
    out = []
    x = seed & MASK64
    for _ in range(n):
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def xoshiro256pp(state, n: int):
    s = list(state)
    out = []
    for _ in range(n):
        out.append((_rotl((s[0] + s[3]) & MASK64, 23) + s[0]) & MASK64)
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
    return out, s
