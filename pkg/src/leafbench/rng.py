"""Portable seeded random streams.

Every noise realization comes from a xoshiro256++ generator whose state is
filled by SplitMix64.  The algorithms are fixed here (rather than delegated
to numpy's bit generators) so a given ``(seed, image_index)`` reproduces the
same noise on any platform.
"""

from __future__ import annotations

import numba
import numpy as np

MASK64 = (1 << 64) - 1

# xoshiro256 jump polynomial: advances the state by 2**128 draws.
_JUMP = (0x180EC6D33CFD0ABA, 0xD5A61266F0C9392C, 0xA9582618E03FC9AA, 0x39ABDC4529B1661C)


def splitmix64(state: int):
    """One SplitMix64 step; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


@numba.njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@numba.njit(cache=True, nogil=True)
def _fill(s, out):
    s0, s1, s2, s3 = s[0], s[1], s[2], s[3]
    for i in range(out.shape[0]):
        out[i] = _rotl(s0 + s3, 23) + s0
        t = s1 << np.uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
    s[0], s[1], s[2], s[3] = s0, s1, s2, s3


def _step_py(s):
    """Pure-Python xoshiro256++ state transition (used by ``jump``)."""
    s0, s1, s2, s3 = s
    t = (s1 << 17) & MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
    return [s0, s1, s2, s3]


class Stream:
    """A xoshiro256++ generator with uniform and Gaussian helpers."""

    def __init__(self, state):
        state = [int(v) & MASK64 for v in state]
        if len(state) != 4 or not any(state):
            raise ValueError("xoshiro256++ needs four words, not all zero")
        self._s = np.array(state, dtype=np.uint64)

    @property
    def state(self):
        return tuple(int(v) for v in self._s)

    def copy(self) -> "Stream":
        return Stream(self.state)

    def next_u64(self, n: int) -> np.ndarray:
        out = np.empty(int(n), dtype=np.uint64)
        _fill(self._s, out)
        return out

    def random(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1) from the top 53 bits of each draw."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float, n: int) -> np.ndarray:
        return lo + (hi - lo) * self.random(n)

    def normal(self, n: int) -> np.ndarray:
        """Standard normal variates by Box-Muller; both outputs of a pair are used."""
        n = int(n)
        m = (n + 1) // 2
        u = self.random(2 * m)
        u1 = u[0::2]
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log1p(-u1))
        theta = 2.0 * np.pi * u2
        z = np.empty(2 * m)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n]

    def jump(self) -> "Stream":
        """Advance by 2**128 draws in place; returns self."""
        s = [int(v) for v in self._s]
        acc = [0, 0, 0, 0]
        for word in _JUMP:
            for b in range(64):
                if (word >> b) & 1:
                    acc = [a ^ v for a, v in zip(acc, s)]
                s = _step_py(s)
        self._s[:] = np.array(acc, dtype=np.uint64)
        return self

    def substream(self, k: int) -> "Stream":
        """A copy jumped ``k`` times: non-overlapping with the parent for any k >= 1."""
        sub = self.copy()
        for _ in range(k):
            sub.jump()
        return sub


def derive_stream(seed: int, image_index: int) -> Stream:
    """Per-image stream: SplitMix64(seed XOR image_index) seeds xoshiro256++."""
    state = (int(seed) ^ int(image_index)) & MASK64
    words = []
    for _ in range(4):
        state, z = splitmix64(state)
        words.append(z)
    return Stream(words)
