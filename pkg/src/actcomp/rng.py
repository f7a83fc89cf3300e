"""Counter-based SplitMix64 streams.

Every draw is ``mix(seed_stream + GAMMA * (i + 1))`` where ``mix`` is the
SplitMix64 finalizer (xor-shift / multiply rounds). Because the i-th value only
depends on ``(stream seed, i)`` the generator vectorizes in numpy and child
streams can be split off without touching the parent. The bit sequence is
fixed by the algorithm, so fixtures reproduce across platforms and languages.
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_M53 = 1.0 / (1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output function applied elementwise to a uint64 array."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


class SplitMix64:
    """A seekable stream of 64-bit words.

    >>> a = SplitMix64(42)
    >>> int(a.uint64(1)[0]) == int(SplitMix64(42).uint64(1)[0])
    True
    """

    def __init__(self, seed: int):
        self.seed = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
        self.counter = 0

    def split(self, stream_id: int) -> "SplitMix64":
        """Child stream whose seed is a mixed function of (seed, stream_id)."""
        key = np.uint64((int(stream_id) * 0xD1B54A32D192ED03) & 0xFFFFFFFFFFFFFFFF)
        child_seed = mix64(np.array([self.seed ^ key], dtype=np.uint64))[0]
        return SplitMix64(int(child_seed))

    def uint64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return mix64(self.seed + GAMMA * idx)

    def uniform(self, n: int) -> np.ndarray:
        """Doubles in [0, 1) from the top 53 bits."""
        return (self.uint64(n) >> _S11).astype(np.float64) * _TWO_M53

    def integers(self, high: int, n: int) -> np.ndarray:
        """Integers in [0, high) by scaling a uniform (bias < 2^-50 for small high)."""
        return np.floor(self.uniform(n) * high).astype(np.int64)

    def normal(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller; consumes 2 words per value."""
        u1 = 1.0 - self.uniform(n)  # (0, 1]
        u2 = self.uniform(n)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def exponential(self, rate: float, n: int) -> np.ndarray:
        return -np.log1p(-self.uniform(n)) / rate
