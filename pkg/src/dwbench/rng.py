"""Seeded randomness: named sub-streams, Gaussian parameter draws, skewed picks.

Every stream is a PCG64 generator (period 2**128) seeded from a hash of
``(master seed, stream name)``, so a table's content depends only on the
master seed and the table name, never on generation order.

Gaussian variates are built from uniforms with Box-Muller (two uniforms per
normal), so the whole pipeline only relies on the PCG64 double stream.
"""

from __future__ import annotations

import hashlib
import math
import string

import numpy as np

DEFAULT_SPREAD_RATIO = 0.2
REFERENTIAL_SIZE = 1000
REFERENTIAL_WIDTH = 20
REFERENTIAL_ALPHABET = string.ascii_uppercase + string.digits


def _stream_entropy(seed: int, stream: str) -> int:
    digest = hashlib.sha256(f"{int(seed)}\x00{stream}".encode()).digest()
    return int.from_bytes(digest[:16], "little")


class RandomSource:
    """A single-owner deterministic stream. Do not share across threads."""

    def __init__(self, seed: int, stream: str = ""):
        self.seed = int(seed)
        self.stream = stream
        self._gen = np.random.Generator(np.random.PCG64(_stream_entropy(self.seed, stream)))

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream!r})"

    def substream(self, name: str) -> "RandomSource":
        return RandomSource(self.seed, f"{self.stream}/{name}" if self.stream else name)

    # uniform draws

    def random(self, size=None):
        """Uniform on [0, 1)."""
        return self._gen.random(size)

    def uniform_float(self, lo: float, hi: float) -> float:
        if not lo < hi:
            raise ValueError(f"invalid range [{lo}, {hi})")
        x = lo + (hi - lo) * float(self._gen.random())
        # lo + (hi - lo) * u can round up to hi
        return x if x < hi else math.nextafter(hi, lo)

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], inclusive."""
        if hi < lo:
            raise ValueError(f"invalid range [{lo}, {hi}]")
        return lo + min(int(self._gen.random() * (hi - lo + 1)), hi - lo)

    # gaussian draws

    def normal(self, size=None):
        """Standard normal variates (Box-Muller, cosine branch)."""
        n = 1 if size is None else int(np.prod(size))
        u = self._gen.random(2 * n)
        z = np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2.0 * np.pi * u[1::2])
        if size is None:
            return float(z[0])
        return z.reshape(size)

    def gaussian(self, mean: float, sd: float) -> float:
        return mean + sd * self.normal()

    def gaussian_int(self, mean: float, spread_ratio: float = DEFAULT_SPREAD_RATIO) -> int:
        """Round a draw from N(mean, (spread_ratio * mean)**2), floored at 1."""
        x = self.gaussian(mean, spread_ratio * mean)
        return max(1, math.floor(x + 0.5))

    def skewed_index(self, n: int) -> int:
        """Index in [1, n] from a normal centred on (n + 1) / 2 with sd n / 6.

        Out-of-range draws are redrawn (truncated normal).
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1:
            return 1
        mu, sd = (n + 1) / 2, n / 6
        while True:
            k = math.floor(mu + sd * self.normal() + 0.5)
            if 1 <= k <= n:
                return k

    def skewed_indices(self, n: int, size: int) -> np.ndarray:
        """Vectorised :meth:`skewed_index`; returns an int64 array."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1 or size == 0:
            return np.ones(size, dtype=np.int64)
        mu, sd = (n + 1) / 2, n / 6
        out = np.floor(mu + sd * self.normal(size) + 0.5).astype(np.int64)
        bad = np.flatnonzero((out < 1) | (out > n))
        while bad.size:
            out[bad] = np.floor(mu + sd * self.normal(bad.size) + 0.5).astype(np.int64)
            bad = bad[(out[bad] < 1) | (out[bad] > n)]
        return out

    def skewed_choice(self, items):
        return items[self.skewed_index(len(items)) - 1]


def skewed_index_pmf(n: int) -> np.ndarray:
    """Exact probabilities of :meth:`RandomSource.skewed_index` for 1..n."""
    if n == 1:
        return np.ones(1)
    mu, sd = (n + 1) / 2, n / 6
    edges = (np.arange(n + 1) + 0.5 - mu) / (sd * math.sqrt(2))
    cdf = 0.5 * (1 + np.array([math.erf(e) for e in edges]))
    p = np.diff(cdf)
    return p / p.sum()


class StringReferential:
    """Fixed pool of distinct 20-character strings derived from a seed."""

    def __init__(self, pool):
        pool = tuple(pool)
        if not pool:
            raise ValueError("empty referential")
        self.pool = pool
        self._array = np.array(pool, dtype=object)

    @classmethod
    def from_seed(cls, seed: int, size: int = REFERENTIAL_SIZE, width: int = REFERENTIAL_WIDTH):
        src = RandomSource(seed, "referential")
        alphabet = np.array(list(REFERENTIAL_ALPHABET))
        seen: dict[str, None] = {}
        while len(seen) < size:
            idx = np.floor(src.random(width) * len(alphabet)).astype(np.int64)
            seen.setdefault("".join(alphabet[idx]), None)
        return cls(seen)

    def __len__(self):
        return len(self.pool)

    def pick(self, src: RandomSource, prefix: str) -> str:
        """``prefix`` + "_" + a skew-chosen pool entry."""
        return f"{prefix}_{self.pool[src.skewed_index(len(self.pool)) - 1]}"

    def picks(self, src: RandomSource, prefix: str, size: int) -> np.ndarray:
        idx = src.skewed_indices(len(self.pool), size) - 1
        return np.array([f"{prefix}_{s}" for s in self._array[idx]], dtype=object)


class KeySequence:
    """Sequential integer keys 1, 2, 3, ... for one table."""

    def __init__(self):
        self.last = 0

    def next(self) -> int:
        self.last += 1
        return self.last

    def take(self, n: int) -> np.ndarray:
        keys = np.arange(self.last + 1, self.last + n + 1, dtype=np.int64)
        self.last += n
        return keys
