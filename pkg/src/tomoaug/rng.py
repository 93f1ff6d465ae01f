"""Deterministic, index-addressable random streams.

Batch augmentation derives one stream per item from (master_seed,
item_index), so results never depend on worker count or completion order.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1


class RngStream:
    """Random stream keyed by (master_seed, item_index).

    Backed by the Philox4x64 counter-based generator with the pair as its
    128-bit key, so the draw sequence for a given pair is identical across
    runs, platforms and thread schedules.

    Every draw is defined in terms of raw 64-bit words from the generator:

    * ``random``  -- u = ((word >> 11) + 0.5) * 2**-53, uniform on (0, 1)
    * ``uniform`` -- low + (high - low) * u
    * ``normal``  -- mean + sigma * ndtri(u)  (inverse normal CDF, AS 241)
    * ``randint`` -- floor(u * n)

    Keeping the mapping this explicit makes the streams reproducible by any
    Philox implementation, not just numpy's.
    """

    algorithm = "philox4x64(key=[master_seed, item_index]) + inverse-CDF gaussian"

    def __init__(self, master_seed: int, item_index: int = 0):
        key = np.array([master_seed & _MASK64, item_index & _MASK64], dtype=np.uint64)
        self._bits = np.random.Philox(key=key)
        self.master_seed = master_seed
        self.item_index = item_index

    def words(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words."""
        return np.atleast_1d(self._bits.random_raw(n))

    def random(self, size=None):
        """Uniform floats on the open interval (0, 1)."""
        n = 1 if size is None else int(np.prod(size))
        u = ((self.words(n) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        if size is None:
            return float(u[0])
        return u.reshape(size)

    def uniform(self, low: float, high: float, size=None):
        return low + (high - low) * self.random(size)

    def normal(self, mean: float = 0.0, sigma: float = 1.0, size=None):
        return mean + sigma * ndtri(self.random(size))

    def randint(self, n: int) -> int:
        """Integer drawn uniformly from 0..n-1."""
        return min(int(self.random() * n), n - 1)
