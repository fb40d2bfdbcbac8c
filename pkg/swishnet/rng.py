"""Documented pseudo-random streams.

Seeds are expanded with splitmix64 into the 256-bit state of xoshiro256**.
That stream drives every permutation (batch order) directly, so shuffles are
reproducible in any language. Bulk draws (weight init, synthetic images,
benchmark inputs) come from a numpy ``Generator`` whose PCG64 seed is taken
from the same xoshiro stream.
"""
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for sub-stream ``index`` (matrix rows, bulk draws)."""
    _, mixed = splitmix64((seed & MASK64) ^ ((index * GOLDEN_GAMMA) & MASK64))
    return mixed


class Xoshiro256StarStar:
    def __init__(self, seed: int):
        self.seed = seed & MASK64
        sm = self.seed
        state = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            state.append(out)
        self._s = state

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError(f"randbelow bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of range(n), walking i from n-1 down to 1."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        return np.asarray(order, dtype=np.int64)

    def numpy_generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.next_u64()))


def numpy_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Bulk-draw generator for ``seed``; distinct ``stream`` values give independent draws."""
    return Xoshiro256StarStar(derive_seed(seed, stream)).numpy_generator()
