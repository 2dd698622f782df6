"""Counter-based 64-bit random streams.

Every draw is ``mix64(key + (counter + 1) * GOLDEN)``, i.e. SplitMix64 evaluated
at an explicit counter. A stream is fully described by ``(key, counter)``, so it
can be checkpointed as two integers and reproduced on any platform. Keys are
derived by hashing a tuple of integers (master seed, realization, purpose, ...),
which gives independent streams without any shared state.

The compiled kernels implement the same arithmetic; both backends consume
identical draws.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / 9007199254740992.0

# stream purposes
DISORDER = 1
REPLICA = 2
SWAP = 3
PILOT = 4
INIT = 5


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_key(*parts: int) -> int:
    """Hash a tuple of non-negative integers into a 64-bit stream key."""
    h = mix64(0x6A09E667F3BCC909)
    for part in parts:
        part = int(part)
        if part < 0:
            raise ValueError("key parts must be non-negative")
        while True:
            h = mix64(h ^ mix64((part & MASK64) + GOLDEN))
            part >>= 64
            if not part:
                break
    return h


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class Stream:
    """A (key, counter) random stream. Mutable; copy before sharing."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int, counter: int = 0):
        self.key = int(key) & MASK64
        self.counter = int(counter)

    @classmethod
    def from_parts(cls, *parts: int) -> "Stream":
        return cls(derive_key(*parts))

    def copy(self) -> "Stream":
        return Stream(self.key, self.counter)

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * GOLDEN)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * INV_2_53

    def below(self, n: int) -> int:
        """Integer in [0, n) by 32-bit multiply-shift; n must be < 2**32."""
        return ((self.next_u64() >> 32) * n) >> 32

    def u64_array(self, size: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + 1 + size, dtype=np.uint64)
        self.counter += size
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + idx * np.uint64(GOLDEN)
            return _mix64_array(z)

    def uniforms(self, size: int) -> np.ndarray:
        return (self.u64_array(size) >> np.uint64(11)).astype(np.float64) * INV_2_53

    def state(self) -> tuple[int, int]:
        return self.key, self.counter

    def __repr__(self) -> str:
        return f"Stream(key={self.key:#018x}, counter={self.counter})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Stream) and self.state() == other.state()
