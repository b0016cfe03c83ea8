"""Counter-based random streams for replayable, order-insensitive experiments."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    """splitmix64 finalizer; bijective on 64-bit ints."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class RngStream:
    """A (seed, stream) pair keying an independent Philox generator.

    The same (seed, stream) always produces the same byte sequence, no matter
    how many other streams run concurrently, so per-trial streams can be
    handed out by index and the whole campaign replays bit-for-bit.
    """

    __slots__ = ("seed", "stream", "_gen")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        self._gen = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.seed, self.stream], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, j: int) -> "RngStream":
        """Derive a child stream; distinct (stream, j) give distinct children."""
        return RngStream(self.seed, _mix64(self.stream ^ _mix64(j)))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream})"
