"""Fixed 64-bit linear congruential generator.

The constants are part of the wire contract: any reimplementation that
seeds the same state replays the same games, byte for byte. No host
library randomness is involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Rng:
    state: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "state", self.state & _MASK)

    def step(self) -> "Rng":
        return Rng((self.state * MULTIPLIER + INCREMENT) & _MASK)

    def next_int(self, n: int) -> tuple["Rng", int]:
        """Advance one step and produce an integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        nxt = self.step()
        return nxt, ((nxt.state >> 32) * n) >> 32
