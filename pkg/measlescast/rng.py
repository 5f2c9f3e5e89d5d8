"""Seedable random numbers that are reproducible everywhere.

The generator is fully specified (see ``docs/random.rst``) so that a
simulation can be replayed bit for bit from its seed in any language:

* the 64-bit seed is expanded with one **splitmix64** step into the state,
* the state advances with **xorshift64*** (shifts 12, 25, 27, multiplier
  ``0x2545F4914F6CDD1D``),
* uniforms take the top 53 bits of the output, shifted by half a unit so they
  lie strictly inside ``(0, 1)``,
* normals use the basic **Box-Muller** transform; the sine branch is kept as a
  spare and returned by the next call.
"""
from __future__ import annotations

__all__ = ["Rng"]
import math
from typing import TYPE_CHECKING
import numpy as np

if TYPE_CHECKING:
    from typing import Optional

_MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Rng:
    r"""Deterministic xorshift64* generator with Box-Muller normals.

    .. code-block:: python

        >>> from measlescast.rng import Rng
        >>>
        >>> Rng(42).normals(3).tolist() == Rng(42).normals(3).tolist()
        True
        >>>

    :param seed: any integer, reduced modulo 2**64
    """

    __slots__ = ("_state", "_spare")

    def __init__(self, seed: int, /) -> None:
        state = _splitmix64(int(seed) & _MASK64)
        # xorshift never leaves the all-zero state
        self._state: int = state if state else 0x9E3779B97F4A7C15
        self._spare: Optional[float] = None

    def next_u64(self) -> int:
        """Next raw 64-bit output."""
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self) -> float:
        """Uniform float in the open interval ``(0, 1)``."""
        return ((self.next_u64() >> 11) + 0.5) / 9007199254740992.0

    def normal(self) -> float:
        """Standard normal variate."""
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z

        u1 = self.uniform()
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)

    def normals(self, n: int, /, sigma: float = 1.0) -> np.ndarray:
        """Array of **n** normal variates with standard deviation **sigma**."""
        return np.array([self.normal() for _ in range(n)], dtype=np.float64) * sigma
