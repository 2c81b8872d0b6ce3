"""Deterministic 64-bit RNG streams.

Reproducibility across serial and parallel execution is achieved by giving
every independent unit of work (a walk, a sentence) its own stream, derived
from the root seed and the unit's position. Streams are built on the
splitmix64 finalizer with its published constants:

    increment  0x9E3779B97F4A7C15
    mix step 1 0xBF58476D1CE4E5B9
    mix step 2 0x94D049BB133111EB

``derive(root, *indices)`` folds each index into the state with one
splitmix64 round, so ``derive(seed, k, s)`` is a pure function of its
arguments and collision-resistant for practical workloads.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_INCREMENT = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit value."""
    x = (x + _INCREMENT) & _MASK
    x ^= x >> 30
    x = (x * _MIX1) & _MASK
    x ^= x >> 27
    x = (x * _MIX2) & _MASK
    x ^= x >> 31
    return x


def derive(root: int, *indices: int) -> int:
    """Derive a stream seed from a root seed and a path of indices."""
    state = mix64(root & _MASK)
    for index in indices:
        state = mix64(state ^ ((index + 1) * _INCREMENT & _MASK))
    return state


class SplitMix64:
    """Tiny sequential generator over the splitmix64 output function."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _INCREMENT) & _MASK
        x = self._state
        x ^= x >> 30
        x = (x * _MIX1) & _MASK
        x ^= x >> 27
        x = (x * _MIX2) & _MASK
        x ^= x >> 31
        return x

    def uniform(self) -> float:
        """One draw in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0**-53)
