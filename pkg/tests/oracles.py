"""Independent reference implementations used to compute expected values.

These deliberately do not import the production code paths they check:
the hash walk and the PRNG below are written from the published algorithm
definitions, not from slowspace's implementations.
"""

from __future__ import annotations

from functools import reduce

M64 = (1 << 64) - 1


def fnv1a64_reference(data: bytes) -> int:
    """FNV-1a 64-bit, folded byte by byte per the published definition."""
    return reduce(
        lambda h, byte: ((h ^ byte) * 0x100000001B3) & M64,
        data,
        0xCBF29CE484222325,
    )


def splitmix64_reference(seed: int):
    """Generator yielding the published splitmix64 sequence from `seed`."""
    state = seed & M64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & M64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        yield (z ^ (z >> 31)) & M64


def splitmix64_first(seed: int) -> int:
    return next(splitmix64_reference(seed))


def rotl64(x: int, r: int) -> int:
    return ((x << r) & M64) | ((x & M64) >> (64 - r))


def mix_reference(a: int, b: int, c: int) -> int:
    """The stream-seed mix: two chained splitmix64 outputs over rotated keys."""
    t = splitmix64_first((a ^ rotl64(b, 17)) & M64)
    return splitmix64_first((t ^ rotl64(c, 31)) & M64)
