"""Deterministic seed derivation.

Every stochastic component in this package draws from a ``random.Random``
whose seed is derived here. Derivation is a chain of splitmix64 finalizer
steps over the inputs, so seeds are bit-exact across platforms and Python
versions (no hash(), no float math). Nearby inputs (consecutive agent ids,
consecutive time steps) land on unrelated 64-bit outputs.
"""
from __future__ import annotations

_MASK = (1 << 64) - 1


def mix64(x: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit value."""
    x &= _MASK
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix_chain(*values: int) -> int:
    """Fold values into one 64-bit seed.

    Each value is XORed in and re-avalanched, so the result depends on
    position as well as content: mix_chain(a, b) != mix_chain(b, a) in
    general. Negative inputs are masked to 64 bits first.
    """
    if not values:
        raise ValueError("mix_chain needs at least one value")
    acc = mix64(values[0])
    for v in values[1:]:
        acc = mix64(acc ^ (v & _MASK))
    return acc
