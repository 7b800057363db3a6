"""Deterministic derivation of child seeds from a master seed.

Every stochastic stage of an experiment (bootstrap draws, per-iteration
model initialization, shuffling, dropout) gets its own child seed derived
from the run's master seed and an index path. Derivation is a splitmix64
chain, so streams for different paths are independent and appending new
indices (more iterations, more models) never perturbs seeds already
handed out for earlier paths.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One splitmix64 mixing step: 64-bit state -> well-mixed 64-bit value."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, *indices: int) -> int:
    """Derive the child seed for an index path under a master seed.

    derive_seed(s)          -> stream for the run itself
    derive_seed(s, k)       -> stream for stage k
    derive_seed(s, k, i)    -> stream for model i inside stage k
    """
    state = splitmix64(master & _MASK64)
    for idx in indices:
        state = splitmix64(state ^ splitmix64(idx & _MASK64))
    return state
