"""Deterministic seed derivation shared by solvers and the experiment runner.

Replicate seeds are derived, never drawn sequentially, so runs are bit-stable
under any parallel schedule.
"""

from __future__ import annotations

import struct

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given state."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _mix_in(state: int, value: int) -> int:
    return splitmix64((state ^ (value & _MASK)) & _MASK)


def _float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def derive_seed(base_seed: int, *components) -> int:
    """Fold components (ints, floats, strings) into a 64-bit seed.

    Floats are folded through their IEEE bit patterns so the derivation is
    exact and platform independent.
    """
    state = splitmix64(base_seed & _MASK)
    for comp in components:
        if isinstance(comp, bool):
            state = _mix_in(state, int(comp))
        elif isinstance(comp, int):
            state = _mix_in(state, comp)
        elif isinstance(comp, float):
            state = _mix_in(state, _float_bits(comp))
        elif isinstance(comp, str):
            for b in comp.encode("utf-8"):
                state = _mix_in(state, b)
        else:
            raise TypeError(f"cannot fold {type(comp).__name__} into a seed")
    return state
