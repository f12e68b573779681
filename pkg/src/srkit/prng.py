"""Uniform 32-bit generators behind a small pluggable stream interface.

The default generator is JKISS32, the multiplication-free member of George
Marsaglia's KISS family as tabulated by David Jones ("Good practice in
(pseudo) random number generation for bioinformatics applications", UCL
technical note, 2010). It combines a 32-bit xorshift word, a 31-bit
add-with-carry pair and a Weyl sequence; period is about 2**121.

Pinned constants:

* xorshift taps 5, 7, 22
* Weyl increment 1411392427
* reference state x=123456789, y=234567891, z=345678912, w=456789123, c=0

A 64-bit seed expands to a state through successive splitmix64 outputs
(low 32 bits each): x, then y (redrawn while zero, the xorshift word must
never be zero), then z, then w; the carry starts at 0. Streams built from
equal seeds therefore produce identical sequences.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

_M32 = 0xFFFFFFFF
_M64 = (1 << 64) - 1

_WEYL_INCREMENT = 1411392427
_REFERENCE_STATE = (123456789, 234567891, 345678912, 456789123, 0)


@runtime_checkable
class PrngStream(Protocol):
    """Anything that yields uniform 32-bit words and can be reseeded."""

    def next_u32(self) -> int: ...

    def reseed(self, seed: int) -> None: ...


def mask_low(p: int, k: int) -> int:
    """Keep the low k bits of a 32-bit word, 1 <= k <= 32."""
    if not 1 <= k <= 32:
        raise ValueError(f"mask width must be in 1..32, got {k}")
    return p & ((1 << k) - 1)


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)), state


def expand_seed(seed: int) -> tuple[int, int, int, int, int]:
    """Expand a 64-bit seed into a JKISS32 state (x, y, z, w, c)."""
    sm = seed & _M64
    words = []
    while len(words) < 4:
        value, sm = _splitmix64(sm)
        value &= _M32
        if len(words) == 1 and value == 0:
            continue
        words.append(value)
    return words[0], words[1], words[2], words[3], 0


class Jkiss32:
    """JKISS32 stream. ``Jkiss32()`` starts from the pinned reference state,
    ``Jkiss32(seed)`` from the documented splitmix64 expansion of the seed."""

    __slots__ = ("_x", "_y", "_z", "_w", "_c")

    def __init__(self, seed: int | None = None):
        if seed is None:
            self._x, self._y, self._z, self._w, self._c = _REFERENCE_STATE
        else:
            self.reseed(seed)

    def reseed(self, seed: int) -> None:
        self._x, self._y, self._z, self._w, self._c = expand_seed(seed)

    @property
    def state(self) -> tuple[int, int, int, int, int]:
        return self._x, self._y, self._z, self._w, self._c

    def next_u32(self) -> int:
        y = self._y
        y ^= (y << 5) & _M32
        y ^= y >> 7
        y ^= (y << 22) & _M32
        self._y = y
        t = self._z + self._w + self._c
        self._z = self._w
        self._c = (t >> 31) & 1
        self._w = t & 0x7FFFFFFF
        self._x = (self._x + _WEYL_INCREMENT) & _M32
        return (self._x + y + self._w) & _M32


class Lcg32:
    """Plain linear congruential generator (Numerical Recipes constants).

    Quality is deliberately modest; it exists to show the stream interface
    accepts any uniform source.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int = 0):
        self.reseed(seed)

    def reseed(self, seed: int) -> None:
        self._state = seed & _M32

    def next_u32(self) -> int:
        self._state = (1664525 * self._state + 1013904223) & _M32
        return self._state


class ExhaustiveStream:
    """Counter emitting 0, 1, ..., 2**bits - 1 in order, then wrapping.

    Masked to its own width it visits every value exactly once per period,
    which turns probabilistic assertions into exact counts.
    """

    __slots__ = ("bits", "_counter")

    def __init__(self, bits: int, start: int = 0):
        if not 1 <= bits <= 32:
            raise ValueError("bits must be in 1..32")
        self.bits = bits
        self._counter = start % (1 << bits)

    def reseed(self, seed: int) -> None:
        self._counter = seed % (1 << self.bits)

    def next_u32(self) -> int:
        value = self._counter
        self._counter = (self._counter + 1) % (1 << self.bits)
        return value


class ConstantStream:
    """Always returns the same 32-bit value."""

    __slots__ = ("_value",)

    def __init__(self, value: int):
        self._value = value & _M32

    def reseed(self, seed: int) -> None:
        self._value = seed & _M32

    def next_u32(self) -> int:
        return self._value
