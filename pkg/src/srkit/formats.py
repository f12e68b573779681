"""Fixed-point format descriptors and the bit primitives shared by every rounding mode.

Values are carried as plain Python ints (already interpreted, so negative
numbers are negative ints); :class:`RawWord` is the boundary type for code
that deals in 2's-complement bit patterns, such as the bus model and the CLI.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

WORD_WIDTHS = (16, 32, 64)

_MASK64 = (1 << 64) - 1
_FORMAT_RE = re.compile(r"^([su])(\d+)\.(\d+)$")


@dataclass(frozen=True)
class FixedFormat:
    """A signed/unsigned fixed-point format with a fixed word width.

    ``s16.15`` means 1 sign bit, 16 integer bits and 15 fraction bits in a
    32-bit word; ``u0.32`` is a pure fraction filling a 32-bit word.
    """

    signed: bool
    integer_bits: int
    fraction_bits: int

    def __post_init__(self) -> None:
        if self.integer_bits < 0 or self.fraction_bits < 0:
            raise ValueError("bit counts must be non-negative")
        if self.word_bits not in WORD_WIDTHS:
            raise ValueError(
                f"format {self} needs a {self.word_bits}-bit word; "
                f"supported word widths are {WORD_WIDTHS}"
            )

    @property
    def word_bits(self) -> int:
        return self.integer_bits + self.fraction_bits + (1 if self.signed else 0)

    @property
    def min_raw(self) -> int:
        return -(1 << (self.word_bits - 1)) if self.signed else 0

    @property
    def max_raw(self) -> int:
        if self.signed:
            return (1 << (self.word_bits - 1)) - 1
        return (1 << self.word_bits) - 1

    def to_float(self, raw: int) -> float:
        """Value of a raw word; exact while |raw| stays below 2**53."""
        return raw / (1 << self.fraction_bits)

    def render(self, raw: int) -> str:
        """Exact decimal rendering of a raw word (round-trips by construction)."""
        sign = "-" if raw < 0 else ""
        mag = abs(raw)
        ipart = mag >> self.fraction_bits
        fpart = mag & ((1 << self.fraction_bits) - 1)
        if fpart == 0:
            return f"{sign}{ipart}.0"
        digits = str(fpart * 5 ** self.fraction_bits).rjust(self.fraction_bits, "0")
        return f"{sign}{ipart}.{digits.rstrip('0')}"

    def __str__(self) -> str:
        return f"{'s' if self.signed else 'u'}{self.integer_bits}.{self.fraction_bits}"


def parse_format(text: str) -> FixedFormat:
    """Parse format notation like ``s16.15`` or ``u0.32``."""
    m = _FORMAT_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad format notation {text!r}, expected e.g. 's16.15' or 'u0.32'")
    return FixedFormat(m.group(1) == "s", int(m.group(2)), int(m.group(3)))


S16_15 = parse_format("s16.15")
S8_7 = parse_format("s8.7")
U0_32 = parse_format("u0.32")
U0_16 = parse_format("u0.16")


@dataclass(frozen=True)
class RawWord:
    """A 16/32/64-bit word stored in a single 64-bit carrier.

    Narrower signed values are kept sign-extended to 64 bits, unsigned values
    zero-extended, so one code path serves every width.
    """

    bits: int
    width: int

    def __post_init__(self) -> None:
        if self.width not in WORD_WIDTHS:
            raise ValueError(f"width must be one of {WORD_WIDTHS}")
        if not 0 <= self.bits <= _MASK64:
            raise ValueError("bits must fit in 64 bits")
        low = self.bits & ((1 << self.width) - 1)
        if self.bits != low and self.bits != low | (_MASK64 ^ ((1 << self.width) - 1)):
            raise ValueError("bits above the word width must be a sign or zero extension")

    @classmethod
    def from_signed(cls, value: int, width: int) -> "RawWord":
        if not -(1 << (width - 1)) <= value < (1 << (width - 1)):
            raise ValueError(f"{value} does not fit a signed {width}-bit word")
        return cls(value & _MASK64, width)

    @classmethod
    def from_unsigned(cls, value: int, width: int) -> "RawWord":
        if not 0 <= value < (1 << width):
            raise ValueError(f"{value} does not fit an unsigned {width}-bit word")
        return cls(value, width)

    @classmethod
    def from_pattern(cls, pattern: int, width: int, signed: bool) -> "RawWord":
        """Interpret the low ``width`` bits of a pattern, extending to 64 bits."""
        low = pattern & ((1 << width) - 1)
        if signed and (low >> (width - 1)) & 1:
            low |= _MASK64 ^ ((1 << width) - 1)
        return cls(low, width)

    def to_signed(self) -> int:
        return self.bits - (1 << 64) if (self.bits >> 63) & 1 else self.bits

    def to_unsigned(self) -> int:
        return self.bits


class Saturated(NamedTuple):
    value: int
    saturated: bool


def _check_drop_count(n: int) -> None:
    if not 1 <= n <= 32:
        raise ValueError(f"dropped-bit count must be in 1..32, got {n}")


def floor_drop(x: int, n: int) -> int:
    """Drop the n low bits, rounding toward minus infinity.

    This is an arithmetic right shift: for non-negative x it is the plain
    logical shift, for negative x it floors (so -1.5 ulp goes to -2).
    """
    _check_drop_count(n)
    return x >> n


def residual_of(x: int, n: int) -> int:
    """The n dropped low bits as a non-negative value, sign-agnostic."""
    _check_drop_count(n)
    return x & ((1 << n) - 1)


def saturate(x: int, signed: bool, bits: int) -> Saturated:
    """Clamp x to the representable range of a 16- or 32-bit output word."""
    if bits not in (16, 32):
        raise ValueError(f"output width must be 16 or 32, got {bits}")
    if signed:
        lo, hi = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    else:
        lo, hi = 0, (1 << bits) - 1
    if x > hi:
        return Saturated(hi, True)
    if x < lo:
        return Saturated(lo, True)
    return Saturated(x, False)
