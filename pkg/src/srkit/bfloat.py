"""binary32 to bfloat16 rounding on raw bit patterns.

bfloat16 is the top half of binary32 (1 sign, 8 exponent, 7 significand
bits), so rounding reduces to arithmetic on the 32-bit pattern treated as
sign plus a monotone 31-bit magnitude encoding. The 16 discarded bits are
the residual:

* nearest: add 0x8000 and truncate, so exact halves round away from zero
  in value (the increment reuses the rounding adder);
* stochastic: add a 16-bit random word and truncate, so the round-up
  probability is residual / 2**16.

Carries propagate naturally through the significand into the exponent;
at the largest finite exponent they produce infinity. The same pattern
arithmetic covers subnormals, zeros and infinities without special cases.
NaNs keep their top-half payload and are nudged onto a NaN encoding only
when the payload lives entirely in the discarded bits (otherwise widening
then rounding back would not be the identity).
"""

from __future__ import annotations

from .prng import PrngStream
from .rounding import RoundMode

_EXP_AND_SIG = 0x7FFFFFFF
_INF_MAGNITUDE = 0x7F800000
_BF16_QUIET_BIT = 0x0040


def _check_pattern(pattern: int, bits: int) -> None:
    if not 0 <= pattern < (1 << bits):
        raise ValueError(f"pattern {pattern:#x} does not fit {bits} bits")


def b32_to_bf16(pattern: int, mode: RoundMode = RoundMode.RN_TIES_UP,
                stream: PrngStream | None = None) -> int:
    """Round a binary32 bit pattern to a bfloat16 bit pattern.

    ``mode`` is RN_TIES_UP or SR_ADDITION. Stochastic mode consumes exactly
    one draw per call, NaN inputs included, so stream positions depend only
    on the number of calls.
    """
    _check_pattern(pattern, 32)
    if mode is RoundMode.SR_ADDITION:
        if stream is None:
            raise ValueError("stochastic mode needs a random stream")
        increment = stream.next_u32() & 0xFFFF
    elif mode is RoundMode.RN_TIES_UP:
        increment = 0x8000
    else:
        raise ValueError(f"unsupported float rounding mode {mode}")

    magnitude = pattern & _EXP_AND_SIG
    if magnitude > _INF_MAGNITUDE:  # NaN
        top = pattern >> 16
        if top & 0x7F == 0:
            top |= _BF16_QUIET_BIT  # payload was entirely in the low bits
        return top
    # Infinity has a zero residual, so it passes through the same adder.
    magnitude += increment
    return ((pattern >> 16) & 0x8000) | (magnitude >> 16)


def bf16_to_b32(pattern: int) -> int:
    """Widen a bfloat16 pattern to binary32 by zero-filling the low half. Exact."""
    _check_pattern(pattern, 16)
    return pattern << 16
