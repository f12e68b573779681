"""Round-and-saturate engine: two stochastic modes, round-to-nearest and truncation.

All four modes share one structure: split the input into a floored part and
an n-bit residual, decide a single round-up bit, add it, saturate to the
output width. The stochastic modes differ only in where the bit comes from:

* by comparison: round up when the masked random word is below the residual;
* by addition: add the random word to the residual and take the carry out.

Over all random words both give round-up counts exactly equal to the
residual, so the rounded value is an unbiased estimator of the input.

Negative inputs use the natural 2's-complement reading: the residual is the
masked (non-negative) low bits and round-up always moves toward +infinity.

A random word narrower than the residual (``random_width < n``) is aligned
with the top residual bits; the uncovered low residual bits still feed the
carry sum. The resulting round-up probability deviates from the ideal
residual/2**n by less than 2**-random_width.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .formats import Saturated, floor_drop, residual_of, saturate
from .prng import PrngStream, mask_low


class RoundMode(enum.Enum):
    SR_ADDITION = "sr"
    SR_COMPARISON = "sr-cmp"
    RN_TIES_UP = "rn"
    RD_TRUNCATE = "rd"

    @property
    def is_stochastic(self) -> bool:
        return self in (RoundMode.SR_ADDITION, RoundMode.SR_COMPARISON)


_RANDOM_WIDTHS = (8, 16, 32)
_IN_WIDTHS = (16, 32, 64)
_OUT_WIDTHS = (16, 32)


@dataclass(frozen=True)
class RoundSpec:
    """Static configuration of one rounding operation.

    ``n`` is the number of dropped bits (the hardware config register holds
    n - 1 in five bits; the conversion happens at that register boundary,
    not here). ``random_width`` is the width of the random word fed to the
    stochastic modes.
    """

    mode: RoundMode
    n: int
    random_width: int = 32
    in_signed: bool = True
    out_signed: bool = True
    in_bits: int = 64
    out_bits: int = 32

    def __post_init__(self) -> None:
        if not isinstance(self.mode, RoundMode):
            raise ValueError(f"mode must be a RoundMode, got {self.mode!r}")
        if not 1 <= self.n <= 32:
            raise ValueError(f"n must be in 1..32, got {self.n}")
        if self.random_width not in _RANDOM_WIDTHS:
            raise ValueError(f"random_width must be one of {_RANDOM_WIDTHS}")
        if self.in_bits not in _IN_WIDTHS or self.out_bits not in _OUT_WIDTHS:
            raise ValueError(f"widths must be in/out of {_IN_WIDTHS}/{_OUT_WIDTHS}")
        if self.out_bits > self.in_bits:
            raise ValueError("output cannot be wider than the input")


@dataclass(frozen=True)
class RoundOutcome:
    value: int
    rounded_up: bool
    saturated: bool


def stochastic_carry(residual: int, n: int, p: int, w: int = 32) -> bool:
    """Carry out of adding a w-bit random word, top-aligned, to an n-bit residual.

    ``w`` may be any width in 1..32 here; the hardware menu restricts
    :class:`RoundSpec` to 8/16/32.
    """
    if w >= n:
        return residual + (p & ((1 << n) - 1)) >= (1 << n)
    return residual + ((p & ((1 << w) - 1)) << (n - w)) >= (1 << n)


def comparison_rounds_up(residual: int, n: int, p: int, w: int = 32) -> bool:
    """Round-up decision of the comparison form: masked random word below residual."""
    if w >= n:
        return (p & ((1 << n) - 1)) < residual
    return ((p & ((1 << w) - 1)) << (n - w)) < residual


def _check_input(x: int, spec: RoundSpec) -> None:
    if spec.in_signed:
        lo, hi = -(1 << (spec.in_bits - 1)), (1 << (spec.in_bits - 1)) - 1
    else:
        lo, hi = 0, (1 << spec.in_bits) - 1
    if not lo <= x <= hi:
        raise ValueError(f"{x} does not fit a {'signed' if spec.in_signed else 'unsigned'} "
                         f"{spec.in_bits}-bit input")


def _finish(pre_sat: int, rounded_up: bool, spec: RoundSpec) -> RoundOutcome:
    clamped = saturate(pre_sat, spec.out_signed, spec.out_bits)
    return RoundOutcome(clamped.value, rounded_up, clamped.saturated)


def sr_by_comparison(x: int, spec: RoundSpec, stream: PrngStream) -> RoundOutcome:
    if spec.mode is not RoundMode.SR_COMPARISON:
        raise ValueError(f"spec mode is {spec.mode}, expected SR_COMPARISON")
    _check_input(x, spec)
    p = stream.next_u32()
    up = comparison_rounds_up(residual_of(x, spec.n), spec.n, p, spec.random_width)
    return _finish(floor_drop(x, spec.n) + (1 if up else 0), up, spec)


def sr_by_addition(x: int, spec: RoundSpec, stream: PrngStream) -> RoundOutcome:
    if spec.mode is not RoundMode.SR_ADDITION:
        raise ValueError(f"spec mode is {spec.mode}, expected SR_ADDITION")
    _check_input(x, spec)
    p = stream.next_u32()
    carry = stochastic_carry(residual_of(x, spec.n), spec.n, p, spec.random_width)
    return _finish(floor_drop(x, spec.n) + (1 if carry else 0), carry, spec)


def rn_ties_up(x: int, spec: RoundSpec) -> RoundOutcome:
    """Round to nearest, exact halves toward +infinity: add half an ulp, truncate."""
    if spec.mode is not RoundMode.RN_TIES_UP:
        raise ValueError(f"spec mode is {spec.mode}, expected RN_TIES_UP")
    _check_input(x, spec)
    up = residual_of(x, spec.n) >= (1 << (spec.n - 1))
    return _finish((x + (1 << (spec.n - 1))) >> spec.n, up, spec)


def rd_truncate(x: int, spec: RoundSpec) -> RoundOutcome:
    """Truncate toward -infinity; never rounds up."""
    if spec.mode is not RoundMode.RD_TRUNCATE:
        raise ValueError(f"spec mode is {spec.mode}, expected RD_TRUNCATE")
    _check_input(x, spec)
    return _finish(floor_drop(x, spec.n), False, spec)


def round_fixed(x: int, spec: RoundSpec, stream: PrngStream | None = None) -> RoundOutcome:
    """Dispatch on the mode. Stochastic modes consume exactly one random draw,
    the deterministic modes none, so mixed-mode sequences keep stream positions
    predictable."""
    if spec.mode is RoundMode.SR_ADDITION or spec.mode is RoundMode.SR_COMPARISON:
        if stream is None:
            raise ValueError(f"mode {spec.mode} needs a random stream")
        if spec.mode is RoundMode.SR_ADDITION:
            return sr_by_addition(x, spec, stream)
        return sr_by_comparison(x, spec, stream)
    if spec.mode is RoundMode.RN_TIES_UP:
        return rn_ties_up(x, spec)
    return rd_truncate(x, spec)
