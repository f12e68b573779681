"""Exhaustive and differential verification suites.

Each suite returns :class:`OracleOutcome` records with the number of cases
checked and the first counterexample on failure. The CLI ``oracle``
subcommand and the acceptance tests drive these.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .accel import OPS, CONFIG_OFFSET, Family, RoundingAccelerator
from .bfloat import b32_to_bf16, bf16_to_b32
from .prng import Jkiss32
from .rounding import RoundMode, RoundSpec, rn_ties_up, round_fixed


@dataclass(frozen=True)
class OracleOutcome:
    suite: str
    passed: bool
    checked: int
    detail: str = ""

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.suite}: {self.checked} cases{tail}"


def unbiasedness_oracle(n_max: int = 12, backend: str | None = None) -> OracleOutcome:
    """Mean over every random word equals the input exactly, both algorithms."""
    checked = 0
    for alg, label in ((0, "addition"), (1, "comparison")):
        ok, bad_n, bad_x = kernels.sr_sum_scan(n_max, -(1 << 15), 1 << 15, alg,
                                               backend=backend)
        checked += (1 << 16) * n_max
        if not ok:
            return OracleOutcome("unbiasedness", False, checked,
                                 f"{label}: x={bad_x} n={bad_n} has a biased mean")
    return OracleOutcome("unbiasedness", True, checked)


def count_equivalence_oracle(n_max: int = 12, backend: str | None = None) -> OracleOutcome:
    """Round-up counts over the full random space equal the residual for both
    algorithms, so their output distributions match pointwise in r."""
    checked = 0
    for n in range(1, n_max + 1):
        expected = np.arange(1 << n, dtype=np.int64)
        for alg, label in ((0, "addition"), (1, "comparison")):
            counts = kernels.roundup_counts(n, 32, alg, backend=backend)
            checked += 1 << n
            if not np.array_equal(counts, expected):
                r = int(np.argmax(counts != expected))
                return OracleOutcome(
                    "count-equivalence", False, checked,
                    f"{label}: n={n} r={r} count={int(counts[r])} expected {r}")
    return OracleOutcome("count-equivalence", True, checked)


def rn_oracle(n_max: int = 8) -> OracleOutcome:
    """Implementation versus exact rational round-to-nearest, ties toward +inf."""
    half = Fraction(1, 2)
    checked = 0
    for n in range(1, n_max + 1):
        # 16-bit in, 16-bit out: the shifted result can never saturate there
        spec = RoundSpec(RoundMode.RN_TIES_UP, n, in_bits=16, out_bits=16)
        denom = 1 << n
        for x in range(-(1 << 15), 1 << 15):
            q = Fraction(x, denom)
            floor_q = math.floor(q)
            expected = floor_q + 1 if q - floor_q >= half else floor_q
            got = rn_ties_up(x, spec).value
            checked += 1
            if got != expected:
                return OracleOutcome("rn", False, checked,
                                     f"x={x} n={n}: got {got}, exact nearest {expected}")
    return OracleOutcome("rn", True, checked)


def width_bias_oracle(n_max: int = 12, widths: tuple[int, ...] = (4, 8),
                      backend: str | None = None) -> OracleOutcome:
    """A w-bit random word keeps the round-up probability within 2**-w of ideal.

    Checked exactly in integers: |count/space - r/2**n| < 2**-w with
    space = 2**min(n, w) possible random words.
    """
    checked = 0
    for w in widths:
        for n in range(1, n_max + 1):
            space = 1 << min(n, w)
            for alg, label in ((0, "addition"), (1, "comparison")):
                counts = kernels.roundup_counts(n, w, alg, backend=backend)
                rs = np.arange(1 << n, dtype=np.int64)
                lhs = np.abs(counts * (1 << n) - rs * space) * (1 << w)
                checked += 1 << n
                bad = lhs >= space * (1 << n)
                if bad.any():
                    r = int(np.argmax(bad))
                    return OracleOutcome(
                        "width-bias", False, checked,
                        f"{label}: n={n} w={w} r={r} count={int(counts[r])}")
    return OracleOutcome("width-bias", True, checked)


def bf16_oracle(samples: int = 1000, seed: int = 2024,
                backend: str | None = None) -> OracleOutcome:
    """Round-trip identity, stochastic round-up counts, and the tie case."""
    checked = 0
    for b in range(1 << 16):
        if b32_to_bf16(bf16_to_b32(b)) != b:
            return OracleOutcome("bf16", False, checked,
                                 f"round trip broke pattern {b:#06x}")
        checked += 1

    rng = random.Random(seed)
    patterns = []
    while len(patterns) < samples:
        p = rng.getrandbits(32)
        if (p & 0x7F800000) != 0x7F800000:  # finite only
            patterns.append(p)
    counts = kernels.bf16_roundup_counts(np.array(patterns, dtype=np.uint64),
                                         backend=backend)
    for p, count in zip(patterns, counts):
        checked += 1 << 16
        if int(count) != (p & 0xFFFF):
            return OracleOutcome(
                "bf16", False, checked,
                f"pattern {p:#010x}: {int(count)} round-ups, residual {p & 0xFFFF:#06x}")

    tie = b32_to_bf16(0x3F808000, RoundMode.RN_TIES_UP)
    checked += 1
    if tie != 0x3F81:
        return OracleOutcome("bf16", False, checked, f"tie case gave {tie:#06x}")
    return OracleOutcome("bf16", True, checked)


def prng_oracle(draws: int = 1_000_000, seed: int = 42,
                backend: str | None = None) -> OracleOutcome:
    """Stream reproducibility across implementations plus a bit-frequency check."""
    stream = Jkiss32(seed)
    reference = np.fromiter((stream.next_u32() for _ in range(draws)),
                            dtype=np.uint64, count=draws)
    block = kernels.jkiss32_block(kernels.state_array(Jkiss32(seed).state), draws,
                                  backend=backend)
    if not np.array_equal(reference, block):
        first = int(np.argmax(reference != block))
        return OracleOutcome("prng", False, draws,
                             f"sequences diverge at draw {first}")
    for bit in range(32):
        freq = float(((block >> np.uint64(bit)) & np.uint64(1)).mean())
        if abs(freq - 0.5) > 0.01:
            return OracleOutcome("prng", False, draws,
                                 f"bit {bit} set with frequency {freq:.4f}")
    return OracleOutcome("prng", True, draws)


# -- accelerator model versus library ----------------------------------------


def _encode_reference(value: int) -> int:
    return value & 0xFFFFFFFF


def measure_latencies(random_width: int = 32) -> dict[str, int]:
    """Cycles from first argument write to valid result read, per operation."""
    out = {}
    for op in OPS:
        model = RoundingAccelerator(stream=Jkiss32(7), random_width=random_width)
        model.bus_write(CONFIG_OFFSET, 15)
        if op.family is Family.FIX_64_32:
            model.bus_write(op.arg_lo, 0x12345678)
            start = model.cycle
            model.bus_write(op.arg_hi, 0x1)
        else:
            start = model.cycle + 1
            model.bus_write(op.arg_lo, 0x12345678)
        model.bus_read(op.result)
        out[op.name] = model.cycle - start + 1
    return out


def sim_differential_oracle(stimuli: int = 100_000, seed: int = 99,
                            random_width: int = 32) -> OracleOutcome:
    """Model output must be bit-identical to the library, stream positions and
    all, over random stimuli with the drop count rewritten every operation."""
    checked = 0
    spec_cache: dict[tuple, RoundSpec] = {}
    for op in OPS:
        model = RoundingAccelerator(stream=Jkiss32(seed), random_width=random_width)
        ref_stream = Jkiss32(seed)
        rng = random.Random(seed ^ op.base)
        fam = op.family
        expected_latency = 4 if fam is Family.FIX_64_32 else 3
        for _ in range(stimuli):
            n = rng.randrange(1, 33)
            model.bus_write(CONFIG_OFFSET, n - 1)
            if fam is Family.FIX_64_32:
                lo, hi = rng.getrandbits(32), rng.getrandbits(32)
                model.bus_write(op.arg_lo, lo)
                start = model.cycle
                model.bus_write(op.arg_hi, hi)
                word = (hi << 32) | lo
            else:
                word = rng.getrandbits(fam.in_bits)
                start = model.cycle + 1
                model.bus_write(op.arg_lo, word)
            got = model.bus_read(op.result)
            latency = model.cycle - start + 1

            if fam is Family.B32_BF16:
                expected = b32_to_bf16(word, op.mode, ref_stream)
            else:
                key = (fam, op.mode, op.signed, n)
                spec = spec_cache.get(key)
                if spec is None:
                    spec = RoundSpec(op.mode, n, random_width=random_width,
                                     in_signed=op.signed, out_signed=op.signed,
                                     in_bits=fam.in_bits, out_bits=fam.out_bits)
                    spec_cache[key] = spec
                x = word - (1 << fam.in_bits) if op.signed and (
                    word >> (fam.in_bits - 1)) & 1 else word
                expected = _encode_reference(round_fixed(x, spec, ref_stream).value)

            checked += 1
            if got != expected:
                return OracleOutcome(
                    "sim-differential", False, checked,
                    f"{op.name}: n={n} word={word:#x} model={got:#010x} "
                    f"library={expected:#010x}")
            if latency != expected_latency:
                return OracleOutcome(
                    "sim-differential", False, checked,
                    f"{op.name}: latency {latency} cycles, expected {expected_latency}")
    return OracleOutcome("sim-differential", True, checked)


SUITES = {
    "unbiasedness": unbiasedness_oracle,
    "count-equivalence": count_equivalence_oracle,
    "rn": rn_oracle,
    "width-bias": width_bias_oracle,
    "bf16": bf16_oracle,
    "prng": prng_oracle,
    "sim-differential": sim_differential_oracle,
}


def run_suite(name: str = "all", backend: str | None = None) -> list[OracleOutcome]:
    """Run one named suite, or all of them, at the default sizes."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; pick from {sorted(SUITES)} or 'all'")
    results = []
    for suite in names:
        fn = SUITES[suite]
        if suite in ("rn", "sim-differential"):
            results.append(fn())
        else:
            results.append(fn(backend=backend))
    return results
