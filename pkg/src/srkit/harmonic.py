"""Harmonic-series stagnation experiment on fixed-point recursive summation.

The sum lives in s16.15 or s8.7 and starts at 1. Each addend is the
truncated unsigned fixed-point reciprocal floor(2**frac / i) in u0.32 or
u0.16, rounded to the sum's format (dropping 17 or 9 bits) by the selected
mode, then added with saturation. Deterministic rounding stagnates once the
rounded addend hits zero; stochastic rounding only stops changing the sum
when the reciprocal itself underflows to zero, at iteration 2**frac + 1.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .formats import S8_7, S16_15, FixedFormat
from .prng import Jkiss32
from .rounding import RoundMode

# Double-precision recursive sum at the five-millionth term, to the three
# decimals the experiment reports against. binary64_recursive_sum recomputes
# it on demand.
REFERENCE_SUM_5M = 16.002

_MODE_CODES = {
    RoundMode.RD_TRUNCATE: kernels.MODE_RD,
    RoundMode.RN_TIES_UP: kernels.MODE_RN,
    RoundMode.SR_ADDITION: kernels.MODE_SR_ADD,
    RoundMode.SR_COMPARISON: kernels.MODE_SR_CMP,
}

# Sum format pairs with the fractional type its reciprocals are computed in.
_DIV_FRACTION_BITS = {S16_15: 32, S8_7: 16}


def reciprocal_fixed(i: int, frac_bits: int) -> int:
    """Truncated unsigned fixed-point reciprocal floor(2**frac_bits / i).

    i = 1 would need an integer bit, so the series driver starts at 2.
    """
    if frac_bits not in (16, 32):
        raise ValueError(f"frac_bits must be 16 or 32, got {frac_bits}")
    if i < 2:
        raise ValueError(f"i must be at least 2, got {i}")
    return (1 << frac_bits) // i


@dataclass(frozen=True)
class HarmonicConfig:
    sum_format: FixedFormat = S16_15
    div_fraction_bits: int = 32
    mode: RoundMode = RoundMode.SR_ADDITION
    seed: int = 0
    max_iterations: int = 5_000_000
    checkpoints: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        expected = _DIV_FRACTION_BITS.get(self.sum_format)
        if expected is None:
            raise ValueError(f"sum format must be {S16_15} or {S8_7}, got {self.sum_format}")
        if self.div_fraction_bits != expected:
            raise ValueError(
                f"{self.sum_format} sums take u0.{expected} reciprocals, "
                f"not u0.{self.div_fraction_bits}")
        if self.max_iterations < 2:
            raise ValueError("max_iterations must be at least 2")
        if list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise ValueError("checkpoints must be strictly increasing")
        if self.checkpoints and not (2 <= self.checkpoints[0]
                                     and self.checkpoints[-1] <= self.max_iterations):
            raise ValueError("checkpoints must lie in [2, max_iterations]")

    @property
    def drop_bits(self) -> int:
        return self.div_fraction_bits - self.sum_format.fraction_bits


@dataclass(frozen=True)
class CheckpointValue:
    iteration: int
    raw: int

    def value(self, fmt: FixedFormat) -> float:
        return fmt.to_float(self.raw)


@dataclass(frozen=True)
class ExperimentReport:
    config: HarmonicConfig
    checkpoint_sums: tuple[CheckpointValue, ...]
    final: CheckpointValue
    convergence_iteration: int | None
    sum_saturated: bool

    def describe(self) -> str:
        fmt = self.config.sum_format
        lines = [
            f"format={fmt} mode={self.config.mode.value} seed={self.config.seed} "
            f"iterations={self.config.max_iterations}"
        ]
        for cp in self.checkpoint_sums:
            lines.append(f"  i={cp.iteration}: sum={fmt.render(cp.raw)} (raw {cp.raw:#x})")
        lines.append(f"  final: sum={fmt.render(self.final.raw)} (raw {self.final.raw:#x})")
        conv = self.convergence_iteration
        lines.append(f"  converged at i={conv}" if conv else "  not converged")
        if self.sum_saturated:
            lines.append("  sum saturated during the run")
        return "\n".join(lines)


def run_harmonic(cfg: HarmonicConfig, backend: str | None = None) -> ExperimentReport:
    """One summation run. Deterministic modes ignore the seed entirely."""
    state = kernels.state_array(Jkiss32(cfg.seed).state)
    cps = np.asarray(cfg.checkpoints, dtype=np.int64)
    cp_sums, final, conv, saturated = kernels.harmonic_run(
        cfg.div_fraction_bits, cfg.drop_bits, _MODE_CODES[cfg.mode], state,
        cfg.max_iterations, cps, cfg.sum_format.min_raw, cfg.sum_format.max_raw,
        backend=backend)
    return ExperimentReport(
        config=cfg,
        checkpoint_sums=tuple(
            CheckpointValue(int(it), int(raw)) for it, raw in zip(cfg.checkpoints, cp_sums)),
        final=CheckpointValue(cfg.max_iterations, int(final)),
        convergence_iteration=int(conv) if conv else None,
        sum_saturated=saturated,
    )


@dataclass(frozen=True)
class EnsembleResult:
    config: HarmonicConfig
    seeds: tuple[int, ...]
    final_raws: tuple[int, ...]
    mean: float
    std: float
    reference: float
    error_vs_reference: float

    @property
    def final_values(self) -> tuple[float, ...]:
        fmt = self.config.sum_format
        return tuple(fmt.to_float(raw) for raw in self.final_raws)

    def describe(self) -> str:
        return (
            f"{self.config.sum_format} {self.config.mode.value}, {len(self.seeds)} runs: "
            f"mean={self.mean:.6f} std={self.std:.6f} "
            f"reference={self.reference} error={self.error_vs_reference:.9f}"
        )


def run_harmonic_ensemble(cfg: HarmonicConfig, runs: int,
                          backend: str | None = None) -> EnsembleResult:
    """Repeat a stochastic run with seeds seed, seed+1, ... and aggregate.

    The reported error is reference minus ensemble mean. Whether that matches
    any externally quoted single-run error is left open; only mean and spread
    are asserted anywhere.
    """
    if runs < 2:
        raise ValueError("an ensemble needs at least 2 runs")
    if not cfg.mode.is_stochastic:
        raise ValueError("ensembles only make sense for the stochastic modes")
    seeds = tuple(cfg.seed + k for k in range(runs))
    finals = []
    for seed in seeds:
        report = run_harmonic(replace(cfg, seed=seed), backend=backend)
        finals.append(report.final.raw)
    values = [cfg.sum_format.to_float(raw) for raw in finals]
    mean = statistics.fmean(values)
    return EnsembleResult(
        config=cfg,
        seeds=seeds,
        final_raws=tuple(finals),
        mean=mean,
        std=statistics.stdev(values),
        reference=REFERENCE_SUM_5M,
        error_vs_reference=REFERENCE_SUM_5M - mean,
    )


def binary64_recursive_sum(n_iters: int, backend: str | None = None) -> float:
    """Recompute the double-precision recursive sum for display."""
    return kernels.binary64_recursive_sum(n_iters, backend=backend)
