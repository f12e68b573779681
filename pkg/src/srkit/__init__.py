"""srkit: bit-exact stochastic rounding, saturation and a register-level
model of a memory-mapped round-and-saturate accelerator."""

from .formats import (FixedFormat, RawWord, Saturated, S8_7, S16_15, U0_16, U0_32,
                      floor_drop, parse_format, residual_of, saturate)
from .prng import ConstantStream, ExhaustiveStream, Jkiss32, Lcg32, PrngStream, mask_low
from .rounding import (RoundMode, RoundOutcome, RoundSpec, comparison_rounds_up,
                       rd_truncate, rn_ties_up, round_fixed, sr_by_addition,
                       sr_by_comparison, stochastic_carry)
from .bfloat import b32_to_bf16, bf16_to_b32
from .accel import (BusError, Family, MappedOp, OPS, ProtocolError,
                    RoundingAccelerator, ScriptError, Transaction, find_op,
                    write_log_csv)
from .harmonic import (EnsembleResult, ExperimentReport, HarmonicConfig,
                       REFERENCE_SUM_5M, binary64_recursive_sum, reciprocal_fixed,
                       run_harmonic, run_harmonic_ensemble)
from .oracles import OracleOutcome, measure_latencies, run_suite

__version__ = "0.1.0"

__all__ = [
    "FixedFormat", "RawWord", "Saturated", "S8_7", "S16_15", "U0_16", "U0_32",
    "floor_drop", "parse_format", "residual_of", "saturate",
    "ConstantStream", "ExhaustiveStream", "Jkiss32", "Lcg32", "PrngStream", "mask_low",
    "RoundMode", "RoundOutcome", "RoundSpec", "comparison_rounds_up", "rd_truncate",
    "rn_ties_up", "round_fixed", "sr_by_addition", "sr_by_comparison", "stochastic_carry",
    "b32_to_bf16", "bf16_to_b32",
    "BusError", "Family", "MappedOp", "OPS", "ProtocolError", "RoundingAccelerator",
    "ScriptError", "Transaction", "find_op", "write_log_csv",
    "EnsembleResult", "ExperimentReport", "HarmonicConfig", "REFERENCE_SUM_5M",
    "binary64_recursive_sum", "reciprocal_fixed", "run_harmonic", "run_harmonic_ensemble",
    "OracleOutcome", "measure_latencies", "run_suite",
    "__version__",
]
