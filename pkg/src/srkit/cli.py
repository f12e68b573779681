"""Command-line front end: one-shot rounding, the harmonic experiment,
stimulus-script simulation, verification suites and bfloat16 conversion."""

from __future__ import annotations

import argparse
import csv
import sys

from . import kernels
from .accel import RoundingAccelerator, ScriptError, write_log_csv
from .bfloat import b32_to_bf16
from .formats import parse_format
from .harmonic import (HarmonicConfig, REFERENCE_SUM_5M, binary64_recursive_sum,
                       run_harmonic, run_harmonic_ensemble)
from .oracles import run_suite
from .prng import Jkiss32
from .rounding import RoundMode, RoundSpec, round_fixed

_MODE_CHOICES = [m.value for m in RoundMode]


def _add_backend_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=("numba", "numpy"), default=None,
                        help="kernel backend override (default: SRKIT_BACKEND or auto)")


def cmd_round(args: argparse.Namespace) -> int:
    out_fmt = parse_format(args.format)
    if args.in_format:
        in_fmt = parse_format(args.in_format)
        in_bits, in_signed = in_fmt.word_bits, in_fmt.signed
    else:
        in_bits, in_signed = 64, out_fmt.signed
    mode = RoundMode(args.mode)
    spec = RoundSpec(mode, args.bits, random_width=args.random_width,
                     in_signed=in_signed, out_signed=out_fmt.signed,
                     in_bits=in_bits, out_bits=out_fmt.word_bits)
    value = int(args.value, 0)
    if not in_signed and value < 0:
        print("error: negative input for an unsigned in-format", file=sys.stderr)
        return 2
    stream = Jkiss32(args.seed) if mode.is_stochastic else None
    outcome = round_fixed(value, spec, stream)
    pattern = outcome.value & ((1 << out_fmt.word_bits) - 1)
    print(f"input   : {value:#x} ({value})")
    print(f"spec    : mode={mode.value} drop={spec.n} random_width={spec.random_width} "
          f"{'signed' if in_signed else 'unsigned'} {in_bits}->{out_fmt.word_bits} bits")
    print(f"result  : {pattern:#0{2 + out_fmt.word_bits // 4}x} (raw {outcome.value}) "
          f"= {out_fmt.render(outcome.value)} in {out_fmt}")
    print(f"flags   : rounded_up={outcome.rounded_up} saturated={outcome.saturated}")
    return 0


def _parse_checkpoints(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(sorted({int(tok) for tok in text.split(",") if tok.strip()}))


def cmd_harmonic(args: argparse.Namespace) -> int:
    fmt = parse_format(args.sum_format)
    mode = RoundMode(args.mode)
    user_checkpoints = _parse_checkpoints(args.checkpoints)
    checkpoints = user_checkpoints
    if args.plot:
        # Sample the curve at powers of two as well; the user CSV keeps only
        # the checkpoints asked for.
        power_of_two = []
        p = 2
        while p < args.iters:
            power_of_two.append(p)
            p <<= 1
        checkpoints = tuple(sorted(set(checkpoints) | set(power_of_two)))
    cfg = HarmonicConfig(sum_format=fmt, div_fraction_bits=32 if fmt.fraction_bits == 15 else 16,
                         mode=mode, seed=args.seed, max_iterations=args.iters,
                         checkpoints=checkpoints)

    if args.show_binary64:
        print(f"binary64 recursive sum at i={args.iters}: "
              f"{binary64_recursive_sum(args.iters, backend=args.backend)!r}")

    if args.runs > 1:
        if args.plot:
            print("error: --plot needs a single run", file=sys.stderr)
            return 2
        result = run_harmonic_ensemble(cfg, args.runs, backend=args.backend)
        print(result.describe())
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["run", "seed", "final_raw_hex", "final_value"])
                for k, (seed, raw) in enumerate(zip(result.seeds, result.final_raws)):
                    writer.writerow([k, seed, f"0x{raw:08X}", fmt.render(raw)])
            print(f"wrote {args.csv}")
        return 0

    report = run_harmonic(cfg, backend=args.backend)
    print(report.describe())
    rows = list(report.checkpoint_sums)
    if not rows or rows[-1].iteration != report.final.iteration:
        rows.append(report.final)
    if args.csv:
        keep = set(user_checkpoints) | {report.final.iteration}
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "raw_hex", "value"])
            for cp in rows:
                if cp.iteration in keep:
                    writer.writerow([cp.iteration, f"0x{cp.raw:08X}", fmt.render(cp.raw)])
        print(f"wrote {args.csv}")
    if args.plot:
        with open(args.plot, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "sum"])
            for cp in rows:
                writer.writerow([cp.iteration, fmt.to_float(cp.raw)])
        print(f"wrote {args.plot}")
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    with open(args.script) as fh:
        text = fh.read()
    model = RoundingAccelerator(stream=Jkiss32(args.seed), random_width=args.random_width)
    try:
        log = model.run_script(text)
    except ScriptError as exc:
        print(f"script failed: {exc}", file=sys.stderr)
        if args.log:
            write_log_csv(exc.log, args.log)
            print(f"wrote partial log to {args.log}", file=sys.stderr)
        return 1
    expects = sum(1 for t in log if t.op == "E")
    print(f"{len(log)} transactions, {expects} expectations passed, "
          f"final cycle {model.cycle}")
    if args.log:
        write_log_csv(log, args.log)
        print(f"wrote {args.log}")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    results = run_suite(args.suite, backend=args.backend)
    for outcome in results:
        print(outcome.describe())
    return 0 if all(r.passed for r in results) else 1


def cmd_bf16(args: argparse.Namespace) -> int:
    mode = RoundMode.SR_ADDITION if args.mode == "sr" else RoundMode.RN_TIES_UP
    stream = Jkiss32(args.seed) if args.mode == "sr" else None
    for token in args.patterns:
        pattern = int(token, 16)
        out = b32_to_bf16(pattern, mode, stream)
        print(f"{pattern:#010x} -> {out:#06x}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srkit",
        description="Stochastic rounding toolkit: bit-exact round-and-saturate "
                    "kernels, an accelerator register model and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("round", help="round one fixed-point word")
    p.add_argument("value", help="input word, decimal or 0x hex (negative allowed when signed)")
    p.add_argument("--bits", type=int, required=True, help="number of low bits to drop (1..32)")
    p.add_argument("--mode", choices=_MODE_CHOICES, default="sr")
    p.add_argument("--format", default="s16.15", help="output format notation, e.g. s16.15")
    p.add_argument("--in-format", default=None,
                   help="input format notation; default: 64-bit, output signedness")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-width", type=int, choices=(8, 16, 32), default=32)
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("harmonic", help="harmonic-series stagnation experiment")
    p.add_argument("--sum-format", choices=("s16.15", "s8.7"), default="s16.15")
    p.add_argument("--mode", choices=_MODE_CHOICES, default="sr")
    p.add_argument("--iters", type=int, default=5_000_000)
    p.add_argument("--runs", type=int, default=1, help="ensemble size (stochastic modes)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoints", default=None, help="comma-separated iteration list")
    p.add_argument("--csv", default=None, help="write checkpoint or ensemble CSV here")
    p.add_argument("--plot", default=None,
                   help="write (iteration, sum) curve data here (single run)")
    p.add_argument("--show-binary64", action="store_true",
                   help="also recompute the double-precision recursive sum")
    _add_backend_flag(p)
    p.set_defaults(func=cmd_harmonic)

    p = sub.add_parser("sim", help="run a bus stimulus script against the model")
    p.add_argument("--script", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-width", type=int, choices=(8, 16, 32), default=32)
    p.add_argument("--log", default=None, help="write the transaction log CSV here")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("oracle", help="run verification suites")
    p.add_argument("--suite", default="all",
                   help="suite name or 'all' (unbiasedness, count-equivalence, rn, "
                        "width-bias, bf16, prng, sim-differential)")
    _add_backend_flag(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bf16", help="round binary32 hex patterns to bfloat16")
    p.add_argument("patterns", nargs="+", help="binary32 bit patterns in hex")
    p.add_argument("--mode", choices=("rn", "sr"), default="rn")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bf16)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
