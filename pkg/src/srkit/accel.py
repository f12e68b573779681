"""Register-level, cycle-counting model of the memory-mapped round-and-saturate unit.

The unit hangs off a 32-bit bus. Operation family, rounding mode and
signedness are decoded from the address written; the number of bits to drop
comes from a config register set up beforehand (a 5-bit field holding n - 1,
so 0 means drop 1 bit and 31 means drop 32). 64-bit arguments arrive as two
writes, everything else as one; the write that delivers the last argument
word triggers the operation.

Timing: every bus transaction occupies one cycle, and the round itself
occupies the cycle after the trigger, during which the unit is busy. A
transaction issued against a busy unit stalls until the unit is free, which
the cycle stamps expose. A full write-round-read sequence therefore takes 4
cycles for the 64-bit family and 3 cycles for the 32- and 16-bit ones.

Address map (word-aligned byte offsets, the repository ABI):

    0x00  CONFIG   r/w   bits [4:0] = n - 1 (ignored by the float family)
    0x04  STATUS   r     bit 0 = last completed operation saturated
    0x10 + 0x10*k         one block per operation, see OPS for the ordering:
        +0x0  ARG    w   argument word (ARG_LO for the 64-bit family)
        +0x4  ARG_HI w   64-bit family only; the triggering write
        +0x8  RESULT r   output word, sign-/zero-extended to 32 bits
                         (bfloat16 results sit zero-extended in the low half)

The rounding datapath here is written register-transfer style (residual
slice, carry out of the residual adder, overflow checks) on purpose: the
library's arithmetic in :mod:`srkit.rounding` is the independent reference
the differential suite compares against, so this module must not call it.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Iterable

from .prng import Jkiss32, PrngStream
from .rounding import RoundMode

CONFIG_OFFSET = 0x00
STATUS_OFFSET = 0x04
_BLOCK_BASE = 0x10
_BLOCK_STRIDE = 0x10

_M32 = 0xFFFFFFFF


class BusError(Exception):
    """Access to an unmapped offset or in a direction the register lacks."""


class ProtocolError(Exception):
    """Result register read without a completed operation behind it."""


class ScriptError(Exception):
    """Stimulus script failure; carries the transaction log up to the failure."""

    def __init__(self, message: str, line_no: int, log: list["Transaction"]):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.log = log


class Family(enum.Enum):
    FIX_64_32 = ("fix64_32", 64, 32)
    FIX_32_32 = ("fix32_32", 32, 32)
    FIX_32_16 = ("fix32_16", 32, 16)
    FIX_16_16 = ("fix16_16", 16, 16)
    B32_BF16 = ("b32_bf16", 32, 16)

    def __init__(self, label: str, in_bits: int, out_bits: int):
        self.label = label
        self.in_bits = in_bits
        self.out_bits = out_bits


@dataclass(frozen=True)
class MappedOp:
    """One argument/result block in the address map."""

    family: Family
    mode: RoundMode  # SR_ADDITION or RN_TIES_UP, the two wired-in modes
    signed: bool | None  # None for the float family
    base: int

    @property
    def arg_lo(self) -> int:
        return self.base

    @property
    def arg_hi(self) -> int:
        if self.family is not Family.FIX_64_32:
            raise ValueError(f"{self.name} takes a single argument write")
        return self.base + 0x4

    @property
    def result(self) -> int:
        return self.base + 0x8

    @property
    def name(self) -> str:
        sign = "" if self.signed is None else ("_s" if self.signed else "_u")
        return f"{self.family.label}{sign}_{self.mode.value.replace('-', '')}"


def _build_ops() -> tuple[MappedOp, ...]:
    ops = []
    base = _BLOCK_BASE
    for family in (Family.FIX_64_32, Family.FIX_32_32, Family.FIX_32_16, Family.FIX_16_16):
        for signed in (True, False):
            for mode in (RoundMode.SR_ADDITION, RoundMode.RN_TIES_UP):
                ops.append(MappedOp(family, mode, signed, base))
                base += _BLOCK_STRIDE
    for mode in (RoundMode.SR_ADDITION, RoundMode.RN_TIES_UP):
        ops.append(MappedOp(Family.B32_BF16, mode, None, base))
        base += _BLOCK_STRIDE
    return tuple(ops)


OPS: tuple[MappedOp, ...] = _build_ops()


def find_op(family: Family, mode: RoundMode, signed: bool | None) -> MappedOp:
    for op in OPS:
        if op.family is family and op.mode is mode and op.signed == signed:
            return op
    raise KeyError(f"no mapped operation for {family}/{mode}/{signed}")


@dataclass
class Transaction:
    cycle: int
    op: str
    offset: int
    data: int | None
    status: str


class _Slot:
    __slots__ = ("arg_lo", "arg_hi", "result", "ready_cycle")

    def __init__(self) -> None:
        self.arg_lo = 0
        self.arg_hi = 0
        self.result: int | None = None
        self.ready_cycle = 0


class RoundingAccelerator:
    """Behavioral model: bus transactions in, rounded words and cycle stamps out."""

    def __init__(self, stream: PrngStream | None = None, random_width: int = 32):
        if random_width not in (8, 16, 32):
            raise ValueError("random_width must be 8, 16 or 32")
        self._stream = stream if stream is not None else Jkiss32(0)
        self.random_width = random_width
        self.config = 0
        self.status = 0
        self.cycle = 0
        self._busy_until = 0
        self._slots = {op: _Slot() for op in OPS}
        self._write_decode: dict[int, tuple[MappedOp | None, str]] = {
            CONFIG_OFFSET: (None, "config")}
        self._read_decode: dict[int, tuple[MappedOp | None, str]] = {
            CONFIG_OFFSET: (None, "config"), STATUS_OFFSET: (None, "status")}
        for op in OPS:
            trigger = "arg_trigger"
            if op.family is Family.FIX_64_32:
                self._write_decode[op.arg_lo] = (op, "arg_lo")
                self._write_decode[op.arg_hi] = (op, trigger)
            else:
                self._write_decode[op.arg_lo] = (op, trigger)
            self._read_decode[op.result] = (op, "result")

    # -- bus interface ------------------------------------------------------

    def bus_write(self, offset: int, data: int) -> None:
        """One write transaction; stalls first if the unit is mid-round."""
        decoded = self._write_decode.get(offset)
        if decoded is None:
            raise BusError(f"write to unmapped offset {offset:#05x}")
        self.cycle = max(self.cycle, self._busy_until) + 1
        op, reg = decoded
        data &= _M32
        if reg == "config":
            self.config = data & 0x1F
        elif reg == "arg_lo":
            self._slots[op].arg_lo = data
        else:
            slot = self._slots[op]
            if op.family is Family.FIX_64_32:
                slot.arg_hi = data
            else:
                slot.arg_lo = data
            self._trigger(op, slot)

    def bus_read(self, offset: int) -> int:
        """One read transaction; stalls past the round cycle like any other."""
        decoded = self._read_decode.get(offset)
        if decoded is None:
            raise BusError(f"read of unmapped offset {offset:#05x}")
        self.cycle = max(self.cycle, self._busy_until) + 1
        op, reg = decoded
        if reg == "config":
            return self.config
        if reg == "status":
            return self.status
        slot = self._slots[op]
        if slot.result is None:
            raise ProtocolError(f"{op.name}: result read with no completed operation")
        if self.cycle < slot.ready_cycle:
            raise ProtocolError(
                f"{op.name}: result read {slot.ready_cycle - self.cycle} cycles early")
        return slot.result

    # -- datapath -----------------------------------------------------------

    def _trigger(self, op: MappedOp, slot: _Slot) -> None:
        # The operation latches its configuration now; later config writes
        # cannot touch it. The round occupies the next cycle and the result
        # register updates at the end of it.
        if op.family is Family.B32_BF16:
            result, saturated = self._float_datapath(slot.arg_lo, op.mode)
        else:
            result, saturated = self._fixed_datapath(op, slot)
        slot.result = result
        slot.ready_cycle = self.cycle + 2
        self._busy_until = self.cycle + 1
        self.status = 1 if saturated else 0

    def _fixed_datapath(self, op: MappedOp, slot: _Slot) -> tuple[int, bool]:
        n = (self.config & 0x1F) + 1
        family = op.family
        if family is Family.FIX_64_32:
            word = (slot.arg_hi << 32) | slot.arg_lo
        elif family is Family.FIX_16_16:
            word = slot.arg_lo & 0xFFFF
        else:
            word = slot.arg_lo
        width = family.in_bits
        # Two's-complement interpretation; Python ints play the role of the
        # left-extended datapath, so overflow is a plain magnitude check.
        x = word - (1 << width) if op.signed and (word >> (width - 1)) & 1 else word

        residual = x & ((1 << n) - 1)
        unrounded = x >> n
        if op.mode is RoundMode.SR_ADDITION:
            p = self._stream.next_u32()
            w = self.random_width
            if w >= n:
                addend = p & ((1 << n) - 1)
            else:
                addend = (p & ((1 << w) - 1)) << (n - w)
            bit = (residual + addend) >> n  # c_out of the residual adder
        else:
            bit = (residual >> (n - 1)) & 1  # top residual bit
        rounded = unrounded + bit

        out_bits = family.out_bits
        if op.signed:
            lo, hi = -(1 << (out_bits - 1)), (1 << (out_bits - 1)) - 1
        else:
            lo, hi = 0, (1 << out_bits) - 1
        saturated = True
        if rounded > hi:
            rounded = hi
        elif rounded < lo:
            rounded = lo
        else:
            saturated = False
        return rounded & _M32, saturated

    def _float_datapath(self, pattern: int, mode: RoundMode) -> tuple[int, bool]:
        if mode is RoundMode.SR_ADDITION:
            increment = self._stream.next_u32() & 0xFFFF
        else:
            increment = 0x8000
        magnitude = pattern & 0x7FFFFFFF
        if magnitude > 0x7F800000:  # NaN keeps its top half, nudged off the inf encoding
            top = pattern >> 16
            if top & 0x7F == 0:
                top |= 0x40
            return top, False
        magnitude += increment
        return ((pattern >> 16) & 0x8000) | (magnitude >> 16), False

    # -- stimulus scripts ----------------------------------------------------

    def run_script(self, script: str | Iterable[str]) -> list[Transaction]:
        """Execute a line-oriented stimulus script and return the transaction log.

        Lines: ``W <offset-hex> <data-hex>``, ``R <offset-hex>``,
        ``E <data-hex>`` (expectation on the preceding read), ``#`` comments.
        The first failed expectation or bus fault aborts with a
        :class:`ScriptError` carrying the log so far.
        """
        lines = script.splitlines() if isinstance(script, str) else list(script)
        log: list[Transaction] = []
        last_read: Transaction | None = None
        for line_no, raw_line in enumerate(lines, start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            action = fields[0].upper()
            try:
                if action == "W" and len(fields) == 3:
                    offset, data = int(fields[1], 16), int(fields[2], 16)
                    self.bus_write(offset, data)
                    log.append(Transaction(self.cycle, "W", offset, data, "ok"))
                elif action == "R" and len(fields) == 2:
                    offset = int(fields[1], 16)
                    data = self.bus_read(offset)
                    last_read = Transaction(self.cycle, "R", offset, data, "ok")
                    log.append(last_read)
                elif action == "E" and len(fields) == 2:
                    expected = int(fields[1], 16)
                    if last_read is None:
                        raise ScriptError("expectation with no preceding read", line_no, log)
                    status = "pass" if last_read.data == expected else "fail"
                    log.append(Transaction(last_read.cycle, "E", last_read.offset,
                                           expected, status))
                    if status == "fail":
                        raise ScriptError(
                            f"expected {expected:#010x} at offset {last_read.offset:#05x}, "
                            f"read {last_read.data:#010x} (cycle {last_read.cycle})",
                            line_no, log)
                else:
                    raise ScriptError(f"unparseable line {raw_line!r}", line_no, log)
            except (BusError, ProtocolError) as exc:
                log.append(Transaction(self.cycle, action, 0, None, "error"))
                raise ScriptError(str(exc), line_no, log) from exc
        return log


def write_log_csv(log: Iterable[Transaction], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "op", "offset", "data", "status"])
        for t in log:
            data = "" if t.data is None else f"0x{t.data:08X}"
            writer.writerow([t.cycle, t.op, f"0x{t.offset:03X}", data, t.status])
