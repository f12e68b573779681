import pytest

from srkit.accel import (CONFIG_OFFSET, STATUS_OFFSET, BusError, Family, OPS,
                         ProtocolError, RoundingAccelerator, ScriptError, find_op,
                         write_log_csv)
from srkit.harmonic import reciprocal_fixed
from srkit.oracles import measure_latencies, sim_differential_oracle
from srkit.prng import Jkiss32
from srkit.rounding import RoundMode, RoundSpec, round_fixed

SR = RoundMode.SR_ADDITION
RN = RoundMode.RN_TIES_UP


def fresh(seed=0, random_width=32):
    return RoundingAccelerator(stream=Jkiss32(seed), random_width=random_width)


class TestAddressMap:
    def test_eighteen_blocks(self):
        assert len(OPS) == 18
        offsets = [op.base for op in OPS]
        assert len(set(offsets)) == 18
        assert all(base % 0x10 == 0 and base >= 0x10 for base in offsets)

    def test_decode_is_injective(self):
        keys = {(op.family, op.mode, op.signed) for op in OPS}
        assert len(keys) == 18

    def test_find_op(self):
        op = find_op(Family.FIX_64_32, SR, True)
        assert op.arg_hi == op.arg_lo + 4
        assert op.result == op.base + 8
        with pytest.raises(KeyError):
            find_op(Family.B32_BF16, SR, True)

    def test_single_arg_families_have_no_high_word(self):
        with pytest.raises(ValueError):
            _ = find_op(Family.FIX_32_32, SR, True).arg_hi


class TestRegisters:
    def test_config_readback(self):
        m = fresh()
        m.bus_write(CONFIG_OFFSET, 15)
        assert m.bus_read(CONFIG_OFFSET) == 15

    def test_config_keeps_five_bits(self):
        m = fresh()
        m.bus_write(CONFIG_OFFSET, 0xFF)
        assert m.bus_read(CONFIG_OFFSET) == 0x1F

    def test_status_reflects_saturation(self):
        m = fresh()
        op = find_op(Family.FIX_64_32, RN, True)
        m.bus_write(CONFIG_OFFSET, 0)  # drop 1 bit
        m.bus_write(op.arg_lo, 0xFFFFFFFF)
        m.bus_write(op.arg_hi, 0x7FFFFFFF)  # huge positive 64-bit value
        assert m.bus_read(op.result) == 0x7FFFFFFF
        assert m.bus_read(STATUS_OFFSET) == 1
        m.bus_write(op.arg_lo, 4)
        m.bus_write(op.arg_hi, 0)
        m.bus_read(op.result)
        assert m.bus_read(STATUS_OFFSET) == 0

    def test_sixteen_bit_family_uses_low_half(self):
        m = fresh()
        op = find_op(Family.FIX_16_16, RN, True)
        m.bus_write(CONFIG_OFFSET, 3)  # drop 4 bits
        m.bus_write(op.arg_lo, 0xABCD8000)  # upper junk must be ignored
        assert m.bus_read(op.result) == ((-0x8000 >> 4) + 0) & 0xFFFFFFFF


class TestTiming:
    def test_64_bit_write_round_read_is_four_cycles(self):
        m = fresh()
        op = find_op(Family.FIX_64_32, RN, True)
        m.bus_write(op.arg_lo, 0x18000)
        assert m.cycle == 1
        m.bus_write(op.arg_hi, 0)
        assert m.cycle == 2
        m.bus_read(op.result)
        assert m.cycle == 4  # the round occupied cycle 3

    def test_32_bit_write_round_read_is_three_cycles(self):
        m = fresh()
        op = find_op(Family.FIX_32_32, RN, False)
        m.bus_write(op.arg_lo, 0x18000)
        assert m.cycle == 1
        m.bus_read(op.result)
        assert m.cycle == 3

    def test_all_family_latencies(self):
        latencies = measure_latencies()
        for op in OPS:
            expected = 4 if op.family is Family.FIX_64_32 else 3
            assert latencies[op.name] == expected

    def test_write_while_busy_stalls(self):
        m = fresh()
        op = find_op(Family.FIX_32_32, RN, False)
        m.bus_write(op.arg_lo, 1)  # trigger at cycle 1, round at cycle 2
        m.bus_write(CONFIG_OFFSET, 3)
        assert m.cycle == 3  # stalled past the round cycle

    def test_config_written_after_trigger_cannot_reach_the_round(self):
        results = []
        for touch_config in (False, True):
            m = fresh(seed=5)
            op = find_op(Family.FIX_32_32, SR, False)
            m.bus_write(CONFIG_OFFSET, 16)
            m.bus_write(op.arg_lo, 0xDEADBEEF)
            if touch_config:
                m.bus_write(CONFIG_OFFSET, 1)
            results.append(m.bus_read(op.result))
        assert results[0] == results[1]


class TestFaults:
    def test_unmapped_offsets(self):
        m = fresh()
        with pytest.raises(BusError):
            m.bus_write(0x8, 0)
        with pytest.raises(BusError):
            m.bus_read(0x8)
        with pytest.raises(BusError):
            m.bus_read(0x1000)

    def test_result_is_read_only(self):
        op = find_op(Family.FIX_32_32, RN, True)
        with pytest.raises(BusError):
            fresh().bus_write(op.result, 1)

    def test_status_is_read_only(self):
        with pytest.raises(BusError):
            fresh().bus_write(STATUS_OFFSET, 1)

    def test_args_are_write_only(self):
        op = find_op(Family.FIX_32_32, RN, True)
        with pytest.raises(BusError):
            fresh().bus_read(op.arg_lo)

    def test_result_before_any_operation_is_a_protocol_error(self):
        op = find_op(Family.FIX_32_32, RN, True)
        with pytest.raises(ProtocolError):
            fresh().bus_read(op.result)

    def test_arg_width_validated(self):
        with pytest.raises(ValueError):
            RoundingAccelerator(random_width=4)


class TestDatapath:
    def test_matches_library_for_every_operation(self):
        outcome = sim_differential_oracle(stimuli=500, seed=11)
        assert outcome.passed, outcome.detail

    @pytest.mark.parametrize("width", [8, 16])
    def test_narrow_random_widths_match_library(self, width):
        outcome = sim_differential_oracle(stimuli=300, seed=12, random_width=width)
        assert outcome.passed, outcome.detail

    def test_signed_negative_value_rounds_like_the_library(self):
        m = fresh(seed=3)
        op = find_op(Family.FIX_64_32, SR, True)
        m.bus_write(CONFIG_OFFSET, 15)  # drop 16
        m.bus_write(op.arg_lo, 0xFFFE8000)
        m.bus_write(op.arg_hi, 0xFFFFFFFF)  # -0x18000
        got = m.bus_read(op.result)
        spec = RoundSpec(SR, 16)
        expected = round_fixed(-0x18000, spec, Jkiss32(3)).value & 0xFFFFFFFF
        assert got == expected

    def test_bf16_block(self):
        m = fresh()
        op = find_op(Family.B32_BF16, RN, None)
        m.bus_write(op.arg_lo, 0x3F808000)
        assert m.bus_read(op.result) == 0x3F81


class TestScripts:
    def test_canonical_64_bit_sequence_log(self):
        m = fresh()
        op = find_op(Family.FIX_64_32, RN, True)
        log = m.run_script(
            f"# two writes, one read; reset config drops a single bit\n"
            f"W {op.arg_lo:x} 18000\n"
            f"W {op.arg_hi:x} 0\n"
            f"R {op.result:x}\n")
        assert [t.cycle for t in log] == [1, 2, 4]
        assert log[-1].data == 0x18000 >> 1

    def test_expect_pass_and_log_csv(self, tmp_path):
        m = fresh()
        op = find_op(Family.FIX_32_32, RN, True)
        log = m.run_script([
            "W 0 f",
            f"W {op.arg_lo:x} 18000",
            f"R {op.result:x}",
            "E 2",
        ])
        assert [t.op for t in log] == ["W", "W", "R", "E"]
        assert log[-1].status == "pass"
        path = tmp_path / "log.csv"
        write_log_csv(log, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "cycle,op,offset,data,status"
        assert len(lines) == 5

    def test_expect_failure_aborts_with_diff(self):
        m = fresh()
        op = find_op(Family.FIX_32_32, RN, True)
        with pytest.raises(ScriptError) as err:
            m.run_script([
                "W 0 f",
                f"W {op.arg_lo:x} 18000",
                f"R {op.result:x}",
                "E 3",
                f"R {op.result:x}",  # never reached
            ])
        assert "expected 0x00000003" in str(err.value)
        assert err.value.log[-1].status == "fail"

    def test_expect_without_read_rejected(self):
        with pytest.raises(ScriptError):
            fresh().run_script(["E 0"])

    def test_unparseable_line_rejected(self):
        with pytest.raises(ScriptError):
            fresh().run_script(["W 0"])

    def test_empty_script_leaves_cycle_alone(self):
        m = fresh()
        assert m.run_script("") == []
        assert m.cycle == 0

    def test_bus_fault_aborts_with_context(self):
        with pytest.raises(ScriptError) as err:
            fresh().run_script(["W 8 0"])
        assert "unmapped" in str(err.value)

    def test_same_script_same_seed_same_log(self):
        op = find_op(Family.FIX_32_32, SR, False)
        script = ["W 0 10", f"W {op.arg_lo:x} deadbeef", f"R {op.result:x}"] * 5
        log_a = fresh(seed=21).run_script(script)
        log_b = fresh(seed=21).run_script(script)
        assert [(t.cycle, t.op, t.offset, t.data) for t in log_a] == \
               [(t.cycle, t.op, t.offset, t.data) for t in log_b]

    def test_replay_of_nearest_rounded_reciprocals(self):
        # Drive the unsigned 32->32 nearest block with the first reciprocal
        # addends of the summation experiment and expect library outputs.
        op = find_op(Family.FIX_32_32, RN, False)
        spec = RoundSpec(RN, 17, in_signed=False, out_signed=False,
                         in_bits=32, out_bits=32)
        lines = ["W 0 10"]  # n = 17
        for i in range(2, 11):
            recip = reciprocal_fixed(i, 32)
            expected = round_fixed(recip, spec).value
            lines.append(f"W {op.arg_lo:x} {recip:x}")
            lines.append(f"R {op.result:x}")
            lines.append(f"E {expected:x}")
        log = fresh().run_script(lines)
        assert all(t.status == "pass" for t in log if t.op == "E")
