import statistics

import pytest

from srkit.formats import S8_7, S16_15, parse_format
from srkit.harmonic import (EnsembleResult, HarmonicConfig, REFERENCE_SUM_5M,
                            binary64_recursive_sum, reciprocal_fixed, run_harmonic,
                            run_harmonic_ensemble)
from srkit.kernels import HAVE_NUMBA
from srkit.rounding import RoundMode

SR = RoundMode.SR_ADDITION
RN = RoundMode.RN_TIES_UP
RD = RoundMode.RD_TRUNCATE


def cfg(fmt=S16_15, mode=SR, **kw):
    frac = 32 if fmt is S16_15 else 16
    return HarmonicConfig(sum_format=fmt, div_fraction_bits=frac, mode=mode, **kw)


class TestReciprocal:
    def test_half_is_exact(self):
        assert reciprocal_fixed(2, 32) == 0x80000000

    def test_one_ulp_then_underflow(self):
        assert reciprocal_fixed(1 << 32, 32) == 1
        assert reciprocal_fixed((1 << 32) + 1, 32) == 0

    def test_129_underflows_after_drop(self):
        recip = reciprocal_fixed(129, 16)
        assert recip == 508
        assert recip >> 9 == 0

    def test_validation(self):
        with pytest.raises(ValueError):
            reciprocal_fixed(1, 32)
        with pytest.raises(ValueError):
            reciprocal_fixed(10, 24)


class TestConfig:
    def test_pairing_enforced(self):
        with pytest.raises(ValueError):
            HarmonicConfig(sum_format=S16_15, div_fraction_bits=16)
        with pytest.raises(ValueError):
            HarmonicConfig(sum_format=parse_format("s32.31"), div_fraction_bits=32)

    def test_drop_bits(self):
        assert cfg(S16_15).drop_bits == 17
        assert cfg(S8_7).drop_bits == 9

    def test_checkpoint_validation(self):
        with pytest.raises(ValueError):
            cfg(checkpoints=(10, 5))
        with pytest.raises(ValueError):
            cfg(max_iterations=100, checkpoints=(200,))
        with pytest.raises(ValueError):
            cfg(max_iterations=1)


# Exact final raw sums at five million iterations, frozen from an
# independent arbitrary-precision replay of the summation.
DETERMINISTIC_ROWS = [
    (S16_15, RN, 65537, 391189),   # 11.938140869140625
    (S16_15, RD, 32769, 345785),   # 10.552520751953125
    (S8_7, RN, 257, 821),          # 6.4140625
    (S8_7, RD, 129, 645),          # 5.0390625
]


class TestDeterministicRuns:
    @pytest.mark.parametrize("fmt,mode,conv,raw", DETERMINISTIC_ROWS)
    def test_convergence_and_exact_sum(self, fmt, mode, conv, raw):
        report = run_harmonic(cfg(fmt, mode))
        assert report.convergence_iteration == conv
        assert report.final.raw == raw
        assert not report.sum_saturated

    def test_seed_has_no_effect(self):
        a = run_harmonic(cfg(S8_7, RD, seed=1, max_iterations=50_000))
        b = run_harmonic(cfg(S8_7, RD, seed=999, max_iterations=50_000))
        assert a.final.raw == b.final.raw
        assert a.convergence_iteration == b.convergence_iteration

    def test_sum_constant_after_convergence(self):
        report = run_harmonic(cfg(S8_7, RN, max_iterations=40_000,
                                  checkpoints=(257, 1000, 40_000)))
        values = [cp.raw for cp in report.checkpoint_sums]
        assert values[0] == values[1] == values[2] == report.final.raw


class TestStochasticRuns:
    def test_same_seed_reproduces_bit_exactly(self):
        a = run_harmonic(cfg(seed=7, max_iterations=100_000, checkpoints=(50_000,)))
        b = run_harmonic(cfg(seed=7, max_iterations=100_000, checkpoints=(50_000,)))
        assert a.final.raw == b.final.raw
        assert a.checkpoint_sums == b.checkpoint_sums
        assert statistics.pstdev([a.final.raw, b.final.raw]) == 0

    def test_not_converged_below_reciprocal_underflow(self):
        report = run_harmonic(cfg(seed=1, max_iterations=200_000))
        assert report.convergence_iteration is None
        assert "not converged" in report.describe()

    def test_s8_7_converges_right_after_the_reciprocal_dies(self):
        report = run_harmonic(cfg(S8_7, SR, seed=3, max_iterations=(1 << 16) + 10))
        assert report.convergence_iteration == (1 << 16) + 1

    @pytest.mark.skipif(not HAVE_NUMBA, reason="too slow without numba")
    def test_backends_agree(self):
        reports = [run_harmonic(cfg(seed=13, max_iterations=50_000,
                                    checkpoints=(123, 50_000)), backend=b)
                   for b in ("numba", "numpy")]
        assert reports[0].checkpoint_sums == reports[1].checkpoint_sums
        assert reports[0].final.raw == reports[1].final.raw

    def test_comparison_mode_runs_too(self):
        report = run_harmonic(cfg(mode=RoundMode.SR_COMPARISON, seed=2,
                                  max_iterations=30_000))
        assert report.final.raw > 0


class TestEnsemble:
    def test_validation(self):
        with pytest.raises(ValueError):
            run_harmonic_ensemble(cfg(), 1)
        with pytest.raises(ValueError):
            run_harmonic_ensemble(cfg(mode=RD), 5)

    def test_small_ensemble_statistics(self):
        result = run_harmonic_ensemble(cfg(seed=100, max_iterations=50_000), 5)
        assert isinstance(result, EnsembleResult)
        assert result.seeds == (100, 101, 102, 103, 104)
        assert len(result.final_raws) == 5
        assert result.mean == statistics.fmean(result.final_values)
        assert result.error_vs_reference == REFERENCE_SUM_5M - result.mean
        assert "runs" in result.describe()

    def test_ensemble_is_deterministic(self):
        a = run_harmonic_ensemble(cfg(seed=4, max_iterations=20_000), 3)
        b = run_harmonic_ensemble(cfg(seed=4, max_iterations=20_000), 3)
        assert a.final_raws == b.final_raws
        assert a.std == b.std


class TestReference:
    def test_binary64_recursive_sum_rounds_to_the_pinned_constant(self):
        assert round(binary64_recursive_sum(5_000_000), 3) == REFERENCE_SUM_5M

    def test_checkpoint_rendering(self):
        report = run_harmonic(cfg(S8_7, RD, max_iterations=1000, checkpoints=(500,)))
        cp = report.checkpoint_sums[0]
        assert cp.iteration == 500
        assert cp.value(S8_7) == cp.raw / 128
        assert S8_7.render(cp.raw).count(".") == 1
