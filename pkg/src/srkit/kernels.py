"""Hot numeric loops with two interchangeable backends.

``numba``: the loop kernels below are JIT-compiled as written (default when
numba imports). ``numpy``: vectorized equivalents of the same arithmetic;
the only serial remnant is the random stream itself, which is generated by
the plain-Python loop and is therefore much slower for stochastic runs.

The default backend comes from the SRKIT_BACKEND environment variable
("auto", "numba" or "numpy", read once at import); every entry point also
takes an explicit ``backend=`` override. Both paths are bit-identical,
which the test suite checks; ``benchmarks/bench_backends.py`` compares
their speed.

All fixed-point state lives in int64/uint64 with explicit 32-bit masking,
so results are exact and platform-independent.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency by default
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            fn.py_func = fn
            return fn

        return wrap if not (args and callable(args[0])) else wrap(args[0])


_M32 = np.uint64(0xFFFFFFFF)
_WEYL = np.uint64(1411392427)

MODE_RD = 0
MODE_RN = 1
MODE_SR_ADD = 2
MODE_SR_CMP = 3


def _resolve(choice: str) -> str:
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("SRKIT_BACKEND=numba but numba is not importable")
        return "numba"
    if choice == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    raise ValueError(f"unknown backend {choice!r}, expected auto, numba or numpy")


DEFAULT_BACKEND = _resolve(os.environ.get("SRKIT_BACKEND", "auto").strip().lower())


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def _pick(backend: str | None) -> str:
    return _resolve(backend.strip().lower()) if backend is not None else DEFAULT_BACKEND


def state_array(state: tuple[int, int, int, int, int]) -> np.ndarray:
    """JKISS32 state tuple as the uint64[5] vector the kernels mutate."""
    return np.array(state, dtype=np.uint64)


# ---------------------------------------------------------------------------
# JKISS32 block generation


@njit(cache=True)
def _jkiss32_fill(state, out):
    x, y, z, w, c = state[0], state[1], state[2], state[3], state[4]
    for k in range(out.shape[0]):
        y ^= (y << np.uint64(5)) & _M32
        y ^= y >> np.uint64(7)
        y ^= (y << np.uint64(22)) & _M32
        t = (z + w + c) & _M32
        z = w
        c = t >> np.uint64(31)
        w = t & np.uint64(0x7FFFFFFF)
        x = (x + _WEYL) & _M32
        out[k] = (x + y + w) & _M32
    state[0], state[1], state[2], state[3], state[4] = x, y, z, w, c


def jkiss32_block(state: np.ndarray, count: int, backend: str | None = None) -> np.ndarray:
    """Draw ``count`` JKISS32 words, advancing ``state`` in place."""
    out = np.empty(count, dtype=np.uint64)
    if _pick(backend) == "numba":
        _jkiss32_fill(state, out)
    else:
        _jkiss32_fill.py_func(state, out)
    return out


# ---------------------------------------------------------------------------
# Harmonic-series recursive summation


@njit(cache=True)
def _harmonic_loop(frac_bits, drop_bits, mode, state, n_iters, checkpoints,
                   sum_min, sum_max):
    x, y, z, w, c = state[0], state[1], state[2], state[3], state[4]
    one = np.uint64(1)
    drop = np.uint64(drop_bits)
    mask = (one << drop) - one
    half = one << (drop - one)
    unit = one << np.uint64(frac_bits)
    s = np.int64(1) << np.int64(frac_bits - drop_bits)  # the sum starts at 1.0
    conv = np.int64(0)
    saturated = False
    cp_sums = np.zeros(checkpoints.shape[0], dtype=np.int64)
    cp_idx = 0
    n_cp = checkpoints.shape[0]
    for i in range(2, n_iters + 1):
        recip = unit // np.uint64(i)
        if mode == MODE_RD:
            add = np.int64(recip >> drop)
        elif mode == MODE_RN:
            add = np.int64((recip + half) >> drop)
        else:
            y ^= (y << np.uint64(5)) & _M32
            y ^= y >> np.uint64(7)
            y ^= (y << np.uint64(22)) & _M32
            t = (z + w + c) & _M32
            z = w
            c = t >> np.uint64(31)
            w = t & np.uint64(0x7FFFFFFF)
            x = (x + _WEYL) & _M32
            p = ((x + y + w) & _M32) & mask
            if mode == MODE_SR_ADD:
                add = np.int64((recip + p) >> drop)
            else:
                up = one if p < (recip & mask) else np.uint64(0)
                add = np.int64((recip >> drop) + up)
        s2 = s + add
        if s2 > sum_max:
            s2 = sum_max
            saturated = True
        elif s2 < sum_min:
            s2 = sum_min
            saturated = True
        s = s2
        if conv == 0:
            if mode >= MODE_SR_ADD:
                if recip == np.uint64(0):
                    conv = i
            elif add == 0:
                conv = i
        if cp_idx < n_cp and i == checkpoints[cp_idx]:
            cp_sums[cp_idx] = s
            cp_idx += 1
    state[0], state[1], state[2], state[3], state[4] = x, y, z, w, c
    return cp_sums, s, conv, saturated


def _harmonic_numpy(frac_bits, drop_bits, mode, state, n_iters, checkpoints,
                    sum_min, sum_max, chunk=1 << 20):
    unit = 1 << frac_bits
    mask = (1 << drop_bits) - 1
    half = 1 << (drop_bits - 1)
    s = 1 << (frac_bits - drop_bits)
    conv = 0
    saturated = False
    cp_sums = np.zeros(len(checkpoints), dtype=np.int64)
    cp_idx = 0
    i = 2
    while i <= n_iters:
        hi = min(i + chunk, n_iters + 1)
        ivec = np.arange(i, hi, dtype=np.uint64)
        recip = np.uint64(unit) // ivec
        if mode == MODE_RD:
            adds = recip >> np.uint64(drop_bits)
        elif mode == MODE_RN:
            adds = (recip + np.uint64(half)) >> np.uint64(drop_bits)
        else:
            draws = jkiss32_block(state, len(ivec), backend="numpy") & np.uint64(mask)
            if mode == MODE_SR_ADD:
                adds = (recip + draws) >> np.uint64(drop_bits)
            else:
                up = (draws < (recip & np.uint64(mask))).astype(np.uint64)
                adds = (recip >> np.uint64(drop_bits)) + up
        adds = adds.astype(np.int64)
        # Addends are non-negative, so the saturating accumulation is just a
        # clamped prefix sum.
        running = np.cumsum(adds) + s
        if running[-1] > sum_max:
            np.minimum(running, sum_max, out=running)
            saturated = True
        if conv == 0:
            hits = (recip == np.uint64(0)) if mode >= MODE_SR_ADD else (adds == 0)
            if hits.any():
                conv = i + int(np.argmax(hits))
        while cp_idx < len(checkpoints) and checkpoints[cp_idx] < hi:
            cp_sums[cp_idx] = running[checkpoints[cp_idx] - i]
            cp_idx += 1
        s = int(running[-1])
        i = hi
    return cp_sums, s, conv, saturated


def harmonic_run(frac_bits: int, drop_bits: int, mode: int, state: np.ndarray,
                 n_iters: int, checkpoints: np.ndarray, sum_min: int, sum_max: int,
                 backend: str | None = None):
    """One recursive-summation run over truncated fixed-point reciprocals.

    Returns (checkpoint sums, final sum, convergence iteration or 0,
    saturated flag); sums are raw fixed-point integers. ``state`` is the
    JKISS32 state vector and is advanced by one draw per iteration in the
    stochastic modes, zero draws otherwise.
    """
    cps = np.asarray(checkpoints, dtype=np.int64)
    if _pick(backend) == "numba":
        cp_sums, s, conv, saturated = _harmonic_loop(
            frac_bits, drop_bits, mode, state, n_iters, cps,
            np.int64(sum_min), np.int64(sum_max))
        return cp_sums, int(s), int(conv), bool(saturated)
    cp_sums, s, conv, saturated = _harmonic_numpy(
        frac_bits, drop_bits, mode, state, n_iters, cps, sum_min, sum_max)
    return cp_sums, s, conv, saturated


@njit(cache=True)
def _binary64_recursive_sum(n_iters):
    s = 1.0
    for i in range(2, n_iters + 1):
        s += 1.0 / i
    return s


def binary64_recursive_sum(n_iters: int, backend: str | None = None) -> float:
    """Double-precision recursive harmonic sum (order matters, no pairwise tricks)."""
    if _pick(backend) == "numba":
        return float(_binary64_recursive_sum(n_iters))
    return float(_binary64_recursive_sum.py_func(n_iters))


# ---------------------------------------------------------------------------
# Exhaustive stochastic-rounding scans


@njit(cache=True)
def _sr_sum_scan(n_max, x_lo, x_hi, alg):
    # Sum of rounded outputs over every random word must reproduce x exactly.
    for n in range(1, n_max + 1):
        space = 1 << n
        mask = space - 1
        for x in range(x_lo, x_hi):
            acc = 0
            if alg == 0:
                for p in range(space):
                    acc += (x + p) >> n
            else:
                r = x & mask
                base = x >> n
                for p in range(space):
                    acc += base + (1 if p < r else 0)
            if acc != x:
                return False, n, x
    return True, 0, 0


def _sr_sum_scan_numpy(n_max, x_lo, x_hi, alg):
    xs = np.arange(x_lo, x_hi, dtype=np.int64)
    for n in range(1, n_max + 1):
        space = 1 << n
        acc = np.zeros_like(xs)
        if alg == 0:
            for p in range(space):
                acc += (xs + p) >> n
        else:
            res = xs & (space - 1)
            base = xs >> n
            for p in range(space):
                acc += base + (p < res)
        bad = acc != xs
        if bad.any():
            return False, n, int(xs[int(np.argmax(bad))])
    return True, 0, 0


def sr_sum_scan(n_max: int, x_lo: int, x_hi: int, alg: int,
                backend: str | None = None) -> tuple[bool, int, int]:
    """Exhaustive unbiasedness check for one algorithm (0 addition, 1 comparison).

    For every x in [x_lo, x_hi) and every n <= n_max, sums the rounded output
    over all 2**n random words and compares against x (the exact-rational mean
    condition cleared of its 2**n denominator). Returns (ok, bad_n, bad_x).
    Saturation cannot trigger on this domain and is omitted.
    """
    if _pick(backend) == "numba":
        ok, n, x = _sr_sum_scan(n_max, x_lo, x_hi, alg)
        return bool(ok), int(n), int(x)
    return _sr_sum_scan_numpy(n_max, x_lo, x_hi, alg)


@njit(cache=True)
def _roundup_counts(n, w, alg):
    space = 1 << min(n, w)
    shift = n - w if w < n else 0
    counts = np.zeros(1 << n, dtype=np.int64)
    for r in range(1 << n):
        c = 0
        for p in range(space):
            aligned = p << shift
            if alg == 0:
                if r + aligned >= (1 << n):
                    c += 1
            else:
                if aligned < r:
                    c += 1
        counts[r] = c
    return counts


def _roundup_counts_numpy(n, w, alg):
    space = 1 << min(n, w)
    shift = n - w if w < n else 0
    aligned = (np.arange(space, dtype=np.int64) << shift)[None, :]
    rs = np.arange(1 << n, dtype=np.int64)[:, None]
    if alg == 0:
        hits = rs + aligned >= (1 << n)
    else:
        hits = aligned < rs
    return hits.sum(axis=1).astype(np.int64)


def roundup_counts(n: int, w: int, alg: int, backend: str | None = None) -> np.ndarray:
    """Round-up counts per residual over the full random space 2**min(n, w)."""
    if _pick(backend) == "numba":
        return _roundup_counts(n, w, alg)
    return _roundup_counts_numpy(n, w, alg)


# ---------------------------------------------------------------------------
# bfloat16 stochastic rounding counts


@njit(cache=True)
def _bf16_roundup_counts(magnitudes):
    counts = np.zeros(magnitudes.shape[0], dtype=np.int64)
    for j in range(magnitudes.shape[0]):
        mag = magnitudes[j]
        base = mag >> np.uint64(16)
        c = 0
        for p in range(1 << 16):
            if (mag + np.uint64(p)) >> np.uint64(16) > base:
                c += 1
        counts[j] = c
    return counts


def _bf16_roundup_counts_numpy(magnitudes):
    draws = np.arange(1 << 16, dtype=np.uint64)
    counts = np.empty(len(magnitudes), dtype=np.int64)
    for j, mag in enumerate(magnitudes):
        counts[j] = int(((mag + draws) >> np.uint64(16) > (mag >> np.uint64(16))).sum())
    return counts


def bf16_roundup_counts(patterns: np.ndarray, backend: str | None = None) -> np.ndarray:
    """For each finite binary32 pattern, how many of the 2**16 random words round up."""
    mags = np.asarray(patterns, dtype=np.uint64) & np.uint64(0x7FFFFFFF)
    if _pick(backend) == "numba":
        return _bf16_roundup_counts(mags)
    return _bf16_roundup_counts_numpy(mags)


def warm_jit() -> None:
    """Compile the numba kernels on tiny inputs (no-op on the numpy backend)."""
    if not HAVE_NUMBA:
        return
    st = state_array((1, 2, 3, 4, 0))
    jkiss32_block(st, 1, backend="numba")
    harmonic_run(16, 9, MODE_SR_ADD, st, 4, np.array([3], dtype=np.int64),
                 -(1 << 15), (1 << 15) - 1, backend="numba")
    harmonic_run(16, 9, MODE_RN, st, 4, np.array([3], dtype=np.int64),
                 -(1 << 15), (1 << 15) - 1, backend="numba")
    sr_sum_scan(1, 0, 2, 0, backend="numba")
    sr_sum_scan(1, 0, 2, 1, backend="numba")
    roundup_counts(2, 1, 0, backend="numba")
    bf16_roundup_counts(np.array([0x3F800000], dtype=np.uint64), backend="numba")
    binary64_recursive_sum(4, backend="numba")
