import pytest

from srkit import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Compile the numba kernels up front so per-test timing reflects the
    # computation, not JIT warmup.
    kernels.warm_jit()
