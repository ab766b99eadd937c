"""Cross-backend equivalence: the compiled kernels and the pure-python twin
must return identical bits, not merely close values."""

import numpy as np
import pytest

from biasfuse import _kernels_py

cython_kernels = pytest.importorskip(
    "biasfuse._kernels", reason="compiled backend not built"
)


def random_params(rng, n):
    a = rng.random(n)
    b = rng.random(n)
    # sprinkle exact structural zeros/ones, the hard case for log-free math
    for arr in (a, b):
        mask = rng.random(n) < 0.25
        arr[mask] = rng.choice([0.0, 1.0], size=int(mask.sum()))
    rho0 = float(rng.uniform(0.05, 0.95))
    return a, b, rho0, 1.0 - rho0


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
def test_minsum_bit_identical(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(50):
        a, b, rho0, rho1 = random_params(rng, n)
        assert cython_kernels.minsum_total(a, b, rho0, rho1) == (
            _kernels_py.minsum_total(a, b, rho0, rho1)
        )


def test_minsum_bit_identical_large_n():
    rng = np.random.default_rng(200)
    a, b, rho0, rho1 = random_params(rng, 18)
    assert cython_kernels.minsum_total(a, b, rho0, rho1) == (
        _kernels_py.minsum_total(a, b, rho0, rho1)
    )


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_map_table_identical(n):
    rng = np.random.default_rng(300 + n)
    for _ in range(30):
        a, b, rho0, rho1 = random_params(rng, n)
        assert np.array_equal(
            cython_kernels.map_table(a, b, rho0, rho1),
            _kernels_py.map_table(a, b, rho0, rho1),
        )


@pytest.mark.parametrize("n", [1, 4, 9])
def test_sim_indices_identical(n):
    rng = np.random.default_rng(400 + n)
    for _ in range(10):
        a, b, rho0, rho1 = random_params(rng, n)
        u = rng.random((1024, n + 1))
        x_c, i_c = cython_kernels.sim_indices(u, a, b, rho1)
        x_p, i_p = _kernels_py.sim_indices(u, a, b, rho1)
        assert np.array_equal(x_c, x_p)
        assert np.array_equal(i_c, i_p)


def test_input_validation_matches():
    for mod in (cython_kernels, _kernels_py):
        with pytest.raises(ValueError):
            mod.minsum_total(np.array([0.1, 0.2]), np.array([0.1]), 0.6, 0.4)
        with pytest.raises(ValueError):
            mod.sim_indices(np.zeros((4, 3)), np.array([0.1]), np.array([0.1]), 0.4)
