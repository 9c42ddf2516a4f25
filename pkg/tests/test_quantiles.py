import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levinfer.quantiles import normal_cdf, normal_quantile, t_cdf, t_quantile

from oracles import mp_normal_quantile, mp_t_cdf, mp_t_quantile

# frozen from the high-precision oracle
Z_975 = 1.9599639845400538
Z_75 = 0.6744897501960817
T_FROZEN = {
    (0.975, 1): 12.706204736174694,
    (0.995, 1): 63.656741162871526,
    (0.975, 2): 4.302652729749462,
    (0.995, 2): 9.92484320091829,
    (0.75, 2): 0.816496580927726,
    (0.975, 10): 2.2281388519862744,
    (0.995, 10): 3.169272672616951,
    (0.975, 1000): 1.962339080826408,
    (0.975, 10**6): 1.9599663568141066,
}


def test_normal_examples():
    assert normal_quantile(0.5) == 0.0
    assert abs(normal_quantile(0.975) - Z_975) < 1e-12
    assert abs(normal_quantile(0.75) - Z_75) < 1e-12
    assert abs(normal_quantile(0.025) + Z_975) < 1e-12


def test_t_examples():
    assert abs(t_quantile(0.75, 1) - 1.0) < 1e-14
    for k in (1, 2, 5, 30, 10**6):
        assert t_quantile(0.5, k) == 0.0
    assert abs(t_quantile(0.975, 10**6) - 1.95997) < 1e-4
    for (q, k), v in T_FROZEN.items():
        assert abs(t_quantile(q, k) - v) <= 1e-9 * max(1.0, v), (q, k)


def test_frozen_values_agree_with_oracle():
    assert abs(mp_normal_quantile(0.975) - Z_975) < 1e-15
    for (q, k), v in list(T_FROZEN.items())[:4]:
        assert abs(mp_t_quantile(q, k) - v) < 1e-12


@pytest.mark.parametrize("q", [1e-10, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.6, 0.9, 0.97575, 0.999999])
def test_normal_against_oracle(q):
    assert abs(normal_quantile(q) - mp_normal_quantile(q)) < 1e-9


@pytest.mark.parametrize("dof", [1, 2, 3, 4, 7, 30, 250])
@pytest.mark.parametrize("q", [0.01, 0.2, 0.9, 0.999])
def test_t_against_oracle(q, dof):
    ref = mp_t_quantile(q, dof)
    assert abs(t_quantile(q, dof) - ref) <= 1e-8 * max(1.0, abs(ref))


def test_cdf_against_oracle():
    for dof in (1, 2, 5, 40):
        for t in (-3.0, -0.4, 0.0, 1.1, 7.5):
            assert abs(t_cdf(t, dof) - float(mp_t_cdf(t, dof))) < 1e-12
    assert abs(normal_cdf(1.0) - 0.8413447460685429) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6), st.floats(1e-6, 1 - 1e-6), st.sampled_from([1, 2, 3, 9, 100]))
def test_monotone(q1, q2, dof):
    if q1 == q2:
        return
    lo, hi = min(q1, q2), max(q1, q2)
    if hi - lo < 1e-9:
        return
    assert normal_quantile(lo) < normal_quantile(hi)
    assert t_quantile(lo, dof) < t_quantile(hi, dof)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6), st.sampled_from([1, 2, 3, 9, 100]))
def test_symmetry_and_roundtrip(q, dof):
    assert abs(normal_quantile(q) + normal_quantile(1 - q)) < 1e-9
    x = t_quantile(q, dof)
    assert abs(x + t_quantile(1 - q, dof)) <= 1e-8 * max(1.0, abs(x))
    assert abs(t_cdf(x, dof) - q) < 1e-12


def test_t_approaches_normal():
    z = normal_quantile(0.99)
    gaps = [abs(t_quantile(0.99, k) - z) for k in (5, 50, 500, 5000)]
    assert gaps == sorted(gaps, reverse=True)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_invalid_probability(q):
    with pytest.raises(ValueError):
        normal_quantile(q)
    with pytest.raises(ValueError):
        t_quantile(q, 3)


def test_invalid_dof():
    with pytest.raises(ValueError):
        t_quantile(0.9, 0)
    with pytest.raises(ValueError):
        t_quantile(0.9, -2)


def test_outputs_are_python_floats():
    assert type(normal_quantile(0.9)) is float
    assert type(t_quantile(0.9, 4)) is float
    assert np.isfinite(t_quantile(1 - 1e-12, 1))
