import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
import mpmath

from carpetlab._numerics import (CompensatedSum, compensated_sum, cospi, expipi,
                                 reduce_turns, sinpi, two_sum, wrap2)


def test_wrap2_range():
    r = np.linspace(-50.0, 50.0, 1001)
    w = wrap2(r)
    assert np.all(w >= -1.0) and np.all(w < 1.0)
    assert np.allclose(np.cos(np.pi * w), np.cos(np.pi * r), atol=1e-12)


@pytest.mark.parametrize("k", range(-6, 7))
def test_sinpi_exact_at_integers(k):
    assert sinpi(float(k)) == 0.0


@pytest.mark.parametrize("k", range(-6, 7))
def test_cospi_exact_at_half_integers(k):
    assert cospi(k + 0.5) == 0.0


def test_sinpi_cospi_match_libm():
    r = np.linspace(-3.0, 3.0, 997)
    assert np.max(np.abs(sinpi(r) - np.sin(np.pi * r))) < 1e-14
    assert np.max(np.abs(cospi(r) - np.cos(np.pi * r))) < 1e-14
    assert np.max(np.abs(expipi(r) - np.exp(1j * np.pi * r))) < 1e-14


@settings(max_examples=200, deadline=None)
@given(p=st.integers(-5000, 5000), x=st.floats(0.0, 1.0))
def test_reduce_turns_against_mpmath(p, x):
    mpmath.mp.prec = 200
    exact = mpmath.fmod(mpmath.mpf(p) * mpmath.mpf(x), 2)
    got = reduce_turns(p, x)
    diff = abs(float(mpmath.fmod(exact - got + 1, 2)) - 1.0)
    assert diff < 1e-13


def test_reduce_turns_vectorizes():
    p = np.arange(-10, 11)
    out = reduce_turns(p, 0.3)
    assert out.shape == p.shape


def test_two_sum_is_error_free():
    a, b = 1.0, 1e-17
    s, e = two_sum(a, b)
    assert s == 1.0 and e == 1e-17


def test_compensated_sum_recovers_cancellation():
    terms = [1e16, 1.0, -1e16, 1.0] * 100
    assert compensated_sum(terms) == 200.0
    assert math.fsum(terms) == 200.0


def test_compensated_sum_complex_and_arrays():
    acc = CompensatedSum(np.zeros(3))
    for _ in range(10):
        acc.add(np.array([0.1, 0.1j, 1e-20]))
    out = acc.result()
    assert out.dtype.kind == "c"
    assert np.allclose(out, [1.0, 1.0j, 1e-19], rtol=1e-15, atol=0)
