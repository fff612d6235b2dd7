import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from eklimit.common import ConfigError, PoleError
from eklimit.numeric import (PrecisionConfig, euler_constant, gamma, gamma_regular_part,
                             lower_incomplete_gamma_series, upper_incomplete_gamma,
                             upper_incomplete_gamma_array)


def mp_gammainc(s: complex, x: float) -> complex:
    return complex(mpmath.gammainc(mpmath.mpc(s.real, s.imag), x))


def test_incomplete_gamma_matches_mpmath_on_both_branches():
    rng = np.random.default_rng(7)
    for _ in range(40):
        s = complex(rng.uniform(-4, 4), rng.uniform(-3, 3))
        x = float(rng.uniform(0.05, 25))
        if min(abs(s + m) for m in range(5)) < 1e-3:
            continue
        value = upper_incomplete_gamma(s, x)
        expected = mp_gammainc(s, x)
        assert abs(value - expected) <= 1e-10 * max(1.0, abs(expected))


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_incomplete_gamma_at_and_near_nonpositive_integers(m):
    for eps in (0.0, 1e-9, -1e-6, 1e-3j):
        s = -m + eps
        for x in (0.1, 0.7, 2.5):
            expected = mp_gammainc(complex(s), x)
            assert abs(upper_incomplete_gamma(s, x) - expected) <= 1e-10 * max(1.0, abs(expected))


def test_incomplete_gamma_against_quadrature():
    for s in (0.5, 2.0, 3.5):
        for x in (0.3, 1.0, 4.0):
            expected, _ = integrate.quad(lambda t: math.exp(-t) * t ** (s - 1), x, np.inf)
            assert abs(upper_incomplete_gamma(s, x) - expected) < 1e-9


def test_array_form_agrees_with_scalar_form():
    xs = np.array([0.2, 1.5, 3.0, 12.0])
    values = upper_incomplete_gamma_array(1.5 + 0.5j, xs)
    for x, v in zip(xs, values):
        assert abs(v - upper_incomplete_gamma(1.5 + 0.5j, x)) < 1e-15 * max(1.0, abs(v))


def test_gamma_poles_raise():
    for m in range(4):
        with pytest.raises(PoleError):
            gamma(-m)


def test_gamma_regular_part_is_continuous_at_zero():
    for m in range(4):
        at_zero = gamma_regular_part(m, 0)
        assert abs(gamma_regular_part(m, 1e-8) - at_zero) < 1e-6
        assert abs(at_zero - complex(mpmath.digamma(m + 1))) < 1e-14


def test_euler_constant():
    assert abs(euler_constant() - float(mpmath.euler)) < 1e-16


def test_precision_config_validation():
    with pytest.raises(ConfigError):
        PrecisionConfig(quad_tol=1e-8, target_abs_error=1e-9)
    with pytest.raises(ConfigError):
        PrecisionConfig(truncation_radius_factor=2)
    assert PrecisionConfig(truncation_radius_factor=40).truncation_radius_factor == 40


def test_lower_series_completes_gamma():
    s = 1.5 + 0.7j
    x = np.array([0.1, 0.8, 2.0])
    lower = lower_incomplete_gamma_series(s, x, 1e-15)
    for xi, value in zip(x, lower):
        expected = complex(mpmath.gammainc(mpmath.mpc(s.real, s.imag), 0, xi))
        assert abs(value - expected) <= 1e-12 * abs(expected)
