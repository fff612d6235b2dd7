"""
Precision configuration and the complex special functions shared by the analytic
modules: Euler's gamma, the upper incomplete gamma Γ(s, x) and the Euler constant.

Γ(s, x) is split the usual way: a Legendre continued fraction evaluated with the
modified Lentz method for x >= |s| + 1, and Γ(s) minus the lower incomplete series
below that. Close to a non-positive integer s = -m the pole of Γ(s) and the pole of
the m-th series term are cancelled analytically, which is what lets the lattice
integrals be evaluated at s = 0, -1, -2, ...
"""
from dataclasses import dataclass
from typing import Union
import cmath
import logging
import math

import numpy as np
from scipy import special

from .common import (ITERATION_CAP, ConfigError, ConvergenceError, DomainError,
                     PoleError, ensure_finite)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# below this |h| the expm1/log1p style helpers switch to their Taylor polynomials
_SMALL = 1e-3
_TINY = 1e-300


@dataclass(frozen=True)
class PrecisionConfig:
    """
    Accuracy knobs of every analytic operation.

    truncation_radius_factor: lattice sums include at least the γ with |γ|² <= factor·A
    quad_tol: termination tolerance of series and continued fractions
    target_abs_error: accuracy advertised for top level results

    Example
    ------
    >>> PrecisionConfig().quad_tol < PrecisionConfig().target_abs_error
    True
    >>> PrecisionConfig(truncation_radius_factor=5)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    ConfigError: truncation_radius_factor must be >= 10, got 5
    """

    truncation_radius_factor: float = 80.0
    quad_tol: float = 1e-14
    target_abs_error: float = 1e-9

    def __post_init__(self):
        if not self.truncation_radius_factor >= 10:
            raise ConfigError(
                f"truncation_radius_factor must be >= 10, got {self.truncation_radius_factor}")
        if not 0 < self.quad_tol < self.target_abs_error < 1:
            raise ConfigError(
                "need 0 < quad_tol < target_abs_error < 1, got "
                f"quad_tol={self.quad_tol}, target_abs_error={self.target_abs_error}")

    @property
    def working_tol(self) -> float:
        """quad_tol, floored at a few ulps of the double format"""
        return max(self.quad_tol, 4 * np.finfo(float).eps)


DEFAULT_CONFIG = PrecisionConfig()


def euler_constant() -> float:
    """
    Euler's constant c = lim (1 + 1/2 + ... + 1/n - log n).

    >>> 0.577 < euler_constant() < 0.578
    True
    """
    return float(np.euler_gamma)


def _nonpositive_integer_near(s: complex, radius: float):
    """Return m >= 0 with |s + m| < radius, or None"""
    m = int(round(-s.real))
    if m >= 0 and abs(s + m) < radius:
        return m
    return None


def gamma(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    Euler's gamma function on complex arguments.

    Example
    ------
    >>> round(gamma(5).real, 10)
    24.0
    >>> round(gamma(0.5).real, 10)
    1.7724538509
    >>> gamma(-2)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    PoleError: gamma has a pole at s = -2
    """
    s = complex(s)
    m = _nonpositive_integer_near(s, cfg.quad_tol)
    if m is not None:
        raise PoleError(f"gamma has a pole at s = {-m}")
    return ensure_finite(complex(special.gamma(s)), "gamma(s)")


def _expm1_poly(h):
    return h * (1 + h / 2 * (1 + h / 3 * (1 + h / 4 * (1 + h / 5 * (1 + h / 6)))))


def _expm1(h: complex) -> complex:
    if abs(h) < _SMALL:
        return _expm1_poly(h)
    return cmath.exp(h) - 1


def _expm1_array(h: np.ndarray) -> np.ndarray:
    small = np.abs(h) < _SMALL
    return np.where(small, _expm1_poly(h), np.exp(np.where(small, 0, h)) - 1)


def _log1p(z: complex) -> complex:
    if abs(z) < _SMALL:
        return z * (1 - z * (1 / 2 - z * (1 / 3 - z * (1 / 4 - z / 5))))
    return cmath.log(1 + z)


def gamma_regular_part(m: int, eps: complex) -> complex:
    """
    (-1)^m m! Γ(-m + eps) - 1/eps, the part of Γ left after removing its pole at -m.
    Analytic in eps; at eps = 0 it equals the digamma value ψ(m + 1).

    >>> round(gamma_regular_part(0, 0).real, 12) == round(-euler_constant(), 12)
    True
    >>> abs(gamma_regular_part(0, 0.1) - (gamma(0.1) - 10)) < 1e-12
    True
    """
    eps = complex(eps)
    if eps == 0:
        return complex(special.digamma(m + 1))
    g = complex(special.loggamma(1 + eps)) - sum(_log1p(-eps / j) for j in range(1, m + 1))
    return _expm1(g) / eps


def lower_incomplete_gamma_series(s: complex, x: np.ndarray, tol: float) -> np.ndarray:
    """
    γ(s, x) = x^s e^{-x} Σ_n x^n / (s (s+1) ... (s+n)), summed until every entry of
    x has converged to tol.

    >>> x = np.array([0.5, 1.0])
    >>> vals = lower_incomplete_gamma_series(1, x, 1e-15)
    >>> bool(np.allclose(vals, 1 - np.exp(-x)))
    True
    """
    s = complex(s)
    x = np.asarray(x, dtype=float)
    term = np.full(x.shape, 1 / s, dtype=complex)
    total = term.copy()
    for n in range(1, ITERATION_CAP + 1):
        term = term * x / (s + n)
        total = total + term
        if np.all(np.abs(term) <= tol * np.abs(total)):
            break
    else:
        raise ConvergenceError(f"lower incomplete gamma series at s={s} did not converge")
    return total * np.exp(-x + s * np.log(x))


def _continued_fraction(s: complex, x: np.ndarray, tol: float) -> np.ndarray:
    """Legendre continued fraction by the modified Lentz method, vectorised over x"""
    b = x + 1.0 - s
    c = np.full(x.shape, 1.0 / _TINY, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, ITERATION_CAP + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active = active & (np.abs(delta - 1.0) >= tol)
        if not active.any():
            logger.debug("continued fraction for s=%s converged after %d steps", s, i)
            break
    else:
        raise ConvergenceError(f"continued fraction for Γ({s}, x) did not converge")
    return np.exp(-x + s * np.log(x)) * h


def _near_pole_series(s: complex, m: int, x: np.ndarray, tol: float) -> np.ndarray:
    """
    Γ(s, x) for s = -m + eps with small eps, using
    Γ(s) - Σ_k (-1)^k x^{s+k} / (k! (s+k)) with the k = m term merged into Γ(s).
    """
    eps = s + m
    log_x = np.log(x)
    if eps == 0:
        power_part = log_x.astype(complex)
    else:
        power_part = _expm1_array(eps * log_x) / eps
    sign = -1.0 if m % 2 else 1.0
    merged = sign / math.factorial(m) * (gamma_regular_part(m, eps) - power_part)

    total = np.zeros(x.shape, dtype=complex)
    # x^{s+k}/k!, built up incrementally
    weight = np.exp(s * log_x)
    for k in range(ITERATION_CAP):
        if k > 0:
            weight = weight * x / k
        if k == m:
            continue
        term = (-1.0) ** k * weight / (s + k)
        total = total + term
        if k > m and np.all(np.abs(term) <= tol * np.maximum(1.0, np.abs(total))):
            break
    else:
        raise ConvergenceError(f"series for Γ({s}, x) did not converge")
    return merged - total


def upper_incomplete_gamma_array(s: complex, x: ArrayLike,
                                 cfg: PrecisionConfig = DEFAULT_CONFIG) -> np.ndarray:
    """
    Γ(s, x) = ∫_x^∞ e^{-t} t^{s-1} dt for one complex s and an array of x > 0.

    Example
    ------
    >>> vals = upper_incomplete_gamma_array(1, np.array([0.5, 2.0, 30.0]))
    >>> bool(np.allclose(vals, np.exp(-np.array([0.5, 2.0, 30.0])), rtol=1e-13))
    True
    """
    s = complex(s)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)):
        raise DomainError("upper incomplete gamma needs x > 0")
    tol = cfg.working_tol
    out = np.empty(x.shape, dtype=complex)

    use_cf = x >= abs(s) + 1.0
    if use_cf.any():
        out[use_cf] = _continued_fraction(s, x[use_cf], tol)
    small = ~use_cf
    if small.any():
        m = _nonpositive_integer_near(s, 0.25)
        if m is not None:
            out[small] = _near_pole_series(s, m, x[small], tol)
        else:
            out[small] = gamma(s, cfg) - lower_incomplete_gamma_series(s, x[small], tol)

    if not np.all(np.isfinite(out)):
        raise ConvergenceError(f"Γ({s}, x) produced non-finite values")
    return out


def upper_incomplete_gamma(s: complex, x: float,
                           cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    Scalar form of upper_incomplete_gamma_array.

    Example
    ------
    >>> round(upper_incomplete_gamma(0, 1).real, 10)
    0.2193839344
    >>> abs(upper_incomplete_gamma(2, 1) - 2 / math.e) < 1e-14
    True
    """
    if not x > 0:
        raise DomainError(f"upper incomplete gamma needs x > 0, got {x}")
    return complex(upper_incomplete_gamma_array(s, np.array([float(x)]), cfg)[0])


if __name__ == "__main__":
    import doctest
    doctest.testmod()
