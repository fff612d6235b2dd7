"""
Weierstrass σ, ζ, ℘, ℘', the quasi-periods η(γ), e*_{0,2}, the reduced theta
function θ(z) = exp(-e*_{0,2} z²/2) σ(z), its translates θ_{z0}, the Kronecker theta
function Θ(z, w), and the invariants g2, g3, Δ, Δ', e_i of a lattice.

Evaluation works in a Gauss-reduced basis (b1, b2) of the lattice. A point is first
moved to the cell around 0 with the quasi-periodicity of σ, then σ is read off the
Jacobi θ1 series in the nome of τ = b2/b1 (Im τ >= √3/2, so a handful of terms
suffice). g2 and g3 are lattice sums of γ^-4 and γ^-6 summed row by row: each row
Σ_m (u + m b1)^-k has a closed form in 1/sin²(πu/b1) and the rows decay
geometrically.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple
import cmath
import logging
import math

import numpy as np

from .common import ITERATION_CAP, ConsistencyError, ConvergenceError, PoleError, ensure_finite
from .lattice import (Lattice, is_lattice_point, nearest_lattice_point, require_lattice_point,
                      require_off_lattice)
from .numeric import DEFAULT_CONFIG, PrecisionConfig
from .report import VerificationReport, lattice_echo

logger = logging.getLogger(__name__)

# internal cross-checks of build_context; the tests hold the context to tighter bounds
CONTEXT_CHECK_TOL = 1e-8


def gauss_reduce(omega1: complex, omega2: complex) -> Tuple[complex, complex]:
    """
    Reduced, positively oriented basis: |b1| <= |b2| and |Re(b2/b1)| <= 1/2.

    >>> gauss_reduce(1, 5 + 1j)
    ((1+0j), 1j)
    """
    b1, b2 = complex(omega1), complex(omega2)
    for _ in range(ITERATION_CAP):
        b2 -= round((b2 / b1).real) * b1
        if abs(b2) < abs(b1) * (1 - 1e-15):
            # (b1, b2) -> (b2, -b1) keeps the orientation
            b1, b2 = b2, -b1
            continue
        return b1, b2
    raise ConvergenceError("lattice basis reduction did not terminate")


@dataclass(frozen=True, eq=False)
class JacobiSeries:
    """θ1(v | τ) = 2 Σ_n (-1)^n q^{(n+1/2)²} sin((2n+1)v), q = e^{iπτ}, for τ = b2/b1"""

    basis1: complex
    basis2: complex
    coeffs: np.ndarray
    orders: np.ndarray

    @classmethod
    def for_basis(cls, b1: complex, b2: complex) -> "JacobiSeries":
        tau = b2 / b1
        # covers |Im v| up to π·Im τ, a full cell height
        reach = math.pi * tau.imag
        coeffs, orders = [], []
        for n in range(ITERATION_CAP):
            k = 2 * n + 1
            c = 2 * (-1) ** n * cmath.exp(1j * math.pi * tau * (n + 0.5) ** 2)
            coeffs.append(c)
            orders.append(k)
            if abs(c) * math.exp(k * reach) < 1e-18:
                break
        else:
            raise ConvergenceError(f"theta series for tau={tau} does not converge")
        return cls(b1, b2, np.array(coeffs), np.array(orders, dtype=float))

    def derivatives(self, v: complex) -> Tuple[complex, complex, complex, complex]:
        """θ1, θ1', θ1'', θ1''' at v"""
        kv = self.orders * v
        sin_kv, cos_kv = np.sin(kv), np.cos(kv)
        c, k = self.coeffs, self.orders
        return (complex(np.sum(c * sin_kv)),
                complex(np.sum(c * k * cos_kv)),
                complex(-np.sum(c * k ** 2 * sin_kv)),
                complex(-np.sum(c * k ** 3 * cos_kv)))

    def log_derivatives(self, v: complex) -> Tuple[complex, complex, complex]:
        """θ1^(k)/θ1 at v for k = 1, 2, 3"""
        t0, t1, t2, t3 = self.derivatives(v)
        if t0 == 0:
            raise PoleError("θ1 vanishes at a lattice point")
        return t1 / t0, t2 / t0, t3 / t0


def _row_sums(b1: complex, b2: complex) -> Tuple[complex, complex]:
    """Σ* γ^-4 and Σ* γ^-6, summed over rows n·b2 + Z·b1"""
    scale = math.pi / b1
    g4 = scale ** 4 / 45
    g6 = 2 * scale ** 6 / 945
    for n in range(1, ITERATION_CAP):
        k = 1 / np.sin(math.pi * n * b2 / b1) ** 2
        row4 = scale ** 4 * k * (3 * k - 2) / 3
        row6 = scale ** 6 * k * (15 * k * k - 15 * k + 2) / 15
        g4 += 2 * row4
        g6 += 2 * row6
        # measured against the n = 0 row, since g4 or g6 may cancel to 0
        if abs(row4) < 1e-18 * abs(scale) ** 4 and abs(row6) < 1e-18 * abs(scale) ** 6:
            return complex(g4), complex(g6)
    raise ConvergenceError("Eisenstein row sums did not converge")


def lattice_invariants(L: Lattice) -> Tuple[complex, complex]:
    """
    g2 = 60 Σ* γ^-4 and g3 = 140 Σ* γ^-6.

    >>> from eklimit.lattice import gaussian_lattice
    >>> g2, g3 = lattice_invariants(gaussian_lattice())
    >>> round(g2.real, 6), abs(g3) < 1e-10
    (189.07272, True)
    """
    b1, b2 = gauss_reduce(L.omega1, L.omega2)
    s4, s6 = _row_sums(b1, b2)
    return 60 * s4, 140 * s6


@dataclass(frozen=True, eq=False)
class ThetaContext:
    """Everything about a lattice that θ, σ and ℘ evaluations reuse"""

    lattice: Lattice
    jacobi: JacobiSeries
    reduced: Lattice
    eta_reduced: Tuple[complex, complex]
    eta1: complex
    eta2: complex
    e_star_02: complex
    g2: complex
    g3: complex
    delta: complex
    delta_prime: complex
    half_period_values: Tuple[complex, complex, complex]
    cfg: PrecisionConfig

    @property
    def area_param(self) -> float:
        return self.lattice.area_param


def _split(z: complex, reduced: Lattice) -> Tuple[int, int, complex]:
    """z = γ + z_r with γ = m b1 + n b2 nearest to z"""
    m, n = nearest_lattice_point(z, reduced)
    return m, n, z - reduced.point(m, n)


def _sigma_reduced(z: complex, jacobi: JacobiSeries, eta_b1: complex, theta1_prime0: complex) -> complex:
    b1 = jacobi.basis1
    v = math.pi * z / b1
    t0 = jacobi.derivatives(v)[0]
    return (b1 / math.pi) * cmath.exp(eta_b1 * z * z / (2 * b1)) * t0 / theta1_prime0


def _zeta_reduced(z: complex, jacobi: JacobiSeries, eta_b1: complex) -> complex:
    b1 = jacobi.basis1
    r1, _, _ = jacobi.log_derivatives(math.pi * z / b1)
    return eta_b1 * z / b1 + (math.pi / b1) * r1


def _wp_pair_reduced(z: complex, jacobi: JacobiSeries, eta_b1: complex) -> Tuple[complex, complex]:
    b1 = jacobi.basis1
    r1, r2, r3 = jacobi.log_derivatives(math.pi * z / b1)
    scale = math.pi / b1
    wp_value = -eta_b1 / b1 + scale ** 2 * (r1 * r1 - r2)
    wp_prime = scale ** 3 * (3 * r1 * r2 - 2 * r1 ** 3 - r3)
    return wp_value, wp_prime


def build_context(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG) -> ThetaContext:
    """
    Compute and cross-check the cached quantities of a lattice.

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice, eisenstein_lattice
    >>> ctx = build_context(gaussian_lattice())
    >>> abs(ctx.e_star_02) < 1e-12, abs(ctx.g3) < 1e-10
    (True, True)
    >>> abs(build_context(eisenstein_lattice()).g2) < 1e-9
    True
    """
    b1, b2 = gauss_reduce(L.omega1, L.omega2)
    reduced = Lattice(b1, b2)
    jacobi = JacobiSeries.for_basis(b1, b2)

    _, t1_0, _, t3_0 = jacobi.derivatives(0j)
    eta_b1 = -(math.pi ** 2) / (3 * b1) * t3_0 / t1_0
    # η(b2) = 2 ζ(b2/2), read straight off the series without reduction
    eta_b2 = 2 * _zeta_reduced(b2 / 2, jacobi, eta_b1)

    legendre = eta_b1 * b2 - eta_b2 * b1
    if abs(legendre - 2j * math.pi) > CONTEXT_CHECK_TOL * max(1.0, abs(eta_b1 * b2)):
        raise ConsistencyError(f"Legendre relation fails: η1ω2 - η2ω1 = {legendre}")

    def eta_of(gamma: complex) -> complex:
        m, n = nearest_lattice_point(gamma, reduced)
        return m * eta_b1 + n * eta_b2

    eta1, eta2 = eta_of(L.omega1), eta_of(L.omega2)
    A = L.area_param
    e_star_1 = (eta1 - L.omega1.conjugate() / A) / L.omega1
    e_star_2 = (eta2 - L.omega2.conjugate() / A) / L.omega2
    if abs(e_star_1 - e_star_2) > CONTEXT_CHECK_TOL * max(1.0, abs(e_star_1)):
        raise ConsistencyError(
            f"e*_02 depends on the generator: {e_star_1} from ω1, {e_star_2} from ω2")

    g2, g3 = lattice_invariants(L)
    delta = g2 ** 3 - 27 * g3 ** 2

    def wp_at(z: complex) -> complex:
        _, _, zr = _split(z, reduced)
        return _wp_pair_reduced(zr, jacobi, eta_b1)[0]

    e1 = wp_at(L.omega1 / 2)
    e2 = wp_at(L.omega2 / 2)
    e3 = wp_at((L.omega1 + L.omega2) / 2)
    delta_prime = ((e1 - e2) * (e2 - e3) * (e3 - e1)) ** 2
    if abs(delta - 16 * delta_prime) > CONTEXT_CHECK_TOL * abs(delta):
        raise ConsistencyError(f"Δ = {delta} but 16Δ' = {16 * delta_prime}")

    logger.debug("theta context for %s: %d theta terms, e*=%s, Δ=%s",
                 L, len(jacobi.coeffs), e_star_1, delta)
    return ThetaContext(
        lattice=L, jacobi=jacobi, reduced=reduced, eta_reduced=(eta_b1, eta_b2),
        eta1=eta1, eta2=eta2, e_star_02=e_star_1, g2=g2, g3=g3, delta=delta,
        delta_prime=delta_prime, half_period_values=(e1, e2, e3), cfg=cfg)


@lru_cache(maxsize=32)
def cached_context(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG) -> ThetaContext:
    """build_context, memoised per (lattice, config)"""
    return build_context(L, cfg)


def quasi_period(gamma: complex, ctx: ThetaContext) -> complex:
    """
    η(γ) with σ(z + γ) = ±σ(z) exp(η(γ)(z + γ/2)); Z-linear in γ.

    >>> from eklimit.lattice import gaussian_lattice
    >>> ctx = build_context(gaussian_lattice())
    >>> abs(quasi_period(1, ctx) - math.pi) < 1e-12
    True
    """
    require_lattice_point(gamma, ctx.lattice)
    m, n = nearest_lattice_point(gamma, ctx.reduced)
    return m * ctx.eta_reduced[0] + n * ctx.eta_reduced[1]


def _sigma_sign(m: int, n: int) -> int:
    # +1 on 2Γ, -1 elsewhere
    return 1 if (m % 2 == 0 and n % 2 == 0) else -1


def sigma(z: complex, ctx: ThetaContext) -> complex:
    """
    Weierstrass σ.

    >>> from eklimit.lattice import gaussian_lattice
    >>> ctx = build_context(gaussian_lattice())
    >>> sigma(0, ctx)
    0j
    >>> abs(sigma(0.3 + 0.4j, ctx) + sigma(-0.3 - 0.4j, ctx)) < 1e-14
    True
    """
    z = complex(z)
    m, n, zr = _split(z, ctx.reduced)
    jacobi = ctx.jacobi
    eta_b1, eta_b2 = ctx.eta_reduced
    theta1_prime0 = jacobi.derivatives(0j)[1]
    base = _sigma_reduced(zr, jacobi, eta_b1, theta1_prime0)
    if m == 0 and n == 0:
        return ensure_finite(base, "sigma")
    gamma = ctx.reduced.point(m, n)
    eta = m * eta_b1 + n * eta_b2
    return ensure_finite(_sigma_sign(m, n) * base * cmath.exp(eta * (zr + gamma / 2)), "sigma")


def zeta(z: complex, ctx: ThetaContext) -> complex:
    """Weierstrass ζ = σ'/σ"""
    z = complex(z)
    require_off_lattice(z, ctx.lattice)
    m, n, zr = _split(z, ctx.reduced)
    eta_b1, eta_b2 = ctx.eta_reduced
    return ensure_finite(_zeta_reduced(zr, ctx.jacobi, eta_b1) + m * eta_b1 + n * eta_b2, "zeta")


def _require_not_pole(z: complex, ctx: ThetaContext) -> None:
    if is_lattice_point(z, ctx.lattice):
        raise PoleError(f"℘ has a pole at the lattice point {z}")


def wp(z: complex, ctx: ThetaContext) -> complex:
    """
    Weierstrass ℘.

    >>> from eklimit.lattice import gaussian_lattice
    >>> ctx = build_context(gaussian_lattice())
    >>> abs(wp(0.5, ctx) - ctx.half_period_values[0]) < 1e-12
    True
    """
    z = complex(z)
    _require_not_pole(z, ctx)
    _, _, zr = _split(z, ctx.reduced)
    return ensure_finite(_wp_pair_reduced(zr, ctx.jacobi, ctx.eta_reduced[0])[0], "wp")


def wp_prime(z: complex, ctx: ThetaContext) -> complex:
    """Derivative of ℘"""
    z = complex(z)
    _require_not_pole(z, ctx)
    _, _, zr = _split(z, ctx.reduced)
    return ensure_finite(_wp_pair_reduced(zr, ctx.jacobi, ctx.eta_reduced[0])[1], "wp_prime")


def theta(z: complex, ctx: ThetaContext) -> complex:
    """
    Reduced theta function, θ'(0) = 1.

    >>> from eklimit.lattice import new_lattice
    >>> ctx = build_context(new_lattice(1, 0.3 + 1.2j))
    >>> h = 1e-6
    >>> abs((theta(h, ctx) - theta(-h, ctx)) / (2 * h) - 1) < 1e-9
    True
    """
    z = complex(z)
    return ensure_finite(cmath.exp(-ctx.e_star_02 * z * z / 2) * sigma(z, ctx), "theta")


def theta_log_derivative(w: complex, ctx: ThetaContext) -> complex:
    """θ'(w)/θ(w) = ζ(w) - e*_{0,2} w"""
    w = complex(w)
    return zeta(w, ctx) - ctx.e_star_02 * w


def theta_translate(z: complex, z0: complex, ctx: ThetaContext) -> complex:
    """θ_{z0}(z) = θ(z + z0) exp(-z z̄0/A - z0 z̄0/(2A))"""
    z, z0 = complex(z), complex(z0)
    A = ctx.area_param
    factor = cmath.exp(-z * z0.conjugate() / A - z0 * z0.conjugate() / (2 * A))
    return ensure_finite(theta(z + z0, ctx) * factor, "theta_translate")


def theta_transformation_sign(gamma: complex, ctx: ThetaContext,
                              point: complex = 0.1234 + 0.0567j) -> int:
    """
    Measure ε(γ) in θ(z + γ) = ε(γ) exp(z γ̄/A + γ γ̄/(2A)) θ(z) at a test point.

    >>> from eklimit.lattice import gaussian_lattice
    >>> ctx = build_context(gaussian_lattice())
    >>> theta_transformation_sign(1, ctx), theta_transformation_sign(2, ctx)
    (-1, 1)
    """
    gamma = complex(gamma)
    require_lattice_point(gamma, ctx.lattice)
    A = ctx.area_param
    expected = cmath.exp(point * gamma.conjugate() / A + gamma * gamma.conjugate() / (2 * A))
    ratio = theta(point + gamma, ctx) / (expected * theta(point, ctx))
    sign = 1 if ratio.real > 0 else -1
    if abs(ratio - sign) > 1e-6:
        raise ConsistencyError(f"theta transformation ratio {ratio} is not ±1 for γ={gamma}")
    return sign


def kronecker_theta(z: complex, w: complex, ctx: ThetaContext) -> complex:
    """
    Θ(z, w) = θ(z + w) / (θ(z) θ(w)). Poles at z ∈ Γ or w ∈ Γ are reported even
    when z + w ∈ Γ would make the numerator vanish too.
    """
    z, w = complex(z), complex(w)
    for name, value in (("z", z), ("w", w)):
        if is_lattice_point(value, ctx.lattice):
            raise PoleError(f"Kronecker theta has a pole at {name} = {value}")
    return ensure_finite(theta(z + w, ctx) / (theta(z, ctx) * theta(w, ctx)), "Kronecker theta")


def addition_identity_check(z: complex, w: complex, ctx: ThetaContext,
                            tolerance: float = 1e-9) -> VerificationReport:
    """
    θ(z+w) θ(z-w) θ(z)^-2 θ(w)^-2 = ℘(w) - ℘(z).

    >>> from eklimit.lattice import gaussian_lattice
    >>> ctx = build_context(gaussian_lattice())
    >>> addition_identity_check(0.23 + 0.11j, 0.41 - 0.07j, ctx).passed
    True
    """
    z, w = complex(z), complex(w)
    L = ctx.lattice
    for name, value in (("z", z), ("w", w), ("z+w", z + w), ("z-w", z - w)):
        if is_lattice_point(value, L):
            raise PoleError(f"addition formula needs {name} = {value} off the lattice")
    lhs = theta(z + w, ctx) * theta(z - w, ctx) / (theta(z, ctx) ** 2 * theta(w, ctx) ** 2)
    rhs = wp(w, ctx) - wp(z, ctx)
    return VerificationReport("addition-identity", lattice_echo(L),
                              {"z": [z.real, z.imag], "w": [w.real, w.imag]},
                              lhs, rhs, tolerance)


if __name__ == "__main__":
    import doctest
    doctest.testmod()
