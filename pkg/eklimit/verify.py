"""
Numerical verification of the limit formulas, the distribution relations and the
theta identities. Each check returns a VerificationReport; none of them raises on a
mismatch, only on invalid input.
"""
from functools import partial
from typing import Callable, List, Optional
import cmath
import math

from tqdm import tqdm

from .common import DomainError, PoleError
from .eklerch import (EKQuery, completed_kstar, k1_limit_at_zero, kstar, kstar_a0_at_1,
                      kstar_regularized_at_1, small_z_limit)
from .lattice import (Lattice, distance_to_lattice, is_lattice_point, pairing, random_points,
                      require_off_lattice, torsion_points)
from .numeric import DEFAULT_CONFIG, PrecisionConfig, euler_constant
from .report import VerificationReport, lattice_echo, timed_report
from .weierstrass import (ThetaContext, cached_context, theta, theta_translate, wp_prime)

SEED = 0xEC2024

SINGLE_TOL = 1e-8
SUM_TOL = 1e-7
RELATIVE_TOL = 1e-7
# finite differences lose about half the digits
DERIVATIVE_TOL = 1e-6
NEAR_POLE_TOL = 1e-5

Check = Callable[[], VerificationReport]


def _pair(z: complex) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _log_abs2(value: complex) -> float:
    return 2 * math.log(abs(value))


def _context(L: Lattice, cfg: PrecisionConfig) -> ThetaContext:
    return cached_context(L, cfg)


def _relative(lhs: complex, rhs: complex):
    """Scale both sides by |rhs| so that abs_error is a relative error"""
    scale = abs(rhs)
    if scale == 0:
        return lhs, rhs
    return lhs / scale, rhs / scale


def discriminant_term(ctx: ThetaContext) -> float:
    """-(1/12) log|Δ|²"""
    return -_log_abs2(ctx.delta) / 12


def verify_second_limit(z: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                        tolerance: float = SINGLE_TOL) -> VerificationReport:
    """
    A K*_0(0, z, 1) = -log|θ(z)|² + |z|²/A - (1/12) log|Δ|².

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice
    >>> verify_second_limit(0.25 + 0.4j, gaussian_lattice()).passed
    True
    """
    z = complex(z)
    require_off_lattice(z, L)
    ctx = _context(L, cfg)
    A = L.area_param

    def compute():
        lhs = kstar_a0_at_1(z, L, cfg)
        rhs = -_log_abs2(theta(z, ctx)) + abs(z) ** 2 / A + discriminant_term(ctx)
        return lhs, rhs

    return timed_report("second-limit", L, {"z": _pair(z), "seed": SEED}, compute, tolerance)


def verify_first_limit(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                       tolerance: float = SUM_TOL) -> VerificationReport:
    """
    lim_{s→1} (A K*_0(0,0,s) - 1/(s-1)) = -(1/12) log|Δ|² - 2 log A + 2c.

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice
    >>> verify_first_limit(gaussian_lattice()).passed
    True
    """
    ctx = _context(L, cfg)
    A = L.area_param

    def compute():
        lhs = kstar_regularized_at_1(L, cfg)
        rhs = discriminant_term(ctx) - 2 * math.log(A) + 2 * euler_constant()
        return lhs, rhs

    return timed_report("first-limit", L, {}, compute, tolerance)


def verify_first_limit_extrapolation(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                                     h: float = 1e-4, tolerance: float = 1e-5) -> VerificationReport:
    """
    The closed form of the regularized value against A K*_0(0,0,1±h) - 1/(±h),
    averaged over both sides of the pole so that the linear term cancels.
    """
    A = L.area_param

    def shifted(step: float) -> complex:
        return A * kstar(EKQuery(0, 0, 0, 1 + step, L), cfg).value - 1 / step

    def compute():
        lhs = (shifted(h) + shifted(-h)) / 2
        return lhs, kstar_regularized_at_1(L, cfg)

    return timed_report("first-limit-extrapolated", L, {"h": h}, compute, tolerance)


def verify_distribution(n: int, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                        tolerance: float = SUM_TOL) -> VerificationReport:
    """
    Σ over non-zero n-torsion of K*_0(0, z_n, 1) = -2 log(n) / A.

    >>> from eklimit.lattice import gaussian_lattice
    >>> verify_distribution(2, gaussian_lattice()).passed
    True
    """
    if n < 2:
        raise DomainError(f"distribution relation needs n >= 2, got {n}")
    A = L.area_param

    def compute():
        total = sum(kstar_a0_at_1(t.value, L, cfg) / A
                    for t in torsion_points(L, n, include_zero=False))
        return total, -2 * math.log(n) / A

    return timed_report("distribution", L, {"n": n}, compute, tolerance)


def verify_general_distribution(n: int, s: complex, L: Lattice,
                                cfg: PrecisionConfig = DEFAULT_CONFIG,
                                tolerance: float = SINGLE_TOL) -> VerificationReport:
    """(1/n²) Σ_{z_n} K*_0(0, z_n, s) = n^{-2s} K*_0(0, 0, s)"""
    s = complex(s)

    def compute():
        total = sum(kstar(EKQuery(0, 0, t.value, s, L), cfg).value for t in torsion_points(L, n))
        rhs = cmath.exp(-2 * s * math.log(n)) * kstar(EKQuery(0, 0, 0, s, L), cfg).value
        return total / n ** 2, rhs

    return timed_report("general-distribution", L, {"n": n, "s": _pair(s)}, compute, tolerance)


def verify_prop_c(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                  tolerance: float = SINGLE_TOL) -> VerificationReport:
    """
    (1/4) log|Δ'|² = -Σ_{z_2 ≠ 0} (log|θ(z_2)|² - |z_2|²/A), with Δ' taken from the
    half period values.

    >>> from eklimit.lattice import new_lattice
    >>> verify_prop_c(new_lattice(1, 0.3 + 1.2j)).passed
    True
    """
    ctx = _context(L, cfg)
    A = L.area_param

    def compute():
        lhs = _log_abs2(ctx.delta_prime) / 4
        rhs = -sum(_log_abs2(theta(t.value, ctx)) - abs(t.value) ** 2 / A
                   for t in torsion_points(L, 2, include_zero=False))
        return lhs, rhs

    report = timed_report("prop-c", L, {}, compute, tolerance)
    return report.require("delta_ratio_error", abs(ctx.delta / (16 * ctx.delta_prime) - 1))


def verify_delta_consistency(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                             tolerance: float = 1e-9) -> VerificationReport:
    """16 Δ' = g2³ - 27 g3², relative"""
    ctx = _context(L, cfg)
    lhs, rhs = _relative(16 * ctx.delta_prime, ctx.g2 ** 3 - 27 * ctx.g3 ** 2)
    return VerificationReport("delta-consistency", lattice_echo(L), {}, lhs, rhs, tolerance)


def verify_constant_c(n: int, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                      tolerance: float = SUM_TOL) -> VerificationReport:
    """
    C = (1/(n²-1)) [Σ_{z_n ≠ 0} (log|θ(z_n)|² - |z_n|²/A) - 2 log n] = -(1/12) log|Δ|²
    """
    ctx = _context(L, cfg)
    A = L.area_param

    def compute():
        total = sum(_log_abs2(theta(t.value, ctx)) - abs(t.value) ** 2 / A
                    for t in torsion_points(L, n, include_zero=False))
        return (total - 2 * math.log(n)) / (n * n - 1), discriminant_term(ctx)

    return timed_report("constant-c", L, {"n": n}, compute, tolerance)


def verify_small_z_limit(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                         tolerance: float = SINGLE_TOL) -> VerificationReport:
    """lim_{z→0} (A K*_0(0,z,1) + log|z|²) = -(1/12) log|Δ|²"""
    ctx = _context(L, cfg)
    return timed_report("small-z-limit", L, {},
                        lambda: (small_z_limit(L, cfg), discriminant_term(ctx)), tolerance)


def verify_residue(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                   steps=(1e-3, 1e-4), tolerance: float = NEAR_POLE_TOL) -> VerificationReport:
    """(s-1) A K*_0(0,0,s) → 1, linearly extrapolated from two steps"""
    A = L.area_param
    h1, h2 = steps

    def compute():
        f1 = h1 * A * kstar(EKQuery(0, 0, 0, 1 + h1, L), cfg).value
        f2 = h2 * A * kstar(EKQuery(0, 0, 0, 1 + h2, L), cfg).value
        return f2 - h2 * (f1 - f2) / (h1 - h2), 1.0

    return timed_report("residue", L, {"steps": list(steps)}, compute, tolerance)


def verify_functional_equation(q: EKQuery, cfg: PrecisionConfig = DEFAULT_CONFIG,
                               tolerance: float = 1e-9) -> VerificationReport:
    """A^s Γ(s) K*_a(z0,w0,s) against <w0,z0> A^{a+1-s} Γ(a+1-s) K*_a(w0,z0,a+1-s)"""
    L = q.lattice

    def compute():
        return completed_kstar(q, cfg), pairing(q.w0, q.z0, L) * completed_kstar(q.dual(), cfg)

    params = {"a": q.a, "z0": _pair(q.z0), "w0": _pair(q.w0), "s": _pair(q.s)}
    return timed_report("functional-equation", L, params, compute, tolerance)


def verify_kronecker_theorem(z: complex, w: complex, L: Lattice,
                             cfg: PrecisionConfig = DEFAULT_CONFIG,
                             tolerance: Optional[float] = None) -> VerificationReport:
    """
    Θ(z, w) = exp(z w̄ / A) K_1(z, w, 1).

    Without an explicit tolerance, 1e-8 is used, widened to 1e-5 when z, w or z+w
    comes within 0.01·√A of the lattice.

    >>> from eklimit.lattice import gaussian_lattice
    >>> verify_kronecker_theorem(0.3, 0.2j, gaussian_lattice()).passed
    True
    """
    z, w = complex(z), complex(w)
    for name, value in (("z", z), ("w", w), ("z+w", z + w)):
        if is_lattice_point(value, L):
            raise PoleError(f"Kronecker's theorem needs {name} = {value} off the lattice")
    ctx = _context(L, cfg)
    A = L.area_param
    if tolerance is None:
        closest = min(distance_to_lattice(v, L) for v in (z, w, z + w))
        tolerance = NEAR_POLE_TOL if closest < 0.01 * L.scale else SINGLE_TOL

    def compute():
        lhs = theta(z + w, ctx) / (theta(z, ctx) * theta(w, ctx))
        rhs = cmath.exp(z * w.conjugate() / A) * kstar(EKQuery(1, z, w, 1, L), cfg).value
        return lhs, rhs

    return timed_report("kronecker", L, {"z": _pair(z), "w": _pair(w)}, compute, tolerance)


def verify_k1_limit(w: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                    h: float = 1e-5, tolerance: float = SINGLE_TOL) -> VerificationReport:
    """K*_1(0, w, 1) + w̄/A = θ'(w)/θ(w), θ' by a central difference"""
    w = complex(w)
    require_off_lattice(w, L, "w")
    ctx = _context(L, cfg)
    A = L.area_param

    def compute():
        lhs = k1_limit_at_zero(w, L, cfg) + w.conjugate() / A
        derivative = (theta(w + h, ctx) - theta(w - h, ctx)) / (2 * h)
        return lhs, derivative / theta(w, ctx)

    return timed_report("k1-limit", L, {"w": _pair(w), "h": h}, compute, tolerance)


def verify_derivative_relation(z: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                               h: float = 1e-5,
                               tolerance: float = DERIVATIVE_TOL) -> VerificationReport:
    """
    A ∂K*_0(0, z, 1)/∂z = -K*_1(0, z, 1), with the Wirtinger derivative
    ∂/∂z = (∂/∂x - i ∂/∂y)/2 taken by central differences.
    """
    z = complex(z)
    require_off_lattice(z, L)

    def compute():
        dx = (kstar_a0_at_1(z + h, L, cfg) - kstar_a0_at_1(z - h, L, cfg)) / (2 * h)
        dy = (kstar_a0_at_1(z + 1j * h, L, cfg) - kstar_a0_at_1(z - 1j * h, L, cfg)) / (2 * h)
        return (dx - 1j * dy) / 2, -k1_limit_at_zero(z, L, cfg)

    return timed_report("derivative-relation", L, {"z": _pair(z), "h": h}, compute, tolerance)


def verify_duplication(z: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                       tolerance: float = SINGLE_TOL) -> VerificationReport:
    """θ(2z) = -θ(z)⁴ ℘'(z), relative"""
    z = complex(z)
    ctx = _context(L, cfg)
    if is_lattice_point(z, L):
        raise PoleError(f"℘' has a pole at z = {z}")

    def compute():
        return _relative(theta(2 * z, ctx), -theta(z, ctx) ** 4 * wp_prime(z, ctx))

    return timed_report("duplication", L, {"z": _pair(z)}, compute, tolerance)


def two_torsion_theta_product(z: complex, ctx: ThetaContext) -> complex:
    """Π_{z_2 ≠ 0} θ_{z_2}(z)⁸"""
    product = 1 + 0j
    for t in torsion_points(ctx.lattice, 2, include_zero=False):
        product *= theta_translate(z, t.value, ctx) ** 8
    return product


def verify_theta_distribution_2(z: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                                tolerance: float = RELATIVE_TOL) -> VerificationReport:
    """
    θ(2z)⁸ = Δ² θ(z)⁸ Π_{z_2 ≠ 0} θ_{z_2}(z)⁸, reported as a relative error.

    >>> from eklimit.lattice import gaussian_lattice
    >>> verify_theta_distribution_2(0.23 + 0.11j, gaussian_lattice()).passed
    True
    """
    z = complex(z)
    for value in (z, 2 * z):
        if is_lattice_point(value, L):
            raise PoleError(f"theta distribution needs {value} off the lattice")
    ctx = _context(L, cfg)

    def compute():
        lhs = theta(2 * z, ctx) ** 8
        rhs = ctx.delta ** 2 * theta(z, ctx) ** 8 * two_torsion_theta_product(z, ctx)
        return _relative(lhs, rhs)

    return timed_report("theta-dist-2", L, {"z": _pair(z)}, compute, tolerance)


def verify_theta_constant_term(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG,
                               tolerance: float = SINGLE_TOL) -> VerificationReport:
    """Π_{z_2 ≠ 0} θ_{z_2}(0)⁸ = Δ'^{-2}, relative"""
    ctx = _context(L, cfg)

    def compute():
        return _relative(two_torsion_theta_product(0, ctx), ctx.delta_prime ** -2)

    return timed_report("theta-constant-term", L, {}, compute, tolerance)


def standard_checks(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG, seed: int = SEED,
                    count: int = 10) -> List[Check]:
    """
    The checks of `ek verify all`, in their reporting order. Each entry is a picklable
    zero-argument callable.
    """
    points = random_points(L, count, seed)
    partners = random_points(L, count, seed + 1)
    checks: List[Check] = [
        partial(verify_first_limit, L, cfg),
        partial(verify_first_limit_extrapolation, L, cfg),
        partial(verify_residue, L, cfg),
        partial(verify_small_z_limit, L, cfg),
        partial(verify_prop_c, L, cfg),
        partial(verify_delta_consistency, L, cfg),
        partial(verify_theta_constant_term, L, cfg),
    ]
    checks += [partial(verify_distribution, n, L, cfg) for n in (2, 3, 5)]
    checks += [partial(verify_constant_c, n, L, cfg) for n in (2, 3)]
    checks += [partial(verify_general_distribution, n, s, L, cfg)
               for n in (2, 3) for s in (3, 0.5, 2 + 1j)]
    checks += [partial(verify_second_limit, z, L, cfg) for z in points]
    # z + w may land near the lattice even when z and w do not
    pairs = [(z, w) for z, w in zip(points, partners)
             if distance_to_lattice(z + w, L) > 0.05 * L.scale]
    checks += [partial(verify_kronecker_theorem, z, w, L, cfg) for z, w in pairs]
    checks += [partial(verify_k1_limit, z, L, cfg) for z in points]
    checks += [partial(verify_theta_distribution_2, z, L, cfg) for z in points
               if distance_to_lattice(2 * z, L) > 0.05 * L.scale]
    checks += [partial(verify_duplication, z, L, cfg) for z in points]
    return checks


def standard_suite(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG, seed: int = SEED,
                   count: int = 10, progress: bool = True) -> List[VerificationReport]:
    """Run standard_checks in order; the progress bar goes to stderr"""
    checks = standard_checks(L, cfg, seed, count)
    return [check() for check in tqdm(checks, desc=f"verify {L}", disable=not progress)]


if __name__ == "__main__":
    import doctest
    doctest.testmod()
