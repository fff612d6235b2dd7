"""
Eisenstein-Kronecker-Lerch series

    K*_a(z0, w0, s) = Σ* (z̄0 + γ̄)^a <γ, w0> / |z0 + γ|^{2s}

continued to all s through the lattice integrals

    θ*_a(t, z0, w0) = Σ* exp(-t|z0 + γ|²/A) <γ, w0> (z̄0 + γ̄)^a
    I_a(z0, w0, s)  = ∫_1^∞ θ*_a(t, z0, w0) t^{s-1} dt

and the completed identity

    A^s Γ(s) K*_a(z0, w0, s) = I_a(z0, w0, s) - δ(z0)/s <w0, z0>
                               + I_a(w0, z0, a+1-s) <w0, z0> + δ(w0)/(s-1)

where δ(x) = 1 when a = 0 and x ∈ Γ. I_a is summed term by term: each γ contributes
(z̄0+γ̄)^a <γ, w0> x^{-s} Γ(s, x) with x = |z0+γ|²/A.
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple
import cmath
import logging
import math

import numpy as np
from scipy import special

from .common import DomainError, PoleError, PoleProximityError, ensure_finite, to_pair
from .lattice import Lattice, is_lattice_point, pairing, points_in_disc, require_off_lattice
from .numeric import DEFAULT_CONFIG, PrecisionConfig, euler_constant, upper_incomplete_gamma_array

logger = logging.getLogger(__name__)

# kstar reports the pole itself only this close to s = 1
POLE_TOL = 1e-12
# functional_equation_defect refuses evaluation this close to a delta pole
PROXIMITY_TOL = 1e-3


@dataclass(frozen=True)
class EKQuery:
    a: int
    z0: complex
    w0: complex
    s: complex
    lattice: Lattice

    def __post_init__(self):
        if int(self.a) != self.a or self.a < 0:
            raise DomainError(f"a must be an integer >= 0, got {self.a}")
        object.__setattr__(self, "a", int(self.a))
        for name in ("z0", "w0", "s"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def dual(self) -> "EKQuery":
        """(a, w0, z0, a+1-s), the other side of the functional equation"""
        return EKQuery(self.a, self.w0, self.z0, self.a + 1 - self.s, self.lattice)

    @property
    def delta_z0(self) -> bool:
        return self.a == 0 and is_lattice_point(self.z0, self.lattice)

    @property
    def delta_w0(self) -> bool:
        return self.a == 0 and is_lattice_point(self.w0, self.lattice)


@dataclass(frozen=True)
class EKResult:
    value: complex
    is_pole: bool
    pole_residue: Optional[complex]
    truncation_radius_used: float
    estimated_error: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": list(to_pair(self.value)),
            "is_pole": self.is_pole,
            "pole_residue": None if self.pole_residue is None else list(to_pair(self.pole_residue)),
            "truncation_radius_used": self.truncation_radius_used,
            "estimated_error": self.estimated_error,
        }


def truncation_radius(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG, t: float = 1.0) -> float:
    """
    Radius of the disc of lattice terms kept in θ*_a(t, ...) and I_a.

    The Gaussian weight of a dropped term is at most exp(-t r²/A). The radius is the
    larger of √(factor·A/t) and 1.5·√(A log(N/quad_tol)/t), N the term count at
    √(factor·A), so the tail stays below quad_tol for every t >= 1.

    >>> from eklimit.lattice import gaussian_lattice
    >>> L = gaussian_lattice()
    >>> truncation_radius(L) > truncation_radius(L, t=4)
    True
    """
    A = L.area_param
    base = math.sqrt(cfg.truncation_radius_factor * A / t)
    # disc area / cell area
    count = cfg.truncation_radius_factor / t + 1
    tail = 1.5 * math.sqrt(A * math.log(count / cfg.working_tol) / t)
    return max(base, tail)


def _shifted_points(z0: complex, L: Lattice, radius: float) -> np.ndarray:
    """u = z0 + γ over Σ*, |u| <= radius"""
    gammas = points_in_disc(L, radius, exclude=z0, center=z0)
    return gammas


def _pairing_array(gammas: np.ndarray, w: complex, A: float) -> np.ndarray:
    exponent = (gammas * np.conj(w) - w * np.conj(gammas)) / A
    return np.exp(1j * exponent.imag)


def theta_star(a: int, t: float, z0: complex, w0: complex, L: Lattice,
               cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    θ*_a(t, z0, w0) for t >= 1.

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice
    >>> L = gaussian_lattice()
    >>> theta_star(0, 1.0, 0, 0, L).real > 0
    True
    >>> abs(theta_star(1, 1.5, 0, 0, L)) < 1e-14
    True
    """
    if not t >= 1:
        raise DomainError(f"theta_star is only evaluated for t >= 1, got {t}")
    z0, w0 = complex(z0), complex(w0)
    A = L.area_param
    radius = truncation_radius(L, cfg, t)
    gammas = _shifted_points(z0, L, radius)
    u = z0 + gammas
    terms = np.exp(-t * np.abs(u) ** 2 / A) * _pairing_array(gammas, w0, A) * np.conj(u) ** a
    return ensure_finite(complex(np.sum(terms)), "theta_star")


def _lattice_integral(a: int, z0: complex, w0: complex, s: complex, L: Lattice,
                      cfg: PrecisionConfig) -> Tuple[complex, float, float]:
    """I_a(z0, w0, s) with the radius used and an error estimate"""
    A = L.area_param
    radius = truncation_radius(L, cfg)
    gammas = _shifted_points(z0, L, radius)
    u = z0 + gammas
    x = np.abs(u) ** 2 / A
    terms = (np.conj(u) ** a * _pairing_array(gammas, w0, A)
             * np.exp(-s * np.log(x)) * upper_incomplete_gamma_array(s, x, cfg))
    value = complex(np.sum(terms))
    x_cut = radius * radius / A
    tail = math.exp(-x_cut) * x_cut ** (a / 2 + 1) * A ** (a / 2)
    estimate = cfg.working_tol * float(np.sum(np.abs(terms))) + tail
    logger.debug("I_%d(%s, %s, %s): %d terms within r=%.3f", a, z0, w0, s, len(gammas), radius)
    return ensure_finite(value, "I_a"), radius, estimate


def i_integral(a: int, z0: complex, w0: complex, s: complex, L: Lattice,
               cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    I_a(z0, w0, s) = ∫_1^∞ θ*_a(t, z0, w0) t^{s-1} dt, entire in s.

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice
    >>> L = gaussian_lattice()
    >>> v = i_integral(0, 0.3, 0.1, 0.5 + 0.2j, L)
    >>> abs(i_integral(0, 0.3, 0.1, 0.5 - 0.2j, L) - v.conjugate()) < 1e-13
    True
    """
    return _lattice_integral(int(a), complex(z0), complex(w0), complex(s), L, cfg)[0]


@dataclass(frozen=True)
class _Completed:
    """Pieces of A^s Γ(s) K*_a: regular - polar_z/s + polar_w/(s-1)"""

    regular: complex
    polar_z: complex
    polar_w: complex
    radius: float
    estimate: float


def _completed_parts(q: EKQuery, cfg: PrecisionConfig) -> _Completed:
    L = q.lattice
    dual_pairing = pairing(q.w0, q.z0, L)
    first, radius, err1 = _lattice_integral(q.a, q.z0, q.w0, q.s, L, cfg)
    second, _, err2 = _lattice_integral(q.a, q.w0, q.z0, q.a + 1 - q.s, L, cfg)
    return _Completed(
        regular=first + second * dual_pairing,
        polar_z=dual_pairing if q.delta_z0 else 0j,
        polar_w=1.0 + 0j if q.delta_w0 else 0j,
        radius=radius,
        estimate=err1 + err2,
    )


def completed_kstar(q: EKQuery, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    A^s Γ(s) K*_a(z0, w0, s), entire apart from the δ terms at s = 0 and s = 1.
    """
    parts = _completed_parts(q, cfg)
    s = q.s
    if parts.polar_z and s == 0:
        raise PoleError("completed K*_0 has a pole at s = 0 when z0 is a lattice point")
    if parts.polar_w and s == 1:
        raise PoleError("completed K*_0 has a pole at s = 1 when w0 is a lattice point")
    value = parts.regular
    if parts.polar_z:
        value -= parts.polar_z / s
    if parts.polar_w:
        value += parts.polar_w / (s - 1)
    return ensure_finite(value, "completed K*")


def _rgamma(s: complex) -> complex:
    # 1/Γ is entire, so this is well defined at s = 0, -1, -2, ...
    return complex(special.rgamma(s))


def kstar(q: EKQuery, cfg: PrecisionConfig = DEFAULT_CONFIG) -> EKResult:
    """
    K*_a(z0, w0, s) at any s.

    The division by Γ(s) is a multiplication by the entire 1/Γ(s). At s = 0 the δ(z0)
    term combines with it into 1/Γ(s+1), so K*_0(z0, w0, 0) = -<w0, z0> for z0 ∈ Γ and
    K*_a vanishes at the other non-positive integers. At s = 1 with a = 0 and w0 ∈ Γ
    the result is the pole: residue 1/A, value the Laurent constant term.

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice
    >>> L = gaussian_lattice()
    >>> r = kstar(EKQuery(0, 0, 0, 1, L))
    >>> r.is_pole, abs(r.pole_residue - math.pi) < 1e-12
    (True, True)
    >>> abs(kstar(EKQuery(0, 0, 0, 0, L)).value + 1) < 1e-12
    True
    >>> abs(kstar(EKQuery(1, 0, 0, 3, L)).value) < 1e-10
    True
    """
    L = q.lattice
    A = L.area_param
    s = q.s
    parts = _completed_parts(q, cfg)

    if parts.polar_w and abs(s - 1) <= POLE_TOL:
        constant = _laurent_constant(parts, A)
        return EKResult(constant, True, 1 / A + 0j, parts.radius, parts.estimate / A)

    inv_scale = cmath.exp(-s * math.log(A))
    value = parts.regular * _rgamma(s)
    if parts.polar_z:
        value -= parts.polar_z * _rgamma(s + 1)
    if parts.polar_w:
        value += parts.polar_w * _rgamma(s) / (s - 1)
    value *= inv_scale
    estimate = parts.estimate * abs(_rgamma(s) * inv_scale)
    return EKResult(ensure_finite(value, "K*"), False, None, parts.radius, estimate)


def _laurent_constant(parts: _Completed, A: float) -> complex:
    # 1/(A^s Γ(s)) = (1 + (s-1)(c - log A) + ...)/A near s = 1
    g1 = parts.regular - parts.polar_z
    return (g1 + parts.polar_w * (euler_constant() - math.log(A))) / A


def kstar_regularized(q: EKQuery, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    Constant term of the Laurent expansion of K*_0(z0, w0, s) at s = 1, w0 ∈ Γ.
    The value of q.s is ignored.
    """
    if not q.delta_w0:
        raise DomainError("K*_a has no pole at s = 1 unless a = 0 and w0 is a lattice point")
    at_one = EKQuery(q.a, q.z0, q.w0, 1, q.lattice)
    return _laurent_constant(_completed_parts(at_one, cfg), q.lattice.area_param)


def kstar_regularized_at_1(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    lim_{s→1} (A K*_0(0, 0, s) - 1/(s-1)) = I_0(0,0,1) - 1 + I_0(0,0,0) - log A + c,
    evaluated in closed form.

    >>> from eklimit.lattice import new_lattice
    >>> abs(kstar_regularized_at_1(new_lattice(1, 0.3 + 1.2j)).imag) < 1e-10
    True
    """
    A = L.area_param
    value = (i_integral(0, 0, 0, 1, L, cfg) - 1 + i_integral(0, 0, 0, 0, L, cfg)
             - math.log(A) + euler_constant())
    return ensure_finite(value, "regularized K*_0 at s = 1")


def kstar_a0_at_1(z: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """A K*_0(0, z, 1) = I_0(0, z, 1) - 1 + I_0(z, 0, 0) for z ∉ Γ"""
    z = complex(z)
    require_off_lattice(z, L)
    value = i_integral(0, 0, z, 1, L, cfg) - 1 + i_integral(0, z, 0, 0, L, cfg)
    return ensure_finite(value, "A K*_0(0, z, 1)")


def small_z_limit(L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    lim_{z→0} (A K*_0(0, z, 1) + log|z|²) = I_0(0,0,1) - 1 + I_0(0,0,0) - c + log A.

    The γ = 0 term of I_0(z, 0, 0) is Γ(0, |z|²/A) = -c - log(|z|²/A) + O(|z|²),
    which is where the -c + log A comes from.
    """
    A = L.area_param
    value = (i_integral(0, 0, 0, 1, L, cfg) - 1 + i_integral(0, 0, 0, 0, L, cfg)
             - euler_constant() + math.log(A))
    return ensure_finite(value, "small z limit")


def functional_equation_defect(q: EKQuery, cfg: PrecisionConfig = DEFAULT_CONFIG) -> float:
    """
    |A^s Γ(s) K*_a(z0,w0,s) - <w0,z0> A^{a+1-s} Γ(a+1-s) K*_a(w0,z0,a+1-s)|,
    both sides evaluated independently from their own lattice integrals.

    Example
    ------
    >>> from eklimit.lattice import gaussian_lattice
    >>> q = EKQuery(1, 0.3, 0.2j, 0.7 + 0.4j, gaussian_lattice())
    >>> functional_equation_defect(q) < 1e-9
    True
    """
    s = q.s
    if q.delta_z0 and abs(s) < PROXIMITY_TOL:
        raise PoleProximityError(f"s = {s} is within {PROXIMITY_TOL} of the pole at s = 0")
    if q.delta_w0 and abs(s - 1) < PROXIMITY_TOL:
        raise PoleProximityError(f"s = {s} is within {PROXIMITY_TOL} of the pole at s = 1")
    lhs = completed_kstar(q, cfg)
    rhs = pairing(q.w0, q.z0, q.lattice) * completed_kstar(q.dual(), cfg)
    return float(abs(lhs - rhs))


def k1_limit_at_zero(w: complex, L: Lattice, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """
    K*_1(0, w, 1) = lim_{z→0} (K_1(z, w, 1) - 1/z), for w ∉ Γ.
    It equals θ'(w)/θ(w) - w̄/A.
    """
    w = complex(w)
    require_off_lattice(w, L, "w")
    return kstar(EKQuery(1, 0, w, 1, L), cfg).value


def direct_sum(q: EKQuery, radius: float, tail_correction: bool = True) -> complex:
    """
    Σ* over |z0 + γ| <= radius of (z̄0+γ̄)^a <γ, w0> |z0+γ|^{-2s}, the absolutely
    convergent definition for Re(s) > a/2 + 1.

    For the untwisted a = 0, w0 ∈ Γ sum the tail is replaced by its integral
    2π R^{2-2s} / ((2s-2)·πA); other tails average out over each circle.
    """
    s = q.s
    if not s.real > q.a / 2 + 1:
        raise DomainError(f"the lattice sum diverges for Re(s) <= a/2 + 1 (a={q.a}, s={s})")
    L = q.lattice
    A = L.area_param
    gammas = _shifted_points(q.z0, L, radius)
    u = q.z0 + gammas
    terms = np.conj(u) ** q.a * _pairing_array(gammas, q.w0, A) * np.exp(-s * np.log(np.abs(u) ** 2))
    value = complex(np.sum(terms))
    if tail_correction and q.delta_w0:
        value += 2 * cmath.exp((2 - 2 * s) * math.log(radius)) / ((2 * s - 2) * A)
    return ensure_finite(value, "direct lattice sum")


if __name__ == "__main__":
    import doctest
    doctest.testmod()
