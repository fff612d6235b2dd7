"""
Formal (power series) side of the Weierstrass model E: y² = 4x³ - g2 x - g3 with
rational g2, g3 and the local parameter t = -2x/y at the origin.

With X = t² x the curve equation becomes X = 1 + (g2 X t⁴ + g3 t⁶)/(4X²), so X(t) is
an even series with constant term 1, y = -2X/t³, and the invariant differential is
dx/y = (1 - t X'/(2X)) dt. Its integral λ(t) identifies the formal group with the
additive group: ℘(λ(t)) = x(t), ℘'(λ(t)) = y(t).
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple
import logging

from sympy import Poly, Rational, isprime, roots, symbols

from ..common import (ConsistencyError, DomainError, IrrationalHalfPeriodError,
                      UnsupportedModelError)
from ..report import VerificationReport, timed_report
from .number import Exact, PadicNumber
from .series import PadicSeries, RationalSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CMCurveModel:
    """
    Example
    ------
    >>> m = CMCurveModel(4, 0, 5)
    >>> m.delta, m.pi_norm_note
    (64, 'g3 = 0 (CM by Z[i]): p = 5 splits, ordinary')
    >>> CMCurveModel(4, 0, 2)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    UnsupportedModelError: p must be a prime >= 5, got 2
    """

    g2: Rational
    g3: Rational
    p: int
    pi_norm_note: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "g2", Rational(self.g2))
        object.__setattr__(self, "g3", Rational(self.g3))
        if not (isprime(self.p) and self.p >= 5):
            raise UnsupportedModelError(f"p must be a prime >= 5, got {self.p}")
        if self.delta == 0:
            raise UnsupportedModelError(f"singular model: g2={self.g2}, g3={self.g3}")
        for name, value in (("g2", self.g2), ("g3", self.g3)):
            if value.q % self.p == 0:
                raise UnsupportedModelError(f"{name} = {value} is not {self.p}-integral")
        if self.delta.p % self.p == 0:
            raise UnsupportedModelError(f"bad reduction at p = {self.p}: Δ = {self.delta}")
        if not self.pi_norm_note:
            object.__setattr__(self, "pi_norm_note", self._describe_prime())

    @property
    def delta(self) -> Rational:
        return self.g2 ** 3 - 27 * self.g3 ** 2

    @property
    def symmetric(self) -> bool:
        """g2 = 0 or g3 = 0: the extra automorphisms force e*_{0,2} = 0"""
        return self.g2 == 0 or self.g3 == 0

    def _describe_prime(self) -> str:
        p = self.p
        if self.g3 == 0:
            kind = "splits, ordinary" if p % 4 == 1 else "is inert, supersingular"
            return f"g3 = 0 (CM by Z[i]): p = {p} {kind}"
        if self.g2 == 0:
            kind = "splits, ordinary" if p % 3 == 1 else "is inert, supersingular"
            return f"g2 = 0 (CM by Z[ζ3]): p = {p} {kind}"
        return f"p = {p}: splitting type not determined for this model"

    def header(self, n: int, m: int) -> str:
        return f"model g2={self.g2} g3={self.g3} p={self.p} N={n} M={m}"


def formal_x_series(model: CMCurveModel, order: int) -> RationalSeries:
    """
    X(t) = t² x(t) mod t^order, by fixed point iteration; each pass fixes four
    more coefficients.

    >>> list(formal_x_series(CMCurveModel(4, 0, 5), 9).coefficients)
    [1, 0, 0, 0, 1, 0, 0, 0, -1]
    """
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    t4 = RationalSeries([0, 0, 0, 0, 1], order)
    t6 = RationalSeries([0, 0, 0, 0, 0, 0, 1], order)
    x_series = RationalSeries([1], order)
    for _ in range(order // 4 + 2):
        numerator = t4 * x_series * model.g2 + t6 * model.g3
        updated = (numerator * (x_series * x_series * 4).inverse() + 1).truncate(order)
        if updated == x_series:
            break
        x_series = updated
    return x_series


def invariant_differential(model: CMCurveModel, order: int) -> RationalSeries:
    """λ'(t) = 1 - t X'/(2X) mod t^order"""
    x_series = formal_x_series(model, order + 1)
    quotient = x_series.derivative() * x_series.truncate(order).inverse()
    return 1 - quotient.shift_up(1).truncate(order) / 2


def formal_group_log(model: CMCurveModel, order: int) -> RationalSeries:
    """
    λ(t) mod t^order, λ(t) = t + O(t^5) and odd.

    Example
    ------
    >>> lam = formal_group_log(CMCurveModel(4, 0, 5), 8)
    >>> list(lam.coefficients)
    [0, 1, 0, 0, 0, -2/5, 0, 0]
    """
    if order < 2:
        raise DomainError(f"formal_group_log needs order >= 2, got {order}")
    return invariant_differential(model, order - 1).integral()


def weierstrass_p_laurent(model: CMCurveModel, order: int) -> RationalSeries:
    """
    z² ℘(z) mod z^order: 1 + Σ c_k z^{2k} with c2 = g2/20, c3 = g3/28 and
    c_k = 3/((2k+1)(k-3)) Σ_{m=2}^{k-2} c_m c_{k-m}.
    """
    c: Dict[int, Rational] = {2: model.g2 / 20, 3: model.g3 / 28}
    coefficients = [Rational(0)] * order
    if order:
        coefficients[0] = Rational(1)
    for k in range(2, (order - 1) // 2 + 1):
        if k not in c:
            c[k] = Rational(3, (2 * k + 1) * (k - 3)) * sum(c[m] * c[k - m] for m in range(2, k - 1))
        coefficients[2 * k] = c[k]
    return RationalSeries(coefficients, order)


@lru_cache(maxsize=None)
def _sigma_recursion(m: int, n: int) -> Rational:
    """a_{m,n} of σ = Σ a_{m,n} (g2/2)^m (2g3)^n z^{4m+6n+1} / (4m+6n+1)!"""
    if m < 0 or n < 0:
        return Rational(0)
    if m == 0 and n == 0:
        return Rational(1)
    return (3 * (m + 1) * _sigma_recursion(m + 1, n - 1)
            + Rational(16, 3) * (n + 1) * _sigma_recursion(m - 2, n + 1)
            - Rational(1, 3) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * _sigma_recursion(m - 1, n))


def sigma_series(model: CMCurveModel, order: int) -> RationalSeries:
    """
    Taylor series of σ(z) mod z^order.

    Example
    ------
    >>> list(sigma_series(CMCurveModel(4, 0, 5), 8).coefficients)
    [0, 1, 0, 0, 0, -1/60, 0, 0]
    """
    if order < 2:
        raise DomainError(f"sigma_series needs order >= 2, got {order}")
    coefficients = [Rational(0)] * order
    factorial = Rational(1)
    factorials = [factorial]
    for k in range(1, order):
        factorial *= k
        factorials.append(factorial)
    half_g2, twice_g3 = model.g2 / 2, 2 * model.g3
    # increasing weight w = 4m + 6n, so every a_{m,n} only needs lighter weights
    for weight in range(0, order - 1, 2):
        for n in range(weight // 6 + 1):
            rest = weight - 6 * n
            if rest % 4:
                continue
            m = rest // 4
            degree = weight + 1
            coefficients[degree] += (_sigma_recursion(m, n) * half_g2 ** m * twice_g3 ** n
                                     / factorials[degree])
    return RationalSeries(coefficients, order)


def theta_hat_series(model: CMCurveModel, e_star: Exact, order: int) -> RationalSeries:
    """
    θ̂(t) = exp(-e* z²/2) σ(z) at z = λ(t), mod t^order.

    >>> th = theta_hat_series(CMCurveModel(4, 0, 5), 0, 10)
    >>> th[1], th.is_odd()
    (1, True)
    """
    e_star = Rational(e_star)
    if model.symmetric and e_star != 0:
        raise DomainError(f"e* is forced to 0 for g2={model.g2}, g3={model.g3}; got {e_star}")
    lam = formal_group_log(model, order)
    z_series = RationalSeries([0, 1], order)
    theta_z = (z_series * z_series * (-e_star / 2)).exp() * sigma_series(model, order)
    return theta_z.compose(lam)


def log_theta_hat(model: CMCurveModel, e_star: Exact, order: int, precision: int) -> PadicSeries:
    """
    log_p of θ̂(t) on the residue disc of 0, as log_p(t) + log_p(θ̂(t)/t). The
    returned series is the second part, known mod t^order; log_t_term is set.

    Example
    ------
    >>> lg = log_theta_hat(CMCurveModel(4, 0, 5), 0, 8, 6)
    >>> lg.log_t_term, lg[0].is_zero()
    (True, True)
    """
    unit_part = theta_hat_series(model, e_star, order + 1).shift_down(1)
    result = unit_part.reduce(model.p, precision).log()
    result.require_precision(1)
    result.log_t_term = True
    return result


def formal_duplication(model: CMCurveModel, order: int,
                       e_star: Exact = 0) -> Tuple[RationalSeries, RationalSeries]:
    """
    θ̂([2]t) mod t^order along two routes:
    (a) θ̂ composed with [2](t) = λ^{-1}(2λ(t));
    (b) -θ̂(t)⁴ ℘'(λ(t)) = 2t (θ̂(t)/t)⁴ X(t), from θ(2z) = -θ(z)⁴ ℘'(z).

    Example
    ------
    >>> a, b = formal_duplication(CMCurveModel(4, 0, 5), 12)
    >>> a == b
    True
    """
    if order < 2:
        raise DomainError(f"formal_duplication needs order >= 2, got {order}")
    theta_hat = theta_hat_series(model, e_star, order)
    route_a = theta_hat.compose(doubling_series(model, order))

    unit_part = theta_hat.shift_down(1)
    x_series = formal_x_series(model, order - 1)
    route_b = (unit_part ** 4 * x_series * 2).shift_up(1)
    return route_a, route_b.truncate(order)


def doubling_series(model: CMCurveModel, order: int) -> RationalSeries:
    """[2](t) = λ^{-1}(2 λ(t)) mod t^order"""
    lam = formal_group_log(model, order)
    return lam.reversion().compose(lam * 2)


def half_period_values(model: CMCurveModel) -> Tuple[Rational, Rational, Rational]:
    """
    Rational roots e1 >= e2 >= e3 of 4x³ - g2 x - g3.

    >>> half_period_values(CMCurveModel(4, 0, 5))
    (1, 0, -1)
    """
    x = symbols("x")
    poly = Poly(4 * x ** 3 - model.g2 * x - model.g3, x)
    rational_roots = roots(poly, filter="Q")
    found: List[Rational] = []
    for root, multiplicity in rational_roots.items():
        found += [Rational(root)] * multiplicity
    if len(found) != 3:
        raise IrrationalHalfPeriodError(
            f"4x^3 - {model.g2}x - {model.g3} does not split over Q")
    e1, e2, e3 = sorted(found, reverse=True)
    return e1, e2, e3


def delta_prime(model: CMCurveModel) -> Rational:
    """Δ' = ((e1-e2)(e2-e3)(e3-e1))², checked against Δ = 16Δ'"""
    e1, e2, e3 = half_period_values(model)
    value = ((e1 - e2) * (e2 - e3) * (e3 - e1)) ** 2
    if 16 * value != model.delta:
        raise ConsistencyError(f"Δ = {model.delta} but 16Δ' = {16 * value}")
    return value


def _working_precision(precision: int, p: int, weighted: List[Tuple[RationalSeries, int]],
                       constant: Rational) -> int:
    # a product of k factors with valuations >= v loses at most -k·v digits
    loss = sum(max(0, -series.min_valuation(p)) * power for series, power in weighted)
    loss += max(0, -PadicNumber.from_rational(constant, p, 1).valuation)
    return precision + loss + 2


def verify_padic_distribution(model: CMCurveModel, precision: int, order: int,
                              e_star: Exact = 0,
                              constant_perturbation: Exact = 0) -> VerificationReport:
    """
    θ̂([2]t)⁸ = (Δ²/Δ'²) θ̂(t)^32 Π_i (e_i - ℘(λ(t)))⁴ as a congruence mod (p^N, t^M).

    After dividing by t⁸ both sides are unit series:
    (θ̂([2]t)/t)⁸ ≡ (Δ²/Δ'²) (θ̂/t)^32 Π_i (e_i t² - X)⁴. The reduction mod p^N is done
    first and the products are formed in Q_p[[t]]. The report counts the congruent
    coefficients (lhs) against the M expected (rhs), tolerance 0.

    Example
    ------
    >>> verify_padic_distribution(CMCurveModel(4, 0, 5), 8, 16).passed
    True
    >>> verify_padic_distribution(CMCurveModel(4, 0, 5), 8, 16, constant_perturbation=5).passed
    False
    """
    if precision < 1 or order < 1:
        raise DomainError(f"need N >= 1 and M >= 1, got N={precision}, M={order}")
    p = model.p
    e_values = half_period_values(model)
    constant = (model.delta ** 2 + Rational(constant_perturbation)) / delta_prime(model) ** 2

    # one extra order survives the division by t
    route_a, _ = formal_duplication(model, order + 1, e_star)
    doubled_unit = route_a.shift_down(1)
    unit_part = theta_hat_series(model, e_star, order + 1).shift_down(1)
    x_series = formal_x_series(model, order)
    factors = [RationalSeries([0, 0, e], order) - x_series for e in e_values]

    working = _working_precision(precision, p,
                                 [(doubled_unit, 8), (unit_part, 32)] + [(f, 4) for f in factors],
                                 constant)
    logger.debug("padic distribution for %s: working precision %d", model.header(precision, order),
                 working)

    lhs = doubled_unit.reduce(p, working) ** 8
    rhs = unit_part.reduce(p, working) ** 32 * PadicNumber.from_rational(constant, p, working)
    for f in factors:
        rhs = rhs * f.reduce(p, working) ** 4
    lhs, rhs = lhs.truncate(order), rhs.truncate(order)
    lhs.require_precision(precision)
    rhs.require_precision(precision)

    def compute():
        agreement = lhs.congruent(rhs, precision)
        if not all(agreement):
            logger.debug("congruence fails first at t^%d", agreement.index(False))
        return sum(agreement), order

    params = {"g2": str(model.g2), "g3": str(model.g3), "p": p, "N": precision, "M": order,
              "e_star": str(Rational(e_star)), "perturbation": str(Rational(constant_perturbation))}
    return timed_report("padic-dist", None, params, compute, 0.0)


def dump_series(series: PadicSeries, model: CMCurveModel, precision: int,
                order: Optional[int] = None) -> str:
    """
    Header line and one "k: unit*p^val (mod p^N)" line per coefficient.

    >>> s = RationalSeries([0, 10], 2).reduce(5, 3)
    >>> print(dump_series(s, CMCurveModel(4, 0, 5), 3))
    model g2=4 g3=0 p=5 N=3 M=2
    0: 0 (mod 5^3)
    1: 2*5^1 (mod 5^4)
    """
    order = series.order if order is None else order
    lines = [model.header(precision, order)]
    for k in range(min(order, series.order)):
        c = series[k]
        lines.append(f"{k}: {c} (mod {series.p}^{c.absolute_precision})")
    if series.log_t_term:
        lines.append("# + log_p(t)")
    return "\n".join(lines)


if __name__ == "__main__":
    import doctest
    doctest.testmod()
