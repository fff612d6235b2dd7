import numpy as np
import pytest
from sympy import Rational

from eklimit.common import (DivisibilityError, DomainError, IrrationalHalfPeriodError,
                            PrecisionExhaustedError, UnsupportedModelError)
from eklimit.padic import (CMCurveModel, PadicNumber, RationalSeries, dump_series,
                           formal_duplication, formal_group_log, formal_x_series,
                           half_period_values, log_theta_hat, padic_log, sigma_series, teichmuller,
                           theta_hat_series, verify_padic_distribution, weierstrass_p_laurent)
from eklimit.padic.formal import delta_prime, doubling_series

LEMNISCATIC = CMCurveModel(4, 0, 5)
EQUIANHARMONIC = CMCurveModel(0, 1, 7)


def test_scalar_values():
    assert padic_log(PadicNumber.from_rational(6, 5, 3)).congruent(55, 3)
    assert teichmuller(2, 5, 2).congruent(7, 2)
    for y in range(1, 7):
        assert padic_log(teichmuller(y, 7, 8)).is_zero()
    assert padic_log(PadicNumber.from_rational(25, 5, 4)).is_zero()


def test_logarithm_is_a_homomorphism():
    rng = np.random.default_rng(2024)
    p, n = 5, 10
    for _ in range(50):
        x, y = (int(v) for v in rng.integers(1, 10 ** 6, size=2))
        a, b = PadicNumber.from_rational(x, p, n), PadicNumber.from_rational(y, p, n)
        assert padic_log(a * b).congruent(padic_log(a) + padic_log(b), n)


def test_arithmetic_matches_rationals():
    rng = np.random.default_rng(3)
    p, n = 7, 6
    for _ in range(30):
        u = Rational(int(rng.integers(-500, 500)) or 1, int(rng.integers(1, 300)))
        v = Rational(int(rng.integers(1, 500)), int(rng.integers(1, 300)))
        a, b = PadicNumber.from_rational(u, p, n), PadicNumber.from_rational(v, p, n)
        assert (a * b).congruent(u * v, n + a.valuation + b.valuation)
        assert (a / b).congruent(u / v, n + a.valuation - b.valuation)
        assert (a - b).congruent(u - v, min(a.absolute_precision, b.absolute_precision))


def test_residue_and_divisibility():
    assert PadicNumber.from_rational(Rational(3, 2), 5, 4).residue() == 4
    with pytest.raises(DivisibilityError):
        PadicNumber.from_rational(Rational(1, 5), 5, 4).residue()
    with pytest.raises(DivisibilityError):
        PadicNumber.zero_at(5, 3).inverse()
    with pytest.raises(DivisibilityError):
        teichmuller(10, 5, 3)


def test_rational_series_algebra():
    f = RationalSeries([1, 2, 0, Rational(1, 3), 5], 5)
    assert f * f.inverse() == RationalSeries([1], 5)
    g = RationalSeries([0, 1, 1, 0, 2], 5)
    assert g.compose(g.reversion()) == RationalSeries([0, 1], 5)
    assert g.exp().log() == g
    assert f.derivative().integral() + f[0] == f


def test_formal_x_is_wp_of_formal_log():
    for model in (LEMNISCATIC, EQUIANHARMONIC, CMCurveModel(Rational(3, 2), 2, 11)):
        order = 14
        lam = formal_group_log(model, order + 1)
        unit = lam.shift_down(1)
        via_wp = weierstrass_p_laurent(model, order).compose(lam) / (unit * unit)
        assert via_wp == formal_x_series(model, order)


def test_formal_log_is_odd_and_normalised():
    lam = formal_group_log(EQUIANHARMONIC, 16)
    assert lam.is_odd()
    assert lam[1] == 1 and lam[3] == 0


def test_sigma_recursion_against_wp_oracle():
    for model in (LEMNISCATIC, EQUIANHARMONIC, CMCurveModel(Rational(3, 2), 2, 11)):
        order = 20
        wp = weierstrass_p_laurent(model, order)
        exponent = [Rational(0)] * (order - 1)
        for k in range(2, (order - 2) // 2 + 1):
            exponent[2 * k] = -wp[2 * k] / (2 * k * (2 * k - 1))
        oracle = RationalSeries(exponent, order - 1).exp().shift_up(1)
        assert sigma_series(model, order) == oracle


def test_sigma_low_coefficients():
    model = CMCurveModel(6, 5, 13)
    s = sigma_series(model, 10)
    assert s[5] == Rational(-6, 240)
    assert s[7] == Rational(-5, 840)
    assert s[9] == Rational(-36, 161280)


@pytest.mark.parametrize("model", [LEMNISCATIC, EQUIANHARMONIC, CMCurveModel(4, 0, 13)])
def test_duplication_two_routes(model):
    route_a, route_b = formal_duplication(model, 18)
    assert route_a == route_b


def test_doubling_series_doubles_the_formal_log():
    lam = formal_group_log(LEMNISCATIC, 12)
    assert lam.compose(doubling_series(LEMNISCATIC, 12)) == lam * 2


def test_half_period_values_and_delta_prime():
    assert half_period_values(LEMNISCATIC) == (1, 0, -1)
    assert delta_prime(LEMNISCATIC) == 4 and LEMNISCATIC.delta == 64
    with pytest.raises(IrrationalHalfPeriodError):
        half_period_values(EQUIANHARMONIC)


@pytest.mark.parametrize("p", [5, 7])
def test_padic_distribution_congruence(p):
    report = verify_padic_distribution(CMCurveModel(4, 0, p), 8, 16)
    assert report.passed
    assert report.lhs == 16 and report.tolerance == 0
    assert report.check_name == "padic-dist"


@pytest.mark.parametrize("p", [5, 7])
def test_padic_distribution_negative_control(p):
    report = verify_padic_distribution(CMCurveModel(4, 0, p), 8, 16, constant_perturbation=p)
    assert not report.passed


def test_padic_distribution_with_other_rational_model():
    # 4x^3 - 4x splits over Q for any rescaling g2 = 4u^4; u = 1/2 gives g2 = 1/4
    model = CMCurveModel(Rational(1, 4), 0, 13)
    assert verify_padic_distribution(model, 6, 12).passed


def test_unsupported_models():
    with pytest.raises(UnsupportedModelError):
        CMCurveModel(4, 0, 3)
    with pytest.raises(UnsupportedModelError):
        CMCurveModel(3, 1, 7)
    with pytest.raises(UnsupportedModelError):
        CMCurveModel(Rational(1, 5), 0, 5)
    with pytest.raises(UnsupportedModelError):
        CMCurveModel(4, 0, 9)


def test_prime_type_notes():
    assert "ordinary" in CMCurveModel(4, 0, 13).pi_norm_note
    assert "supersingular" in CMCurveModel(4, 0, 7).pi_norm_note
    assert "ordinary" in CMCurveModel(0, 1, 13).pi_norm_note


def test_log_theta_hat_matches_rational_logarithm():
    model, order, precision = LEMNISCATIC, 12, 10
    padic = log_theta_hat(model, 0, order, precision)
    exact = theta_hat_series(model, 0, order + 1).shift_down(1).log()
    assert padic.log_t_term
    assert padic.is_even()
    for k in range(padic.order):
        c = padic[k]
        assert c.absolute_precision >= 1
        assert c.congruent(exact[k], c.absolute_precision)


def test_precision_exhaustion_is_reported():
    series = RationalSeries([1, Rational(1, 25)], 2).reduce(5, 1)
    with pytest.raises(PrecisionExhaustedError):
        series.require_precision(1)


def test_dump_format():
    series = log_theta_hat(LEMNISCATIC, 0, 6, 4)
    lines = dump_series(series, LEMNISCATIC, 4).splitlines()
    assert lines[0] == "model g2=4 g3=0 p=5 N=4 M=6"
    assert lines[1].startswith("0: 0 (mod 5^")
    assert lines[-1] == "# + log_p(t)"
    assert len(lines) == series.order + 2


SERIES_OPERATIONS = {
    "mul": lambda f, g, h, u: f * g,
    "inverse": lambda f, g, h, u: u.inverse(),
    "compose": lambda f, g, h, u: g.compose(h),
    "log": lambda f, g, h, u: f.log(),
    "reversion": lambda f, g, h, u: h.reversion(),
}


def random_series(rng, order, constant, linear=None):
    """Small 5-integral coefficients; fixed constant term, optional fixed t-coefficient"""
    coefficients = [Rational(int(rng.integers(-9, 10)), int(rng.choice([1, 2, 3, 4, 6, 7])))
                    for _ in range(order)]
    coefficients[0] = Rational(constant)
    if linear is not None:
        coefficients[1] = Rational(linear)
    return RationalSeries(coefficients, order)


def random_operands(seed, order=8):
    rng = np.random.default_rng(seed)
    f = random_series(rng, order, 1)
    g = random_series(rng, order, int(rng.integers(-9, 10)))
    h = random_series(rng, order, 0, linear=Rational(int(rng.choice([1, 2, 3, 4, 6])), 7))
    u = random_series(rng, order, Rational(3, 2))
    return f, g, h, u


@pytest.mark.parametrize("name", sorted(SERIES_OPERATIONS))
def test_exact_and_reduced_series_pipelines_commute(name):
    p, n = 5, 6
    operation = SERIES_OPERATIONS[name]
    for seed in range(20):
        operands = random_operands(seed)
        exact = operation(*operands)
        reduced = operation(*(s.reduce(p, n) for s in operands))
        assert reduced.order == exact.order
        for k in range(reduced.order):
            c = reduced[k]
            assert c.absolute_precision >= n - 1
            assert c.congruent(exact[k], c.absolute_precision)


@pytest.mark.parametrize("name", sorted(SERIES_OPERATIONS))
def test_extra_digits_reproduce_the_coarse_result(name):
    p, n = 5, 6
    operation = SERIES_OPERATIONS[name]
    for seed in range(20, 40):
        operands = random_operands(seed)
        coarse = operation(*(s.reduce(p, n) for s in operands))
        fine = operation(*(s.reduce(p, n + 5) for s in operands))
        assert fine.order == coarse.order
        for k in range(coarse.order):
            known = coarse[k].absolute_precision
            assert fine[k].absolute_precision >= known
            assert fine[k].congruent(coarse[k], known)


def test_padic_reversion_composes_to_t():
    p, n = 5, 6
    for seed in range(10):
        _, _, h, _ = random_operands(seed)
        hp = h.reduce(p, n)
        identity = hp.compose(hp.reversion())
        for k in range(identity.order):
            assert identity[k].absolute_precision >= n
            assert identity[k].congruent(1 if k == 1 else 0, n)


def test_log_theta_hat_at_higher_precision_agrees():
    coarse = log_theta_hat(LEMNISCATIC, 0, 10, 6)
    fine = log_theta_hat(LEMNISCATIC, 0, 10, 11)
    for k in range(coarse.order):
        known = coarse[k].absolute_precision
        assert fine[k].congruent(coarse[k], known)


def test_symmetric_models_force_e_star_zero():
    with pytest.raises(DomainError):
        theta_hat_series(LEMNISCATIC, Rational(1, 3), 8)
    with pytest.raises(DomainError):
        log_theta_hat(EQUIANHARMONIC, 2, 8, 4)
    assert theta_hat_series(CMCurveModel(-4, 0, 13), 0, 6)[1] == 1
