import cmath
import itertools
import math

import numpy as np
import pytest
from scipy import integrate

from eklimit.common import DomainError, PoleError, PoleProximityError
from eklimit.eklerch import (EKQuery, completed_kstar, direct_sum, functional_equation_defect,
                             i_integral, k1_limit_at_zero, kstar, kstar_a0_at_1, kstar_regularized,
                             kstar_regularized_at_1, small_z_limit, theta_star)
from eklimit.lattice import (gaussian_lattice, new_lattice, pairing, points_in_disc,
                             standard_lattices, torsion_points)
from eklimit.numeric import euler_constant
from eklimit.weierstrass import build_context, theta_log_derivative

Z_I = gaussian_lattice()
Z0, W0 = 0.21 + 0.1j, 0.37 - 0.2j


@pytest.mark.parametrize("L", standard_lattices())
@pytest.mark.parametrize("a, s", [(0, 3), (1, 3), (2, 4)])
def test_kstar_matches_direct_sum_in_convergent_range(L, a, s):
    q = EKQuery(a, Z0, W0, s, L)
    assert abs(kstar(q).value - direct_sum(q, 300.0)) < 1e-9


def test_kstar_untwisted_against_direct_sum_with_tail():
    q = EKQuery(0, 0, 0, 3, Z_I)
    gammas = points_in_disc(Z_I, 200.0, exclude=0)
    brute = np.sum(np.abs(gammas) ** -6.0) + 200.0 ** -4 / (2 * Z_I.area_param)
    assert abs(kstar(q).value - brute) < 1e-10
    assert abs(direct_sum(q, 200.0) - brute) < 1e-12


def test_odd_a_vanishes_at_the_origin():
    for a, s in ((1, 3), (3, 2.5 + 1j), (1, 0.4)):
        assert abs(kstar(EKQuery(a, 0, 0, s, Z_I)).value) < 1e-10


def test_pole_at_one_reports_residue():
    result = kstar(EKQuery(0, 0, 0, 1, Z_I))
    assert result.is_pole
    assert abs(result.pole_residue - 1 / Z_I.area_param) < 1e-12
    s = 1 + 1e-5
    near = (s - 1) * kstar(EKQuery(0, 0, 0, s, Z_I)).value
    assert abs(near - 1 / Z_I.area_param) < 1e-4


def test_pole_value_is_the_laurent_constant():
    L = new_lattice(1, 0.3 + 1.2j)
    A = L.area_param
    constant = kstar(EKQuery(0, 0, 0, 1, L)).value
    assert abs(A * constant - kstar_regularized_at_1(L)) < 1e-10
    assert abs(kstar_regularized(EKQuery(0, 0.2, 0, 5, L)) - kstar(EKQuery(0, 0.2, 0, 1, L)).value) < 1e-12


def test_trivial_zeros_and_removable_point_at_zero():
    for m in (1, 2, 3):
        assert abs(kstar(EKQuery(0, Z0, W0, -m, Z_I)).value) < 1e-12
    # K*_0(z0, w0, 0) = -<w0, z0> for z0 in the lattice
    value = kstar(EKQuery(0, 1, W0, 0, Z_I)).value
    assert abs(value + pairing(W0, 1, Z_I)) < 1e-12


def test_completed_kstar_raises_on_delta_poles():
    with pytest.raises(PoleError):
        completed_kstar(EKQuery(0, 0, 0.3, 0, Z_I))
    with pytest.raises(PoleError):
        completed_kstar(EKQuery(0, 0.3, 0, 1, Z_I))


def test_theta_star_against_brute_force():
    gammas = points_in_disc(Z_I, 40.0, exclude=0)
    brute = np.sum(np.exp(-np.abs(gammas) ** 2 / Z_I.area_param))
    assert abs(theta_star(0, 1.0, 0, 0, Z_I) - brute) < 1e-12
    assert abs(theta_star(1, 2.0, 0, 0, Z_I)) < 1e-14
    assert theta_star(0, 3.0, 0, 0, Z_I).real > 0


def test_i_integral_against_quadrature():
    expected, _ = integrate.quad(lambda t: theta_star(0, t, 0, 0, Z_I).real, 1, np.inf,
                                 epsabs=1e-12, epsrel=1e-12)
    assert abs(i_integral(0, 0, 0, 1, Z_I) - expected) < 1e-8


def test_i_integral_is_invariant_under_lattice_shift_of_w0():
    for gamma in (1, 1j, 2 - 3j):
        for s in (0.5, 2 + 1j):
            assert abs(i_integral(0, 0, W0 + gamma, s, Z_I) - i_integral(0, 0, W0, s, Z_I)) < 1e-10


def test_regularized_limit_is_real_and_matches_extrapolation():
    for L in standard_lattices():
        A = L.area_param
        closed = kstar_regularized_at_1(L)
        assert abs(closed.imag) < 1e-10
        h = 1e-4
        sides = [A * kstar(EKQuery(0, 0, 0, 1 + d, L)).value - 1 / d for d in (h, -h)]
        assert abs(sum(sides) / 2 - closed) < 1e-6


def test_closed_form_at_one_matches_generic_path():
    z = (Z_I.omega1 + Z_I.omega2) / 2
    generic = Z_I.area_param * kstar(EKQuery(0, 0, z, 1, Z_I)).value
    assert abs(kstar_a0_at_1(z, Z_I) - generic) < 1e-10
    assert abs(kstar_a0_at_1(z, Z_I).imag) < 1e-10


@pytest.mark.parametrize("L", standard_lattices())
def test_two_torsion_sum_at_one(L):
    total = sum(kstar_a0_at_1(t.value, L) for t in torsion_points(L, 2, include_zero=False))
    assert abs(total + 2 * math.log(2)) < 1e-8


def test_small_z_limit_against_small_z():
    L = new_lattice(1, 0.3 + 1.2j)
    z = 1e-4 * cmath.exp(0.7j)
    near = kstar_a0_at_1(z, L) + math.log(abs(z) ** 2)
    assert abs(near - small_z_limit(L)) < 1e-6


def test_functional_equation_on_grid():
    for a, s, L in itertools.product((0, 1, 2), (0.7 + 0.4j, 2.5 - 1j, -1.3 + 0.2j),
                                     standard_lattices()):
        assert functional_equation_defect(EKQuery(a, Z0, W0, s, L)) < 1e-9


def test_functional_equation_with_delta_terms():
    assert functional_equation_defect(EKQuery(0, 0, 0, 0.5, Z_I)) < 1e-10
    assert functional_equation_defect(EKQuery(0, W0, W0, 0.5, Z_I)) < 1e-10
    assert functional_equation_defect(EKQuery(0, 1j, 0, 2.5 + 0.5j, Z_I)) < 1e-9
    with pytest.raises(PoleProximityError):
        functional_equation_defect(EKQuery(0, 0.2, 0, 1 + 1e-4, Z_I))


def test_k1_limit_is_the_theta_log_derivative():
    ctx = build_context(Z_I)
    A = Z_I.area_param
    for w in (0.31 + 0.22j, 0.5, -(0.31 + 0.22j)):
        lhs = k1_limit_at_zero(w, Z_I) + complex(w).conjugate() / A
        assert abs(lhs - theta_log_derivative(w, ctx)) < 1e-8


def test_query_validation_and_divergent_sums():
    with pytest.raises(DomainError):
        EKQuery(-1, 0, 0, 2, Z_I)
    with pytest.raises(DomainError):
        direct_sum(EKQuery(0, 0, 0, 1, Z_I), 10.0)


def test_first_limit_formula_on_gaussian_lattice():
    ctx = build_context(Z_I)
    A = Z_I.area_param
    expected = -math.log(abs(ctx.delta) ** 2) / 12 - 2 * math.log(A) + 2 * euler_constant()
    assert abs(kstar_regularized_at_1(Z_I) - expected) < 1e-8
