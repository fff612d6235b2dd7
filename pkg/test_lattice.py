import math

import numpy as np
import pytest

from eklimit.common import ConfigError, DegenerateLatticeError, DomainError, LatticePointError
from eklimit.lattice import (TorsionPoint, distance_to_lattice, eisenstein_lattice, gaussian_lattice,
                             is_lattice_point, new_lattice, pairing, pairing_character_sum,
                             parse_lattice, points_in_disc, random_points, require_off_lattice,
                             standard_lattices, torsion_points)


def test_orientation_is_normalized():
    L = new_lattice(1j, 1)
    assert L.tau.imag > 0
    assert L.omega1 == 1 and L.omega2 == 1j


def test_degenerate_generators_rejected():
    with pytest.raises(DegenerateLatticeError):
        new_lattice(1, 3)
    with pytest.raises(DegenerateLatticeError):
        new_lattice(0, 1j)


def test_area_parameter():
    assert abs(gaussian_lattice().area_param - 1 / math.pi) < 1e-15
    assert abs(eisenstein_lattice().area_param - math.sqrt(3) / (2 * math.pi)) < 1e-15


def test_serialisation_round_trip():
    for L in standard_lattices():
        text = ",".join(repr(v) for v in L.as_floats())
        assert parse_lattice(text) == L


def test_pairing_is_a_unitary_bicharacter():
    L = new_lattice(1, 0.3 + 1.2j)
    rng = np.random.default_rng(1)
    for _ in range(20):
        z, w, u = (complex(*rng.normal(size=2)) for _ in range(3))
        assert abs(abs(pairing(z, w, L)) - 1) < 1e-14
        assert abs(pairing(z + u, w, L) - pairing(z, w, L) * pairing(u, w, L)) < 1e-12
        assert abs(pairing(z, w, L) * pairing(w, z, L) - 1) < 1e-12


def test_pairing_is_trivial_on_lattice_pairs():
    L = new_lattice(1, 0.3 + 1.2j)
    for gamma in points_in_disc(L, 4.0):
        for delta in (L.omega1, L.omega2, L.omega1 - 2 * L.omega2):
            assert abs(pairing(gamma, delta, L) - 1) < 1e-10


def test_points_in_disc_is_complete_and_ordered():
    L = gaussian_lattice()
    points = points_in_disc(L, 3.0)
    brute = [m + 1j * n for m in range(-4, 5) for n in range(-4, 5) if abs(m + 1j * n) <= 3.0]
    assert len(points) == len(brute)
    norms = np.abs(points)
    assert np.all(np.diff(np.round(norms, 10)) >= 0)


def test_points_in_disc_excludes_minus_shift():
    L = gaussian_lattice()
    points = points_in_disc(L, 3.0, exclude=1 + 1j)
    assert not np.any(np.abs(points + (1 + 1j)) < 1e-9)
    assert len(points) == len(points_in_disc(L, 3.0)) - 1


def test_torsion_points_and_character_sums():
    L = eisenstein_lattice()
    for n in (2, 3, 5):
        points = torsion_points(L, n)
        assert len(points) == n * n
        assert all(is_lattice_point(n * t.value, L) for t in points)
        assert abs(pairing_character_sum(L, n * L.omega2, n) - n * n) < 1e-9
        assert abs(pairing_character_sum(L, L.omega1, n)) < 1e-9


def test_random_points_are_seeded_and_avoid_two_torsion():
    L = new_lattice(1, 0.3 + 1.2j)
    first = random_points(L, 10, 42)
    assert first == random_points(L, 10, 42)
    assert first != random_points(L, 10, 43)
    for z in first:
        assert distance_to_lattice(z, L) > 0.05 * L.scale
        assert distance_to_lattice(2 * z, L) > 0.05 * L.scale * 0.99


def test_require_off_lattice():
    L = gaussian_lattice()
    with pytest.raises(LatticePointError):
        require_off_lattice(3 - 1j, L)
    require_off_lattice(0.5 + 0.5j, L)


def test_invalid_enumeration_arguments_are_domain_errors():
    L = gaussian_lattice()
    with pytest.raises(DomainError):
        torsion_points(L, 0)
    with pytest.raises(DomainError):
        points_in_disc(L, 0.0)
    with pytest.raises(DomainError):
        TorsionPoint(2, 0, 2, L)
    with pytest.raises(ConfigError):
        parse_lattice("1,0,0")
