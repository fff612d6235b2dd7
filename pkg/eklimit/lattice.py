"""
Oriented lattices Γ = Zω1 + Zω2 in C, the area parameter A, the pairing <z, w>
and enumeration of lattice and torsion points.

Membership and reduction go through the inverse period matrix in real coordinates,
so "is z in Γ" is an integer rounding test measured against 1e-9·√A.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple
import cmath
import math

import numpy as np

from .common import ConfigError, DegenerateLatticeError, DomainError, LatticePointError

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class Lattice:
    """
    Lattice with positively oriented generators, Im(omega2/omega1) > 0.
    Build it with new_lattice, which normalizes the orientation.
    """

    omega1: complex
    omega2: complex

    @cached_property
    def area_param(self) -> float:
        """A = area of the fundamental domain / π"""
        return abs((self.omega1 * self.omega2.conjugate()).imag) / math.pi

    @cached_property
    def period_matrix(self) -> np.ndarray:
        return np.array([[self.omega1.real, self.omega2.real],
                         [self.omega1.imag, self.omega2.imag]])

    @cached_property
    def inverse_period_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.period_matrix)

    @property
    def tau(self) -> complex:
        return self.omega2 / self.omega1

    @property
    def scale(self) -> float:
        """√A, the length unit of all membership tolerances"""
        return math.sqrt(self.area_param)

    def as_floats(self) -> List[float]:
        """
        >>> new_lattice(1, 1j).as_floats()
        [1.0, 0.0, 0.0, 1.0]
        """
        return [self.omega1.real, self.omega1.imag, self.omega2.real, self.omega2.imag]

    def scaled(self, factor: complex) -> "Lattice":
        return new_lattice(self.omega1 * factor, self.omega2 * factor)

    def point(self, m: int, n: int) -> complex:
        return m * self.omega1 + n * self.omega2

    def __str__(self) -> str:
        return ",".join(repr(v) for v in self.as_floats())


def new_lattice(omega1: complex, omega2: complex) -> Lattice:
    """
    Build a lattice, swapping the generators if needed so that Im(ω2/ω1) > 0.

    Example
    ------
    >>> L = new_lattice(1, 1j)
    >>> round(L.area_param * math.pi, 12)
    1.0
    >>> new_lattice(1, -1j).tau.imag > 0
    True
    >>> new_lattice(1, 2)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    DegenerateLatticeError: generators (1+0j) and (2+0j) are R-linearly dependent
    """
    omega1, omega2 = complex(omega1), complex(omega2)
    if omega1 == 0 or omega2 == 0:
        raise DegenerateLatticeError("lattice generators must be non-zero")
    ratio = omega2 / omega1
    if abs(ratio.imag) <= 1e-12 * abs(ratio):
        raise DegenerateLatticeError(
            f"generators {omega1} and {omega2} are R-linearly dependent")
    if ratio.imag < 0:
        omega1, omega2 = omega2, omega1
    return Lattice(omega1, omega2)


def parse_lattice(text: str) -> Lattice:
    """
    Parse the "re1,im1,re2,im2" serialisation.

    >>> parse_lattice("1,0,0.3,1.2").omega2
    (0.3+1.2j)
    """
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"expected re1,im1,re2,im2, got {text!r}")
    return new_lattice(complex(parts[0], parts[1]), complex(parts[2], parts[3]))


def gaussian_lattice() -> Lattice:
    """Z[i]"""
    return new_lattice(1, 1j)


def eisenstein_lattice() -> Lattice:
    """Z + ζ3 Z"""
    return new_lattice(1, cmath.exp(2j * math.pi / 3))


def pairing(z: complex, w: complex, L: Lattice) -> complex:
    """
    <z, w> = exp((z w̄ - w z̄) / A), a unit complex number.

    Example
    ------
    >>> L = gaussian_lattice()
    >>> p = pairing(0.5, 1j, L)
    >>> round(p.real, 12), round(p.imag, 12) + 0.0
    (-1.0, 0.0)
    >>> pairing(0.3 + 0.2j, 0.3 + 0.2j, L)
    (1+0j)
    """
    z, w = complex(z), complex(w)
    exponent = (z * w.conjugate() - w * z.conjugate()) / L.area_param
    # the exponent is purely imaginary; drop the rounding noise in its real part
    return cmath.exp(1j * exponent.imag)


def lattice_coordinates(z: complex, L: Lattice) -> Tuple[float, float]:
    """Real (x, y) with z = x ω1 + y ω2"""
    x, y = L.inverse_period_matrix @ np.array([z.real, z.imag])
    return float(x), float(y)


def nearest_lattice_point(z: complex, L: Lattice) -> Tuple[int, int]:
    """Integer coordinates obtained by rounding the real coordinates of z"""
    x, y = lattice_coordinates(complex(z), L)
    return int(round(x)), int(round(y))


def distance_to_lattice(z: complex, L: Lattice) -> float:
    m, n = nearest_lattice_point(z, L)
    return abs(complex(z) - L.point(m, n))


def is_lattice_point(z: complex, L: Lattice) -> bool:
    """
    >>> L = gaussian_lattice()
    >>> is_lattice_point(2 - 3j, L), is_lattice_point(0.5, L)
    (True, False)
    """
    return distance_to_lattice(z, L) < MEMBERSHIP_TOL * L.scale


def require_lattice_point(z: complex, L: Lattice) -> Tuple[int, int]:
    if not is_lattice_point(z, L):
        raise LatticePointError(f"{z} is not a point of the lattice ({L})")
    return nearest_lattice_point(z, L)


def require_off_lattice(z: complex, L: Lattice, what: str = "z") -> None:
    if is_lattice_point(z, L):
        raise LatticePointError(f"{what} = {z} lies in the lattice ({L})")


def _coefficient_bounds(L: Lattice, radius: float) -> Tuple[int, int]:
    # |m| <= radius·||row_1 of the inverse matrix||, same for n
    rows = np.linalg.norm(L.inverse_period_matrix, axis=1)
    return int(math.ceil(radius * rows[0])) + 1, int(math.ceil(radius * rows[1])) + 1


def points_in_disc(L: Lattice, radius: float, exclude: Optional[complex] = None,
                   center: complex = 0) -> np.ndarray:
    """
    All γ in Γ with |γ + center| <= radius, sorted by |γ|, then by angle in [0, 2π).
    When exclude lies in Γ, -exclude is left out (the Σ* convention).

    Example
    ------
    >>> L = gaussian_lattice()
    >>> len(points_in_disc(L, 1.5)), len(points_in_disc(L, 0.5))
    (9, 1)
    >>> len(points_in_disc(L, 1.5, exclude=0))
    8
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    center = complex(center)
    bound_m, bound_n = _coefficient_bounds(L, radius + abs(center))
    m, n = np.meshgrid(np.arange(-bound_m, bound_m + 1), np.arange(-bound_n, bound_n + 1),
                       indexing="ij")
    gammas = (m * L.omega1 + n * L.omega2).ravel()
    gammas = gammas[np.abs(gammas + center) <= radius]

    if exclude is not None and is_lattice_point(exclude, L):
        gammas = gammas[np.abs(gammas + complex(exclude)) >= MEMBERSHIP_TOL * L.scale]

    # rounding the norm makes symmetric points tie exactly before the angle decides
    norms = np.round(np.abs(gammas) / L.scale, 10)
    angles = np.mod(np.angle(gammas), 2 * math.pi)
    order = np.lexsort((angles, norms))
    return gammas[order]


@dataclass(frozen=True)
class TorsionPoint:
    """z = (num1·ω1 + num2·ω2) / order_n, with 0 <= num1, num2 < order_n"""

    num1: int
    num2: int
    order_n: int
    lattice: Lattice

    def __post_init__(self):
        if not (0 <= self.num1 < self.order_n and 0 <= self.num2 < self.order_n):
            raise DomainError(f"torsion numerators must lie in [0, {self.order_n})")

    @property
    def value(self) -> complex:
        return self.lattice.point(self.num1, self.num2) / self.order_n

    @property
    def is_zero(self) -> bool:
        return self.num1 == 0 and self.num2 == 0


def torsion_points(L: Lattice, n: int, include_zero: bool = True) -> List[TorsionPoint]:
    """
    Reduced representatives of the n-torsion (1/n)Γ/Γ.

    Example
    ------
    >>> L = gaussian_lattice()
    >>> [t.value for t in torsion_points(L, 2, include_zero=False)]
    [0.5j, (0.5+0j), (0.5+0.5j)]
    >>> len(torsion_points(L, 3))
    9
    """
    if n < 1:
        raise DomainError(f"torsion order must be >= 1, got {n}")
    points = [TorsionPoint(a, b, n, L) for a in range(n) for b in range(n)]
    if not include_zero:
        points = [t for t in points if not t.is_zero]
    return points


def pairing_character_sum(L: Lattice, gamma: complex, n: int) -> complex:
    """
    Σ over z_n in (1/n)Γ/Γ of <γ, z_n>: n² when γ ∈ nΓ, else 0.

    >>> L = gaussian_lattice()
    >>> round(abs(pairing_character_sum(L, 2, 2)), 10), round(abs(pairing_character_sum(L, 1, 2)), 10)
    (4.0, 0.0)
    """
    require_lattice_point(gamma, L)
    return complex(sum(pairing(gamma, t.value, L) for t in torsion_points(L, n)))


def random_points(L: Lattice, count: int, seed: int, avoid_torsion: int = 2,
                  margin: float = 0.05) -> List[complex]:
    """
    Points drawn uniformly in the fundamental parallelogram, rejecting those within
    margin·√A of any avoid_torsion-torsion point (the lattice itself included).
    """
    rng = np.random.default_rng(seed)
    forbidden = [t.value for t in torsion_points(L, avoid_torsion)] if avoid_torsion else [0j]
    corners = [0j, L.omega1, L.omega2, L.omega1 + L.omega2]
    points: List[complex] = []
    while len(points) < count:
        u, v = rng.random(2)
        z = u * L.omega1 + v * L.omega2
        near = (abs(z - f - c) < margin * L.scale for f in forbidden for c in corners)
        if not any(near):
            points.append(complex(z))
    return points


def standard_lattices() -> Sequence[Lattice]:
    """The test set: Z[i], the oblique lattice (1, 0.3+1.2i) and Z + ζ3 Z"""
    return (gaussian_lattice(), new_lattice(1, 0.3 + 1.2j), eisenstein_lattice())


if __name__ == "__main__":
    import doctest
    doctest.testmod()
