"""
Capped relative precision p-adic numbers in Q_p, the Iwasawa logarithm and
Teichmüller lifts.

A non-zero PadicNumber is p^valuation · unit with unit known modulo p^precision.
A zero carries only its absolute precision: it is 0 modulo p^valuation.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import Rational, mod_inverse, multiplicity

from ..common import (ITERATION_CAP, ConvergenceError, DivisibilityError, PadicError,
                      PrecisionExhaustedError)

Exact = Union[int, Fraction, Rational]


def _split_rational(x: Exact):
    r = Rational(x)
    return int(r.p), int(r.q)


@dataclass(frozen=True)
class PadicNumber:
    """
    Example
    ------
    >>> a = PadicNumber.from_rational(10, 5, 4)
    >>> a.valuation, a.unit, a.precision
    (1, 2, 4)
    >>> str(a + PadicNumber.from_rational(15, 5, 4))
    '1*5^2'
    >>> str(PadicNumber.from_rational(Rational(1, 5), 5, 3) * 5)
    '1*5^0'
    """

    p: int
    valuation: int
    unit: int
    precision: int
    zero: bool = False

    def __post_init__(self):
        if not self.zero:
            if self.precision < 1:
                raise PrecisionExhaustedError(f"a non-zero p-adic number needs precision >= 1, got {self.precision}")
            if self.unit % self.p == 0:
                raise PadicError(f"unit {self.unit} is divisible by p = {self.p}")

    @classmethod
    def zero_at(cls, p: int, absolute_precision: int) -> "PadicNumber":
        return cls(p, absolute_precision, 0, 0, zero=True)

    @classmethod
    def from_rational(cls, x: Exact, p: int, precision: int) -> "PadicNumber":
        """x with relative precision N; an exact 0 becomes 0 mod p^N"""
        num, den = _split_rational(x)
        if num == 0:
            return cls.zero_at(p, precision)
        v_num = multiplicity(p, abs(num))
        v_den = multiplicity(p, den)
        num //= p ** v_num
        den //= p ** v_den
        modulus = p ** precision
        unit = num * mod_inverse(den, modulus) % modulus
        return cls(p, v_num - v_den, unit, precision)

    @classmethod
    def from_absolute(cls, value: int, p: int, absolute_precision: int,
                      valuation_floor: int = 0) -> "PadicNumber":
        """
        p^valuation_floor · value, known modulo p^absolute_precision.
        """
        span = absolute_precision - valuation_floor
        if span <= 0:
            return cls.zero_at(p, absolute_precision)
        value %= p ** span
        if value == 0:
            return cls.zero_at(p, absolute_precision)
        k = multiplicity(p, value)
        valuation = valuation_floor + k
        return cls(p, valuation, value // p ** k, absolute_precision - valuation)

    @property
    def absolute_precision(self) -> int:
        return self.valuation if self.zero else self.valuation + self.precision

    def is_zero(self) -> bool:
        return self.zero

    def residue(self) -> int:
        """Image in Z/p; requires a p-integral number"""
        if self.zero or self.valuation > 0:
            return 0
        if self.valuation < 0:
            raise DivisibilityError(f"{self} is not p-integral")
        return self.unit % self.p

    def lift(self) -> Rational:
        """A rational representative: p^valuation · unit"""
        if self.zero:
            return Rational(0)
        return Rational(self.unit) * Rational(self.p) ** self.valuation

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise PadicError(f"cannot mix {self.p}-adic and {other.p}-adic numbers")
            return other
        num, _ = _split_rational(other)
        if num == 0:
            return PadicNumber.zero_at(self.p, max(self.absolute_precision, self.precision))
        v = multiplicity(self.p, abs(num)) - multiplicity(self.p, Rational(other).q)
        # exact constants never limit the precision of the result
        return PadicNumber.from_rational(other, self.p,
                                         max(1, self.precision, self.absolute_precision - v))

    def __neg__(self) -> "PadicNumber":
        if self.zero:
            return self
        modulus = self.p ** self.precision
        return PadicNumber(self.p, self.valuation, -self.unit % modulus, self.precision)

    def __add__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if self.zero and other.zero:
            return PadicNumber.zero_at(self.p, min(self.valuation, other.valuation))
        absolute = min(self.absolute_precision, other.absolute_precision)
        base = min(x.valuation for x in (self, other) if not x.zero)
        if absolute <= base:
            return PadicNumber.zero_at(self.p, absolute)
        total = 0
        for x in (self, other):
            if not x.zero:
                total += x.unit * self.p ** (x.valuation - base)
        return PadicNumber.from_absolute(total, self.p, absolute, base)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicNumber":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PadicNumber":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if self.zero or other.zero:
            # 0 mod p^a times p^v·u is 0 mod p^(a+v)
            if self.zero and other.zero:
                return PadicNumber.zero_at(self.p, self.valuation + other.valuation)
            z, x = (self, other) if self.zero else (other, self)
            return PadicNumber.zero_at(self.p, z.valuation + x.valuation)
        precision = min(self.precision, other.precision)
        modulus = self.p ** precision
        return PadicNumber(self.p, self.valuation + other.valuation,
                           self.unit * other.unit % modulus, precision)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.zero:
            raise DivisibilityError("cannot invert a p-adic zero")
        modulus = self.p ** self.precision
        return PadicNumber(self.p, -self.valuation, mod_inverse(self.unit, modulus), self.precision)

    def __truediv__(self, other) -> "PadicNumber":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "PadicNumber":
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "PadicNumber":
        if exponent < 0:
            return self.inverse() ** -exponent
        if self.zero:
            if exponent == 0:
                raise PadicError("0^0 is undefined for an inexact p-adic zero")
            return PadicNumber.zero_at(self.p, self.valuation * exponent)
        modulus = self.p ** self.precision
        return PadicNumber(self.p, self.valuation * exponent,
                           pow(self.unit, exponent, modulus), self.precision)

    def congruent(self, other, n: int) -> bool:
        """
        True when self ≡ other mod p^n is established by the known digits.

        >>> a = PadicNumber.from_rational(6, 5, 3)
        >>> a.congruent(131, 3), a.congruent(131, 4)
        (True, False)
        """
        difference = self - self._coerce(other)
        if difference.absolute_precision < n:
            return False
        return difference.zero or difference.valuation >= n

    def __str__(self) -> str:
        if self.zero:
            return "0"
        return f"{self.unit}*{self.p}^{self.valuation}"


def padic_log(x: PadicNumber) -> PadicNumber:
    """
    Iwasawa logarithm: log_p(p) = 0, log_p(ζ) = 0 on roots of unity, and
    log_p(u) = log(u^(p-1))/(p-1) with the series of log(1 + w) on the 1-unit u^(p-1).

    The result is known modulo p^N where N is the relative precision of x.

    Example
    ------
    >>> padic_log(PadicNumber.from_rational(6, 5, 3)).congruent(55, 3)
    True
    >>> padic_log(PadicNumber.from_rational(1, 7, 5)).is_zero()
    True
    """
    if x.zero:
        raise DivisibilityError("the p-adic logarithm of 0 is undefined")
    p, n = x.p, x.precision
    # terms w^k/k have valuation >= k - v_p(k); find the last one that matters
    last = 1
    while last - _log_floor(last, p) < n + 1:
        last += 1
        if last > ITERATION_CAP:
            raise ConvergenceError("p-adic logarithm series did not terminate")
    guard = _log_floor(last, p)
    modulus = p ** (n + guard)
    w = (pow(x.unit, p - 1, modulus) - 1) % modulus
    total = 0
    power = 1
    for k in range(1, last + 1):
        power = power * w % modulus
        e = multiplicity(p, k)
        term = (power // p ** e) * mod_inverse(k // p ** e, p ** n)
        total += term if k % 2 else -term
    total = total * mod_inverse(p - 1, p ** n) % p ** n
    return PadicNumber.from_absolute(total, p, n)


def _log_floor(k: int, p: int) -> int:
    """Largest e with p^e <= k"""
    e = 0
    while p ** (e + 1) <= k:
        e += 1
    return e


def teichmuller(y: int, p: int, n: int) -> PadicNumber:
    """
    The (p-1)-th root of unity congruent to y mod p, to precision n, by Newton
    iteration on x^(p-1) = 1.

    Example
    ------
    >>> teichmuller(2, 5, 2).unit
    7
    >>> teichmuller(1, 5, 6).unit
    1
    """
    if y % p == 0:
        raise DivisibilityError(f"{y} is divisible by {p}; no Teichmüller lift")
    modulus = p ** n
    x = y % p
    for _ in range(ITERATION_CAP):
        residual = (pow(x, p - 1, modulus) - 1) % modulus
        if residual == 0:
            return PadicNumber(p, 0, x, n)
        slope = (p - 1) * pow(x, p - 2, modulus) % modulus
        x = (x - residual * mod_inverse(slope, modulus)) % modulus
    raise ConvergenceError(f"Teichmüller lift of {y} mod {p}^{n} did not converge")


if __name__ == "__main__":
    import doctest
    doctest.testmod()
