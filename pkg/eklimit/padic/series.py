"""
Truncated power series in one variable t, known modulo t^order.

RationalSeries carries exact sympy Rationals, PadicSeries carries PadicNumbers of
one prime. Both share the arithmetic below; every operation returns a series whose
order is exactly what the inputs determine.
"""
from abc import ABC, abstractmethod
from typing import List, Sequence

from sympy import Rational

from ..common import DomainError, PrecisionExhaustedError
from .number import PadicNumber, padic_log


class TruncatedSeries(ABC):

    def __init__(self, coefficients: Sequence, order: int) -> None:
        if order < 0:
            raise DomainError(f"series order must be >= 0, got {order}")
        coefficients = list(coefficients)[:order]
        coefficients += [None] * (order - len(coefficients))
        self.order = order
        self.coefficients = tuple(self._zero() if c is None else self._scalar(c)
                                  for c in coefficients)

    @abstractmethod
    def _zero(self):
        pass

    @abstractmethod
    def _scalar(self, value):
        """Convert an exact number (or a coefficient) to the coefficient type"""

    @abstractmethod
    def _is_zero(self, c) -> bool:
        pass

    @abstractmethod
    def _make(self, coefficients: Sequence, order: int) -> "TruncatedSeries":
        pass

    def __getitem__(self, k: int):
        return self.coefficients[k]

    def __len__(self) -> int:
        return self.order

    def valuation(self) -> int:
        """Index of the first non-zero coefficient (order if none)"""
        for k, c in enumerate(self.coefficients):
            if not self._is_zero(c):
                return k
        return self.order

    def truncate(self, order: int) -> "TruncatedSeries":
        return self._make(self.coefficients, min(order, self.order))

    def _sum(self, terms: List):
        if not terms:
            return self._zero()
        total = terms[0]
        for term in terms[1:]:
            total = total + term
        return total

    def _convolve(self, other: "TruncatedSeries", order: int) -> List:
        a, b = self.coefficients, other.coefficients
        out = []
        for k in range(order):
            terms = [a[j] * b[k - j] for j in range(max(0, k - len(b) + 1), min(k + 1, len(a)))]
            out.append(self._sum(terms))
        return out

    def __add__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            if self.order == 0:
                return self
            return self._make((self[0] + self._scalar(other),) + self.coefficients[1:], self.order)
        order = min(self.order, other.order)
        return self._make([self[k] + other[k] for k in range(order)], order)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return self._make([-c for c in self.coefficients], self.order)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-other)

    def __rsub__(self, other) -> "TruncatedSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            factor = self._scalar(other)
            return self._make([c * factor for c in self.coefficients], self.order)
        # a = t^u(...) mod t^M1, b = t^v(...) mod t^M2: ab is known mod t^min(M1+v, M2+u)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        return self._make(self._convolve(other, order), order)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        factor = self._scalar(other)
        return self._make([c / factor for c in self.coefficients], self.order)

    def __pow__(self, exponent: int) -> "TruncatedSeries":
        if exponent < 0:
            return self.inverse() ** -exponent
        result = self._make([1], self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; needs an invertible constant term"""
        if self.order == 0 or self._is_zero(self[0]):
            raise DomainError("series with zero constant term has no inverse")
        c0 = self[0]
        out = [self._scalar(1) / c0]
        for k in range(1, self.order):
            acc = self._sum([self[j] * out[k - j] for j in range(1, k + 1)])
            out.append(-acc / c0)
        return self._make(out, self.order)

    def shift_down(self, k: int) -> "TruncatedSeries":
        """Divide by t^k; the first k coefficients must vanish"""
        if self.valuation() < k:
            raise DomainError(f"series is not divisible by t^{k}")
        return self._make(self.coefficients[k:], self.order - k)

    def shift_up(self, k: int) -> "TruncatedSeries":
        """Multiply by t^k"""
        return self._make([self._zero()] * k + list(self.coefficients), self.order + k)

    def derivative(self) -> "TruncatedSeries":
        return self._make([self[k] * k for k in range(1, self.order)], max(self.order - 1, 0))

    def integral(self) -> "TruncatedSeries":
        """Antiderivative with zero constant term"""
        out = [self._zero()] + [self[k] / (k + 1) for k in range(self.order)]
        return self._make(out, self.order + 1)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """
        self(inner(t)); inner must have zero constant term.
        """
        v = inner.valuation()
        if v < 1:
            raise DomainError("can only substitute a series with zero constant term")
        order = min(self.order * v, inner.order)
        result = [self._zero() for _ in range(order)]
        power = self._make([1], order)
        inner_cut = inner.truncate(order)
        for k in range(min(self.order, order // v + 1)):
            if k > 0:
                power = self._make(power._convolve(inner_cut, order), order)
            if self._is_zero(self[k]):
                continue
            c = self[k]
            result = [result[j] + c * power[j] for j in range(order)]
        return self._make(result, order)

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse g with self(g(t)) = t; needs self = c1 t + O(t²), c1 invertible"""
        if self.order < 2 or not self._is_zero(self[0]) or self._is_zero(self[1]):
            raise DomainError("reversion needs a series c1 t + ... with c1 invertible")
        order = self.order
        c1 = self[1]
        g = self._make([self._zero(), self._scalar(1) / c1], order)
        for k in range(2, order):
            error = self.compose(g)[k]
            coefficients = list(g.coefficients)
            coefficients[k] = coefficients[k] - error / c1
            g = self._make(coefficients, order)
        return g

    def exp(self) -> "TruncatedSeries":
        """exp of a series with zero constant term, from E' = f' E"""
        if self.order and not self._is_zero(self[0]):
            raise DomainError("exp needs a zero constant term")
        out = [self._scalar(1)]
        for k in range(1, self.order):
            acc = self._sum([self[j] * j * out[k - j] for j in range(1, k + 1)])
            out.append(acc / k)
        return self._make(out, self.order)

    def log(self) -> "TruncatedSeries":
        """log of a series with constant term 1, as ∫ f'/f"""
        if self.order == 0 or self[0] != self._scalar(1):
            raise DomainError("log needs constant term 1")
        quotient = self.derivative() * self.truncate(self.order - 1).inverse()
        return quotient.integral()

    def is_odd(self) -> bool:
        return all(self._is_zero(self[k]) for k in range(0, self.order, 2))

    def is_even(self) -> bool:
        return all(self._is_zero(self[k]) for k in range(1, self.order, 2))


class RationalSeries(TruncatedSeries):
    """
    Exact series over Q.

    Example
    ------
    >>> f = RationalSeries([0, 1, 0, 1], 6)
    >>> list((f * f).coefficients)
    [0, 0, 1, 0, 2, 0, 1]
    >>> g = f.reversion()
    >>> list(f.compose(g).coefficients)
    [0, 1, 0, 0, 0, 0]
    >>> list(RationalSeries([0, 1], 5).exp().coefficients)
    [1, 1, 1/2, 1/6, 1/24]
    """

    def _zero(self):
        return Rational(0)

    def _scalar(self, value):
        return Rational(value)

    def _is_zero(self, c) -> bool:
        return c == 0

    def _make(self, coefficients: Sequence, order: int) -> "RationalSeries":
        return RationalSeries(coefficients, order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return self.order == other.order and self.coefficients == other.coefficients

    def __repr__(self) -> str:
        return f"RationalSeries({list(self.coefficients)}, {self.order})"

    def reduce(self, p: int, precision: int) -> "PadicSeries":
        """Image in Q_p[[t]] with relative precision `precision` per coefficient"""
        return PadicSeries([PadicNumber.from_rational(c, p, precision) for c in self.coefficients],
                           self.order, p, precision)

    def min_valuation(self, p: int) -> int:
        """Smallest p-adic valuation among the non-zero coefficients"""
        values = [PadicNumber.from_rational(c, p, 1).valuation
                  for c in self.coefficients if c != 0]
        return min(values) if values else 0


class PadicSeries(TruncatedSeries):
    """
    Series over Q_p with every coefficient carrying its own precision. An exact zero
    coefficient is recorded as 0 mod p^precision.

    log_t_term marks the logarithm of a series vanishing at t = 0: the value is
    log_p(t) plus the stored series, and log_p(t) is kept symbolic.
    """

    def __init__(self, coefficients: Sequence, order: int, p: int, precision: int,
                 log_t_term: bool = False) -> None:
        self.p = p
        self.precision = precision
        self.log_t_term = log_t_term
        super().__init__(coefficients, order)

    def _zero(self):
        return PadicNumber.zero_at(self.p, self.precision)

    def _scalar(self, value):
        if isinstance(value, PadicNumber):
            return value
        return PadicNumber.from_rational(value, self.p, self.precision)

    def _is_zero(self, c) -> bool:
        return c.zero

    def _make(self, coefficients: Sequence, order: int) -> "PadicSeries":
        return PadicSeries(coefficients, order, self.p, self.precision)

    def __repr__(self) -> str:
        return f"PadicSeries([{', '.join(str(c) for c in self.coefficients)}], {self.order}, p={self.p})"

    def log(self) -> "PadicSeries":
        """
        log_p of a series with unit constant term c0:
        log_p(c0) - Σ_{n>=1} (-1)^n V^n / n, V = f/c0 - 1.

        Example
        ------
        >>> f = RationalSeries([1, 5], 4).reduce(5, 6)
        >>> [str(c) for c in f.log().coefficients]
        ['0', '1*5^1', '312*5^2', '42*5^3']
        """
        if self.order == 0 or self[0].zero or self[0].valuation != 0:
            raise DomainError("p-adic log of a series needs a unit constant term")
        c0 = self[0]
        v = self / c0 - 1
        result = v
        power = v
        for n in range(2, self.order):
            power = power * v
            term = power / n
            result = result - term if n % 2 == 0 else result + term
        constant = padic_log(c0)
        return self._make((result[0] + constant,) + result.coefficients[1:], result.order)

    def congruent(self, other: "PadicSeries", n: int) -> List[bool]:
        """Coefficient-wise congruence mod p^n over the common order"""
        order = min(self.order, other.order)
        return [self[k].congruent(other[k], n) for k in range(order)]

    def require_precision(self, n: int) -> "PadicSeries":
        """Raise unless every coefficient is known at least modulo p^n"""
        for k, c in enumerate(self.coefficients):
            if c.absolute_precision < n:
                raise PrecisionExhaustedError(
                    f"coefficient of t^{k} is only known mod {self.p}^{c.absolute_precision}, "
                    f"need {self.p}^{n}")
        return self


if __name__ == "__main__":
    import doctest
    doctest.testmod()
