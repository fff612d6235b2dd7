from typing import Dict, List, Tuple, Union
import cmath

ComplexValue = complex
RealValue = float
# what the CLI and the JSON reports carry for a complex number
ComplexPair = Tuple[float, float]
ParamValue = Union[str, int, float, bool, List, Dict]

ITERATION_CAP = 10_000


class EKError(Exception):
    """Base class of every error raised by eklimit"""


class DomainError(EKError, ValueError):
    """The inputs sit outside the domain of the mathematical operation"""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a pole"""


class LatticePointError(DomainError):
    """A point that must (not) lie in the lattice does (not)"""


class DegenerateLatticeError(DomainError):
    """Generators are (nearly) R-linearly dependent"""


class PoleProximityError(DomainError):
    """Evaluation is too close to a pole to be meaningful"""


class ConfigError(EKError, ValueError):
    """Invalid precision or command line configuration"""


class ConvergenceError(EKError, ArithmeticError):
    """An iterative scheme did not reach its tolerance within ITERATION_CAP steps"""


class ConsistencyError(EKError, ArithmeticError):
    """An internal cross-check failed, or a value went non-finite"""


class PadicError(EKError, ArithmeticError):
    """Base class for errors of the p-adic layer"""


class PrecisionExhaustedError(PadicError):
    """Tracked p-adic precision dropped below one digit"""


class DivisibilityError(PadicError):
    """An argument that must be a p-adic unit is divisible by p"""


class IrrationalHalfPeriodError(PadicError):
    """The cubic 4x^3 - g2 x - g3 does not split over Q"""


class UnsupportedModelError(PadicError):
    """The curve model is outside what the formal layer can handle"""


def ensure_finite(value: complex, what: str = "value") -> complex:
    """
    Raise ConsistencyError instead of letting a NaN/inf escape.

    Example
    ------
    >>> ensure_finite(1+2j)
    (1+2j)
    >>> ensure_finite(float("nan"), "sigma")  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    ConsistencyError: sigma is not finite: nan
    """
    if not cmath.isfinite(value):
        raise ConsistencyError(f"{what} is not finite: {value}")
    return value


def to_pair(value: complex) -> ComplexPair:
    """
    >>> to_pair(1.5-2j)
    (1.5, -2.0)
    """
    value = complex(value)
    return (value.real, value.imag)


def parse_complex(text: str) -> complex:
    """
    Parse the CLI complex format "re,im" (a bare real is accepted too).

    >>> parse_complex("0.25,0.4")
    (0.25+0.4j)
    >>> parse_complex("3")
    (3+0j)
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise ConfigError(f"expected 're,im', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


if __name__ == "__main__":
    import doctest
    doctest.testmod()
