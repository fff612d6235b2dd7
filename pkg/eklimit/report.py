from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional
from time import perf_counter
import json

from .common import ComplexValue, ParamValue, to_pair
from .lattice import Lattice


@dataclass
class VerificationReport:
    """
    Outcome of one identity check. abs_error is |lhs - rhs| and passed is
    abs_error <= tolerance; both are derived in __post_init__, never passed in.
    A side identity checked alongside enters through require().

    Example
    ------
    >>> r = VerificationReport("demo", [1.0, 0.0, 0.0, 1.0], {"z": [0.5, 0.0]}, 1.0, 1.0 + 1e-12, 1e-9)
    >>> r.passed
    True
    >>> r.to_json(include_runtime=False)
    '{"check": "demo", "lattice": [1.0, 0.0, 0.0, 1.0], "params": {"z": [0.5, 0.0]}, "lhs": [1.0, 0.0], "rhs": [1.000000000001, 0.0], "abs_error": 1.000088900582341e-12, "tolerance": 1e-09, "pass": true}'
    """

    check_name: str
    lattice: Optional[List[float]]
    inputs: Dict[str, ParamValue]
    lhs: ComplexValue
    rhs: ComplexValue
    tolerance: float
    runtime_ms: float = 0.0
    abs_error: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.lhs = complex(self.lhs)
        self.rhs = complex(self.rhs)
        self.abs_error = abs(self.lhs - self.rhs)
        self.passed = bool(self.abs_error <= self.tolerance)

    def require(self, name: str, error: float) -> "VerificationReport":
        """
        Record the error of a side identity under inputs[name]; abs_error becomes the
        larger of the two.

        >>> r = VerificationReport("demo", None, {}, 1.0, 1.0, 1e-9)
        >>> r.require("side", 1e-3).passed, r.inputs
        (False, {'side': 0.001})
        """
        error = float(error)
        self.inputs[name] = error
        self.abs_error = max(self.abs_error, error)
        self.passed = bool(self.abs_error <= self.tolerance)
        return self

    def to_dict(self, include_runtime: bool = True) -> Dict[str, Any]:
        # field order is part of the report format
        data: Dict[str, Any] = {
            "check": self.check_name,
            "lattice": self.lattice,
            "params": self.inputs,
            "lhs": list(to_pair(self.lhs)),
            "rhs": list(to_pair(self.rhs)),
            "abs_error": self.abs_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if include_runtime:
            data["runtime_ms"] = self.runtime_ms
        return data

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime))


def lattice_echo(L: Optional[Lattice]) -> Optional[List[float]]:
    return None if L is None else L.as_floats()


def timed_report(check_name: str, L: Optional[Lattice], inputs: Dict[str, ParamValue],
                 compute: Callable[[], tuple], tolerance: float) -> VerificationReport:
    """Run compute() -> (lhs, rhs) and wrap the result with its wall time"""
    start = perf_counter()
    lhs, rhs = compute()
    elapsed_ms = (perf_counter() - start) * 1000.0
    return VerificationReport(check_name, lattice_echo(L), inputs, lhs, rhs, tolerance,
                              runtime_ms=elapsed_ms)


def reports_to_json(reports: List[VerificationReport], include_runtime: bool = True) -> str:
    return json.dumps([r.to_dict(include_runtime) for r in reports], indent=1)


if __name__ == "__main__":
    import doctest
    doctest.testmod()
