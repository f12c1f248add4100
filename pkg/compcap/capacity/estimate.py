import math
from dataclasses import dataclass, field
from typing import Any

METHODS = ("closed_form", "equilibrium", "grid")


class CapacityError(ArithmeticError):
    """Exception raised when a capacity cannot be computed for the given set"""


@dataclass(frozen=True)
class CapacityEstimate:
    """
    A Green capacity value and the method that produced it.

    Attributes:
      - value: cap(K) >= 0
      - method: one of closed_form, equilibrium, grid
      - error_indicator: 0 for closed forms, a solver-specific indicator otherwise
      - solution: the solver output the value came from, when there is one
    """

    value: float
    method: str
    error_indicator: float = 0.0
    solution: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise CapacityError(f"Unknown capacity method {self.method!r}, expected one of {METHODS}")
        if not (math.isfinite(self.value) and self.value >= 0):
            raise CapacityError(f"Invalid capacity value {self.value}")

    @property
    def m_value(self) -> float:
        """exp(-1 / cap), with 0 for a polar set"""
        return math.exp(-1.0 / self.value) if self.value > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "cap": self.value,
            "m_value": self.m_value,
            "error_indicator": self.error_indicator,
        }
