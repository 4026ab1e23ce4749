"""Extended real numbers with the ``inf(empty) = +inf`` conventions.

Arithmetic follows the usual rules except that ``+inf + -inf`` raises
:class:`~conicsens.errors.NumericalFailure` instead of producing NaN, and
``0 * inf = 0`` as is customary in convex analysis.
"""
import math
from dataclasses import dataclass

from .errors import NumericalFailure

FINITE = "finite"
PLUS_INF = "+inf"
MINUS_INF = "-inf"


@dataclass(frozen=True, order=False)
class ExtReal:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise NumericalFailure("extended real cannot hold NaN")
        object.__setattr__(self, "value", v)

    @classmethod
    def finite(cls, x):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"finite value expected, got {x}")
        return cls(x)

    @property
    def tag(self):
        if self.value == math.inf:
            return PLUS_INF
        if self.value == -math.inf:
            return MINUS_INF
        return FINITE

    @property
    def is_finite(self):
        return math.isfinite(self.value)

    def __float__(self):
        return self.value

    def __add__(self, other):
        o = float(other)
        if math.isinf(self.value) and math.isinf(o) and self.value != o:
            raise NumericalFailure("inf - inf is undefined")
        return ExtReal(self.value + o)

    __radd__ = __add__

    def __neg__(self):
        return ExtReal(-self.value)

    def __sub__(self, other):
        return self + (-ExtReal(float(other)))

    def __rsub__(self, other):
        return ExtReal(float(other)) - self

    def __mul__(self, scalar):
        k = float(scalar)
        if math.isinf(k):
            raise TypeError("ExtReal may only be scaled by finite numbers")
        if k == 0.0:
            return ExtReal(0.0)
        return ExtReal(self.value * k)

    __rmul__ = __mul__

    def __lt__(self, other):
        return self.value < float(other)

    def __le__(self, other):
        return self.value <= float(other)

    def __gt__(self, other):
        return self.value > float(other)

    def __ge__(self, other):
        return self.value >= float(other)

    def to_json(self):
        """Plain float when finite, ``"+inf"``/``"-inf"`` otherwise."""
        return self.value if self.is_finite else self.tag

    @classmethod
    def from_json(cls, v):
        if v == PLUS_INF:
            return cls(math.inf)
        if v == MINUS_INF:
            return cls(-math.inf)
        return cls.finite(v)

    def __repr__(self):
        return f"ExtReal({self.to_json()!r})"


INF = ExtReal(math.inf)
NEG_INF = ExtReal(-math.inf)
