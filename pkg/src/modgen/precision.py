"""Working-precision plumbing and the BigReal scalar type.

All numerical state is held in gmpy2/MPFR values.  Precision is counted in
decimal digits throughout the package and converted to bits only when a
gmpy2 context is entered.  MPFR arithmetic is correctly rounded, so one
operation at precision ``p`` digits has relative error below ``10**(1-p)``,
and identical inputs always produce bit-identical outputs.
"""

from __future__ import annotations

import math

import gmpy2
from gmpy2 import mpfr

LOG2_10 = math.log2(10.0)


def bits_for_digits(digits: int) -> int:
    """Binary precision that guarantees `digits` decimal digits."""
    if digits < 1:
        raise ValueError(f"precision must be a positive digit count, got {digits}")
    return int(math.ceil(digits * LOG2_10))


def working_precision(digits: int):
    """Context manager entering a gmpy2 context of the given decimal precision.

    NaN creation and overflow trap to Python exceptions; silent propagation
    of either would poison a long spectral computation undetected.
    """
    return gmpy2.context(
        precision=bits_for_digits(digits),
        trap_invalid=True,
        trap_overflow=True,
    )


def to_decimal(x) -> str:
    """Canonical decimal string for an mpfr value, round-trip exact.

    The mantissa carries the full precision of ``x`` so parsing the string
    back at the same bit precision reproduces the value bit for bit.
    """
    if gmpy2.is_nan(x) or gmpy2.is_infinite(x):
        raise ValueError(f"non-finite value cannot be serialized: {x!r}")
    if x == 0:
        return "0"
    mant, exp, _prec = x.digits(10)
    sign = "-" if mant.startswith("-") else ""
    return f"{sign}0.{mant.lstrip('-')}e{exp}"


def from_decimal(s: str, digits: int):
    """Parse a decimal string into an mpfr at the given decimal precision."""
    return mpfr(s.strip(), bits_for_digits(digits))


def pow10(exponent, digits: int):
    """10**exponent at the given working precision; exponent may be fractional."""
    with working_precision(digits):
        return mpfr(10) ** mpfr(exponent)


class BigReal:
    """A real scalar carrying its own working precision in decimal digits.

    Arithmetic between two BigReal values is performed at the minimum of
    the two operand precisions, which is also the precision of the result.
    Plain ints mix in without affecting precision.
    """

    __slots__ = ("value", "digits")

    def __init__(self, value, digits: int):
        digits = int(digits)
        if digits < 1:
            raise ValueError("digits must be >= 1")
        self.digits = digits
        with working_precision(digits):
            if isinstance(value, BigReal):
                value = value.value
            self.value = mpfr(value) + 0  # force rounding to this precision

    @classmethod
    def parse(cls, s: str, digits: int) -> "BigReal":
        return cls(from_decimal(s, digits), digits)

    def to_decimal(self) -> str:
        return to_decimal(self.value)

    def _coerce(self, other):
        if isinstance(other, BigReal):
            return other.value, min(self.digits, other.digits)
        if isinstance(other, int):
            return other, self.digits
        return NotImplemented, None

    def _binop(self, other, op):
        val, digits = self._coerce(other)
        if val is NotImplemented:
            return NotImplemented
        with working_precision(digits):
            return BigReal(op(self.value, val), digits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __neg__(self):
        return BigReal(-self.value, self.digits)

    def __abs__(self):
        return BigReal(abs(self.value), self.digits)

    def _cmp_value(self, other):
        return other.value if isinstance(other, BigReal) else other

    def __eq__(self, other):
        return self.value == self._cmp_value(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"BigReal({float(self.value)!r}, digits={self.digits})"
