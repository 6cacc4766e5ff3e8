"""Exact arithmetic over Q(sqrt(3)).

Every formula entry in the catalog lives in the field Q(sqrt(3)), stored as
a pair of rationals (a, b) standing for a + b*sqrt(3).  Arithmetic is exact
(``fractions.Fraction`` underneath), so tensor identities can be checked by
equality rather than by tolerance.  The ASCII token ``s3`` denotes sqrt(3)
in all text formats, e.g. ``1/2+1/6*s3``.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

__all__ = ["Coefficient", "CoeffParseError", "parse_coeff", "format_coeff", "SQRT3"]

_RationalLike = Union[int, Fraction]


class CoeffParseError(ValueError):
    """Raised on malformed coefficient text; carries the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class Coefficient:
    """An element a + b*sqrt(3) of Q(sqrt(3)), immutable and hashable."""

    __slots__ = ("a", "b", "_float")

    def __init__(self, a: _RationalLike = 0, b: _RationalLike = 0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "_float", None)

    def __setattr__(self, name, value):
        raise AttributeError("Coefficient is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(num: int, den: int = 1) -> "Coefficient":
        return Coefficient(Fraction(num, den))

    @staticmethod
    def sqrt3(num: int = 1, den: int = 1) -> "Coefficient":
        """The multiple (num/den)*sqrt(3)."""
        return Coefficient(0, Fraction(num, den))

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_unit_or_zero(self) -> bool:
        """True when the value is 0, 1 or -1 (a free coefficient in an SLP)."""
        return self.b == 0 and self.a in (0, 1, -1)

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(3)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2, the sign follows the
        # dominant term.
        if a * a > 3 * b * b:
            return (a > 0) - (a < 0)
        return (b > 0) - (b < 0)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "Coefficient") -> "Coefficient":
        other = _coerce(other)
        return Coefficient(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other: "Coefficient") -> "Coefficient":
        other = _coerce(other)
        return Coefficient(self.a - other.a, self.b - other.b)

    def __rsub__(self, other) -> "Coefficient":
        return _coerce(other) - self

    def __neg__(self) -> "Coefficient":
        return Coefficient(-self.a, -self.b)

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        other = _coerce(other)
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return Coefficient(a1 * a2 + 3 * b1 * b2, a1 * b2 + a2 * b1)

    __rmul__ = __mul__

    def __truediv__(self, other: "Coefficient") -> "Coefficient":
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero coefficient")
        # multiply by the conjugate: 1/(a+b s3) = (a-b s3)/(a^2-3b^2)
        a, b = other.a, other.b
        norm = a * a - 3 * b * b
        inv = Coefficient(a / norm, -b / norm)
        return self * inv

    def __rtruediv__(self, other) -> "Coefficient":
        return _coerce(other) / self

    def __abs__(self) -> "Coefficient":
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Coefficient(other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- conversion ---------------------------------------------------

    def __float__(self) -> float:
        return self.to_float()

    def to_float(self) -> float:
        """Round a + b*sqrt(3) to the nearest binary64.

        The value is bracketed by rational endpoints built from integer
        square roots of growing precision until both endpoints round to the
        same double.  Since sqrt(3) is irrational, a + b*sqrt(3) is never a
        rounding boundary when b != 0, so the loop terminates.
        """
        cached = self._float
        if cached is not None:
            return cached
        if self.b == 0:
            value = float(self.a)
        else:
            prec = 128
            while True:
                scale = 1 << prec
                root = isqrt(3 * scale * scale)
                lo = Fraction(root, scale)
                hi = Fraction(root + 1, scale)
                if self.b > 0:
                    x_lo, x_hi = self.a + self.b * lo, self.a + self.b * hi
                else:
                    x_lo, x_hi = self.a + self.b * hi, self.a + self.b * lo
                f_lo, f_hi = float(x_lo), float(x_hi)
                if f_lo == f_hi:
                    value = f_lo
                    break
                prec *= 2
                if prec > 1 << 16:  # unreachable for irrational values
                    value = f_lo
                    break
        object.__setattr__(self, "_float", value)
        return value

    def __repr__(self):
        return f"Coefficient({self.a!r}, {self.b!r})"

    def __str__(self):
        return format_coeff(self)


def _coerce(value) -> Coefficient:
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, (int, Fraction)):
        return Coefficient(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to Coefficient")


ZERO = Coefficient(0)
ONE = Coefficient(1)
SQRT3 = Coefficient(0, 1)


# -- text format -------------------------------------------------------
#
# coef := term (('+'|'-') term)?
# term := rat | rat '*s3'
# rat  := ['-'] int ['/' int]


def _parse_rat(text: str, pos: int) -> tuple[Fraction, int]:
    start = pos
    if pos < len(text) and text[pos] == "-":
        pos += 1
    digits_start = pos
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    if pos == digits_start:
        raise CoeffParseError("expected integer", text, pos)
    num = int(text[start:pos])
    den = 1
    if pos < len(text) and text[pos] == "/":
        pos += 1
        den_start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if pos == den_start:
            raise CoeffParseError("expected denominator", text, pos)
        den = int(text[den_start:pos])
        if den == 0:
            raise CoeffParseError("zero denominator", text, den_start)
    return Fraction(num, den), pos


def _parse_term(text: str, pos: int) -> tuple[Fraction, bool, int]:
    value, pos = _parse_rat(text, pos)
    if text.startswith("*s3", pos):
        return value, True, pos + 3
    return value, False, pos


def parse_coeff(text: str) -> Coefficient:
    """Parse a coefficient token like ``1``, ``-1/2``, ``2/3*s3`` or
    ``1/2+1/6*s3``."""
    stripped = text.strip()
    value, radical_first, pos = _parse_term(stripped, 0)
    a = Fraction(0)
    b = Fraction(0)
    if radical_first:
        b = value
    else:
        a = value
    if pos < len(stripped):
        op = stripped[pos]
        if op not in "+-":
            raise CoeffParseError("expected '+' or '-'", stripped, pos)
        value, radical, pos = _parse_term(stripped, pos + 1)
        if radical == radical_first:
            raise CoeffParseError("duplicate term kind", stripped, pos)
        if op == "-":
            value = -value
        if radical:
            b = value
        else:
            a = value
    if pos != len(stripped):
        raise CoeffParseError("trailing characters", stripped, pos)
    return Coefficient(a, b)


def _format_rat(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_coeff(c: Coefficient) -> str:
    """Canonical text for a coefficient; inverse of :func:`parse_coeff`."""
    if c.b == 0:
        return _format_rat(c.a)
    radical = _format_rat(abs(c.b)) + "*s3"
    if c.a == 0:
        return ("-" if c.b < 0 else "") + radical
    sign = "-" if c.b < 0 else "+"
    return _format_rat(c.a) + sign + radical
