"""Exact scalar helpers: rational parsing/formatting and the sqrt(2)/2 cap.

Every quantity in this package is a :class:`fractions.Fraction`, except for the
capped distances that may equal sqrt(2)/2.  Those are represented by
:class:`Surd`, a number of the form ``a + b*sqrt(2)/2`` with rational ``a, b``,
which supports exact ordering and addition so that triangle inequalities can
be checked symbolically.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

import numpy as np

__all__ = [
    "Surd",
    "SQRT2_OVER_2",
    "Value",
    "to_fraction",
    "fmt",
    "parse_value",
    "below_cap",
    "cap",
    "common_denominator",
    "scale_to_int",
    "INT_SAFE",
]


class Surd:
    """Exact number ``rational + coeff * sqrt(2)/2``."""

    __slots__ = ("rational", "coeff")

    def __init__(self, rational=0, coeff=0):
        self.rational = Fraction(rational)
        self.coeff = Fraction(coeff)

    @staticmethod
    def _coerce(other) -> "Surd | None":
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Rational)):
            return Surd(other, 0)
        return None

    def sign(self) -> int:
        a, b = self.rational, self.coeff
        # sign of a + b*s with s = sqrt(2)/2, s^2 = 1/2
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with b^2/2
        lhs, rhs = a * a, b * b / 2
        if lhs == rhs:
            return 0
        dominant = a if lhs > rhs else b
        return 1 if dominant > 0 else -1

    def _cmp(self, other) -> int | None:
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Surd(self.rational + o.rational, self.coeff + o.coeff)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.rational, -self.coeff)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Surd(self.rational - o.rational, self.coeff - o.coeff)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        if self.coeff == 0:
            return hash(self.rational)
        return hash((self.rational, self.coeff))

    def __float__(self):
        return float(self.rational) + float(self.coeff) * math.sqrt(2) / 2

    def __repr__(self):
        if self.coeff == 0:
            return f"Surd({self.rational})"
        return f"Surd({self.rational} + {self.coeff}*sqrt2/2)"


SQRT2_OVER_2 = Surd(0, 1)

Value = Union[Fraction, Surd]


def below_cap(x: Fraction) -> bool:
    """True iff ``0 <= x < sqrt(2)/2`` (decided by squaring)."""
    return x < 0 or x * x < Fraction(1, 2)


def cap(x: Fraction) -> Value:
    """``min(sqrt(2)/2, x)``."""
    return x if below_cap(x) else SQRT2_OVER_2


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def parse_value(x) -> Value:
    if isinstance(x, Surd):
        return x
    if isinstance(x, str) and x.strip().lower() in {"sqrt2/2", "sqrt(2)/2"}:
        return SQRT2_OVER_2
    return to_fraction(x)


def fmt(x: Value) -> str:
    """Format as ``"p/q"`` (always with a denominator) or ``"sqrt2/2"``."""
    if isinstance(x, Surd):
        if x.coeff == 0:
            return fmt(x.rational)
        if x == SQRT2_OVER_2 and x.rational == 0:
            return "sqrt2/2"
        return f"{fmt(x.rational)}+{fmt(x.coeff)}*sqrt2/2"
    x = to_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def common_denominator(values: Iterable[Fraction]) -> int:
    return functools.reduce(math.lcm, (Fraction(v).denominator for v in values), 1)


# Largest magnitude we allow in int64 kernels; sums/differences of two entries
# must stay representable.
INT_SAFE = 2**61


def scale_to_int(mat, scale: int) -> np.ndarray:
    """Multiply a rational matrix by ``scale`` and return exact integers.

    Returns an ``int64`` array when every entry fits comfortably, otherwise an
    ``object`` array of Python ints (which only the pure-Python kernels accept).
    """
    rows = [[Fraction(v) * scale for v in row] for row in mat]
    ints = []
    for row in rows:
        out = []
        for v in row:
            if v.denominator != 1:
                raise ValueError("scale does not clear the denominators")
            out.append(v.numerator)
        ints.append(out)
    big = max((abs(v) for row in ints for v in row), default=0)
    if big < INT_SAFE:
        return np.array(ints, dtype=np.int64).reshape(len(ints), -1)
    return np.array(ints, dtype=object).reshape(len(ints), -1)
