"""Coefficient helpers shared by every module.

Exact coefficients are Python ints when integral and ``gmpy2.mpq`` otherwise;
both hash and compare consistently with ``fractions.Fraction``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from gmpy2 import mpq

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def rational(value):
    """Coerce an int, Fraction, mpq or 'p/q' string to an exact coefficient."""
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; use a string or Fraction")
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value.strip()):
            raise ValueError(f"not a rational literal: {value!r}")
        value = Fraction(value.strip())
    q = mpq(int(value.numerator), int(value.denominator))
    if q.denominator == 1:
        return int(q.numerator)
    return q


def scalar_like(c, sample):
    """Convert an operator constant to the coefficient domain of ``sample``."""
    if isinstance(sample, float):
        return float(c)
    return c


def fmt(c) -> str:
    """Render a coefficient without sign-ambiguous spacing ('-3/4', '5')."""
    if isinstance(c, float):
        return repr(c)
    q = mpq(c)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_fraction(c) -> Fraction:
    q = mpq(c)
    return Fraction(int(q.numerator), int(q.denominator))
