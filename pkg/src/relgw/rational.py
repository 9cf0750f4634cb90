"""Exact rational parsing and formatting used by the KB, CLI and scenario files."""

from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or 'p' into a Fraction.

    Raises ValueError on anything else; no floats are ever accepted.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    if "/" in s:
        num, _, den = s.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_rational(q: Fraction) -> str:
    """Canonical form: 'p' for integers, 'p/q' otherwise (q > 0, reduced)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
