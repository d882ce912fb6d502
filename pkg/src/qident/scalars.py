"""Exact rational scalars.

Every coefficient in this package is an exact rational; there is no floating
point anywhere.  gmpy2's mpq is used when available (it is several times
faster than fractions.Fraction for the dense exact arithmetic done here);
otherwise the standard library Fraction is a drop-in replacement.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    RATIONAL_BACKEND = "gmpy2"

    def rational(num=0, den=1):
        return _mpq(num, den)

except ImportError:  # pragma: no cover - exercised only without gmpy2
    RATIONAL_BACKEND = "fractions"

    def rational(num=0, den=1):
        return Fraction(num, den)


R_ZERO = rational(0)
R_ONE = rational(1)


def as_rational(x):
    """Coerce int / str ("3/5") / Fraction / backend rational to the scalar type."""
    if isinstance(x, int):
        return rational(x)
    if isinstance(x, str):
        return rational(Fraction(x))
    if isinstance(x, Fraction):
        return rational(x)
    return x


def is_integral(x) -> bool:
    return x.denominator == 1


def rat_str(x) -> str:
    """Canonical rendering: `p/q` with no whitespace, or `p` for integers."""
    return str(x)
