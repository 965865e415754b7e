"""Exact rational scalars.

All structure constants, Gram entries and identity residuals are kept as
exact rationals; only spectral quantities (norms) are ever floated.  gmpy2's
mpq is used when available because it is several times faster than
fractions.Fraction on the word sizes that show up in Gram recursions.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Q

ZERO = Q(0)
ONE = Q(1)


def rational(num, den=1):
    """Build an exact rational from ints, strings or another rational."""
    return Q(num, den) if den != 1 else Q(num)


def rat_from_str(s: str):
    """Parse 'p/q' or 'p' decimal strings."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Q(int(num), int(den))
    return Q(int(s))


def rat_to_str(x) -> str:
    """Serialize a rational as 'p/q' (or 'p' when the denominator is 1)."""
    num, den = x.numerator, x.denominator
    return f"{num}/{den}" if den != 1 else f"{num}"


def binomial(top, j: int):
    """Generalized binomial coefficient C(top, j) for integer top, j >= 0.

    top may be negative (needed by the mode-expansion sums).
    """
    if j < 0:
        return ZERO
    out = ONE
    for i in range(j):
        out = out * Q(top - i, i + 1)
    return out
