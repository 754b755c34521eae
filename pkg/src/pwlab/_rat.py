"""Exact rational arithmetic backend.

All coordinates and measures in this package are exact rationals. We use
gmpy2.mpq when available (much faster on the large constructions) and fall
back to fractions.Fraction otherwise. Both expose .numerator/.denominator
and exact field arithmetic, which is all the rest of the package relies on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

try:
    from gmpy2 import mpq as _mpq

    _BACKEND = "gmpy2"

    def _make(num, den=None):
        if den is None:
            return _mpq(num)
        return _mpq(num, den)

    Rational = type(_mpq(0))
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _BACKEND = "fractions"

    def _make(num, den=None):
        if den is None:
            return Fraction(num)
        return Fraction(num, den)

    Rational = Fraction

RationalLike = Union[int, str, Fraction, "Rational"]

ZERO = _make(0)
ONE = _make(1)


def rat(value: RationalLike, den: RationalLike = None) -> Rational:
    """Coerce ints, 'p/q' strings, Fractions or (num, den) pairs to Rational."""
    if den is not None:
        return _make(rat(value), rat(den))
    if isinstance(value, Rational):
        return value
    if isinstance(value, str):
        if "/" in value:
            p, q = value.split("/", 1)
            return _make(int(p.strip()), int(q.strip()))
        return _make(int(value.strip()))
    return _make(value)


def rat_str(q) -> str:
    """Canonical lossless form 'p/q', denominator always explicit."""
    return f"{q.numerator}/{q.denominator}"


def rfloor(q) -> int:
    return q.numerator // q.denominator


def rceil(q) -> int:
    return -((-q.numerator) // q.denominator)


def pow2_le(q) -> Rational:
    """Largest power of two <= q, for q > 0. Exponent may be negative."""
    if q <= 0:
        raise ValueError("pow2_le requires a positive argument")
    n, d = q.numerator, q.denominator
    k = n.bit_length() - d.bit_length()
    # candidate within one step of the true exponent; fix up exactly
    while _pow2(k) > q:
        k -= 1
    while _pow2(k + 1) <= q:
        k += 1
    return _pow2(k)


def _pow2(k: int) -> Rational:
    if k >= 0:
        return _make(1 << k)
    return _make(1, 1 << (-k))


def pow2(k: int) -> Rational:
    """2**k as an exact rational, k may be negative."""
    return _pow2(k)
