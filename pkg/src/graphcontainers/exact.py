"""Exact rationals, square roots of rationals and outward-rounded intervals.

Predicates in this package never compare floats. Quantities involving
``sqrt`` of a rational are compared through their squares (:class:`Root`);
quantities involving ``log2`` are enclosed in an :class:`Interval` with
Fraction endpoints, and an inequality is reported as holding only when it
holds for every point of the enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering

import mpmath

Number = int | Fraction

_SQRT_BITS = 96
_LOG_PREC = 128


def as_fraction(x: Number | str) -> Fraction:
    """Parse ``"p/q"`` or integer strings; floats are refused."""
    if isinstance(x, float):
        raise TypeError("floats are not accepted where an exact rational is required")
    return Fraction(x)


def fraction_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _is_power_of_two(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> Interval:
        x = Fraction(x)
        return cls(x, x)

    @staticmethod
    def lift(x) -> Interval:
        return x if isinstance(x, Interval) else Interval.point(x)

    def __add__(self, other) -> Interval:
        o = Interval.lift(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> Interval:
        return self + (-Interval.lift(other))

    def __rsub__(self, other) -> Interval:
        return Interval.lift(other) - self

    def __mul__(self, other) -> Interval:
        o = Interval.lift(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> Interval:
        o = Interval.lift(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other) -> Interval:
        return Interval.lift(other) / self

    def __pow__(self, k: int) -> Interval:
        if k < 0:
            raise ValueError("negative powers unsupported")
        out = Interval.point(1)
        for _ in range(k):
            out = out * self
        return out

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)


def sqrt_interval(q: Number) -> Interval:
    """Enclosure of ``sqrt(q)``; a point when ``q`` is a rational square."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    p, d = q.numerator, q.denominator
    rp, rd = math.isqrt(p), math.isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Interval.point(Fraction(rp, rd))
    # sqrt(p/d) = sqrt(p*d)/d
    scale = 1 << _SQRT_BITS
    root = math.isqrt(p * d * scale * scale)
    return Interval(Fraction(root, d * scale), Fraction(root + 1, d * scale))


def _raw_fraction(raw) -> Fraction:
    p, q = mpmath.libmp.to_rational(raw)
    return Fraction(int(p), int(q))


@lru_cache(maxsize=4096)
def log2_interval(q: Number) -> Interval:
    """Enclosure of ``log2(q)`` for rational ``q > 0``; exact for powers of two."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log2 of a non-positive number")
    p, d = q.numerator, q.denominator
    if _is_power_of_two(p) and _is_power_of_two(d):
        return Interval.point(p.bit_length() - d.bit_length())
    iv = mpmath.iv
    old = iv.prec
    iv.prec = _LOG_PREC
    try:
        val = (iv.log(iv.mpf(p)) - iv.log(iv.mpf(d))) / iv.log(iv.mpf(2))
        lo, hi = val._mpi_
        return Interval(_raw_fraction(lo), _raw_fraction(hi))
    finally:
        iv.prec = old


def exp_neg_upper(x: Fraction) -> float:
    """A float ``>= exp(-x)`` for rational ``x >= 0``, capped at 1."""
    if x < 0:
        raise ValueError("expected a non-negative exponent")
    xf = float(x)
    if Fraction(xf) > x:
        xf = math.nextafter(xf, -math.inf)
    # libm exp is faithful to within one ulp; step up twice to stay above
    val = math.nextafter(math.nextafter(math.exp(-xf), math.inf), math.inf)
    return min(1.0, val)


@total_ordering
@dataclass(frozen=True)
class Root:
    """The non-negative number ``sqrt(square)`` held exactly through its square."""

    square: Fraction

    def __post_init__(self):
        if self.square < 0:
            raise ValueError("Root of a negative number")

    @classmethod
    def of(cls, x: Number) -> Root:
        x = Fraction(x)
        if x < 0:
            raise ValueError("Root.of expects a non-negative value")
        return cls(x * x)

    @classmethod
    def ratio(cls, num: int, den_square: Fraction) -> Root:
        """``num / sqrt(den_square)``."""
        return cls(Fraction(num * num) / den_square)

    def __eq__(self, other) -> bool:
        return isinstance(other, Root) and self.square == other.square

    def __hash__(self) -> int:
        return hash(self.square)

    def __lt__(self, other: Root) -> bool:
        return self.square < other.square

    def scaled(self, factor: Number) -> Root:
        factor = Fraction(factor)
        if factor < 0:
            raise ValueError("Root can only be scaled by a non-negative factor")
        return Root(self.square * factor * factor)

    def exact(self) -> Fraction | None:
        iv = sqrt_interval(self.square)
        return iv.lo if iv.is_point() else None

    def interval(self) -> Interval:
        return sqrt_interval(self.square)

    def __float__(self) -> float:
        return math.sqrt(self.square)

    def __str__(self) -> str:
        exact = self.exact()
        return fraction_str(exact) if exact is not None else f"sqrt({fraction_str(self.square)})"


def floor_dyadic(x: Fraction, bits: int = 40) -> Fraction:
    """Round down to a multiple of ``2**-bits`` unless ``x`` is already that coarse."""
    if x.denominator <= 1 << bits:
        return x
    scale = 1 << bits
    return Fraction(math.floor(x * scale), scale)


def holds_le(lhs: Interval | Number, rhs: Interval | Number) -> tuple[bool, Fraction]:
    """Sound check of ``lhs <= rhs``.

    Returns the verdict and the worst-case margin ``rhs.lo - lhs.hi`` rounded
    down, so a reported margin never overstates the slack.
    """
    lhs, rhs = Interval.lift(lhs), Interval.lift(rhs)
    margin = rhs.lo - lhs.hi
    return margin >= 0, floor_dyadic(margin)


def holds_lt(lhs: Interval | Number, rhs: Interval | Number) -> tuple[bool, Fraction]:
    lhs, rhs = Interval.lift(lhs), Interval.lift(rhs)
    margin = rhs.lo - lhs.hi
    return margin > 0, floor_dyadic(margin)
