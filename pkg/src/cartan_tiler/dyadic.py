"""Dyadic rationals: exact numbers of the form n / 2**e."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, str]

DEFAULT_PRECISION = 24


class PrecisionError(ValueError):
    """Raised when a coordinate needs a finer level than the budget allows."""


def dyadic(value: Number) -> Fraction:
    """Coerce ``value`` to a Fraction, rejecting non-dyadic denominators."""
    if isinstance(value, float):
        f = Fraction(value)
    else:
        f = Fraction(value)
    den = f.denominator
    if den & (den - 1):
        raise ValueError(f"{value!r} is not a dyadic rational")
    return f


def exponent(value: Fraction) -> int:
    """Smallest e >= 0 with value * 2**e an integer."""
    return Fraction(value).denominator.bit_length() - 1


def split(value: Number) -> tuple[int, int]:
    """Canonical (numerator, exponent) pair."""
    f = dyadic(value)
    return f.numerator, exponent(f)


def join(num: int, exp: int) -> Fraction:
    if exp >= 0:
        return Fraction(num, 1 << exp)
    return Fraction(num * (1 << -exp))


def at_level(value: Number, level: int) -> int:
    """Integer numerator of ``value`` at ``level``; the value must be representable."""
    f = dyadic(value) * (1 << level)
    if f.denominator != 1:
        raise PrecisionError(f"{value} not representable at level {level}")
    return f.numerator


def floor_dyadic(value: Fraction, level: int) -> Fraction:
    """Largest dyadic with exponent <= level that is <= value."""
    scaled = Fraction(value) * (1 << level)
    return Fraction(scaled.numerator // scaled.denominator, 1 << level)


def largest_power_below(value: Fraction) -> Fraction:
    """Largest 2**k (k integer, possibly negative) that is <= value."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError("value must be positive")
    p = Fraction(1)
    while p > value:
        p /= 2
    while p * 2 <= value:
        p *= 2
    return p


def check_budget(level: int, precision: int) -> None:
    if level > precision:
        raise PrecisionError(f"level {level} exceeds precision budget {precision}")
