"""Parsing and printing of exact rationals in the "p/q" exchange format."""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Iterable

from .errors import SchemaError

DEFAULT_GRID = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1))
GRID_ENV = "STRATCAT_GRID"


def parse_rational(value) -> Fraction:
    """Parse an int or a "p/q" string. Floats are refused because they are not exact."""
    if isinstance(value, bool):
        raise SchemaError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"not a rational: {value!r}") from None
    raise SchemaError(f"not a rational: {value!r}")


def format_rational(x: Fraction) -> str:
    """"p/q", or just "p" for integers."""
    return str(Fraction(x))


def parse_grid(spec: str | None) -> tuple[Fraction, ...]:
    """Parse "0,1/3,1/2,1"; ``None`` or "default" means the env override or the default grid."""
    if spec is None or spec == "default":
        spec = os.environ.get(GRID_ENV)
        if not spec:
            return DEFAULT_GRID
    values = sorted({parse_rational(part) for part in spec.split(",") if part.strip()})
    if not values:
        raise SchemaError("empty grid")
    for v in values:
        if not 0 <= v <= 1:
            raise SchemaError(f"grid value {v} outside [0,1]")
    return tuple(values)


def as_fractions(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) if not isinstance(v, Fraction) else v for v in values)
