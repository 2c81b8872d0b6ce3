"""Small argument validators shared by configs, estimators and the CLI."""

from __future__ import annotations


def require_int_at_least(name: str, value, minimum: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def require_positive(name: str, value) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return value


def require_unit_interval(name: str, value, *, open_low: bool = False) -> float:
    """Check value in [0, 1], or (0, 1] when open_low is set."""
    value = float(value)
    low_ok = value > 0 if open_low else value >= 0
    if not (low_ok and value <= 1):
        bracket = "(0, 1]" if open_low else "[0, 1]"
        raise ValueError(f"{name} must be in {bracket}, got {value}")
    return value


def require_iri(name: str, value: str) -> str:
    """Check that value looks like an absolute IRI (scheme, no whitespace)."""
    if not isinstance(value, str) or not value:
        raise ValueError(f"{name} must be a non-empty string, got {value!r}")
    if ":" not in value:
        raise ValueError(f"{name} must be an absolute IRI with a scheme, got {value!r}")
    if any(c.isspace() for c in value) or any(c in '<>"' for c in value):
        raise ValueError(f"{name} contains characters not allowed in an IRI: {value!r}")
    return value
