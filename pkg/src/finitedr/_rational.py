"""Exact rational scalar type shared by every module.

gmpy2's ``mpq`` is used when importable; otherwise :class:`fractions.Fraction`.
Both hash and compare compatibly, so values of either type may be mixed freely.
"""
from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Q = Fraction

__all__ = ["Q", "as_rational", "format_rational", "parse_rational"]

_RATIONAL_TYPES = (int, Fraction, type(Q(1)))


def as_rational(x):
    """Coerce ints, Fractions, mpq values or ``"p/q"`` strings to ``Q``."""
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, _RATIONAL_TYPES):
        return Q(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def parse_rational(text):
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return Q(int(num), den)
    return Q(int(text))


def format_rational(x, always_fraction=False):
    """Reduced ``"p/q"`` string; ``"p"`` for integers unless ``always_fraction``."""
    x = Q(x)
    num, den = int(x.numerator), int(x.denominator)
    if den == 1 and not always_fraction:
        return str(num)
    return f"{num}/{den}"
