"""Exact rational arithmetic backend.

``gmpy2.mpq`` when available (roughly an order of magnitude faster on the
randomized arithmetic sweeps), ``fractions.Fraction`` otherwise.  Both are
exact; nothing else in the package depends on which one is active.
"""

from __future__ import annotations

import fractions
import math
from typing import Union

try:
    from gmpy2 import mpq as Rat

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

    _HAVE_GMPY2 = False

RatLike = Union[int, str, float, fractions.Fraction, "Rat"]

ZERO = Rat(0)
ONE = Rat(1)


def as_rat(x: RatLike) -> Rat:
    """Convert x to the active exact rational type.

    Floats convert exactly (binary expansion), so 0.5 -> 1/2 but
    0.1 -> 3602879701896397/36028797018963968.  Strings accept "p/q",
    "p", and decimal literals like "0.25".
    """
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(x, int):
        return Rat(x)
    if isinstance(x, fractions.Fraction):
        return Rat(x.numerator, x.denominator)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot convert non-finite float {x!r} to a rational")
        f = fractions.Fraction(x)
        return Rat(f.numerator, f.denominator)
    if isinstance(x, str):
        text = x.strip()
        try:
            if "/" in text:
                num, _, den = text.partition("/")
                return Rat(int(num.strip()), int(den.strip()))
            if "." in text or "e" in text or "E" in text:
                f = fractions.Fraction(text)
                return Rat(f.numerator, f.denominator)
            return Rat(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"invalid rational literal {x!r}") from exc
    if hasattr(x, "__index__"):  # integer-like (e.g. gmpy2 mpz)
        return Rat(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def is_rat(x: object) -> bool:
    return isinstance(x, Rat)


def rat_str(x: Rat) -> str:
    """Canonical "p/q" or "p" form (both backends already print this way)."""
    return str(x)


def rat_pow(base: Rat, exponent: Rat) -> Rat:
    """Exact base**exponent; raises ValueError when the result is irrational."""
    num = int(exponent.numerator)
    den = int(exponent.denominator)
    if den != 1:
        root = _exact_root(base, den)
        if root is None:
            raise ValueError(f"{base}**(1/{den}) is not rational")
        base = root
    if num >= 0:
        return base**num
    if base == 0:
        raise ZeroDivisionError("0 cannot be raised to a negative power")
    return (ONE / base) ** (-num)


def _exact_root(x: Rat, k: int) -> Rat | None:
    """Exact k-th root of x, or None if no rational root exists."""
    if x < 0:
        if k % 2 == 0:
            return None
        neg = _exact_root(-x, k)
        return None if neg is None else -neg
    if x == 0:
        return ZERO
    num_root = _int_root(int(x.numerator), k)
    den_root = _int_root(int(x.denominator), k)
    if num_root is None or den_root is None:
        return None
    return Rat(num_root, den_root)


def _int_root(n: int, k: int) -> int | None:
    if _HAVE_GMPY2:
        import gmpy2

        root, exact = gmpy2.iroot(n, k)
        return int(root) if exact else None
    root = round(n ** (1.0 / k))
    for candidate in (root - 1, root, root + 1):
        if candidate >= 0 and candidate**k == n:
            return candidate
    return None
