"""Exact arithmetic in an ordered field with an exhibitable infinitesimal.

Numbers are finite sums sum_q a_q * eps^q with rational coefficients a_q
and rational exponents q, where eps is a fixed positive infinitesimal.
Everything here is exact: coefficients and exponents are arbitrary
precision rationals and no operation rounds.

The module supplies the ring operations, a truncated series inverse, the
valuation order (eps below every positive rational), magnitude
classification, the standard part map, and the infinitesimal-quotient
derivative and continuity checks for polynomials.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

from ._rat import ONE, ZERO, Rat, RatLike, as_rat, rat_pow, rat_str
from .errors import DivisionByZeroError, InfiniteInputError, PreconditionError

__all__ = [
    "LCNumber",
    "Classification",
    "Ordering",
    "EPS",
    "make",
    "from_rational",
    "add",
    "sub",
    "mul",
    "neg",
    "inv",
    "power",
    "compare",
    "classify",
    "standard_part",
    "poly_eval",
    "derivative",
    "continuity_check",
    "DEFAULT_INV_CUTOFF",
]

#: Default truncation depth for series inversion; configurable per call.
DEFAULT_INV_CUTOFF = 8


class Classification(enum.Enum):
    """Magnitude class of a number relative to the real line."""

    ZERO = "zero"
    INFINITESIMAL = "infinitesimal"
    APPRECIABLE = "appreciable-finite"
    INFINITE = "infinite"


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


class LCNumber:
    """Immutable finite series sum a_q * eps^q.

    Terms are stored as a tuple of (exponent, coefficient) pairs with
    strictly increasing exponents and no zero coefficients; the zero
    value is the empty tuple.
    """

    __slots__ = ("terms",)

    terms: tuple[tuple[Rat, Rat], ...]

    def __init__(self, terms: Iterable[tuple[RatLike, RatLike]] = ()):
        collected: dict[Rat, Rat] = {}
        for exponent, coefficient in terms:
            if isinstance(exponent, float) or isinstance(coefficient, float):
                raise TypeError("LCNumber is exact; floats are not accepted")
            q = as_rat(exponent)
            a = as_rat(coefficient)
            collected[q] = collected.get(q, ZERO) + a
        object.__setattr__(
            self,
            "terms",
            tuple(sorted((q, a) for q, a in collected.items() if a != 0)),
        )

    @classmethod
    def _raw(cls, terms: tuple[tuple[Rat, Rat], ...]) -> "LCNumber":
        """Wrap terms already in canonical form (internal fast path)."""
        self = object.__new__(cls)
        object.__setattr__(self, "terms", terms)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("LCNumber is immutable")

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def min_exponent(self) -> Rat:
        """Valuation: the smallest exponent present.  Undefined for zero."""
        if not self.terms:
            raise ValueError("zero has no valuation")
        return self.terms[0][0]

    def coefficient(self, exponent: RatLike) -> Rat:
        q = as_rat(exponent)
        for e, a in self.terms:
            if e == q:
                return a
        return ZERO

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "LCNumber | RatLike") -> "LCNumber":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "LCNumber | RatLike") -> "LCNumber":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, neg(other))

    def __rsub__(self, other: "LCNumber | RatLike") -> "LCNumber":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(other, neg(self))

    def __mul__(self, other: "LCNumber | RatLike") -> "LCNumber":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "LCNumber":
        return neg(self)

    def __pos__(self) -> "LCNumber":
        return self

    def __truediv__(self, other: "LCNumber | RatLike") -> "LCNumber":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return mul(self, inv(other))

    def __rtruediv__(self, other: "LCNumber | RatLike") -> "LCNumber":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return mul(other, inv(self))

    def __pow__(self, exponent: int) -> "LCNumber":
        if not isinstance(exponent, int):
            return NotImplemented
        return power(self, exponent)

    # -- order --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        coerced = _coerce(other)
        if coerced is NotImplemented:
            return NotImplemented
        return self.terms == coerced.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __lt__(self, other: "LCNumber | RatLike") -> bool:
        return compare(self, _coerce_strict(other)) is Ordering.LESS

    def __le__(self, other: "LCNumber | RatLike") -> bool:
        return compare(self, _coerce_strict(other)) is not Ordering.GREATER

    def __gt__(self, other: "LCNumber | RatLike") -> bool:
        return compare(self, _coerce_strict(other)) is Ordering.GREATER

    def __ge__(self, other: "LCNumber | RatLike") -> bool:
        return compare(self, _coerce_strict(other)) is not Ordering.LESS

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- rendering ----------------------------------------------------

    def __str__(self) -> str:
        return format_lc(self)

    def __repr__(self) -> str:
        return f"LCNumber({list(self.terms)!r})"


#: The generating positive infinitesimal.
EPS = LCNumber(((1, 1),))

_ZERO_LC = LCNumber()
_ONE_LC = LCNumber(((0, 1),))


def _coerce(x) -> LCNumber:
    if isinstance(x, LCNumber):
        return x
    if isinstance(x, float):
        return NotImplemented
    try:
        value = as_rat(x)
    except (TypeError, ValueError):
        return NotImplemented
    return LCNumber(((ZERO, value),))


def _coerce_strict(x) -> LCNumber:
    coerced = _coerce(x)
    if coerced is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an LCNumber")
    return coerced


def make(terms: Iterable[tuple[RatLike, RatLike]]) -> LCNumber:
    """Build a number from (exponent, coefficient) pairs.

    Duplicate exponents are summed and zero coefficients pruned, so the
    result is always canonical.
    """
    return LCNumber(terms)


def from_rational(value: RatLike) -> LCNumber:
    return _coerce_strict(value)


def add(a: LCNumber, b: LCNumber) -> LCNumber:
    """Exact sum; no truncation."""
    if not a.terms:
        return b
    if not b.terms:
        return a
    merged: dict[Rat, Rat] = dict(a.terms)
    for q, coeff in b.terms:
        acc = merged.get(q)
        if acc is None:
            merged[q] = coeff
        else:
            acc = acc + coeff
            if acc == 0:
                del merged[q]
            else:
                merged[q] = acc
    return LCNumber._raw(tuple(sorted(merged.items())))


def sub(a: LCNumber, b: LCNumber) -> LCNumber:
    return add(a, neg(b))


def neg(a: LCNumber) -> LCNumber:
    return LCNumber._raw(tuple((q, -c) for q, c in a.terms))


def mul(a: LCNumber, b: LCNumber) -> LCNumber:
    """Exact product (full convolution of the two term lists)."""
    if not a.terms or not b.terms:
        return _ZERO_LC
    acc: dict[Rat, Rat] = {}
    for qa, ca in a.terms:
        for qb, cb in b.terms:
            q = qa + qb
            prev = acc.get(q)
            if prev is None:
                acc[q] = ca * cb
            else:
                prev = prev + ca * cb
                if prev == 0:
                    del acc[q]
                else:
                    acc[q] = prev
    return LCNumber._raw(tuple(sorted(acc.items())))


def inv(a: LCNumber, cutoff: RatLike = DEFAULT_INV_CUTOFF) -> LCNumber:
    """Multiplicative inverse, truncated so a*inv(a) - 1 sits above cutoff.

    The leading term of the result is the exact reciprocal of the leading
    term of a.  Every exponent of a*inv(a,cutoff) - 1 is strictly greater
    than cutoff.
    """
    if not a.terms:
        raise DivisionByZeroError("cannot invert zero")
    cut = as_rat(cutoff)
    v, lead = a.terms[0]
    lead_inv = ONE / lead
    if len(a.terms) == 1:
        return LCNumber._raw(((-v, lead_inv),))
    # a = lead*eps^v * (1 + e) with e of positive relative exponents.
    # Sum the geometric series 1 + (-e) + (-e)^2 + ...; a term pruned
    # above cutoff can only ever feed residual exponents above cutoff,
    # so pruning each power keeps the loop finite without losing terms
    # that matter.
    rel = tuple((q - v, c * lead_inv) for q, c in a.terms[1:])
    neg_e = neg(LCNumber._raw(rel))
    series = _ONE_LC
    power_of_neg_e = _ONE_LC
    while True:
        power_of_neg_e = _prune_above(mul(power_of_neg_e, neg_e), cut)
        if not power_of_neg_e.terms:
            break
        series = add(series, power_of_neg_e)
    scaled = tuple((q - v, c * lead_inv) for q, c in series.terms)
    return LCNumber._raw(scaled)


def _prune_above(a: LCNumber, cutoff: Rat) -> LCNumber:
    kept = tuple((q, c) for q, c in a.terms if q <= cutoff)
    return a if len(kept) == len(a.terms) else LCNumber._raw(kept)


def power(a: LCNumber, exponent: int) -> LCNumber:
    """Integer power, exact; negative exponents truncate via inv()."""
    if exponent == 0:
        return _ONE_LC
    if exponent < 0:
        if len(a.terms) == 1:
            q, c = a.terms[0]
            return LCNumber._raw(((q * exponent, rat_pow(c, as_rat(exponent)),),))
        return power(inv(a), -exponent)
    result = _ONE_LC
    base = a
    k = exponent
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def monomial_power(a: LCNumber, exponent: RatLike) -> LCNumber:
    """Rational power of a single-term number; exact or raises ValueError."""
    if len(a.terms) != 1:
        raise ValueError("rational powers require a monomial base")
    k = as_rat(exponent)
    q, c = a.terms[0]
    return LCNumber._raw(((q * k, rat_pow(c, k)),))


def compare(a: LCNumber, b: LCNumber) -> Ordering:
    """Total order: sign of the lowest-exponent coefficient of a - b."""
    d = sub(a, b)
    if not d.terms:
        return Ordering.EQUAL
    return Ordering.GREATER if d.terms[0][1] > 0 else Ordering.LESS


def classify(a: LCNumber) -> Classification:
    """Magnitude class, read off the valuation."""
    if not a.terms:
        return Classification.ZERO
    v = a.terms[0][0]
    if v > 0:
        return Classification.INFINITESIMAL
    if v < 0:
        return Classification.INFINITE
    return Classification.APPRECIABLE


def standard_part(a: LCNumber) -> Rat:
    """The unique real at infinitesimal distance; rejects infinite input."""
    if a.terms and a.terms[0][0] < 0:
        raise InfiniteInputError("standard part of an infinite element")
    return a.coefficient(ZERO)


# -- polynomial calculus ---------------------------------------------


def poly_eval(coefficients: Sequence[RatLike], x: LCNumber) -> LCNumber:
    """Evaluate a polynomial (ascending coefficient list) by Horner."""
    acc = _ZERO_LC
    for c in reversed([as_rat(c) for c in coefficients]):
        acc = mul(acc, x)
        if c != 0:
            acc = add(acc, LCNumber._raw(((ZERO, c),)))
    return acc


def derivative(coefficients: Sequence[RatLike], x0: RatLike) -> Rat:
    """Derivative at x0 as the standard part of a quotient of infinitesimals.

    Computes st((f(x0 + eps) - f(x0)) / eps) exactly; for polynomials this
    equals the symbolic derivative.
    """
    x0_lc = from_rational(x0)
    shifted = poly_eval(coefficients, add(x0_lc, EPS))
    at_x0 = poly_eval(coefficients, x0_lc)
    diff = sub(shifted, at_x0)
    quotient = LCNumber._raw(tuple((q - 1, c) for q, c in diff.terms))
    return standard_part(quotient)


def continuity_check(
    coefficients: Sequence[RatLike], x0: RatLike, alpha: LCNumber
) -> bool:
    """Infinitesimal-increment continuity at x0.

    True iff an infinitesimal change alpha of the variable produces an
    infinitesimal (or zero) change of the polynomial's value.
    """
    if classify(alpha) is not Classification.INFINITESIMAL:
        raise PreconditionError("alpha must be infinitesimal")
    x0_lc = from_rational(x0)
    change = sub(
        poly_eval(coefficients, add(x0_lc, alpha)), poly_eval(coefficients, x0_lc)
    )
    return classify(change) in (Classification.ZERO, Classification.INFINITESIMAL)


# -- rendering -------------------------------------------------------


def format_lc(a: LCNumber) -> str:
    """Canonical form in ascending exponent order, e.g. "3 + 1*eps^1"."""
    if not a.terms:
        return "0"
    parts: list[str] = []
    for i, (q, c) in enumerate(a.terms):
        if i > 0:
            sign = " + " if c > 0 else " - "
        else:
            sign = "-" if c < 0 else ""
        coeff = abs(c)
        if q == 0:
            parts.append(f"{sign}{rat_str(coeff)}")
        else:
            exp = rat_str(q) if q.denominator == 1 else f"({rat_str(q)})"
            parts.append(f"{sign}{_coeff_text(coeff)}*eps^{exp}")
    return "".join(parts)


def _coeff_text(c: Rat) -> str:
    text = rat_str(c)
    if "/" in text:
        return f"({text})"
    return text
