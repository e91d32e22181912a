"""Sequence-model hyperreal arithmetic at desk scale.

A RateSeq is a real sequence u_1, u_2, ... carried in three layers: a
symbolic class (a sum of monomials c * n^p * ln(n)^q, each optionally
modulated by (-1)^n), a finite list of prefix overrides, and a sampler
that evaluates any index.  Term-wise ring operations, the eventually-zero
equivalence, a dominance order with explicit undecidable outcomes,
standard part, natural extension of host functions, reciprocals and
integer parts, three-valued filter queries against a predicate
catalogue, and the dyadic interval embedding all live here.

No ultrafilter is constructed anywhere: every question the symbolic
fragment cannot settle comes back as an explicit undecidable or
undecided token rather than a silent guess.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

from ._rat import ONE, ZERO, Rat, as_rat, is_rat, rat_pow, rat_str
from .errors import (
    CertificationFailureError,
    DegenerateInputError,
    NoLimitError,
    PreconditionError,
    SamplerDomainError,
)

__all__ = [
    "Monomial",
    "RateSeq",
    "DominanceVerdict",
    "FilterVerdict",
    "DyadicInterval",
    "make_rate",
    "from_terms",
    "constant_seq",
    "zero_seq",
    "termwise_add",
    "termwise_sub",
    "termwise_mul",
    "negate",
    "eventually_equal",
    "dominance_compare",
    "standard_part_seq",
    "converges_to_zero",
    "extend",
    "infinitesimal_part",
    "reciprocal",
    "integer_part",
    "filter_query",
    "dyadic_embed",
    "Predicate",
    "Threshold",
    "Congruence",
    "PerfectPowers",
    "FiniteSet",
    "CofiniteSet",
    "UserSet",
    "DEFAULT_HORIZON",
    "format_rate",
]

#: Sampling horizon for filter certification attempts; configurable per call.
DEFAULT_HORIZON = 10**6


class DominanceVerdict(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    SAME_ORDER = "same-order"
    UNDECIDABLE = "undecidable-without-ultrafilter"


class FilterVerdict(enum.Enum):
    IN_FILTER = "in_filter"
    IN_COMPLEMENT = "in_complement"
    UNDECIDED = "undecided"


class Monomial(NamedTuple):
    """One symbolic term c * n^p * ln(n)^q, times (-1)^n when parity is 1."""

    p: Rat
    q: int
    parity: int
    c: object  # Rat when exact, float otherwise


# -- coefficient helpers (Rat/float mixed arithmetic) -----------------
# gmpy2 rationals silently promote against floats, so every mixed
# operation goes through these.


def _cadd(x, y):
    if is_rat(x) and is_rat(y):
        return x + y
    return float(x) + float(y)


def _cmul(x, y):
    if is_rat(x) and is_rat(y):
        return x * y
    return float(x) * float(y)


def _cneg(x):
    return -x


def _cabs(x):
    return abs(x)


def _ccmp(x, y) -> int:
    if is_rat(x) and is_rat(y):
        return (x > y) - (x < y)
    fx, fy = float(x), float(y)
    return (fx > fy) - (fx < fy)


def _sort_key(m: Monomial):
    return (-m.p, -m.q, m.parity)


def _merge_monomials(
    groups: Iterable[tuple[tuple[Rat, int, int], object]],
) -> tuple[tuple[Monomial, ...], bool]:
    """Sum coefficients sharing (p, q, parity); report whether any key
    present in the input vanished from the output."""
    acc: dict[tuple[Rat, int, int], object] = {}
    for key, c in groups:
        if key in acc:
            acc[key] = _cadd(acc[key], c)
        else:
            acc[key] = c
    cancelled = any(c == 0 for c in acc.values())
    mons = tuple(
        sorted(
            (Monomial(p, q, parity, c) for (p, q, parity), c in acc.items() if c != 0),
            key=_sort_key,
        )
    )
    return mons, cancelled


class RateSeq:
    """Immutable sequence value.

    exact: the monomial formula reproduces the sequence at every
      non-overridden index.
    opaque: the monomials carry no asymptotic information and only the
      sampler speaks for the sequence (non-catalogue extensions).
    A sequence that is not exact and not opaque has monomials that are
    certified to give the dominant asymptotics even though the formula
    does not reproduce every sample.
    """

    __slots__ = (
        "monomials",
        "prefix",
        "exact",
        "opaque",
        "integer_valued",
        "skipped",
        "_sampler",
        "_prefix_map",
    )

    monomials: tuple[Monomial, ...]
    prefix: tuple[tuple[int, object], ...]

    def __init__(
        self,
        monomials: Iterable[Monomial] = (),
        prefix: Iterable[tuple[int, object]] = (),
        *,
        exact: bool = True,
        opaque: bool = False,
        integer_valued: bool = False,
        skipped: Iterable[int] = (),
        sampler: Callable[[int], object] | None = None,
    ):
        mons = tuple(sorted(monomials, key=_sort_key))
        if opaque:
            mons = ()
            exact = False
        if not exact and sampler is None and not opaque:
            raise ValueError("inexact RateSeq requires a sampler")
        if opaque and sampler is None:
            raise ValueError("opaque RateSeq requires a sampler")
        object.__setattr__(self, "monomials", mons)
        object.__setattr__(self, "prefix", tuple(sorted(prefix)))
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "opaque", opaque)
        object.__setattr__(self, "integer_valued", integer_valued)
        object.__setattr__(self, "skipped", tuple(sorted(skipped)))
        object.__setattr__(self, "_sampler", sampler)
        object.__setattr__(self, "_prefix_map", dict(self.prefix))

    def __setattr__(self, name, value):
        raise AttributeError("RateSeq is immutable")

    @property
    def dominant(self) -> Monomial | None:
        """The monomial governing the eventual order of magnitude."""
        return self.monomials[0] if self.monomials else None

    def sample(self, n: int):
        """u_n: prefix override where present, else formula or sampler."""
        if not isinstance(n, int) or n < 1:
            raise SamplerDomainError(f"index must be a positive integer, got {n!r}")
        if n in self._prefix_map:
            return self._prefix_map[n]
        if self.exact:
            return _eval_formula(self.monomials, n)
        return self._sampler(n)

    def sample_float(self, n: int) -> float:
        return float(self.sample(n))

    def __str__(self) -> str:
        return format_rate(self)

    def __repr__(self) -> str:
        tags = []
        if not self.exact:
            tags.append("opaque" if self.opaque else "asymptotic")
        if self.integer_valued:
            tags.append("integer")
        tag_text = f" [{', '.join(tags)}]" if tags else ""
        return f"RateSeq({format_rate(self)}{tag_text}, prefix={len(self.prefix)})"


def _eval_formula(monomials: tuple[Monomial, ...], n: int):
    exact_total = ZERO
    float_total = 0.0
    saw_float = False
    for p, q, parity, c in monomials:
        if q < 0 and n == 1:
            raise SamplerDomainError("ln(1) = 0 cannot be raised to a negative power")
        sign_flip = parity and (n & 1)
        if q == 0 and p.denominator == 1 and is_rat(c):
            v = c * rat_pow(as_rat(n), p)
            exact_total = exact_total + (-v if sign_flip else v)
        else:
            saw_float = True
            v = float(c) * float(n) ** float(p)
            if q:
                v *= math.log(n) ** q
            float_total += -v if sign_flip else v
    if saw_float:
        return float(exact_total) + float_total
    return exact_total


# -- constructors -----------------------------------------------------


def make_rate(
    c,
    p=0,
    q: int = 0,
    parity: bool = False,
    prefix: Iterable[tuple[int, object]] = (),
) -> RateSeq:
    """Single-class sequence c * n^p * ln(n)^q (times (-1)^n if parity)."""
    coeff = c if isinstance(c, float) else as_rat(c)
    if coeff == 0:
        return RateSeq((), prefix)
    return RateSeq((Monomial(as_rat(p), int(q), int(bool(parity)), coeff),), prefix)


def from_terms(
    terms: Iterable[tuple], prefix: Iterable[tuple[int, object]] = ()
) -> RateSeq:
    """Sum of (c, p[, q[, parity]]) monomial tuples, merged and pruned."""
    groups = []
    for term in terms:
        c, p, *rest = term
        q = int(rest[0]) if rest else 0
        parity = int(bool(rest[1])) if len(rest) > 1 else 0
        coeff = c if isinstance(c, float) else as_rat(c)
        groups.append(((as_rat(p), q, parity), coeff))
    mons, _ = _merge_monomials(groups)
    return RateSeq(mons, prefix)


def constant_seq(c) -> RateSeq:
    return make_rate(c, 0, 0)


def zero_seq(prefix: Iterable[tuple[int, object]] = ()) -> RateSeq:
    return RateSeq((), prefix)


# -- ring operations --------------------------------------------------


def _merged_prefix_indices(a: RateSeq, b: RateSeq) -> list[int]:
    return sorted({n for n, _ in a.prefix} | {n for n, _ in b.prefix})


def _is_exact_zero_class(a: RateSeq) -> bool:
    return a.exact and not a.monomials


def termwise_add(a: RateSeq, b: RateSeq) -> RateSeq:
    """Pointwise sum; the symbolic class is the merged monomial sum."""
    if _is_exact_zero_class(a):
        a, b = b, a
    if _is_exact_zero_class(b):
        # b is zero off its overrides, so only the prefix changes.
        prefix = [(n, _cadd(a.sample(n), b.sample(n))) for n in _merged_prefix_indices(a, b)]
        return RateSeq(
            a.monomials,
            prefix,
            exact=a.exact,
            opaque=a.opaque,
            sampler=a._sampler,
        )
    groups = [((m.p, m.q, m.parity), m.c) for m in a.monomials]
    groups += [((m.p, m.q, m.parity), m.c) for m in b.monomials]
    mons, cancelled = _merge_monomials(groups)
    prefix = [(n, _cadd(a.sample(n), b.sample(n))) for n in _merged_prefix_indices(a, b)]
    both_exact = a.exact and b.exact
    opaque = a.opaque or b.opaque or (not both_exact and cancelled)
    sampler = None
    if not both_exact:
        sampler = lambda n, _a=a, _b=b: _cadd(_a.sample(n), _b.sample(n))
    return RateSeq(mons, prefix, exact=both_exact, opaque=opaque, sampler=sampler)


def negate(a: RateSeq) -> RateSeq:
    mons = tuple(Monomial(m.p, m.q, m.parity, _cneg(m.c)) for m in a.monomials)
    prefix = tuple((n, _cneg(v)) for n, v in a.prefix)
    sampler = None
    if not a.exact:
        sampler = lambda n, _a=a: _cneg(_a.sample(n))
    return RateSeq(
        mons,
        prefix,
        exact=a.exact,
        opaque=a.opaque,
        integer_valued=a.integer_valued,
        sampler=sampler,
    )


def termwise_sub(a: RateSeq, b: RateSeq) -> RateSeq:
    return termwise_add(a, negate(b))


def termwise_mul(a: RateSeq, b: RateSeq) -> RateSeq:
    """Pointwise product; classes convolve (exponents add, parities xor)."""
    if _is_exact_zero_class(a):
        a, b = b, a
    if _is_exact_zero_class(b):
        # Product vanishes off b's overrides.
        prefix = [
            (n, v)
            for n in _merged_prefix_indices(a, b)
            if (v := _cmul(a.sample(n), b.sample(n))) != 0
        ]
        return RateSeq((), prefix)
    groups = []
    for ma in a.monomials:
        for mb in b.monomials:
            groups.append(
                (
                    (ma.p + mb.p, ma.q + mb.q, ma.parity ^ mb.parity),
                    _cmul(ma.c, mb.c),
                )
            )
    mons, cancelled = _merge_monomials(groups)
    prefix = [(n, _cmul(a.sample(n), b.sample(n))) for n in _merged_prefix_indices(a, b)]
    both_exact = a.exact and b.exact
    opaque = a.opaque or b.opaque or (not both_exact and cancelled)
    sampler = None
    if not both_exact:
        sampler = lambda n, _a=a, _b=b: _cmul(_a.sample(n), _b.sample(n))
    return RateSeq(mons, prefix, exact=both_exact, opaque=opaque, sampler=sampler)


# -- equivalence and order --------------------------------------------


def eventually_equal(a: RateSeq, b: RateSeq, probe: int = 256) -> bool:
    """Equality modulo the ideal of eventually-zero sequences.

    True iff a - b has an empty symbolic class and differs from zero at
    only finitely many overridden indices.  For sampler-only differences
    a bounded probe decides; the probe cannot certify a nonzero tail, so
    it only ever confirms equality for literal sample agreement.
    """
    d = termwise_sub(a, b)
    if d.monomials:
        return False
    if d.exact:
        return True
    start = max((n for n, _ in d.prefix), default=0) + 1
    for n in range(start, start + probe):
        try:
            if d.sample(n) != 0:
                return False
        except SamplerDomainError:
            continue
    return True


def _branch_class(monomials: tuple[Monomial, ...], odd: bool):
    """Dominant (p, q, |coef|) along one parity branch, or None if the
    branch cancels to zero."""
    grouped: dict[tuple[Rat, int], object] = {}
    for p, q, parity, c in monomials:
        eff = _cneg(c) if (parity and odd) else c
        key = (p, q)
        grouped[key] = _cadd(grouped[key], eff) if key in grouped else eff
    for p, q in sorted(grouped, key=lambda k: (-k[0], -k[1])):
        coef = grouped[(p, q)]
        if coef != 0:
            return (p, q, _cabs(coef))
    return None


def _compare_branch(ca, cb) -> DominanceVerdict:
    if ca is None and cb is None:
        return DominanceVerdict.SAME_ORDER
    if ca is None:
        return DominanceVerdict.LESS
    if cb is None:
        return DominanceVerdict.GREATER
    pa, qa, aa = ca
    pb, qb, ab = cb
    if pa != pb:
        return DominanceVerdict.LESS if pa < pb else DominanceVerdict.GREATER
    if qa != qb:
        return DominanceVerdict.LESS if qa < qb else DominanceVerdict.GREATER
    s = _ccmp(aa, ab)
    if s < 0:
        return DominanceVerdict.LESS
    if s > 0:
        return DominanceVerdict.GREATER
    return DominanceVerdict.SAME_ORDER


def dominance_compare(a: RateSeq, b: RateSeq) -> DominanceVerdict:
    """Speed-of-convergence order on |a| versus |b|.

    The verdict is computed separately along the even and odd index
    branches (where any (-1)^n modulation is constant); agreement of the
    branches is required, otherwise the answer would depend on which
    branch the absent ultrafilter concentrates on.  Prefix overrides are
    finite and never affect eventual dominance.
    """
    if a.opaque or b.opaque:
        return DominanceVerdict.UNDECIDABLE
    even = _compare_branch(_branch_class(a.monomials, False), _branch_class(b.monomials, False))
    odd = _compare_branch(_branch_class(a.monomials, True), _branch_class(b.monomials, True))
    if even is odd:
        return even
    return DominanceVerdict.UNDECIDABLE


def _diverges(m: Monomial) -> bool:
    return m.p > 0 or (m.p == 0 and m.q > 0)


def standard_part_seq(a: RateSeq):
    """The limit of the sequence; prefix overrides are ignored.

    Exists exactly when every monomial either decays or is an
    unmodulated constant.  Rejects opaque sequences: without a certified
    class no limit can be claimed.
    """
    if a.opaque:
        raise NoLimitError("sequence has no certified rate class")
    limit = ZERO
    for m in a.monomials:
        if _diverges(m):
            raise NoLimitError("rate class diverges")
        if m.p == 0 and m.q == 0:
            if m.parity:
                raise NoLimitError("rate class oscillates")
            limit = _cadd(limit, m.c)
    return limit


def converges_to_zero(a: RateSeq) -> bool:
    """Certified-infinitesimal test: the class forces u_n -> 0.

    False for opaque sequences (nothing is certified, nothing claimed).
    """
    if a.opaque:
        return False
    return all(m.p < 0 or (m.p == 0 and m.q < 0) for m in a.monomials)


def infinitesimal_part(x: RateSeq) -> RateSeq:
    """x minus its standard part; the class of the result converges to 0."""
    s = standard_part_seq(x)
    return termwise_sub(x, constant_seq(s))


# -- reciprocal and integer part --------------------------------------

_SKIP_SENTINEL = math.nan


def reciprocal(e: RateSeq) -> RateSeq:
    """Pointwise 1/e_n.

    Overridden indices where e vanishes are kept as overrides with a NaN
    sentinel and reported on the result's `skipped` field.  The class of
    the result is the reciprocal of the dominant monomial (exact when e
    is a single exact monomial).
    """
    if not e.opaque and not e.monomials:
        raise DegenerateInputError("reciprocal of the zero sequence")
    skipped = []
    prefix = []
    for n, v in e.prefix:
        if v == 0 or (isinstance(v, float) and math.isnan(v)):
            skipped.append(n)
            prefix.append((n, _SKIP_SENTINEL))
        elif is_rat(v):
            prefix.append((n, ONE / v))
        else:
            prefix.append((n, 1.0 / float(v)))
    if e.opaque:
        return RateSeq(
            (),
            prefix,
            opaque=True,
            skipped=skipped,
            sampler=lambda n, _e=e: _c_reciprocal(_e.sample(n)),
        )
    dom = e.monomials[0]
    inv_c = ONE / dom.c if is_rat(dom.c) else 1.0 / float(dom.c)
    mon = Monomial(-dom.p, -dom.q, dom.parity, inv_c)
    if len(e.monomials) == 1 and e.exact:
        return RateSeq((mon,), prefix, skipped=skipped)
    return RateSeq(
        (mon,),
        prefix,
        exact=False,
        skipped=skipped,
        sampler=lambda n, _e=e: _c_reciprocal(_e.sample(n)),
    )


def _c_reciprocal(v):
    if v == 0:
        return _SKIP_SENTINEL
    if is_rat(v):
        return ONE / v
    return 1.0 / float(v)


def _formula_integer_valued(a: RateSeq) -> bool:
    return a.exact and all(
        m.q == 0 and m.p.denominator == 1 and m.p >= 0 and is_rat(m.c) and m.c.denominator == 1
        for m in a.monomials
    )


def integer_part(H: RateSeq) -> RateSeq:
    """Pointwise floor, marked integer-valued.

    A diverging class survives the floor unchanged (the fractional loss
    is bounded); an already integer-valued exact formula passes through
    exactly.
    """
    prefix = []
    for n, v in H.prefix:
        if isinstance(v, float) and math.isnan(v):
            prefix.append((n, v))
        else:
            prefix.append((n, as_rat(math.floor(v))))
    if _formula_integer_valued(H):
        return RateSeq(
            H.monomials,
            prefix,
            integer_valued=True,
            skipped=H.skipped,
        )
    if H.opaque:
        return RateSeq(
            (),
            prefix,
            opaque=True,
            integer_valued=True,
            skipped=H.skipped,
            sampler=lambda n, _H=H: _floor_sample(_H, n),
        )
    dom = H.monomials[0] if H.monomials else None
    if dom is not None and _diverges(dom):
        # floor(u_n) = u_n - frac: the dominant class is untouched.
        return RateSeq(
            H.monomials,
            prefix,
            exact=False,
            integer_valued=True,
            skipped=H.skipped,
            sampler=lambda n, _H=H: _floor_sample(_H, n),
        )
    if dom is None or converges_to_zero(H):
        sign = 0 if dom is None else _ccmp(dom.c, 0)
        if dom is not None and dom.parity:
            return RateSeq(
                (),
                prefix,
                opaque=True,
                integer_valued=True,
                sampler=lambda n, _H=H: _floor_sample(_H, n),
            )
        # Eventually in (0,1) or (-1,0): the floor is a constant class.
        mons = () if sign >= 0 else (Monomial(ZERO, 0, 0, -ONE),)
        return RateSeq(
            mons,
            prefix,
            exact=False,
            integer_valued=True,
            sampler=lambda n, _H=H: _floor_sample(_H, n),
        )
    # Converging to a nonzero constant, or oscillating-finite: keep only
    # what the sampler can say.
    return RateSeq(
        (),
        prefix,
        opaque=True,
        integer_valued=True,
        sampler=lambda n, _H=H: _floor_sample(_H, n),
    )


def _floor_sample(H: RateSeq, n: int):
    v = H.sample(n)
    if isinstance(v, float) and math.isnan(v):
        return v
    return as_rat(math.floor(v))


# -- natural extension ------------------------------------------------

_NAMED_CALLABLES = {math.exp: "exp", math.log: "ln", math.sqrt: "sqrt", abs: "abs"}
_CATALOGUE = {"identity", "exp", "ln", "log", "sqrt", "square", "cube", "abs"}


def extend(f, a: RateSeq) -> RateSeq:
    """Natural extension: apply a host function index-wise.

    f may be a catalogue name ("exp", "ln", "sqrt", "square", "cube",
    "abs", "identity") or any callable.  Catalogue members get their
    rate class recomputed symbolically; other callables yield an opaque,
    sampler-only sequence.  The result is probed on a small index window
    so domain violations surface here and not at a distant sample call.
    """
    name: str | None
    fn: Callable
    if isinstance(f, str):
        if f not in _CATALOGUE:
            raise SamplerDomainError(f"unknown extension name {f!r}")
        name = "ln" if f == "log" else f
        fn = _catalogue_callable(name)
    else:
        name = _NAMED_CALLABLES.get(f)
        fn = f
    result = _extend_known(name, fn, a) if name else _extend_opaque(fn, a)
    _probe(result, a)
    return result


def _catalogue_callable(name: str) -> Callable:
    return {
        "identity": lambda x: x,
        "exp": lambda x: math.exp(float(x)),
        "ln": lambda x: math.log(float(x)),
        "sqrt": lambda x: math.sqrt(float(x)),
        "square": lambda x: _cmul(x, x),
        "cube": lambda x: _cmul(x, _cmul(x, x)),
        "abs": _cabs,
    }[name]


def _extend_opaque(fn: Callable, a: RateSeq) -> RateSeq:
    prefix = [(n, fn(v)) for n, v in a.prefix]
    return RateSeq(
        (),
        prefix,
        opaque=True,
        sampler=lambda n, _a=a, _f=fn: _f(_a.sample(n)),
    )


def _extend_known(name: str, fn: Callable, a: RateSeq) -> RateSeq:
    if name == "identity":
        return a
    if name == "square":
        return termwise_mul(a, a)
    if name == "cube":
        return termwise_mul(a, termwise_mul(a, a))
    if name == "abs":
        return _extend_abs(a)
    if name == "exp":
        return _extend_exp(a)
    if name == "sqrt":
        return _extend_sqrt(a)
    if name == "ln":
        return _extend_ln(a)
    raise AssertionError(name)


def _extend_abs(a: RateSeq) -> RateSeq:
    prefix = [(n, _cabs(v)) for n, v in a.prefix]
    sampler = lambda n, _a=a: _cabs(_a.sample(n))
    if a.opaque:
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    if not a.monomials:
        return RateSeq((), prefix, exact=a.exact, sampler=None if a.exact else sampler)
    if len(a.monomials) == 1:
        m = a.monomials[0]
        # |c * n^p * ln(n)^q * (±1)| = |c| * n^p * ln(n)^q at every index.
        return RateSeq(
            (Monomial(m.p, m.q, 0, _cabs(m.c)),),
            prefix,
            exact=a.exact,
            sampler=None if a.exact else sampler,
        )
    if any(m.parity for m in a.monomials):
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    dom = a.monomials[0]
    if _ccmp(dom.c, 0) > 0:
        mons = a.monomials
    else:
        mons = tuple(Monomial(m.p, m.q, m.parity, _cneg(m.c)) for m in a.monomials)
    return RateSeq(mons, prefix, exact=False, sampler=sampler)


def _extend_exp(a: RateSeq) -> RateSeq:
    prefix = [(n, math.exp(float(v))) for n, v in a.prefix]
    sampler = lambda n, _a=a: math.exp(float(_a.sample(n)))
    if a.opaque:
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    try:
        s = standard_part_seq(a)
    except NoLimitError:
        dom = a.monomials[0]
        if _diverges(dom) and dom.parity == 0 and _ccmp(dom.c, 0) < 0:
            # exp of a sequence diverging to -inf: decays below every
            # power class; an empty certified class records exactly that.
            return RateSeq((), prefix, exact=False, sampler=sampler)
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    value = math.exp(float(s))
    return RateSeq(
        (Monomial(ZERO, 0, 0, value),),
        prefix,
        exact=False,
        sampler=sampler,
    )


def _extend_sqrt(a: RateSeq) -> RateSeq:
    prefix = [(n, _sqrt_value(v)) for n, v in a.prefix]
    sampler = lambda n, _a=a: _sqrt_value(_a.sample(n))
    if a.opaque:
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    if not a.monomials:
        return RateSeq((), prefix, exact=a.exact, sampler=None if a.exact else sampler)
    dom = a.monomials[0]
    if dom.parity or _ccmp(dom.c, 0) < 0:
        raise SamplerDomainError("sqrt of an eventually negative sequence")
    if dom.q % 2 != 0:
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    root_c, root_exact = _sqrt_coefficient(dom.c)
    mon = Monomial(dom.p / 2, dom.q // 2, 0, root_c)
    if len(a.monomials) == 1 and a.exact and root_exact:
        return RateSeq((mon,), prefix)
    return RateSeq((mon,), prefix, exact=False, sampler=sampler)


def _sqrt_value(v):
    if is_rat(v):
        root, exact = _sqrt_coefficient(v)
        return root if exact else math.sqrt(float(v))
    return math.sqrt(float(v))


def _sqrt_coefficient(c):
    if is_rat(c):
        try:
            return rat_pow(c, Rat(1, 2)), True
        except ValueError:
            return math.sqrt(float(c)), False
    return math.sqrt(float(c)), False


def _extend_ln(a: RateSeq) -> RateSeq:
    prefix = [(n, math.log(float(v))) for n, v in a.prefix]
    sampler = lambda n, _a=a: math.log(float(_a.sample(n)))
    if a.opaque:
        return RateSeq((), prefix, opaque=True, sampler=sampler)
    if not a.monomials:
        raise SamplerDomainError("ln of the zero sequence")
    dom = a.monomials[0]
    if dom.parity or _ccmp(dom.c, 0) < 0:
        raise SamplerDomainError("ln of an eventually nonpositive sequence")
    if dom.p == 0 and dom.q == 0:
        # Converging to the positive constant c: class is ln(c).
        value = math.log(float(dom.c))
        mons = (Monomial(ZERO, 0, 0, value),) if value != 0 else ()
        return RateSeq(mons, prefix, exact=False, sampler=sampler)
    # ln(c * n^p * ...) = p*ln n + ln c + lower order.
    groups = [((ZERO, 1, 0), dom.p)]
    const = math.log(float(dom.c))
    if const != 0:
        groups.append(((ZERO, 0, 0), const))
    mons, _ = _merge_monomials(groups)
    single_pure = len(a.monomials) == 1 and a.exact and dom.q == 0 and dom.c == 1
    if single_pure:
        return RateSeq(mons, prefix)
    return RateSeq(mons, prefix, exact=False, sampler=sampler)


def _probe(result: RateSeq, source: RateSeq, window: int = 16) -> None:
    """Evaluate a small index window so domain errors surface eagerly."""
    indices = [n for n, _ in result.prefix[:8]] + list(range(1, window + 1))
    for n in indices:
        try:
            source.sample(n)
        except SamplerDomainError:
            continue  # singularity of the input, not of the extension
        try:
            v = result.sample(n)
        except SamplerDomainError:
            raise
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise SamplerDomainError(f"extension undefined at index {n}: {exc}") from exc
        if isinstance(v, float) and math.isinf(v):
            raise SamplerDomainError(f"extension overflows at index {n}")


# -- filter queries ---------------------------------------------------


class Predicate:
    """A decidable subset of the positive integers from the registered
    catalogue; membership is decidable pointwise and the symbolic shape
    is what filter_query certifies against."""

    name = "predicate"

    def contains(self, m: int) -> bool:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.name


class Threshold(Predicate):
    """{m : m > bound}."""

    def __init__(self, bound: int):
        self.bound = int(bound)
        self.name = f"m>{self.bound}"

    def contains(self, m: int) -> bool:
        return m > self.bound


class Congruence(Predicate):
    """{m : m ≡ residue (mod modulus)}."""

    def __init__(self, residue: int, modulus: int):
        if modulus < 2:
            raise PreconditionError("modulus must be at least 2")
        self.residue = int(residue) % int(modulus)
        self.modulus = int(modulus)
        if (self.residue, self.modulus) == (0, 2):
            self.name = "evens"
        elif (self.residue, self.modulus) == (1, 2):
            self.name = "odds"
        else:
            self.name = f"mod:{self.modulus}:{self.residue}"

    def contains(self, m: int) -> bool:
        return m % self.modulus == self.residue


class PerfectPowers(Predicate):
    """{m : m = t^k for some integer t}."""

    def __init__(self, k: int):
        if k < 2:
            raise PreconditionError("power must be at least 2")
        self.k = int(k)
        self.name = {2: "squares", 3: "cubes"}.get(self.k, f"powers:{self.k}")

    def contains(self, m: int) -> bool:
        if m < 1:
            return False
        root = round(m ** (1.0 / self.k))
        return any((root + d) >= 0 and (root + d) ** self.k == m for d in (-1, 0, 1))


class FiniteSet(Predicate):
    def __init__(self, elements: Iterable[int]):
        self.elements = frozenset(int(x) for x in elements)
        self.name = "finite:{" + ",".join(str(x) for x in sorted(self.elements)) + "}"

    def contains(self, m: int) -> bool:
        return m in self.elements


class CofiniteSet(Predicate):
    """Complement of a finite exclusion set."""

    def __init__(self, excluded: Iterable[int]):
        self.excluded = frozenset(int(x) for x in excluded)
        self.name = "cofinite:{" + ",".join(str(x) for x in sorted(self.excluded)) + "}"

    def contains(self, m: int) -> bool:
        return m not in self.excluded


class UserSet(Predicate):
    """User-supplied membership function with an optional certified tail.

    Passing tail="in" (or "out") with a threshold asserts that every
    integer at or above the threshold belongs (or does not belong) to
    the set; without that assertion no query on it can be certified.
    """

    def __init__(self, fn: Callable[[int], bool], name: str = "user", *,
                 tail: str | None = None, threshold: int = 0):
        if tail not in (None, "in", "out"):
            raise PreconditionError("tail must be 'in', 'out', or None")
        self.fn = fn
        self.name = name
        self.tail = tail
        self.threshold = int(threshold)

    def contains(self, m: int) -> bool:
        return bool(self.fn(m))


def _require_diverging_integer(H: RateSeq) -> None:
    if H.opaque or not H.monomials:
        raise PreconditionError("filter queries need a certified diverging sequence")
    dom = H.monomials[0]
    if dom.parity or not _diverges(dom) or _ccmp(dom.c, 0) <= 0:
        raise PreconditionError("sequence must diverge to +infinity")
    if not (H.integer_valued or _formula_integer_valued(H)):
        raise PreconditionError("sequence must be integer-valued")


def _integer_polynomial(H: RateSeq) -> list[int] | None:
    """Coefficient list (ascending degree) when H is an exact integer
    polynomial in n, else None."""
    if not _formula_integer_valued(H) or any(m.parity for m in H.monomials):
        return None
    degree = max(int(m.p) for m in H.monomials)
    coeffs = [0] * (degree + 1)
    for m in H.monomials:
        coeffs[int(m.p)] = int(m.c)
    return coeffs


def _poly_mod(coeffs: list[int], n: int, k: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * n + c) % k
    return acc


def filter_query(
    H: RateSeq, A: Predicate, horizon: int = DEFAULT_HORIZON
) -> FilterVerdict:
    """Is {n : H(n) ∈ A} cofinite (in_filter), finite (in_complement),
    or neither (undecided)?

    Decided symbolically from the shapes of H and A; bounded sampling up
    to the horizon is used only to corroborate, never to promote an
    uncertifiable answer.  Prefix overrides of H are finite and cannot
    change any verdict.
    """
    _require_diverging_integer(H)
    if isinstance(A, Threshold):
        return FilterVerdict.IN_FILTER  # H -> +inf passes any bound cofinitely
    if isinstance(A, FiniteSet):
        return FilterVerdict.IN_COMPLEMENT
    if isinstance(A, CofiniteSet):
        return FilterVerdict.IN_FILTER
    if isinstance(A, Congruence):
        return _query_congruence(H, A, horizon)
    if isinstance(A, PerfectPowers):
        return _query_powers(H, A, horizon)
    if isinstance(A, UserSet):
        return _query_user(H, A, horizon)
    raise CertificationFailureError(
        f"no certification rule for predicate {A.name!r}"
    )


def _query_congruence(H: RateSeq, A: Congruence, horizon: int) -> FilterVerdict:
    coeffs = _integer_polynomial(H)
    if coeffs is None:
        raise CertificationFailureError(
            f"cannot certify congruence verdict for non-polynomial sequence "
            f"within horizon {horizon}"
        )
    # P(n) mod k is periodic in n with period k.
    residues = {_poly_mod(coeffs, n, A.modulus) for n in range(A.modulus)}
    hits = {r for r in residues if r % A.modulus == A.residue % A.modulus}
    if hits == residues:
        return FilterVerdict.IN_FILTER
    if not hits:
        return FilterVerdict.IN_COMPLEMENT
    return FilterVerdict.UNDECIDED


def _query_powers(H: RateSeq, A: PerfectPowers, horizon: int) -> FilterVerdict:
    coeffs = _integer_polynomial(H)
    if coeffs is not None:
        nonzero = [(d, c) for d, c in enumerate(coeffs) if c != 0]
        if len(nonzero) == 1:
            degree, c = nonzero[0]
            if degree >= 1 and c > 0:
                if degree % A.k == 0:
                    # k | degree: every prime exponent of c*n^degree is
                    # v_p(c) mod k, so c alone decides, for every n.
                    if _is_perfect_power(c, A.k):
                        return FilterVerdict.IN_FILTER
                    return FilterVerdict.IN_COMPLEMENT
                if c == 1:
                    # n^degree is a k-th power exactly on the perfect
                    # (k/gcd)-th powers: infinite with infinite complement.
                    return FilterVerdict.UNDECIDED
    raise CertificationFailureError(
        f"cannot certify perfect-power verdict within horizon {horizon}"
    )


def _is_perfect_power(c: int, k: int) -> bool:
    if c < 1:
        return False
    root = round(c ** (1.0 / k))
    return any((root + d) >= 0 and (root + d) ** k == c for d in (-1, 0, 1))


def _query_user(H: RateSeq, A: UserSet, horizon: int) -> FilterVerdict:
    if A.tail is not None:
        # H -> +inf, so eventually H(n) >= threshold and the certified
        # tail decides the query.
        return FilterVerdict.IN_FILTER if A.tail == "in" else FilterVerdict.IN_COMPLEMENT
    raise CertificationFailureError(
        f"user predicate {A.name!r} carries no certified tail; sampling to "
        f"{horizon} cannot certify in_filter, in_complement, or undecided"
    )


# -- dyadic embedding -------------------------------------------------


@dataclass(frozen=True)
class DyadicInterval:
    """Closed dyadic-aligned subinterval of [0, 1]."""

    lo: Rat
    hi: Rat
    decided_bits: int

    @property
    def width(self) -> Rat:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"[{rat_str(self.lo)}, {rat_str(self.hi)}]"


def dyadic_embed(answers: Sequence[FilterVerdict]) -> DyadicInterval:
    """Enclose all binary expansions consistent with the verdicts.

    Bit k is forced to 1 by in_filter and 0 by in_complement; the first
    undecided answer releases that bit and every later one, so the
    decided prefix of length d pins the enclosure to width 2^-d.
    Answers after the first undecided cannot narrow a dyadic-aligned
    closed interval and are deliberately ignored.
    """
    value = ZERO
    d = 0
    for verdict in answers:
        if verdict is FilterVerdict.IN_FILTER:
            value = value + Rat(1, 2 ** (d + 1))
            d += 1
        elif verdict is FilterVerdict.IN_COMPLEMENT:
            d += 1
        else:
            break
    width = Rat(1, 2**d)
    return DyadicInterval(value, value + width, d)


# -- rendering -------------------------------------------------------


def _coeff_repr(c) -> str:
    if is_rat(c):
        return rat_str(c)
    return repr(float(c))


def format_rate(a: RateSeq) -> str:
    """Canonical class expression, descending dominance order.

    Mirrors the CLI sequence grammar: `c*n^p*ln(n)^q*(-1)^n` per term,
    so canonical output re-parses to the same class.
    """
    if a.opaque:
        return "<opaque>"
    if not a.monomials:
        return "0"
    parts: list[str] = []
    for i, (p, q, parity, c) in enumerate(a.monomials):
        if i > 0:
            sign = " + " if _ccmp(c, 0) > 0 else " - "
            coeff = _cabs(c)
        else:
            sign = "-" if _ccmp(c, 0) < 0 else ""
            coeff = _cabs(c)
        factors = [_wrap_coeff(_coeff_repr(coeff))]
        if p != 0:
            factors.append(f"n^{_exp_repr(p)}")
        if q != 0:
            factors.append(f"ln(n)^{q}")
        if parity:
            factors.append("(-1)^n")
        parts.append(sign + "*".join(factors))
    return "".join(parts)


def _wrap_coeff(text: str) -> str:
    return f"({text})" if "/" in text else text


def _exp_repr(p: Rat) -> str:
    if p.denominator == 1:
        return str(int(p))
    return f"({rat_str(p)})"
