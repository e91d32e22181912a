"""From a compact-operator truncation to a dyadic enclosure.

The pipeline: take the decreasing spectrum of |T| with its symbolic
tail, read it as an infinitesimal sequence, invert to get an infinite
one, take integer parts, ask the filter questions, and embed the
answers as binary digits of a point in [0, 1].  Every stage up to the
integer part is canonical and fully exhibited; the final point is not,
and the report says so explicitly: undecided verdicts leave a
positive-width interval instead of a fabricated digit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InfinikitError, NotCompactError, PreconditionError
from .hyperseq import (
    DyadicInterval,
    FilterVerdict,
    CofiniteSet,
    Congruence,
    FiniteSet,
    PerfectPowers,
    Predicate,
    RateSeq,
    Threshold,
    converges_to_zero,
    dyadic_embed,
    filter_query,
    format_rate,
    integer_part,
    reciprocal,
)
from .opcalc import OperatorTrunc, SpectralSequence, spectrum_desc
from ._rat import rat_str

__all__ = [
    "BridgeReport",
    "operator_to_infinitesimal",
    "run_bridge",
    "parse_predicate",
    "EXHIBITABILITY_NOTE",
]

EXHIBITABILITY_NOTE = (
    "canonical stages (exhibited): spectrum -> infinitesimal -> reciprocal "
    "-> integer part. choice-dependent remainder: only predicates with a "
    "finite or cofinite answer set receive a decided digit; every other "
    "digit stays undecided, so the enclosure has positive width and no "
    "single point of [0,1] is exhibited."
)


@dataclass(frozen=True)
class BridgeReport:
    spectral: SpectralSequence
    robinson: RateSeq
    H: RateSeq
    H_int: RateSeq
    queries: tuple[tuple[str, FilterVerdict], ...]
    enclosure: DyadicInterval
    exhibitability_note: str = EXHIBITABILITY_NOTE

    def __post_init__(self):
        if not converges_to_zero(self.robinson):
            raise PreconditionError("robinson sequence must converge to 0")
        if not (0 <= self.enclosure.lo <= self.enclosure.hi <= 1):
            raise PreconditionError("enclosure must sit inside [0, 1]")

    def as_doc(self) -> dict:
        return {
            "spectrum": list(self.spectral.values),
            "tail": format_rate(self.spectral.tail) if self.spectral.tail else None,
            "robinson": format_rate(self.robinson),
            "H": format_rate(self.H),
            "H_int": format_rate(self.H_int),
            "queries": [[name, verdict.value] for name, verdict in self.queries],
            "enclosure": {
                "lo": rat_str(self.enclosure.lo),
                "hi": rat_str(self.enclosure.hi),
                "decided_bits": self.enclosure.decided_bits,
            },
            "exhibitability_note": self.exhibitability_note,
        }


def operator_to_infinitesimal(T: OperatorTrunc, tail: RateSeq) -> RateSeq:
    """The spectrum of |T| as an infinitesimal sequence.

    The stored singular values become prefix overrides on the tail
    class, so the sequence is the computed spectrum where it is known
    and the symbolic tail beyond.
    """
    spectral = spectrum_desc(T, tail)
    if not converges_to_zero(tail):
        raise NotCompactError("tail class does not converge to 0")
    prefix = [(i + 1, v) for i, v in enumerate(spectral.values)]
    return RateSeq(
        tail.monomials,
        prefix,
        exact=tail.exact,
        opaque=tail.opaque,
        sampler=tail._sampler,
    )


def _stage(name: str, fn, *args):
    try:
        return fn(*args)
    except InfinikitError as exc:
        message = f"[stage {name}] {exc}"
        try:
            raise type(exc)(message) from exc
        except TypeError:
            raise exc


def run_bridge(
    T: OperatorTrunc, tail: RateSeq, predicates: list[Predicate]
) -> BridgeReport:
    """Compose the full chain and report every stage.

    Verdict order follows the predicate order, and the enclosure is the
    dyadic embedding of exactly those verdicts, so an undecided answer
    can widen or freeze the enclosure but never narrow it.
    """
    if not predicates:
        raise PreconditionError("need at least one predicate")
    spectral = _stage("spectrum", spectrum_desc, T, tail)
    robinson = _stage("infinitesimal", operator_to_infinitesimal, T, tail)
    H = _stage("reciprocal", reciprocal, robinson)
    H_int = _stage("integer-part", integer_part, H)
    queries = tuple(
        (A.name, _stage(f"query:{A.name}", filter_query, H_int, A)) for A in predicates
    )
    enclosure = _stage("enclosure", dyadic_embed, [v for _, v in queries])
    return BridgeReport(
        spectral=spectral,
        robinson=robinson,
        H=H,
        H_int=H_int,
        queries=queries,
        enclosure=enclosure,
    )


def parse_predicate(text: str) -> Predicate:
    """Parse one predicate token of the registered catalogue.

    Forms: `m>K`, `evens`, `odds`, `mod:K:R`, `squares`, `cubes`,
    `powers:K`, `finite:{a,b,c}`, `cofinite:{a,b,c}`.
    """
    t = text.strip()
    if t == "evens":
        return Congruence(0, 2)
    if t == "odds":
        return Congruence(1, 2)
    if t == "squares":
        return PerfectPowers(2)
    if t == "cubes":
        return PerfectPowers(3)
    if t.startswith("m>"):
        return Threshold(_int_part(t[2:], t))
    if t.startswith("mod:"):
        parts = t.split(":")
        if len(parts) != 3:
            raise PreconditionError(f"bad predicate {text!r}: want mod:K:R")
        return Congruence(_int_part(parts[2], t), _int_part(parts[1], t))
    if t.startswith("powers:"):
        return PerfectPowers(_int_part(t.split(":", 1)[1], t))
    if t.startswith("finite:") or t.startswith("cofinite:"):
        kind, _, body = t.partition(":")
        body = body.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise PreconditionError(f"bad predicate {text!r}: want {kind}:{{a,b,c}}")
        inner = body[1:-1].strip()
        elements = [_int_part(p, t) for p in inner.split(",")] if inner else []
        return FiniteSet(elements) if kind == "finite" else CofiniteSet(elements)
    raise PreconditionError(f"unknown predicate {text!r}")


def _int_part(piece: str, whole: str) -> int:
    try:
        return int(piece.strip())
    except ValueError as exc:
        raise PreconditionError(f"bad integer in predicate {whole!r}") from exc
