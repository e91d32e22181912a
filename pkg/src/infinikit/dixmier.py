"""Dixmier-trace diagnostics on spectral sequences.

The object of study is gamma_N = sigma_N / ln N where sigma_N is the
running sum of the singular values.  Along a dyadic schedule the
estimator smooths consecutive (1/ln N, gamma_N) points, extrapolates
each adjacent pair linearly to 1/ln N = 0, and reads convergence of
those extrapolants as the operational measurability verdict: no limit
point is ever chosen, the estimator reports liminf/limsup and lets a
genuine oscillation stand as non-measurable.

gamma_N converges like 1/ln N, so raw spread is useless as a test; the
extrapolation step is what makes the tolerance meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rat import Rat, as_rat
from .errors import InsufficientDataError, NoTailError, PreconditionError
from .hyperseq import RateSeq, constant_seq, termwise_mul
from .opcalc import SpectralSequence

__all__ = [
    "DixmierEstimate",
    "partial_sum",
    "gamma",
    "dixmier_estimate",
    "order_of",
    "scale_check",
    "positivity_check",
    "linearity_check",
    "scale_spectral",
    "tower_sequence",
    "tower_coefficient",
    "DEFAULT_CAP",
    "DEFAULT_TOL_MEAS",
]

DEFAULT_CAP = 2**20
DEFAULT_TOL_MEAS = 1e-3
_DEFAULT_JMIN = 4
_WINDOW = 8


@dataclass(frozen=True)
class DixmierEstimate:
    """Estimator verdict over a dyadic schedule.

    value is only reported when the extrapolants settled (measurable);
    liminf/limsup always bracket the window of extrapolants and spread
    is their gap.
    """

    value: float | None
    liminf: float
    limsup: float
    measurable: bool
    schedule: tuple[int, ...]
    spread: float
    gamma_values: tuple[float, ...]
    extrapolated: tuple[float, ...]
    smoothed: bool

    def __post_init__(self):
        if self.spread < 0:
            raise PreconditionError("spread cannot be negative")
        if any(a >= b for a, b in zip(self.schedule, self.schedule[1:])):
            raise PreconditionError("schedule must be strictly increasing")
        if self.measurable and self.value is not None:
            if not (self.liminf - 1e-12 <= self.value <= self.limsup + 1e-12):
                raise PreconditionError("value must sit between liminf and limsup")

    def as_doc(self) -> dict:
        return {
            "schedule": list(self.schedule),
            "gamma_values": list(self.gamma_values),
            "liminf": self.liminf,
            "limsup": self.limsup,
            "spread": self.spread,
            "measurable": self.measurable,
            "value": self.value,
        }


# -- sigma and gamma --------------------------------------------------


def _tail_monomials(tail: RateSeq):
    if tail.opaque:
        raise PreconditionError("tail class must be symbolic, not opaque")
    for m in tail.monomials:
        if m.parity:
            raise PreconditionError("tail class cannot carry parity modulation")
    return tail.monomials


def _sigma_at(s: SpectralSequence, checkpoints: list[int]) -> np.ndarray:
    """Compensated sigma_N at ascending checkpoints."""
    stored_n = len(s.values)
    out = np.empty(len(checkpoints))
    stored_cps = [n for n in checkpoints if n <= stored_n]
    tail_cps = [n for n in checkpoints if n > stored_n]
    if stored_cps:
        vals = np.asarray(s.values, dtype=np.float64)
        out[: len(stored_cps)] = _kernels.checkpoint_sums(
            vals, np.asarray(stored_cps, dtype=np.int64)
        )
    if tail_cps:
        if s.tail is None:
            raise InsufficientDataError(
                f"checkpoint {tail_cps[0]} exceeds the stored truncation "
                f"({stored_n} values) and no tail class is attached"
            )
        base = 0.0
        if stored_n:
            vals = np.asarray(s.values, dtype=np.float64)
            base = float(
                _kernels.checkpoint_sums(vals, np.asarray([stored_n], dtype=np.int64))[0]
            )
        start = stored_n + 1
        totals = np.full(len(tail_cps), base)
        for m in _tail_monomials(s.tail):
            m_start = start
            if m.q < 0 and m_start == 1:
                raise PreconditionError(
                    "tail with a negative ln power is singular at index 1; "
                    "store the first value explicitly"
                )
            sums = _kernels.power_checkpoint_sums(
                float(m.p), int(m.q), m_start, np.asarray(tail_cps, dtype=np.int64)
            )
            totals = totals + float(m.c) * sums
        out[len(stored_cps) :] = totals
    return out


def partial_sum(s: SpectralSequence, N: int) -> float:
    """sigma_N: compensated sum of the first N singular values."""
    if N < 1:
        raise PreconditionError("N must be positive")
    return float(_sigma_at(s, [int(N)])[0])


def gamma(s: SpectralSequence, N: int) -> float:
    """gamma_N = sigma_N / ln N."""
    if N < 2:
        raise PreconditionError("gamma needs N >= 2")
    return partial_sum(s, N) / math.log(N)


# -- the estimator ----------------------------------------------------


def _dyadic_schedule(cap: int, jmin: int = _DEFAULT_JMIN) -> list[int]:
    jmax = int(math.floor(math.log2(cap)))
    if jmax < jmin + 3:
        raise PreconditionError(f"cap {cap} leaves too few dyadic points")
    return [2**j for j in range(jmin, jmax + 1)]


def _pair_smooth(xs: list[float], ys: list[float]):
    """Average consecutive (x, y) points together; points on a line in x
    stay on that line, so the smoothing cannot bias a converged trend."""
    sx = [(a + b) / 2.0 for a, b in zip(xs, xs[1:])]
    sy = [(a + b) / 2.0 for a, b in zip(ys, ys[1:])]
    return sx, sy


def _richardson(xs: list[float], ys: list[float]) -> list[float]:
    """Extrapolate each consecutive point pair linearly to x = 0."""
    out = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        out.append(y1 - x1 * (y1 - y0) / (x1 - x0))
    return out


def dixmier_estimate(
    s: SpectralSequence,
    cap: int = DEFAULT_CAP,
    *,
    tol_meas: float = DEFAULT_TOL_MEAS,
    smoothing: bool = True,
    window: int = _WINDOW,
    jmin: int = _DEFAULT_JMIN,
) -> DixmierEstimate:
    """Measurability verdict and value over the dyadic schedule 2^j.

    Smoothed gamma points are pairwise extrapolated in 1/ln N; the last
    `window` extrapolants give liminf/limsup, and their spread under
    tol_meas is the measurability proxy.  The value reported for a
    measurable input is the window mean, which homogeneity-scales with
    the input.
    """
    schedule = _dyadic_schedule(cap, jmin)
    sigmas = _sigma_at(s, schedule)
    assert all(
        b >= a - 1e-9 * max(1.0, abs(a)) for a, b in zip(sigmas, sigmas[1:])
    ), "sigma must be nondecreasing"
    gammas = [float(sig) / math.log(n) for sig, n in zip(sigmas, schedule)]
    assert all(g >= 0.0 for g in gammas), "gamma must be nonnegative"
    xs = [1.0 / math.log(n) for n in schedule]
    ys = list(gammas)
    if smoothing:
        xs, ys = _pair_smooth(xs, ys)
    extrapolants = _richardson(xs, ys)
    w = extrapolants[-window:]
    liminf = min(w)
    limsup = max(w)
    spread = limsup - liminf
    measurable = spread < tol_meas
    value = sum(w) / len(w) if measurable else None
    return DixmierEstimate(
        value=value,
        liminf=liminf,
        limsup=limsup,
        measurable=measurable,
        schedule=tuple(schedule),
        spread=spread,
        gamma_values=tuple(gammas),
        extrapolated=tuple(extrapolants),
        smoothed=smoothing,
    )


# -- order, scale, positivity, linearity ------------------------------


def order_of(s: SpectralSequence) -> Rat:
    """Largest alpha with mu_n = O(n^-alpha), read off the tail class."""
    if s.tail is None:
        raise NoTailError("order of an infinitesimal needs a tail class")
    mons = _tail_monomials(s.tail)
    if not mons:
        raise PreconditionError("zero tail has no finite order")
    return -mons[0].p


def _coverage(s: SpectralSequence) -> int | None:
    """Largest index with a defined mu_n, None meaning unbounded."""
    return None if s.tail is not None else len(s.values)


def scale_check(
    s: SpectralSequence, factor: int, cap: int = DEFAULT_CAP, window: int = _WINDOW
) -> dict:
    """Scale-invariance report: |gamma_{mN} - gamma_N| along the schedule.

    For measurable power-law tails the discrepancy drains to 0; an
    oscillating input keeps it alive on some blocks.
    """
    if factor < 2:
        raise PreconditionError("scale factor must be at least 2")
    schedule = _dyadic_schedule(cap)
    cov = _coverage(s)
    usable = [n for n in schedule if cov is None or factor * n <= cov]
    if not usable:
        raise InsufficientDataError(
            f"no schedule point has coverage for factor {factor}"
        )
    g1 = [gamma(s, n) for n in usable]
    g2 = [gamma(s, factor * n) for n in usable]
    discrepancies = [abs(b - a) for a, b in zip(g1, g2)]
    tail_window = discrepancies[-window:]
    return {
        "factor": factor,
        "schedule": usable,
        "discrepancies": discrepancies,
        "max_last_window": max(tail_window),
    }


def positivity_check(s: SpectralSequence, cap: int = DEFAULT_CAP) -> bool:
    """gamma_N >= 0 along the schedule; forced by nonnegative mu."""
    schedule = _dyadic_schedule(cap)
    cov = _coverage(s)
    usable = [n for n in schedule if cov is None or n <= cov]
    if not usable:
        raise InsufficientDataError("no schedule point within coverage")
    return all(gamma(s, n) >= 0.0 for n in usable)


def _materialize(s: SpectralSequence, N: int) -> np.ndarray:
    """mu_1..mu_N as an explicit float array (stored values ++ tail)."""
    stored_n = min(len(s.values), N)
    out = np.empty(N)
    out[:stored_n] = s.values[:stored_n]
    if N > stored_n:
        if s.tail is None:
            raise InsufficientDataError(
                f"index {N} beyond truncation and no tail class"
            )
        n = np.arange(stored_n + 1, N + 1, dtype=np.float64)
        total = np.zeros(len(n))
        for m in _tail_monomials(s.tail):
            term = float(m.c) * n ** float(m.p)
            if m.q:
                term = term * np.log(n) ** m.q
            total += term
        out[stored_n:] = total
    return out


def linearity_check(s1: SpectralSequence, s2: SpectralSequence, N_max: int) -> dict:
    """Additivity residual of gamma on the pointwise-sum proxy.

    The proxy sums the two sorted sequences index-wise (still
    nonincreasing), so the residual only measures float accumulation.
    """
    if N_max < 2:
        raise PreconditionError("need N_max >= 2")
    v1 = _materialize(s1, N_max)
    v2 = _materialize(s2, N_max)
    cps = np.asarray([N_max], dtype=np.int64)
    g_sum = float(_kernels.checkpoint_sums(v1 + v2, cps)[0]) / math.log(N_max)
    g1 = float(_kernels.checkpoint_sums(v1, cps)[0]) / math.log(N_max)
    g2 = float(_kernels.checkpoint_sums(v2, cps)[0]) / math.log(N_max)
    return {
        "N": N_max,
        "gamma_sum": g_sum,
        "gamma_a": g1,
        "gamma_b": g2,
        "residual": abs(g_sum - g1 - g2),
    }


def scale_spectral(s: SpectralSequence, k) -> SpectralSequence:
    """k * s: every singular value (and the tail class) scaled by k > 0."""
    kf = float(k)
    if kf <= 0:
        raise PreconditionError("scale factor must be positive")
    tail = None
    if s.tail is not None:
        k_rat = as_rat(k) if not isinstance(k, float) else k
        tail = termwise_mul(constant_seq(k_rat), s.tail)
    return SpectralSequence(tuple(kf * v for v in s.values), tail)


# -- the oscillating tower --------------------------------------------


def tower_coefficient(n: int) -> int:
    """Block coefficient of the tower sequence: 1 on even tower levels,
    2 on odd ones, where level k covers (2^(2^k), 2^(2^(k+1))]."""
    if n <= 2:
        return 1
    k = max(0, math.ceil(math.log2(math.log2(n))) - 1)
    return 1 if k % 2 == 0 else 2


def tower_sequence(cap: int = 2 * DEFAULT_CAP) -> SpectralSequence:
    """The dyadic-tower oscillating example, materialized to cap.

    mu_n tracks c_k/n with c_k alternating 1, 2 over tower blocks; at
    each 1 -> 2 boundary the value is clipped to the running minimum so
    the sequence stays nonincreasing (the clip region is a vanishing
    fraction of each block and does not move the liminf/limsup).
    """
    n = np.arange(1, cap + 1, dtype=np.float64)
    coeff = np.ones(cap)
    k = 0
    # block k is (2^(2^k), 2^(2^(k+1))]; index i holds n = i + 1, so the
    # block occupies the slice [2^(2^k) : 2^(2^(k+1))].
    while 2 ** (2**k) < cap:
        lo = 2 ** (2**k)
        hi = min(cap, 2 ** (2 ** (k + 1)))
        coeff[lo:hi] = 1.0 if k % 2 == 0 else 2.0
        k += 1
    values = coeff / n
    np.minimum.accumulate(values, out=values)
    return SpectralSequence(tuple(values))
