"""Finite truncations of the operator picture.

Real N x N matrices stand in for operators: diagonal embeddings of
sequence prefixes, seeded orthogonal conjugation, the symmetrisation
|T| = sqrt(T'T), decreasing spectra with optional symbolic tails, the
compactness criterion on the tail, and the truncated ladder-operator
commutator demo.  The eigensolver is the in-house tridiagonal QL
kernel, not an external LAPACK routine, so results are deterministic
across platforms down to the iteration order.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rat import as_rat
from .errors import (
    DimensionMismatchError,
    EigenSolverError,
    EmptyInputError,
    InsufficientDataError,
    NonOrthogonalError,
    NoTailError,
    PreconditionError,
)
from .hyperseq import RateSeq, converges_to_zero, format_rate

__all__ = [
    "OperatorTrunc",
    "SpectralSequence",
    "DIM_CAP",
    "make_trunc",
    "diag_embed",
    "random_orthogonal",
    "conjugate",
    "symmetrise",
    "spectrum_desc",
    "is_compact_model",
    "ladder_commutator",
    "read_matrix",
    "parse_matrix_text",
    "format_spectral",
]

#: Dense-storage dimension cap; configurable per construction call.
DIM_CAP = 1024

_LABELS = ("diagonal", "conjugated", "ladder-built", "user")


@dataclass(frozen=True)
class OperatorTrunc:
    """An N x N real matrix truncation of an operator."""

    dim: int
    entries: np.ndarray = field(repr=False)
    label: str = "user"

    def __post_init__(self):
        if self.label not in _LABELS:
            raise PreconditionError(f"unknown label {self.label!r}")
        if self.dim < 1:
            raise PreconditionError("dimension must be at least 1")
        e = self.entries
        if e.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"entries shape {e.shape} does not match dim {self.dim}"
            )
        if not np.all(np.isfinite(e)):
            raise PreconditionError("matrix entries must be finite")

    def __str__(self) -> str:
        return f"<{self.label} {self.dim}x{self.dim}>"


def make_trunc(entries, label: str = "user", cap: int = DIM_CAP) -> OperatorTrunc:
    a = np.array(entries, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > cap:
        raise PreconditionError(f"dimension {a.shape[0]} exceeds cap {cap}")
    a.setflags(write=False)
    return OperatorTrunc(a.shape[0], a, label)


@dataclass(frozen=True)
class SpectralSequence:
    """Nonincreasing nonnegative values, optionally continued by a
    symbolic tail class for indices beyond the stored truncation."""

    values: tuple[float, ...]
    tail: RateSeq | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for v in vals:
            if not math.isfinite(v) or v < 0:
                raise PreconditionError("spectral values must be finite and nonnegative")
        for a, b in zip(vals, vals[1:]):
            if b > a + 1e-12 * max(1.0, abs(a)):
                raise PreconditionError("spectral values must be nonincreasing")

    def mu(self, n: int) -> float:
        """mu_n, 1-based; falls through to the tail beyond the truncation."""
        if n < 1:
            raise PreconditionError("index must be positive")
        if n <= len(self.values):
            return self.values[n - 1]
        if self.tail is None:
            raise InsufficientDataError(
                f"index {n} beyond truncation of {len(self.values)} and no tail"
            )
        return float(self.tail.sample(n))

    def __str__(self) -> str:
        return format_spectral(self)


# -- constructions ----------------------------------------------------


def diag_embed(prefix, label: str = "diagonal") -> OperatorTrunc:
    """diag(u_1, ..., u_N) from a sequence prefix."""
    values = [float(v) for v in prefix]
    if not values:
        raise EmptyInputError("cannot embed an empty prefix")
    return make_trunc(np.diag(values), label)


def random_orthogonal(dim: int, seed: int) -> OperatorTrunc:
    """Seeded orthogonal matrix with determinant +1.

    QR of a Gaussian matrix with the R-diagonal sign fix, then a last
    column flip if the determinant came out negative; identical seeds
    give identical matrices.
    """
    if dim < 1:
        raise PreconditionError("dimension must be at least 1")
    if dim == 1:
        return make_trunc(np.array([[1.0]]), "user")
    rng = np.random.RandomState(seed)
    q, r = np.linalg.qr(rng.randn(dim, dim))
    signs = np.sign(np.diagonal(r))
    signs[signs == 0] = 1.0
    q = q * signs
    if float(np.linalg.det(q)) < 0:
        q[:, -1] = -q[:, -1]
    return make_trunc(q, "user")


def _check_orthogonal(Q: OperatorTrunc) -> None:
    gram = Q.entries.T @ Q.entries
    dev = float(np.max(np.abs(gram - np.eye(Q.dim))))
    if dev > 1e-12 * Q.dim:
        raise NonOrthogonalError(
            f"Q'Q deviates from identity by {dev:.3e} (limit {1e-12 * Q.dim:.3e})"
        )


def conjugate(T: OperatorTrunc, Q: OperatorTrunc) -> OperatorTrunc:
    """Q'TQ: the finite stand-in for propagating along an orthogonal
    group action."""
    if T.dim != Q.dim:
        raise DimensionMismatchError(f"dims differ: {T.dim} vs {Q.dim}")
    _check_orthogonal(Q)
    return make_trunc(Q.entries.T @ T.entries @ Q.entries, "conjugated")


# -- spectral pipeline ------------------------------------------------


def _gram_eigensystem(T: OperatorTrunc):
    try:
        w, v = _kernels.eig_sym(T.entries.T @ T.entries)
    except RuntimeError as exc:
        raise EigenSolverError(f"QL iteration failed to converge: {exc}") from exc
    return np.maximum(w, 0.0), v


def symmetrise(T: OperatorTrunc) -> OperatorTrunc:
    """|T|, the positive square root of T'T; eigenvalues are the
    singular values of T."""
    w, v = _gram_eigensystem(T)
    m = (v * np.sqrt(w)) @ v.T
    m = 0.5 * (m + m.T)  # kill rounding asymmetry
    return make_trunc(m, "user")


def spectrum_desc(T: OperatorTrunc, tail: RateSeq | None = None) -> SpectralSequence:
    """Singular values in nonincreasing order.

    Ties keep the solver's natural eigenindex order, so repeated values
    list deterministically.
    """
    w, _ = _gram_eigensystem(T)
    sigma = np.sqrt(w)
    order = sorted(range(T.dim), key=lambda i: (-sigma[i], i))
    values = tuple(float(sigma[i]) for i in order)
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert all(v >= 0.0 for v in values)
    return SpectralSequence(values, tail)


def is_compact_model(s: SpectralSequence) -> bool:
    """Compactness criterion: the tail class must converge to zero.

    A bare truncation has no tail to inspect, and compactness is a
    statement about the tail, hence the error."""
    if s.tail is None:
        raise NoTailError("compactness needs a symbolic tail")
    return converges_to_zero(s.tail)


# -- ladder demo ------------------------------------------------------


def ladder_commutator(dim: int, hbar) -> tuple[tuple[np.ndarray, np.ndarray], dict]:
    """Truncated [X, P] with X = (a + a')/sqrt(2), P = i(a' - a)/sqrt(2).

    Returns ((real, imag), report).  The commutator of the truncations
    is i*hbar*diag(1, ..., 1, -(dim-1)): the canonical relation holds on
    the first dim-1 diagonal entries and the last one absorbs minus the
    accumulated trace, keeping trace([X, P]) = 0 -- no finite truncation
    satisfies [X, P] = i*hbar*I outright.
    """
    if dim < 2:
        raise PreconditionError("need dimension at least 2")
    h = float(as_rat(hbar)) if not isinstance(hbar, float) else hbar
    a = np.zeros((dim, dim))
    for k in range(1, dim):
        a[k - 1, k] = math.sqrt(k * h)
    adag = a.T.copy()
    x = (a + adag) / math.sqrt(2.0)
    p_imag = (adag - a) / math.sqrt(2.0)
    c_imag = x @ p_imag - p_imag @ x
    c_real = np.zeros((dim, dim))
    deviation = float(np.linalg.norm(c_imag - h * np.eye(dim)))
    report = {
        "deviation_norm": deviation,
        "trace_real": float(np.trace(c_real)),
        "trace_imag": float(np.trace(c_imag)),
        "last_diagonal": float(c_imag[dim - 1, dim - 1]),
    }
    return (c_real, c_imag), report


# -- matrix I/O -------------------------------------------------------


def parse_matrix_text(text: str) -> OperatorTrunc:
    """Rows of decimal numbers, one row per line, comma- or
    whitespace-separated."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise PreconditionError(f"bad number on line {lineno}: {exc}") from exc
    if not rows:
        raise EmptyInputError("no matrix rows found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionMismatchError("rows have differing lengths")
    return make_trunc(np.array(rows))


def _parse_matrix_doc(text: str) -> OperatorTrunc:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise PreconditionError("matrix document needs 'dim' and 'entries' keys")
    dim = int(doc["dim"])
    entries = np.array(doc["entries"], dtype=np.float64)
    if entries.ndim == 1:
        if entries.size != dim * dim:
            raise DimensionMismatchError(
                f"flat entries length {entries.size} != dim^2 = {dim * dim}"
            )
        entries = entries.reshape(dim, dim)
    if entries.shape != (dim, dim):
        raise DimensionMismatchError(
            f"entries shape {entries.shape} does not match dim {dim}"
        )
    return make_trunc(entries)


def read_matrix(path: str) -> OperatorTrunc:
    """Load a matrix file: structured-document form when it starts with
    '{', plain text rows otherwise."""
    if not os.path.exists(path):
        raise EmptyInputError(f"matrix file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return _parse_matrix_doc(text)
    return parse_matrix_text(text)


def format_spectral(s: SpectralSequence) -> str:
    """One value per line, 12 significant digits, tail annotated last."""
    lines = ["%.12g" % v for v in s.values]
    if s.tail is not None:
        lines.append(f"tail: {format_rate(s.tail)}")
    return "\n".join(lines)
