"""Pure-Python/numpy kernel implementations.

Mirrors the API of the compiled extension `_ckernels`: a symmetric
eigensolver (Householder tridiagonalization followed by implicit-shift
QL iteration) and compensated checkpoint summation.  `_kernels` picks
one of the two at import time; both must stay behaviorally identical.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

#: QL sweep cap per eigenvalue; exceeding it signals numerical breakdown.
MAX_QL_SWEEPS = 50
QL_TOL = 1e-14


def eig_sym(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a symmetric matrix.

    Returns (w, V) with V[:, i] the unit eigenvector for w[i]; the order
    of w is the solver's natural order (not sorted), which callers rely
    on for deterministic tie-breaking.  Raises RuntimeError("ql-sweep-cap")
    when a QL eigenvalue fails to converge within MAX_QL_SWEEPS.
    """
    t = np.array(a, dtype=np.float64, copy=True)
    n = t.shape[0]
    if n == 1:
        return t[0].copy(), np.ones((1, 1))
    d, e, z = _householder_tridiag(t)
    _ql_implicit(d, e, z)
    return d, z


def _householder_tridiag(t: np.ndarray):
    """Reduce symmetric t to tridiagonal (d, e) accumulating the
    orthogonal transform in z (t is clobbered)."""
    n = t.shape[0]
    z = np.eye(n)
    for k in range(n - 2):
        x = t[k + 1 :, k]
        nx = math.sqrt(float(np.dot(x, x)))
        if nx == 0.0:
            continue
        u = np.zeros(n)
        u[k + 1 :] = x
        u[k + 1] += math.copysign(nx, x[0])
        unorm2 = float(np.dot(u, u))
        if unorm2 == 0.0:
            continue
        beta = 2.0 / unorm2
        p = beta * (t @ u)
        kappa = 0.5 * beta * float(np.dot(u, p))
        q = p - kappa * u
        t -= np.outer(q, u) + np.outer(u, q)
        z -= beta * np.outer(z @ u, u)
    d = np.diagonal(t).copy()
    e = np.zeros(n)
    e[: n - 1] = np.diagonal(t, -1)
    return d, e, z


def _ql_implicit(d: np.ndarray, e: np.ndarray, z: np.ndarray) -> None:
    """Implicit-shift QL on tridiagonal (d, e), rotating z's columns.

    e holds subdiagonals in e[0..n-2]; d and z are updated in place to
    the eigenvalues and eigenvectors.
    """
    n = d.shape[0]
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= QL_TOL * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_QL_SWEEPS:
                raise RuntimeError("ql-sweep-cap")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                col = z[:, i + 1].copy()
                z[:, i + 1] = s * z[:, i] + c * col
                z[:, i] = c * z[:, i] - s * col
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def checkpoint_sums(values: np.ndarray, checkpoints: np.ndarray) -> np.ndarray:
    """Compensated partial sums of an explicit array.

    checkpoints are 1-based inclusive counts, strictly increasing;
    out[j] = sum(values[:checkpoints[j]]) at full float precision
    (exactly rounded per segment via fsum).
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.empty(len(checkpoints))
    segment_sums: list[float] = []
    prev = 0
    for j, cp in enumerate(checkpoints):
        cp = int(cp)
        segment_sums.append(math.fsum(values[prev:cp]))
        out[j] = math.fsum(segment_sums)
        prev = cp
    return out


def power_checkpoint_sums(
    p: float, q: int, start: int, checkpoints: np.ndarray
) -> np.ndarray:
    """Compensated sums S(N) = sum_{n=start..N} n^p * ln(n)^q at each
    checkpoint N (ascending)."""
    out = np.empty(len(checkpoints))
    segment_sums: list[float] = []
    prev = int(start)
    for j, cp in enumerate(checkpoints):
        cp = int(cp)
        if cp >= prev:
            n = np.arange(prev, cp + 1, dtype=np.float64)
            terms = n**p
            if q:
                terms = terms * np.log(n) ** q
            segment_sums.append(math.fsum(terms))
            prev = cp + 1
        out[j] = math.fsum(segment_sums)
    return out
