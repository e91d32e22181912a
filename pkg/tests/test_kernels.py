"""Both kernel backends must be interchangeable to working precision."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from infinikit import _kernels, _pykernels


def backends():
    out = [_pykernels]
    if _kernels.BACKEND == "compiled":
        out.append(_kernels)
    return out


def tridiag_toeplitz(dim, a, b):
    m = np.zeros((dim, dim))
    np.fill_diagonal(m, a)
    idx = np.arange(dim - 1)
    m[idx, idx + 1] = b
    m[idx + 1, idx] = b
    return m


class TestEig:
    @pytest.mark.parametrize("kern", backends(), ids=lambda k: k.BACKEND)
    def test_known_tridiagonal_spectrum(self, kern):
        # a + 2b cos(k pi / (dim+1)) is the closed-form spectrum
        dim = 12
        m = tridiag_toeplitz(dim, 2.0, -1.0)
        w, _ = kern.eig_sym(m.copy())
        want = sorted(
            2.0 - 2.0 * math.cos(k * math.pi / (dim + 1)) for k in range(1, dim + 1)
        )
        assert np.max(np.abs(np.sort(w) - want)) < 1e-12

    @pytest.mark.parametrize("kern", backends(), ids=lambda k: k.BACKEND)
    def test_eigenpairs_satisfy_definition(self, kern):
        rng = np.random.default_rng(0)
        for dim in (1, 2, 3, 8, 24):
            a = rng.standard_normal((dim, dim))
            m = (a + a.T) / 2
            w, v = kern.eig_sym(m.copy())
            assert np.max(np.abs(m @ v - v * w)) < 1e-10
            assert np.max(np.abs(v.T @ v - np.eye(dim))) < 1e-10

    def test_backends_agree(self):
        if _kernels.BACKEND != "compiled":
            pytest.skip("compiled backend not built")
        rng = np.random.default_rng(1)
        worst = 0.0
        for dim in (2, 5, 16, 40):
            a = rng.standard_normal((dim, dim))
            m = (a + a.T) / 2
            w1, _ = _kernels.eig_sym(m.copy())
            w2, _ = _pykernels.eig_sym(m.copy())
            worst = max(worst, float(np.max(np.abs(np.sort(w1) - np.sort(w2)))))
        assert worst < 1e-12


class TestSums:
    @pytest.mark.parametrize("kern", backends(), ids=lambda k: k.BACKEND)
    def test_checkpoint_sums_match_fsum(self, kern):
        rng = np.random.default_rng(2)
        values = rng.uniform(-1, 1, size=10_000)
        marks = [10, 100, 5_000, 10_000]
        got = kern.checkpoint_sums(values, marks)
        want = [math.fsum(values[:m]) for m in marks]
        assert np.max(np.abs(np.array(got) - want)) < 1e-12

    @pytest.mark.parametrize("kern", backends(), ids=lambda k: k.BACKEND)
    def test_power_sums_match_fsum(self, kern):
        marks = [16, 256, 4096]
        got = kern.power_checkpoint_sums(-1.0, 1, 1, marks)
        want = [
            math.fsum(math.log(n) / n for n in range(1, m + 1)) for m in marks
        ]
        assert np.max(np.abs(np.array(got) - want)) < 1e-10

    def test_sum_backends_agree(self):
        if _kernels.BACKEND != "compiled":
            pytest.skip("compiled backend not built")
        marks = [2**j for j in range(4, 17)]
        a = _kernels.power_checkpoint_sums(-1.0, 0, 1, marks)
        b = _pykernels.power_checkpoint_sums(-1.0, 0, 1, marks)
        assert np.max(np.abs(np.array(a) - np.array(b))) < 1e-12


class TestSelection:
    def test_env_override_forces_pure(self):
        code = (
            "from infinikit import _kernels; print(_kernels.BACKEND)"
        )
        env = dict(os.environ, INFINIKIT_PURE="1")
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert out.stdout.strip() == "pure"

    def test_constants_exported(self):
        for kern in backends():
            assert kern.MAX_QL_SWEEPS == 50
            assert kern.QL_TOL == 1e-14
