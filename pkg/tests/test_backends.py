"""Compiled extension vs pure-Python twin: the two backends must agree
bit for bit (same algorithms, same operation order, FMA contraction off)."""
import os
import subprocess
import sys

import numpy as np
import pytest

from matleg import _pykern, backend
from matleg import matrix_core as mc

try:
    from matleg import _ckern
except ImportError:
    _ckern = None

needs_compiled = pytest.mark.skipif(_ckern is None, reason="compiled extension not built")


def index_pairs(rows, cols, k):
    rs = mc._index_matrix(mc.index_sets(rows, k))
    cs = mc._index_matrix(mc.index_sets(cols, k))
    return rs, cs


@needs_compiled
class TestBitIdenticalBackends:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_det(self, rng, n):
        for _ in range(30):
            a = rng.uniform(-5.0, 5.0, (n, n))
            assert _ckern.det(a) == _pykern.det(a)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_cofactor_matrix(self, rng, n):
        for _ in range(20):
            a = rng.uniform(-5.0, 5.0, (n, n))
            assert np.array_equal(_ckern.cofactor_matrix(a), _pykern.cofactor_matrix(a))

    @pytest.mark.parametrize("shape,k", [((3, 3), 2), ((3, 4), 2), ((4, 4), 3), ((5, 6), 4)])
    def test_minor_dets(self, rng, shape, k):
        a = rng.uniform(-5.0, 5.0, shape)
        rs, cs = index_pairs(shape[0], shape[1], k)
        assert np.array_equal(_ckern.minor_dets(a, rs, cs), _pykern.minor_dets(a, rs, cs))

    @pytest.mark.parametrize("shape,k", [((3, 3), 1), ((3, 4), 2), ((4, 4), 3), ((5, 5), 5)])
    def test_minor_gradient(self, rng, shape, k):
        a = rng.uniform(-5.0, 5.0, shape)
        rows = mc.index_sets(shape[0], k)[0].zero_based()
        cols = mc.index_sets(shape[1], k)[-1].zero_based()
        assert np.array_equal(
            _ckern.minor_gradient(a, rows, cols), _pykern.minor_gradient(a, rows, cols)
        )

    def test_singular_pivot_agreement(self):
        a = np.zeros((4, 4))
        a[0, 0] = 1.0
        assert _ckern.det(a) == _pykern.det(a) == 0.0


class TestBackendSelection:
    def test_active_backend_reports_name(self):
        assert backend.kernel_backend() in ("compiled", "python")

    def test_forced_python_backend(self):
        out = subprocess.run(
            [sys.executable, "-c", "import matleg; print(matleg.kernel_backend())"],
            env={**os.environ, "MATLEG_BACKEND": "python"},
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == "python"

    def test_invalid_backend_rejected(self):
        out = subprocess.run(
            [sys.executable, "-c", "import matleg"],
            env={**os.environ, "MATLEG_BACKEND": "fortran"},
            capture_output=True,
            text=True,
        )
        assert out.returncode != 0
        assert "MATLEG_BACKEND" in out.stderr

    def test_full_stack_on_python_backend(self):
        # the whole acceptance-critical path must work on the fallback
        code = (
            "import matleg\n"
            "from matleg import SampleSpec, run_suite, det_power\n"
            "rep = run_suite(SampleSpec(family=det_power(2, 4.0), count=20, seed=1))\n"
            "assert rep.overall_pass\n"
            "print(matleg.kernel_backend())\n"
        )
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={**os.environ, "MATLEG_BACKEND": "python"},
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == "python"
