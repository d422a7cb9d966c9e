import os
import subprocess
import sys

import numpy as np
import pytest

from qedsat import _kernels_py, kernels
from qedsat.amplitudes import amplitude_matrix

compiled = pytest.importorskip("qedsat._kernels", reason="compiled kernels not built")


def _inputs(rng, n=500):
    mats = np.array([amplitude_matrix("bhabha", mu, th).entries for mu, th in ((0.3, 0.7), (5.0, 2.0), (0.05, 1.4))])
    index = rng.integers(0, 3, n).astype(np.int64)
    x0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return mats, index, x0 / np.linalg.norm(x0)


def test_backends_agree(rng):
    mats, index, x0 = _inputs(rng)
    a = compiled.iterate_sequence(mats, index, x0, 1e-300)
    b = _kernels_py.iterate_sequence(mats, index, x0, 1e-300)
    assert a[3] == b[3] == -1
    for x, y in zip(a[:3], b[:3]):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-14)


def test_backends_report_same_failure():
    mats = np.array([np.diag([1.0, 0, 0, 1.0]).astype(complex)])
    x0 = np.array([0, 1, 0, 0], dtype=complex)
    index = np.zeros(4, np.int64)
    for fn in (compiled.iterate_sequence, _kernels_py.iterate_sequence):
        states, conc, logn, failed = fn(mats, index, x0, 1e-300)
        assert failed == 0 and len(states) == 1 and len(logn) == 0


def test_readonly_inputs(rng):
    mats, index, x0 = _inputs(rng, 10)
    for arr in (mats, index, x0):
        arr.setflags(write=False)
    compiled.iterate_sequence(mats, index, x0, 1e-300)


def test_default_backend_is_compiled():
    assert kernels.BACKEND == "cython"


def test_env_forces_fallback():
    env = dict(os.environ, QEDSAT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import qedsat; print(qedsat.BACKEND)"], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"
