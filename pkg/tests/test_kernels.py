import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from qesband import _kernels, _pykernels
from qesband.elliptic import Modulus, _reduce

try:
    from qesband import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


def periodic_matrix(n, seed):
    rng = np.random.default_rng(seed)
    diag = rng.normal(size=n) * 3
    off = rng.normal(size=n - 1)
    corner = float(rng.normal())
    dense = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    dense[0, -1] += corner
    dense[-1, 0] += corner
    return diag, off, corner, np.linalg.eigvalsh(dense)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
@pytest.mark.parametrize("n", [2, 3, 10, 101])
def test_sturm_counts_match_dense(backend, n):
    diag, off, corner, eig = periodic_matrix(n, n)
    shifts = np.linspace(eig.min() - 1, eig.max() + 1, 57)
    expected = np.searchsorted(eig, shifts)
    assert_array_equal(backend.sturm_counts(diag, off, corner, shifts), expected)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_bisection_matches_dense(backend):
    diag, off, corner, eig = periodic_matrix(60, 7)
    got = backend.bisect_eigenvalues(diag, off, corner, 12, eig.min() - 5, eig.max() + 5, 1e-14)
    assert_allclose(got, eig[:12], atol=1e-11)


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_agree():
    m = Modulus(0.83)
    x, _ = _reduce(np.linspace(-30, 30, 20001), m)
    a, c = m.agm_table
    assert_allclose(_ckernels.landen_am(x, a, c), _pykernels.landen_am(x, a, c), rtol=0, atol=1e-15)
    diag, off, corner, _ = periodic_matrix(200, 11)
    shifts = np.linspace(-10, 10, 101)
    assert_array_equal(_ckernels.sturm_counts(diag, off, corner, shifts),
                       _pykernels.sturm_counts(diag, off, corner, shifts))
    args = (diag, off, corner, 20, -40.0, 40.0, 1e-13)
    assert_allclose(_ckernels.bisect_eigenvalues(*args), _pykernels.bisect_eigenvalues(*args),
                    rtol=0, atol=1e-11)


def test_backend_name_and_override():
    assert _kernels.BACKEND in ("cython", "python")
    env = dict(os.environ, QESBAND_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from qesband import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
