"""Kernel backend selection: compiled extension if importable, else NumPy.

The amplitude kernel always uses NumPy: its vectorised sin and arcsin beat
the per-point loop of the compiled version (see benchmarks/bench_kernels.py).
"""
import os

from qesband._pykernels import landen_am  # noqa: F401

BACKEND = "python"

if os.environ.get("QESBAND_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from qesband._ckernels import bisect_eigenvalues, sturm_counts  # noqa: F401

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from qesband._pykernels import bisect_eigenvalues, sturm_counts  # noqa: F401
