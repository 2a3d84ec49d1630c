"""Pure NumPy implementations of the hot kernels.

Selected automatically when the compiled ``_ckernels`` extension is not
available (or when ``QESBAND_PURE_PYTHON=1``).  Signatures and results must
match the Cython module exactly.
"""
import numpy as np

_TINY = 1e-300


def landen_am(x, a, c):
    """Jacobi amplitude for reduced arguments by the descending AGM phase recursion.

    ``a`` and ``c`` are the AGM tables; ``x`` must already lie in [-K, K].
    """
    x = np.asarray(x, dtype=float)
    depth = len(a) - 1
    phi = (2.0 ** depth) * a[depth] * x
    for j in range(depth, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    return phi


def sturm_counts(diag, off, corner, shifts):
    """Number of eigenvalues strictly below each shift.

    The matrix is symmetric tridiagonal with main diagonal ``diag`` and
    off-diagonal ``off``, plus a symmetric corner entry coupling the first
    and last rows (zero for a plain tridiagonal matrix).  Counting uses
    Sylvester inertia of an LDL^T factorization in which the last row is
    eliminated as a border.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    lam = np.atleast_1d(np.asarray(shifts, dtype=float))
    n = diag.size
    count = np.zeros(lam.shape, dtype=np.int64)
    # border column entries: row 0 gets the corner, row n-2 gets off[n-2]
    q = diag[0] - lam
    q = np.where(q == 0.0, _TINY, q)
    y = np.full(lam.shape, corner + (off[0] if n == 2 else 0.0))
    schur = diag[n - 1] - lam - y * y / q
    count += q < 0
    for i in range(1, n - 1):
        ratio = off[i - 1] / q
        q = diag[i] - lam - off[i - 1] * ratio
        q = np.where(q == 0.0, _TINY, q)
        b = off[n - 2] if i == n - 2 else 0.0
        y = b - ratio * y
        schur -= y * y / q
        count += q < 0
    count += schur < 0
    return count


def bisect_eigenvalues(diag, off, corner, count, lower, upper, tol):
    """Lowest ``count`` eigenvalues by simultaneous bisection on Sturm counts."""
    idx = np.arange(count)
    lo = np.full(count, float(lower))
    hi = np.full(count, float(upper))
    while True:
        width = hi - lo
        if np.all(width <= tol * np.maximum(1.0, np.abs(lo) + np.abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        if np.all(stuck | (width <= tol * np.maximum(1.0, np.abs(lo) + np.abs(hi)))):
            break
        below = sturm_counts(diag, off, corner, mid)
        go_up = below <= idx
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    return 0.5 * (lo + hi)
