"""Compare the compiled and NumPy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times the two hot loops: the Landen amplitude on a dense grid and Sturm
bisection for the lowest Hill levels of a Lame potential at N = 4096 and
8192, and checks that both backends return the same numbers.
"""
import argparse
import time

import numpy as np

from qesband import _pykernels
from qesband.elliptic import Modulus, _reduce
from qesband.oracle import hill_problem
from qesband.potentials import associated_lame

try:
    from qesband import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(func, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_landen(backend, repeat, points=1_000_000):
    m = Modulus(0.7)
    x, _ = _reduce(np.linspace(-50.0, 50.0, points), m)
    a, c = m.agm_table
    return best_of(lambda: backend.landen_am(x, a, c), repeat)


def bench_hill(backend, repeat, N, count=12):
    spec = associated_lame(3, 1, 0.5)
    diag, off, corner = hill_problem(spec, "periodic", N).matrix(N)
    lower = float(diag.min()) - 4.0 * float(np.abs(off).max()) - abs(corner)
    upper = float(diag.max()) + 4.0 * float(np.abs(off).max()) + abs(corner)
    return best_of(lambda: backend.bisect_eigenvalues(diag, off, corner, count, lower, upper, 1e-13),
                   repeat)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.insert(0, ("cython", _ckernels))
    else:
        print("compiled kernels not available; timing the NumPy backend only")

    jobs = [("landen_am, 1e6 points", lambda b: bench_landen(b, args.repeat))]
    for N in (4096, 8192):
        jobs.append((f"hill bisection, N={N}", lambda b, N=N: bench_hill(b, args.repeat, N)))

    print(f"{'kernel':<28}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}{'max diff':>12}")
    for label, job in jobs:
        results = [job(mod) for _, mod in backends]
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t, _ in results)
        if len(results) == 2:
            speedup = results[1][0] / results[0][0]
            diff = float(np.max(np.abs(np.asarray(results[0][1]) - np.asarray(results[1][1]))))
            row += f"{speedup:>9.1f}x{diff:>12.1e}"
        print(row)


if __name__ == "__main__":
    main()
