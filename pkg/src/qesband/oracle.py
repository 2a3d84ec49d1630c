"""Independent numerical checks of algebraic band edges and eigenstates.

* ``residual_norm``: finite-difference Schrodinger residual of a sampled state.
* ``HillProblem`` / ``band_edges_numeric``: eigenvalues of the 3-point
  discretisation of -d^2/dx^2 + V under periodic, antiperiodic or Dirichlet
  conditions, found by Sturm-count bisection and Richardson-extrapolated
  from N and 2N points.
* ``wronskian_min``: linear-independence test for a pair of real states.
* ``limit_compare``: deviation of a potential at k^2 = eps or 1 - eps from
  its analytic limit.

Grid sizes count points per period 2K.  The "quarter" condition is
antiperiodicity over the doubled cell 4K, which captures states with
Floquet multiplier +-i over 2K; it uses 2N points so the step matches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from qesband import _kernels
from qesband.elliptic import Modulus
from qesband.errors import ConvergenceFailure, GridTooCoarse
from qesband.potentials import (AssociatedLame, CotFamily, PotentialSpec, TanFamily,
                                eval_potential)

MIN_INTERIOR = 64
MIN_POINTS = 64
GUARD = 1e-4
LIMIT_EPS = 1e-8

BOUNDARY_CONDITIONS = ("periodic", "antiperiodic", "edges", "quarter", "dirichlet")


@dataclass(frozen=True)
class GridFunction:
    """Samples on the uniform grid a = x_0 < ... < x_{N-1} = b."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))

    @property
    def h(self) -> float:
        return (self.b - self.a) / (len(self.values) - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, len(self.values))


def sample(func: Callable, a: float, b: float, intervals: int) -> GridFunction:
    x = np.linspace(a, b, intervals + 1)
    return GridFunction(a, b, func(x))


def residual_norm(spec: PotentialSpec, E: float, psi: GridFunction) -> float:
    """max |-D2 psi + V psi - E psi| / max |psi| over interior grid points."""
    vals = psi.values
    if len(vals) - 2 < MIN_INTERIOR:
        raise GridTooCoarse(f"need at least {MIN_INTERIOR} interior points, got {len(vals) - 2}")
    h = psi.h
    x = psi.x[1:-1]
    d2 = (vals[2:] - 2.0 * vals[1:-1] + vals[:-2]) / (h * h)
    v = eval_potential(spec, x)
    res = -d2 + (v - E) * vals[1:-1]
    return float(np.max(np.abs(res)) / np.max(np.abs(vals)))


def observed_order(r_coarse: float, r_fine: float) -> float:
    if r_fine == 0.0:
        return math.inf
    return math.log2(r_coarse / r_fine)


def wronskian_min(psi1: GridFunction, psi2: GridFunction) -> float:
    """min over the grid of |psi1 psi2' - psi2 psi1'|, relative to max|psi1| max|psi2|."""
    if len(psi1.values) != len(psi2.values) or psi1.a != psi2.a or psi1.b != psi2.b:
        raise ValueError("Wronskian needs both functions on the same grid")
    h = psi1.h
    f, g = np.real(psi1.values), np.real(psi2.values)
    df = (f[2:] - f[:-2]) / (2 * h)
    dg = (g[2:] - g[:-2]) / (2 * h)
    w = f[1:-1] * dg - g[1:-1] * df
    scale = float(np.max(np.abs(f)) * np.max(np.abs(g)))
    if scale == 0.0:
        return 0.0
    return float(np.min(np.abs(w)) / scale)


# ------------------------------------------------------------------ Hill


@dataclass(frozen=True)
class HillProblem:
    """Discretised periodic Schrodinger operator.

    ``potential`` maps an array of x to V(x).  For "dirichlet" the interval
    (a, b) is given in ``interval`` and shrunk by ``guard`` at both ends.
    """

    potential: Callable
    period: float
    bc: str = "edges"
    N: int = 4096
    origin: float = 0.0
    interval: tuple | None = None
    guard: float = 0.0

    def __post_init__(self):
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.N < MIN_POINTS:
            raise ValueError(f"grid size must be at least {MIN_POINTS}")
        if self.bc == "dirichlet" and self.interval is None:
            raise ValueError("dirichlet problems need an interval")

    def matrix(self, N: int, guard: float | None = None):
        """(diag, off, corner) of the symmetric discretisation with N steps."""
        if self.bc == "dirichlet":
            g = self.guard if guard is None else guard
            a, b = self.interval
            a, b = a + g, b - g
            h = (b - a) / N
            x = a + h * np.arange(1, N)
            corner = 0.0
        else:
            cells = 2 if self.bc == "quarter" else 1
            pts = N * cells
            length = self.period * cells
            h = length / pts
            x = self.origin + h * np.arange(pts)
            corner = -1.0 / (h * h) if self.bc == "periodic" else 1.0 / (h * h)
        v = np.asarray(self.potential(x), dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("potential is not finite on the grid")
        diag = 2.0 / (h * h) + v
        off = np.full(len(x) - 1, -1.0 / (h * h))
        return diag, off, corner


def _levels_below(diag, off, corner, upper: float, count: int | None, tol: float) -> np.ndarray:
    lower = float(np.min(diag)) - 4.0 * float(np.max(np.abs(off))) - abs(corner)
    if count is None:
        count = int(_kernels.sturm_counts(diag, off, corner, np.array([upper]))[0])
    if count == 0:
        return np.zeros(0)
    hi = float(np.max(diag)) + 4.0 * float(np.max(np.abs(off))) + abs(corner)
    return np.asarray(_kernels.bisect_eigenvalues(diag, off, corner, count, lower, hi, tol))


def _solve(problem: HillProblem, N: int, count, upper, guard=None) -> np.ndarray:
    if problem.bc == "edges":
        per = _solve(HillProblem(problem.potential, problem.period, "periodic", problem.N,
                                 problem.origin), N, count, upper)
        anti = _solve(HillProblem(problem.potential, problem.period, "antiperiodic", problem.N,
                                  problem.origin), N, count, upper)
        levels = np.sort(np.concatenate([per, anti]))
        return levels if count is None else levels[:count]
    diag, off, corner = problem.matrix(N, guard)
    return _levels_below(diag, off, corner, upper, count, 1e-13)


def band_edges_numeric(problem: HillProblem, count: int | None = None,
                       upper: float | None = None, tol: float = 1e-2) -> np.ndarray:
    """Lowest eigenvalues, Richardson-extrapolated from N and 2N steps.

    Give either ``count`` or an energy ``upper``; with ``upper`` every level
    below it (on the coarse grid) is returned.  Raises ConvergenceFailure
    when a level moves by more than ``tol`` between the two grids.
    """
    if count is None and upper is None:
        raise ValueError("need count or upper")

    def extrapolated(guard=None):
        coarse = _solve(problem, problem.N, count, upper, guard)
        fine = _solve(problem, 2 * problem.N, len(coarse), None, guard)
        shift = np.abs(fine - coarse)
        if shift.size and float(np.max(shift)) > tol:
            raise ConvergenceFailure(
                f"levels moved by up to {float(np.max(shift)):.3e} between N and 2N")
        return (4.0 * fine - coarse) / 3.0

    if problem.bc == "dirichlet" and problem.guard > 0.0:
        wide = extrapolated(problem.guard)
        narrow = extrapolated(0.5 * problem.guard)
        n = min(len(wide), len(narrow))
        return 2.0 * narrow[:n] - wide[:n]
    return extrapolated()


def hill_problem(spec: PotentialSpec, bc: str = "edges", N: int = 4096) -> HillProblem:
    """Problem for a closed-form family on its natural domain."""
    if spec.singular:
        a, b = spec.domain()
        return HillProblem(lambda x: eval_potential(spec, x), spec.period, "dirichlet", N,
                           interval=(a, b), guard=GUARD * spec.K)
    return HillProblem(lambda x: eval_potential(spec, x), spec.period, bc, N,
                       origin=-spec.K)


@dataclass(frozen=True)
class LevelMatch:
    energy: float
    degeneracy: int
    condition: str
    levels: tuple
    error: float


def classify_multiplier(mult: complex, tol: float = 1e-6) -> str:
    """Boundary condition that admits a state with this 2K multiplier."""
    if abs(mult - 1) < tol:
        return "periodic"
    if abs(mult + 1) < tol:
        return "antiperiodic"
    if abs(mult - 1j) < tol or abs(mult + 1j) < tol:
        return "quarter"
    raise ValueError(f"multiplier {mult} is not a band-edge multiplier")


def match_levels(targets: Sequence[tuple], levels: dict, tol: float) -> list[LevelMatch]:
    """Match (energy, degeneracy, condition) triples to numeric levels.

    ``levels`` maps a boundary condition to sorted numeric eigenvalues.  A
    degenerate energy must be matched by as many distinct levels.
    """
    used = {bc: set() for bc in levels}
    out = []
    for energy, degeneracy, bc in targets:
        pool = levels[bc]
        order = np.argsort(np.abs(pool - energy))
        picked = [i for i in order if i not in used[bc]][:degeneracy]
        used[bc].update(picked)
        vals = tuple(float(pool[i]) for i in picked)
        err = max((abs(v - energy) for v in vals), default=math.inf)
        if len(vals) < degeneracy:
            err = math.inf
        out.append(LevelMatch(float(energy), degeneracy, bc, vals, err))
    return out


# ---------------------------------------------------------------- limits


def limit_form(spec: PotentialSpec, which: str) -> tuple[Callable, tuple]:
    """Analytic limit of V and a safe x-interval for the comparison."""
    fam = spec.family
    if isinstance(fam, AssociatedLame):
        p, q = float(fam.p), float(fam.q)
        if which == "k_to_0":
            return (lambda x: np.zeros_like(x)), (-1.5, 1.5)
        return (lambda x: p - p / np.cosh(x) ** 2 + q), (-3.0, 3.0)
    if isinstance(fam, TanFamily):
        c = (fam.n + 1) * (fam.n + 4)
        if which == "k_to_0":
            return (lambda x: 2 * np.tan(x) ** 2 - c), (-1.2, 1.2)
        return (lambda x: np.zeros_like(x)), (-3.0, 3.0)
    if isinstance(fam, CotFamily):
        c = (fam.n + 1) * (fam.n + 4)
        if which == "k_to_0":
            return (lambda x: 2 / np.tan(x) ** 2 - c), (0.4, math.pi - 0.4)
        return (lambda x: 2 / np.sinh(x) ** 2 + 2), (0.5, 3.0)
    raise TypeError(f"no analytic limits for {fam!r}")


def limit_compare(spec: PotentialSpec, which: str, eps: float = LIMIT_EPS,
                  points: int = 401) -> float:
    """max |V(x) - limit(x)| with k^2 = eps (k_to_0) or 1 - eps (k_to_1)."""
    if which not in ("k_to_0", "k_to_1"):
        raise ValueError("which must be 'k_to_0' or 'k_to_1'")
    k_sq = eps if which == "k_to_0" else 1.0 - eps
    near = PotentialSpec(spec.family, Modulus(k_sq))
    form, (a, b) = limit_form(spec, which)
    x = np.linspace(a, b, points)
    return float(np.max(np.abs(eval_potential(near, x) - form(x))))
