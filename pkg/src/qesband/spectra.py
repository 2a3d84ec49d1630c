"""Real roots of the critical polynomial and merged band-edge spectra.

Roots are isolated by sampling the monic polynomial through its three-term
recurrence on a bracket that contains every zero, bisecting each sign
change and polishing with a guarded Newton step.  Every solve is checked
against the eigenvalues of the Lie-algebraic matrix.  For rational input
each root is also tested for being an exact rational.

Deep wells produce pairs of roots closer than double precision can
resolve.  For rational data those are separated with a Sturm chain in
exact arithmetic, and the sharpened roots are kept alongside the floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from qesband import bdpoly, liealg
from qesband.bdpoly import AlgebraizationCase, CriticalPolynomialBundle
from qesband.errors import CriticalPoint, RootCountMismatch, ValidationError
from qesband.potentials import (AssociatedLame, CotFamily, PotentialSpec, TanFamily,
                                classify)

LIE_TOL = 1e-8
DUPLICATE_TOL = 1e-8
MAX_DENOMINATOR = 10**6
CLOSE_GAP = 1e-10  # relative gap below which exact isolation is used
PRECISE_WIDTH = Fraction(1, 10**30)


@dataclass(frozen=True)
class CaseRoots:
    case: AlgebraizationCase
    bundle: CriticalPolynomialBundle
    roots: np.ndarray
    exact: tuple  # Fraction or None per root
    lie_mismatch: float
    precise: tuple = ()  # sharpened Fraction roots when exact isolation ran


@dataclass(frozen=True)
class BandEdge:
    energy: float
    degeneracy: int
    source_cases: tuple
    exact: Optional[Fraction] = None
    raw_coefficients: dict = field(default_factory=dict, compare=False)
    precise: Optional[Fraction] = None

    @property
    def root(self):
        """Best available value of the energy (Fraction when sharpened)."""
        if self.exact is not None:
            return self.exact
        return self.precise if self.precise is not None else self.energy


@dataclass(frozen=True)
class BandEdgeSpectrum:
    spec: PotentialSpec
    entries: tuple
    cases: tuple  # CaseRoots per algebraization used
    notes: tuple = ()
    shift: bool = False  # True when (m, l) were swapped: states live at x + K

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.energy for e in self.entries])

    def with_multiplicity(self) -> np.ndarray:
        return np.array([e.energy for e in self.entries for _ in range(e.degeneracy)])


def _bracket(bundle: CriticalPolynomialBundle) -> tuple[float, float]:
    lam = np.array([float(v) for v in bundle.lam[: bundle.n + 1]])
    rho = np.array([float(v) for v in bundle.rho[: bundle.n + 2]])
    radius = 2.0 * math.sqrt(float(np.max(np.abs(rho)))) + float(np.ptp(lam)) + 1.0
    return float(lam.min()) - radius, float(lam.max()) + radius


def _as_float(bundle: CriticalPolynomialBundle) -> CriticalPolynomialBundle:
    """Same recurrence with float tables, so the scans skip Fraction arithmetic."""
    return CriticalPolynomialBundle(bundle.n, tuple(float(v) for v in bundle.lam),
                                    tuple(float(v) for v in bundle.rho), ())


def _values_and_derivative(bundle, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P~_{n+1} and its derivative on ``grid``, jointly rescaled (signs are exact)."""
    lam, rho = bundle.lam, bundle.rho
    prev, cur = np.zeros_like(grid), np.ones_like(grid)
    dprev, dcur = np.zeros_like(grid), np.zeros_like(grid)
    for j in range(bundle.n + 1):
        nxt = (grid - lam[j]) * cur - rho[j] * prev
        dnxt = cur + (grid - lam[j]) * dcur - rho[j] * dprev
        prev, cur, dprev, dcur = cur, nxt, dcur, dnxt
        big = np.maximum.reduce([np.abs(cur), np.abs(prev), np.abs(dcur), np.abs(dprev)])
        big = np.where(big > 1e100, big, 1.0)
        prev, cur, dprev, dcur = prev / big, cur / big, dprev / big, dcur / big
    return cur, dcur


def _scalar_vd(bundle, x: float) -> tuple[float, float]:
    """Scalar version of ``_values_and_derivative`` for bisection steps."""
    prev, cur, dprev, dcur = 0.0, 1.0, 0.0, 0.0
    for lam, rho in zip(bundle.lam[: bundle.n + 1], bundle.rho[: bundle.n + 1]):
        nxt = (x - lam) * cur - rho * prev
        dnxt = cur + (x - lam) * dcur - rho * dprev
        prev, cur, dprev, dcur = cur, nxt, dcur, dnxt
        big = max(abs(cur), abs(prev), abs(dcur), abs(dprev))
        if big > 1e100:
            prev, cur, dprev, dcur = prev / big, cur / big, dprev / big, dcur / big
    return cur, dcur


def _values(bundle, grid: np.ndarray) -> np.ndarray:
    if grid.size == 1:
        return np.array([_scalar_vd(bundle, float(grid[0]))[0]])
    return _values_and_derivative(bundle, grid)[0]


def _derivative(bundle, grid: np.ndarray) -> np.ndarray:
    if grid.size == 1:
        return np.array([_scalar_vd(bundle, float(grid[0]))[1]])
    return _values_and_derivative(bundle, grid)[1]


def _bisect(func, lo: float, hi: float, f_lo: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(np.array([mid]))[0]
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(bundle, x: float, lo: float, hi: float) -> float:
    for _ in range(8):
        p, dp = bdpoly.monic_value_and_derivative(bundle, x)
        if dp == 0.0 or not math.isfinite(p):
            break
        step = p / dp
        nxt = x - step
        if not lo <= nxt <= hi:
            break
        x = nxt
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _root_in(bundle, lo, hi, f_lo):
    r = _bisect(lambda g: _values(bundle, g), lo, hi, f_lo)
    return _polish(bundle, r, lo, hi)


def _scan(bundle, grid: np.ndarray) -> list:
    vals, ders = _values_and_derivative(bundle, grid)
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        lo, hi = grid[i], grid[i + 1]
        if a == 0.0:
            roots.append(lo)
            continue
        if b != 0.0 and (a > 0) != (b > 0):
            roots.append(_root_in(bundle, lo, hi, a))
        elif b != 0.0 and (ders[i] > 0) != (ders[i + 1] > 0):
            # a turning point without a sign change may hide a close pair
            turn = _bisect(lambda g: _derivative(bundle, g), lo, hi, ders[i])
            f_turn = _values(bundle, np.array([turn]))[0]
            if f_turn == 0.0:
                roots.extend([turn, turn])
            elif (f_turn > 0) != (a > 0):
                roots.append(_root_in(bundle, lo, turn, a))
                roots.append(_root_in(bundle, turn, hi, f_turn))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    return roots


def isolate_roots(bundle: CriticalPolynomialBundle, attempts: int = 8) -> np.ndarray:
    """All n+1 real roots of the monic critical polynomial, sorted.

    The sampling grid is doubled up to ``attempts`` times before giving up.
    """
    want = bundle.n + 1
    lo, hi = _bracket(bundle)
    bundle = _as_float(bundle)
    points = 64 * want + 1
    for _ in range(attempts):
        roots = _scan(bundle, np.linspace(lo, hi, points))
        if len(roots) == want:
            return np.array(roots)
        points = 2 * points - 1
    raise RootCountMismatch(f"found {len(roots)} real roots, expected {want}")


# ------------------------------------------------------ exact isolation


def _poly_rem(num: list, den: list) -> list:
    num = list(num)
    while len(num) >= len(den):
        q = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= q * den[i]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return num


def sturm_chain(coeffs: tuple) -> list:
    """Sturm sequence of a squarefree polynomial (highest power first)."""
    p = list(coeffs)
    n = len(p) - 1
    dp = [c * (n - i) for i, c in enumerate(p[:-1])]
    chain = [p, dp]
    while len(chain[-1]) > 1:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            raise RootCountMismatch("critical polynomial has a repeated root")
        lead = abs(rem[0])
        chain.append([-c / lead for c in rem])
    return chain


def _sign_changes(chain: list, x) -> int:
    count, last = 0, 0
    for poly in chain:
        v = 0
        for c in poly:
            v = v * x + c
        if v != 0:
            s = 1 if v > 0 else -1
            if last and s != last:
                count += 1
            last = s
    return count


def _horner(coeffs, x):
    p, dp = 0, 0
    for c in coeffs:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _sharpen(coeffs, a: Fraction, b: Fraction, width) -> Fraction:
    """Guarded Newton in rationals for the single simple root in (a, b)."""
    p_a = _horner(coeffs, a)[0]
    x = (a + b) / 2
    for _ in range(200):
        p, dp = _horner(coeffs, x)
        if p == 0:
            return x
        if (p > 0) == (p_a > 0):
            a, p_a = x, p
        else:
            b = x
        nxt = (x - p / dp).limit_denominator(10**40) if dp else None
        if nxt is None or not a < nxt < b:
            nxt = (a + b) / 2
        if abs(nxt - x) <= width * max(1, abs(x)) or b - a <= width * max(1, abs(a)):
            return nxt
        x = nxt
    return x


def isolate_roots_exact(bundle: CriticalPolynomialBundle, width=PRECISE_WIDTH) -> list:
    """Rational approximations to every root, each within ``width`` relative.

    Bisection on Sturm counts separates the roots however close they are;
    each isolated root is then sharpened by Newton steps.
    """
    coeffs = bundle.monic_coeffs or bdpoly.critical_polynomial(bundle)
    chain = sturm_chain(coeffs)
    lo_f, hi_f = _bracket(bundle)
    lo, hi = Fraction(math.floor(lo_f)), Fraction(math.ceil(hi_f))
    count = lambda x: _sign_changes(chain, x)  # noqa: E731
    stack = [(lo, hi, count(lo), count(hi))]
    out = []
    while stack:
        a, b, ca, cb = stack.pop()
        inside = ca - cb
        if inside == 0:
            continue
        mid = (a + b) / 2
        if inside == 1:
            p_a, p_b = _horner(coeffs, a)[0], _horner(coeffs, b)[0]
            if p_a != 0 and p_b != 0 and (p_a > 0) != (p_b > 0):
                out.append(_sharpen(coeffs, a, b, width))
                continue
        cm = count(mid)
        stack.append((a, mid, ca, cm))
        stack.append((mid, b, cm, cb))
    if len(out) != bundle.n + 1:
        raise RootCountMismatch(f"exact isolation found {len(out)} roots, expected {bundle.n + 1}")
    return sorted(out)


def _needs_exact(roots: Optional[np.ndarray]) -> bool:
    if roots is None:
        return True
    if len(roots) < 2:
        return False
    gaps = np.diff(np.sort(roots)) / np.maximum(1.0, np.abs(roots[1:]))
    return bool(np.min(gaps) < CLOSE_GAP)


def _exact_root(bundle: CriticalPolynomialBundle, root: float) -> Optional[Fraction]:
    if not bundle.exact:
        return None
    guess = Fraction(root).limit_denominator(MAX_DENOMINATOR)
    if abs(float(guess) - root) > 1e-9 * max(1.0, abs(root)):
        return None
    if bdpoly.monic_values(bundle, guess)[-1] == 0:
        return guess
    return None


def solve_case(case: AlgebraizationCase, cross_check: bool = True) -> CaseRoots:
    """Roots of the critical polynomial of one algebraization."""
    bundle = bdpoly.build(case)
    try:
        # with rational data a missed pair is cheaper to find exactly
        roots = isolate_roots(bundle, attempts=2 if bundle.exact else 8)
    except RootCountMismatch:
        if not bundle.exact:
            raise
        roots = None
    precise: tuple = ()
    if bundle.exact and _needs_exact(roots):
        precise = tuple(isolate_roots_exact(bundle))
        roots = np.array([float(r) for r in precise])
    exact = tuple(_exact_root(bundle, r) for r in roots)
    roots = np.array([float(e) if e is not None else r for e, r in zip(exact, roots)])
    mismatch = 0.0
    if cross_check:
        lie = liealg.assemble_hamiltonian(case).eigenvalues()
        scale = np.maximum(1.0, np.abs(roots))
        mismatch = float(np.max(np.abs(lie - roots) / scale))
        if mismatch > LIE_TOL:
            raise ValidationError(
                f"case {case.case_id}: critical roots and matrix eigenvalues differ by {mismatch:.3e}")
    return CaseRoots(case, bundle, roots, exact, mismatch, precise)


def _raw(case: AlgebraizationCase, energy) -> list:
    return [complex(v) if isinstance(v, complex) else float(v)
            for v in bdpoly.raw_sequence(case, energy)[: case.n + 1]]


def solve_spec(spec: PotentialSpec, demote: Optional[Callable[[BandEdge], bool]] = None,
               cross_check: bool = True) -> BandEdgeSpectrum:
    """Band-edge spectrum of a closed-form family.

    ``demote`` is an optional hook called for each doubly degenerate entry;
    returning True relabels the entry with degeneracy 1.  It is meant to be
    driven by a linear-independence test of the two real solutions.
    """
    family = spec.family
    notes: list[str] = []
    shift = False
    if isinstance(family, AssociatedLame):
        info = classify(family.m, family.l)
        if info.is_critical:
            raise CriticalPoint(f"no algebraic line passes through (m, l) = {info.canonical_point}")
        m, l = info.canonical_point
        shift = info.swapped
        groups = []
        for line in info.lines:
            cases = [bdpoly.hatted_coefficients(c, spec.modulus, m=m, l=l) for c in line.case_ids]
            groups.append((line.system, cases))
    elif isinstance(family, TanFamily):
        groups = [("tan", [bdpoly.hatted_coefficients(7, spec.modulus, n=family.n)])]
    elif isinstance(family, CotFamily):
        groups = [("cot", [bdpoly.hatted_coefficients(8, spec.modulus, n=family.n)])]
    else:
        raise TypeError(f"no closed-form spectrum for {family!r}")

    solved = []
    entries: list[BandEdge] = []
    for system, cases in groups:
        results = [solve_case(c, cross_check) for c in cases]
        solved.extend(results)
        first = results[0]
        for other in results[1:]:
            gap = float(np.max(np.abs(other.roots - first.roots)))
            if gap > DUPLICATE_TOL * max(1.0, float(np.max(np.abs(first.roots)))):
                raise ValidationError(f"conjugate algebraizations disagree by {gap:.3e}")
        degeneracy = 2 if len(cases) == 2 else 1
        ids = tuple(c.case_id for c in cases)
        for i, energy in enumerate(first.roots):
            sharp = first.precise[i] if first.precise else None
            raw = {c.case_id: _raw(c, sharp if sharp is not None else energy) for c in cases}
            entries.append(BandEdge(float(energy), degeneracy, ids, first.exact[i], raw, sharp))

    entries.sort(key=lambda e: e.energy)
    merged: list[BandEdge] = []
    for entry in entries:
        if merged and abs(entry.energy - merged[-1].energy) <= DUPLICATE_TOL * max(1.0, abs(entry.energy)):
            prev = merged[-1]
            if prev.degeneracy == 2 and entry.degeneracy == 2:
                # the smaller half-integer system reproduces states of the larger one
                raw = dict(prev.raw_coefficients)
                raw.update(entry.raw_coefficients)
                merged[-1] = replace(prev, source_cases=prev.source_cases + entry.source_cases,
                                     raw_coefficients=raw)
                continue
            notes.append(f"near-duplicate energies {prev.energy!r} and {entry.energy!r} kept apart")
        merged.append(entry)

    if isinstance(family, AssociatedLame):
        systems = {s for s, _ in groups}
        if {"m-1/2", "l-1/2"} <= systems:
            big = [e for e in merged if any(c in (3, 4) for c in e.source_cases)]
            orphans = [e for e in merged if not any(c in (3, 4) for c in e.source_cases)]
            if orphans:
                notes.append(f"{len(orphans)} energies of the l-1/2 system are not among the m-1/2 energies")
            else:
                notes.append(f"l-1/2 energies are a subset of the {len(big)} m-1/2 energies")

    if demote is not None:
        merged = [replace(e, degeneracy=1) if e.degeneracy == 2 and demote(e) else e for e in merged]
        for e in merged:
            if e.degeneracy == 1 and any(c in (3, 4, 5, 6) for c in e.source_cases):
                notes.append(f"energy {e.energy!r} demoted to degeneracy 1 by the independence test")
    return BandEdgeSpectrum(spec, tuple(merged), tuple(solved), tuple(notes), shift)
