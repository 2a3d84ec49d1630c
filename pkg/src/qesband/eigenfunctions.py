"""Gauge factors and band-edge eigenfunctions.

A band-edge state is

    psi(x) = mu(x) (xi - xi2)^n sum_j P_j(E)/j! ((xi - xi1)/(xi - xi2))^j.

Writing xi = num/den with Jacobi-function numerator and denominator, the
sum is a homogeneous polynomial of degree n in (num, den), and mu/den^n is
a pole-free reduced gauge factor:

    case 1   dn^-l                  case 2   dn^(l+1)
    case 3   dn^(1/2) e^{i(l+1/2)t}  case 4   dn^(1/2) e^{-i(l+1/2)t}
    case 5   dn^-l e^{i(m+1/2)a}     case 6   dn^-l e^{-i(m+1/2)a}
    case 7   cn^2/dn^(n+2)           case 8   sn^2/dn^(n+2)

with a = am x the continuous amplitude and t the continuous angle with
tan t = k' tan a.  Using continuous phases in place of principal-value
powers keeps the complex states smooth across every zero of cn or sn.

Overall scale: complex states are divided by the unit phase
((xi1 - xi2)/|xi1 - xi2|)^n, which makes the real part even and the
imaginary part odd.  States of the real cases are rotated by a constant
phase to be real.  Both are then scaled to max |psi| = 1 over the
sampling domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from qesband import bdpoly
from qesband.bdpoly import AlgebraizationCase
from qesband.elliptic import Modulus, jacobi_arrays
from qesband.errors import DependentPair, NumericalPole, ValidationError
from qesband.potentials import QUARTIC_ROWS, PotentialSpec

TERMINATION_TOL = 1e-9
POLE_CHECK_TOL = 1e-6
WRONSKIAN_TOL = 1e-8
NORM_POINTS = 2048
REAL_TOL = 1e-12


def _theta(phi: np.ndarray, kp: float) -> np.ndarray:
    """Continuous angle with tan(theta) = k' tan(phi)."""
    s, c = np.sin(phi), np.cos(phi)
    return phi + np.arctan((kp - 1.0) * s * c / (c * c + kp * s * s))


def reduced_gauge(case: AlgebraizationCase, sn, cn, dn, phi) -> np.ndarray:
    """mu(x) / den(x)^n for the case's coordinate map."""
    cid = case.case_id
    kp = case.modulus.kp
    if cid == 1:
        return dn ** (-float(case.l)) + 0j
    if cid == 2:
        return dn ** (float(case.l) + 1) + 0j
    if cid in (3, 4):
        sign = 1.0 if cid == 3 else -1.0
        return np.sqrt(dn) * np.exp(sign * 1j * (float(case.l) + 0.5) * _theta(phi, kp))
    if cid in (5, 6):
        sign = 1.0 if cid == 5 else -1.0
        return dn ** (-float(case.l)) * np.exp(sign * 1j * (float(case.m) + 0.5) * phi)
    if cid == 7:
        return cn**2 / dn ** (case.n + 2) + 0j
    return sn**2 / dn ** (case.n + 2) + 0j


def gauge_factor(case: AlgebraizationCase, x) -> np.ndarray:
    """The full gauge factor mu(x), complex, with continuous phases.

    case 1: cn^(m+l) dn^-l;  case 2: cn^(m-l-1) dn^(l+1);
    cases 3-4: cn^(m-1/2) dn^-l (cn +- i k' sn)^(l+1/2);
    cases 5-6: cn^(l-1/2) dn^-l (cn +- i sn)^(m+1/2);
    case 7: cn^2/dn^(n+2);  case 8: sn^2/dn^(n+2).
    """
    x = np.asarray(x, dtype=float)
    sn, cn, dn, phi = jacobi_arrays(x, case.modulus)
    reduced = reduced_gauge(case, sn, cn, dn, phi)
    if case.row_id == 1:
        return reduced * cn ** case.n
    return reduced


@dataclass(frozen=True)
class EigenfunctionDescriptor:
    case: AlgebraizationCase
    energy: float
    series_coeffs: tuple  # P_0(E) .. P_n(E)
    shift: float = 0.0  # states of a swapped (m, l) live at x + K
    scale: complex = 1.0 + 0j

    @property
    def case_id(self) -> int:
        return self.case.case_id

    @property
    def roots(self) -> tuple:
        return self.case.xi1, self.case.xi2

    @property
    def is_complex(self) -> bool:
        return self.case.case_id in (3, 4, 5, 6)

    def __call__(self, x):
        return assemble(self, x)


def _raw_values(desc: EigenfunctionDescriptor, x, with_bound: bool = False):
    """Unscaled psi; with ``with_bound`` also the sum of the absolute terms."""
    case = desc.case
    x = np.asarray(x, dtype=float) + desc.shift
    sn, cn, dn, phi = jacobi_arrays(x, case.modulus)
    num, den = QUARTIC_ROWS[case.row_id].xi_parts(sn, cn, dn, case.modulus.k2)
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    u = num - case.xi1 * den
    v = num - case.xi2 * den
    total = np.zeros(np.shape(x), dtype=complex)
    bound = np.zeros(np.shape(x))
    for j, p in enumerate(desc.series_coeffs):
        term = p / math.factorial(j) * u**j * v ** (case.n - j)
        total = total + term
        bound = bound + np.abs(term)
    gauge = reduced_gauge(case, sn, cn, dn, phi)
    if with_bound:
        return gauge * total, np.abs(gauge) * bound
    return gauge * total


def literal_values(desc: EigenfunctionDescriptor, x) -> np.ndarray:
    """psi from the unreduced formula with xi = num/den (poles where den = 0)."""
    case = desc.case
    x = np.asarray(x, dtype=float) + desc.shift
    sn, cn, dn, _ = jacobi_arrays(x, case.modulus)
    num, den = QUARTIC_ROWS[case.row_id].xi_parts(sn, cn, dn, case.modulus.k2)
    xi = np.asarray(num, dtype=float) / np.asarray(den, dtype=float)
    ratio = (xi - case.xi1) / (xi - case.xi2)
    total = sum(p / math.factorial(j) * ratio**j for j, p in enumerate(desc.series_coeffs))
    mu = gauge_factor(case, x)
    return desc.scale * mu * (xi - case.xi2) ** case.n * total


def assemble(desc: EigenfunctionDescriptor, x) -> np.ndarray:
    """Complex psi(x), normalised as described in the module docstring."""
    vals = desc.scale * _raw_values(desc, x)
    return vals if np.ndim(x) else complex(vals)


def _sampling_domain(case: AlgebraizationCase) -> tuple[float, float]:
    K = case.modulus.K
    if case.case_id == 8:
        return 0.0, 2 * K
    return -K, K


def _refine_exact(case: AlgebraizationCase, energy, steps: int = 60) -> Fraction:
    """Newton steps on the exact critical polynomial, starting from ``energy``.

    Close pairs of roots make the state sensitive to the last bits of the
    energy, so the root is sharpened well past double precision first.
    """
    x = energy if isinstance(energy, Fraction) else Fraction(float(energy))
    bundle = bdpoly.build(case)
    for _ in range(steps):
        p_prev, p, dp_prev, dp = Fraction(0), Fraction(1), Fraction(0), Fraction(0)
        for lam, rho in zip(bundle.lam[: case.n + 1], bundle.rho[: case.n + 1]):
            p_prev, p, dp_prev, dp = p, (x - lam) * p - rho * p_prev, dp, p + (x - lam) * dp - rho * dp_prev
        if p == 0 or dp == 0:
            break
        step = p / dp
        x = (x - step).limit_denominator(10**40)
        if abs(step) <= 1e-30 * max(1, abs(x)):
            break
    return x


def _rational(value) -> Optional[Fraction]:
    if value is None:
        return None
    guess = Fraction(value).limit_denominator(10**6)
    return guess if float(guess) == value else None


def _exact_twin(case: AlgebraizationCase) -> Optional[AlgebraizationCase]:
    """The same case over the binary value of a float k^2, in rationals.

    Returns None when a float parameter has no short rational form.
    """
    k2 = case.modulus.k_sq
    if isinstance(k2, Fraction) or not math.isfinite(k2):
        return None
    if case.case_id in (7, 8):
        params = dict(n=case.n)
    else:
        params = dict(m=_rational(case.m), l=_rational(case.l))
        if None in params.values():
            return None
    twin = bdpoly.hatted_coefficients(case.case_id, Modulus(Fraction(k2)), **params)
    return twin if twin.exact else None


def _check_termination(case: AlgebraizationCase, energy: float) -> tuple:
    """P_0..P_n at ``energy``, after checking that P_(n+1) cancels to zero.

    The recursion runs in rationals, at a root sharpened well past double
    precision, whenever the case has an exact twin (a float k^2 is a binary
    rational); the float recursion can lose many digits to cancellation.
    """
    twin = case if case.exact else _exact_twin(case)
    if twin is not None:
        root = _refine_exact(twin, energy)
        if abs(float(root) - float(energy)) > TERMINATION_TOL * max(1.0, abs(float(energy))):
            raise ValidationError(f"E={float(energy)!r} is not a root of the critical polynomial")
        seq = [float(v) for v in bdpoly.raw_sequence(twin, root)]
    else:
        seq = bdpoly.raw_sequence(case, float(energy))
    energy = float(energy)
    a, b, c = bdpoly._abc(case, case.n)
    prev = seq[case.n - 1] if case.n > 0 else 0.0
    size = (abs(complex((energy + b) * seq[case.n])) + abs(complex(c * prev))) / abs(complex(a))
    # P_n itself may vanish when the series stops early, so also use the largest term
    size = max(size, max(abs(complex(v)) for v in seq[: case.n + 1]))
    if abs(complex(seq[case.n + 1])) > TERMINATION_TOL * size:
        raise ValidationError(f"series does not terminate at E={energy!r}")
    return tuple(seq[: case.n + 1])


def make_descriptor(case: AlgebraizationCase, energy, shift: float = 0.0,
                    check_poles: bool = True) -> EigenfunctionDescriptor:
    """Descriptor for the state at a root ``energy`` of the critical polynomial.

    ``energy`` may be a Fraction; a sharpened root keeps the two members of
    an unresolvably close pair apart.
    """
    coeffs = _check_termination(case, energy)
    desc = EigenfunctionDescriptor(case, float(energy), coeffs, shift)
    a, b = _sampling_domain(case)
    grid = np.linspace(a, b, NORM_POINTS + 1)[1:-1] - shift
    vals, bound = _raw_values(desc, grid, with_bound=True)
    top = int(np.argmax(np.abs(vals)))
    peak = float(np.abs(vals[top]))
    if peak == 0.0 or not math.isfinite(peak):
        raise ValidationError("assembled eigenfunction vanishes identically")
    if desc.is_complex:
        diff = case.xi1 - case.xi2
        phase = (diff / abs(diff)) ** case.n
    else:
        # a constant phase makes the state real, positive at its peak
        phase = vals[top] / peak
    desc = EigenfunctionDescriptor(case, float(energy), coeffs, shift, 1.0 / (phase * peak))
    if not desc.is_complex:
        # cancellation in the sum limits how small the imaginary part can be
        leak = float(np.max(np.abs(np.imag(assemble(desc, grid)))))
        if leak > REAL_TOL * max(1.0, float(np.max(bound)) / peak):
            raise ValidationError(f"case {case.case_id}: real state has imaginary part {leak:.2e}")
    if check_poles:
        check_pole_cancellation(desc)
    return desc


def check_pole_cancellation(desc: EigenfunctionDescriptor) -> None:
    """Compare the reduced form with the literal formula and test continuity at x = K.

    The literal formula divides by cn x for the first coordinate map; a
    branch error in the gauge factor would show up as a mismatch away from
    the pole or a jump across it.
    """
    K = desc.case.modulus.K
    probe = np.array([0.37, 0.61, -0.83]) * K - desc.shift
    lit = literal_values(desc, probe)
    red = assemble(desc, probe)
    if np.max(np.abs(lit - red)) > POLE_CHECK_TOL:
        raise NumericalPole(f"case {desc.case_id}: gauge branch mismatch {np.max(np.abs(lit - red)):.3e}")
    if desc.case.row_id != 1:
        return
    delta = 1e-4
    at = K - desc.shift
    left, mid, right = assemble(desc, np.array([at - delta, at, at + delta]))
    if abs(mid - 0.5 * (left + right)) > POLE_CHECK_TOL:
        raise NumericalPole(f"case {desc.case_id}: discontinuity at x = K")


def descriptors_for(spectrum) -> list[EigenfunctionDescriptor]:
    """One descriptor per (energy, source case); conjugate partners included."""
    out = []
    shift = spectrum.spec.K if spectrum.shift else 0.0
    by_id = {cr.case.case_id: cr.case for cr in spectrum.cases}
    for entry in spectrum.entries:
        for cid in entry.source_cases:
            out.append(make_descriptor(by_id[cid], entry.root, shift))
    return out


def primary_descriptors(spectrum) -> list[EigenfunctionDescriptor]:
    """One descriptor per energy, from the first source case."""
    shift = spectrum.spec.K if spectrum.shift else 0.0
    by_id = {cr.case.case_id: cr.case for cr in spectrum.cases}
    return [make_descriptor(by_id[e.source_cases[0]], e.root, shift) for e in spectrum.entries]


def split_degenerate(desc: EigenfunctionDescriptor, points: int = 2048
                     ) -> tuple[Callable, Callable]:
    """Real and imaginary parts of a complex state as two real functions.

    Raises DependentPair when their Wronskian is negligible everywhere.
    """
    from qesband.oracle import GridFunction, wronskian_min

    def re(x):
        return np.real(assemble(desc, x))

    def im(x):
        return np.imag(assemble(desc, x))

    a, b = _sampling_domain(desc.case)
    a, b = a - desc.shift, b - desc.shift
    x = np.linspace(a, b, points + 1)
    vals = assemble(desc, x)
    peak = float(np.max(np.abs(vals)))
    smaller = min(float(np.max(np.abs(vals.real))), float(np.max(np.abs(vals.imag))))
    if smaller <= WRONSKIAN_TOL * peak:
        raise DependentPair(f"E={desc.energy!r}: one of the real and imaginary parts vanishes")
    w = wronskian_min(GridFunction(a, b, vals.real), GridFunction(a, b, vals.imag))
    if w <= WRONSKIAN_TOL:
        raise DependentPair(f"E={desc.energy!r}: real and imaginary parts are dependent (W={w:.2e})")
    return re, im


def independence_hook(spectrum_cases) -> Callable:
    """Demotion hook for ``solve_spec``: True when the split pair is dependent."""
    def demote(entry) -> bool:
        case = next(c for c in spectrum_cases if c.case_id == entry.source_cases[0])
        try:
            split_degenerate(make_descriptor(case, entry.root, check_poles=False))
        except DependentPair:
            return True
        return False
    return demote


def floquet_multiplier(desc: EigenfunctionDescriptor) -> complex:
    """psi(x + 2K) / psi(x), measured where |psi| is large."""
    K = desc.case.modulus.K
    x = np.linspace(-K, K, 257)[1:-1]
    vals = assemble(desc, x)
    i = int(np.argmax(np.abs(vals)))
    return complex(assemble(desc, x[i] + 2 * K) / vals[i])


def sample_states(spec: PotentialSpec, descs, x) -> dict:
    """Real parts of each state on the grid ``x`` (imaginary parts for conjugates)."""
    return {d.energy: np.real(assemble(d, x)) for d in descs}
