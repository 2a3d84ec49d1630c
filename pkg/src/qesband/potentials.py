"""Elliptic potentials generated from quartic coordinate maps.

The twelve quartics B4(xi) whose inverse integral x(xi) is a Jacobi
function are catalogued in ``QUARTIC_ROWS``.  Any choice of the linear
coefficients (C+, C-, C0), spin n and constant d turns one of them into a
Schrodinger potential through

    V = (B4' - 2 B3)(3 B4' - 2 B3) / (16 B4) - (B4'' - 2 B3' + 4 B2) / 4,

evaluated at xi = xi(x).  Rows 1-3 also have closed-form families: the
associated Lame potential m(m+1) k^2 sn^2 x + l(l+1) k^2 cd^2 x and the
two singular families called here ``TanFamily`` and ``CotFamily``.

(m, l) are kept as exact Fractions whenever possible; line membership and
the half-integer exclusion are decided exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from qesband.elliptic import Modulus, as_number, jacobi_arrays
from qesband.errors import SingularPoint

HALF = Fraction(1, 2)
POLE_TOL = 1e-12


def is_nonneg_integer(value) -> bool:
    value = Fraction(value)
    return value.denominator == 1 and value >= 0


def is_half_odd(value) -> bool:
    """True for 1/2, 3/2, 5/2, ... (the set excluded on the oblique lines)."""
    value = Fraction(value)
    return value.denominator == 2 and value > 0


# ---------------------------------------------------------------- catalogue


@dataclass(frozen=True)
class QuarticRow:
    """One coordinate transformation xi(x) with (dxi/dx)^2 = B4(xi).

    ``even_coefficients(k2, kp2)`` gives (a4, a2, a0) for
    B4 = a4 xi^4 + a2 xi^2 + a0; every row is even in xi.
    ``xi_parts`` returns xi(x) as a numerator/denominator pair of Jacobi
    expressions so that callers can clear denominators analytically.
    """

    row_id: int
    label: str
    even_coefficients: Callable
    zeros: Callable
    xi_parts: Callable
    b4_closed: Callable

    def b4(self, xi, m: Modulus):
        a4, a2, a0 = self.even_coefficients(m.k2, m.kp2)
        xi2 = xi * xi
        return (a4 * xi2 + a2) * xi2 + a0

    def xi_of_x(self, x, m: Modulus):
        sn, cn, dn, _ = jacobi_arrays(x, m)
        num, den = self.xi_parts(sn, cn, dn, m.k2)
        return num / den

    def b4_at_x(self, x, m: Modulus):
        sn, cn, dn, _ = jacobi_arrays(x, m)
        return self.b4_closed(sn, cn, dn, m.k2, m.kp2)


def _one(sn):
    return np.ones_like(sn)


QUARTIC_ROWS = {
    1: QuarticRow(
        1, "(1 + xi^2)(1 + k'^2 xi^2)",
        lambda k2, kp2: (kp2, 1 + kp2, 1.0),
        lambda k2, kp2: (1j, -1j, 1j / math.sqrt(kp2), -1j / math.sqrt(kp2)),
        lambda sn, cn, dn, k2: (sn, cn),
        lambda sn, cn, dn, k2, kp2: dn**2 / cn**4,
    ),
    2: QuarticRow(
        2, "(1 - xi^2)(1 - k^2 xi^2)",
        lambda k2, kp2: (k2, -(1 + k2), 1.0),
        lambda k2, kp2: (1.0, -1.0, 1 / math.sqrt(k2), -1 / math.sqrt(k2)),
        lambda sn, cn, dn, k2: (sn, _one(sn)),
        lambda sn, cn, dn, k2, kp2: cn**2 * dn**2,
    ),
    3: QuarticRow(
        3, "(1 - xi^2)(k'^2 + k^2 xi^2)",
        lambda k2, kp2: (-k2, k2 - kp2, kp2),
        lambda k2, kp2: (1.0, -1.0, 1j * math.sqrt(kp2 / k2), -1j * math.sqrt(kp2 / k2)),
        lambda sn, cn, dn, k2: (-cn, _one(sn)),
        lambda sn, cn, dn, k2, kp2: sn**2 * dn**2,
    ),
    4: QuarticRow(
        4, "(1 - xi^2)(xi^2 - k'^2)",
        lambda k2, kp2: (-1.0, 1 + kp2, -kp2),
        lambda k2, kp2: (1.0, -1.0, math.sqrt(kp2), -math.sqrt(kp2)),
        lambda sn, cn, dn, k2: (-dn, _one(sn)),
        lambda sn, cn, dn, k2, kp2: k2**2 * sn**2 * cn**2,
    ),
    5: QuarticRow(
        5, "(1 + k^2 xi^2)(1 - k'^2 xi^2)",
        lambda k2, kp2: (-k2 * kp2, k2 - kp2, 1.0),
        lambda k2, kp2: (1j / math.sqrt(k2), -1j / math.sqrt(k2), 1 / math.sqrt(kp2), -1 / math.sqrt(kp2)),
        lambda sn, cn, dn, k2: (sn, dn),
        lambda sn, cn, dn, k2, kp2: cn**2 / dn**4,
    ),
    6: QuarticRow(
        6, "(xi^2 - 1)(xi^2 - k^2)",
        lambda k2, kp2: (1.0, -(1 + k2), k2),
        lambda k2, kp2: (1.0, -1.0, math.sqrt(k2), -math.sqrt(k2)),
        lambda sn, cn, dn, k2: (-_one(sn), sn),
        lambda sn, cn, dn, k2, kp2: cn**2 * dn**2 / sn**4,
    ),
    7: QuarticRow(
        7, "(xi^2 - 1)(k'^2 xi^2 + k^2)",
        lambda k2, kp2: (kp2, k2 - kp2, -k2),
        lambda k2, kp2: (1.0, -1.0, 1j * math.sqrt(k2 / kp2), -1j * math.sqrt(k2 / kp2)),
        lambda sn, cn, dn, k2: (_one(sn), cn),
        lambda sn, cn, dn, k2, kp2: sn**2 * dn**2 / cn**4,
    ),
    8: QuarticRow(
        8, "(xi^2 - 1)(1 - k'^2 xi^2)",
        lambda k2, kp2: (-kp2, 1 + kp2, -1.0),
        lambda k2, kp2: (1.0, -1.0, 1 / math.sqrt(kp2), -1 / math.sqrt(kp2)),
        lambda sn, cn, dn, k2: (_one(sn), dn),
        lambda sn, cn, dn, k2, kp2: k2**2 * sn**2 * cn**2 / dn**4,
    ),
    9: QuarticRow(
        9, "(1 + xi^2)(k'^2 + xi^2)",
        lambda k2, kp2: (1.0, 1 + kp2, kp2),
        lambda k2, kp2: (1j, -1j, 1j * math.sqrt(kp2), -1j * math.sqrt(kp2)),
        lambda sn, cn, dn, k2: (-cn, sn),
        lambda sn, cn, dn, k2, kp2: dn**2 / sn**4,
    ),
    10: QuarticRow(
        10, "(xi^2 + k^2)(xi^2 - k'^2)",
        lambda k2, kp2: (1.0, k2 - kp2, -k2 * kp2),
        lambda k2, kp2: (1j * math.sqrt(k2), -1j * math.sqrt(k2), math.sqrt(kp2), -math.sqrt(kp2)),
        lambda sn, cn, dn, k2: (-dn, sn),
        lambda sn, cn, dn, k2, kp2: cn**2 / sn**4,
    ),
    # printed closed form carries k^4; (dxi/dx)^2 for xi = -cd x is k'^4 sn^2/dn^4
    11: QuarticRow(
        11, "(1 - xi^2)(1 - k^2 xi^2)",
        lambda k2, kp2: (k2, -(1 + k2), 1.0),
        lambda k2, kp2: (1.0, -1.0, 1 / math.sqrt(k2), -1 / math.sqrt(k2)),
        lambda sn, cn, dn, k2: (-cn, dn),
        lambda sn, cn, dn, k2, kp2: kp2**2 * sn**2 / dn**4,
    ),
    12: QuarticRow(
        12, "(xi^2 - 1)(xi^2 - k^2)",
        lambda k2, kp2: (1.0, -(1 + k2), k2),
        lambda k2, kp2: (1.0, -1.0, math.sqrt(k2), -math.sqrt(k2)),
        lambda sn, cn, dn, k2: (dn, cn),
        lambda sn, cn, dn, k2, kp2: kp2**2 * sn**2 / cn**4,
    ),
}


# ------------------------------------------------------------------ families


@dataclass(frozen=True)
class AssociatedLame:
    m: Fraction
    l: Fraction

    def __post_init__(self):
        object.__setattr__(self, "m", as_number(self.m))
        object.__setattr__(self, "l", as_number(self.l))

    @property
    def p(self):
        return self.m * (self.m + 1)

    @property
    def q(self):
        return self.l * (self.l + 1)


@dataclass(frozen=True)
class TanFamily:
    """k'^2 [2/cn^2 x - (n+3)(n+2)/dn^2 x] on (-K, K)."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class CotFamily:
    """2/sn^2 x - k'^2 (n+3)(n+2)/dn^2 x on (0, 2K)."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class GenericQuartic:
    row_id: int
    c_plus: complex
    c_minus: complex
    c_zero: complex
    n: int
    d: complex


Family = Union[AssociatedLame, TanFamily, CotFamily, GenericQuartic]


@dataclass(frozen=True)
class PotentialSpec:
    family: Family
    modulus: Modulus

    @property
    def K(self) -> float:
        return self.modulus.K

    @property
    def period(self) -> float:
        return 2.0 * self.modulus.K

    def domain(self) -> tuple[float, float]:
        """Natural interval: one period, or the open interval between poles."""
        K = self.modulus.K
        if isinstance(self.family, TanFamily):
            return (-K, K)
        if isinstance(self.family, CotFamily):
            return (0.0, 2 * K)
        return (-K, K)

    @property
    def singular(self) -> bool:
        return isinstance(self.family, (TanFamily, CotFamily))

    def __call__(self, x):
        return eval_potential(self, x)


def associated_lame(m, l, k_sq) -> PotentialSpec:
    return PotentialSpec(AssociatedLame(m, l), Modulus(k_sq))


# ----------------------------------------------------------- classification


def canonicalize(m, l) -> tuple[Fraction, Fraction]:
    """Map (m, l) into the effective region m >= l >= -1/2.

    m -> -m-1 and l -> -l-1 leave m(m+1), l(l+1) unchanged; swapping m and l
    shifts the potential by K, since sn(x + K) = cd x.
    """
    m, l, _ = _canonical(m, l)
    return m, l


def _canonical(m, l):
    m, l = as_number(m), as_number(l)
    if m < -HALF:
        m = -m - 1
    if l < -HALF:
        l = -l - 1
    if m < l:
        return l, m, True
    return m, l, False


@dataclass(frozen=True)
class AlgebraicLine:
    system: str  # "m+l", "m-l-1", "m-1/2" or "l-1/2"
    n: int
    case_ids: tuple[int, ...]


@dataclass(frozen=True)
class ALClassification:
    canonical_point: tuple
    lines: tuple[AlgebraicLine, ...] = field(default_factory=tuple)
    swapped: bool = False  # potential of the canonical point is shifted by K

    @property
    def is_critical(self) -> bool:
        return len(self.lines) == 0

    def case_ids(self) -> list[int]:
        return [c for line in self.lines for c in line.case_ids]


def classify(m, l) -> ALClassification:
    """Algebraic lines through the canonical image of (m, l)."""
    m, l, swapped = _canonical(m, l)
    lines = []
    oblique_ok = not is_half_odd(m)
    if oblique_ok and is_nonneg_integer(m + l):
        lines.append(AlgebraicLine("m+l", int(m + l), (1,)))
    if oblique_ok and is_nonneg_integer(m - l - 1):
        lines.append(AlgebraicLine("m-l-1", int(m - l - 1), (2,)))
    if is_nonneg_integer(m - HALF):
        lines.append(AlgebraicLine("m-1/2", int(m - HALF), (3, 4)))
    if is_nonneg_integer(l - HALF):
        lines.append(AlgebraicLine("l-1/2", int(l - HALF), (5, 6)))
    return ALClassification((m, l), tuple(lines), swapped)


# ---------------------------------------------------------------- evaluation


def _pole_distance(x, period, offset):
    """Distance from x to the nearest point offset + j * period."""
    y = np.mod(np.asarray(x, dtype=float) - offset, period)
    return np.minimum(y, period - y)


def eval_potential(spec: PotentialSpec, x):
    """V(x) for a closed-form family (vectorised over x)."""
    fam = spec.family
    mod = spec.modulus
    k2, kp2 = mod.k2, mod.kp2
    x_arr = np.asarray(x, dtype=float)
    if isinstance(fam, GenericQuartic):
        return eval_generic(QUARTIC_ROWS[fam.row_id], fam.c_plus, fam.c_minus,
                            fam.c_zero, fam.n, fam.d, mod, x)
    if isinstance(fam, TanFamily):
        if np.any(_pole_distance(x_arr, 2 * mod.K, mod.K) < POLE_TOL):
            raise SingularPoint("tan-family potential evaluated at a pole (odd multiple of K)")
    if isinstance(fam, CotFamily):
        if np.any(_pole_distance(x_arr, 2 * mod.K, 0.0) < POLE_TOL):
            raise SingularPoint("cot-family potential evaluated at a pole (even multiple of K)")
    sn, cn, dn, _ = jacobi_arrays(x_arr, mod)
    if isinstance(fam, AssociatedLame):
        v = float(fam.p) * k2 * sn**2 + float(fam.q) * k2 * (cn / dn) ** 2
    elif isinstance(fam, TanFamily):
        v = kp2 * (2.0 / cn**2 - (fam.n + 3) * (fam.n + 2) / dn**2)
    elif isinstance(fam, CotFamily):
        v = 2.0 / sn**2 - kp2 * (fam.n + 3) * (fam.n + 2) / dn**2
    else:
        raise TypeError(f"unknown family {fam!r}")
    return v if np.ndim(x) else float(v)


def b_polynomials(row: QuarticRow, c_plus, c_minus, c_zero, n, d, m: Modulus):
    """Coefficient arrays (highest power first) of B4, B3, B2 for the given row."""
    a4, a2, a0 = row.even_coefficients(m.k2, m.kp2)
    cpp, cp0, c00, c0m, cmm = a4, 0.0, a2, 0.0, a0
    b4 = np.array([cpp, 2 * cp0, c00, 2 * c0m, cmm], dtype=complex)
    b3 = np.array([
        2 * (1 - n) * cpp,
        3 * (1 - n) * cp0 + c_plus,
        (1 - n) * c00 + c_zero,
        (1 - n) * c0m + c_minus,
    ], dtype=complex)
    b2 = np.array([
        n * (n - 1) * cpp,
        n * ((n - 1) * cp0 - c_plus),
        n * n / 4 * c00 - n / 2 * c_zero + d,
    ], dtype=complex)
    return b4, b3, b2


def eval_generic(row: QuarticRow, c_plus, c_minus, c_zero, n, d, m: Modulus, x):
    """V(x) from the B-polynomials of ``row`` with xi = xi(x)."""
    b4, b3, b2 = b_polynomials(row, complex(c_plus), complex(c_minus), complex(c_zero),
                               n, complex(d), m)
    xi = row.xi_of_x(np.asarray(x, dtype=float), m)
    if not np.all(np.isfinite(xi)):
        raise SingularPoint(f"xi(x) is infinite for row {row.row_id}")
    B4 = np.polyval(b4, xi)
    if np.any(np.abs(B4) < POLE_TOL):
        raise SingularPoint(f"B4 vanishes at the requested point (row {row.row_id})")
    dB4 = np.polyval(np.polyder(b4), xi)
    ddB4 = np.polyval(np.polyder(b4, 2), xi)
    B3 = np.polyval(b3, xi)
    dB3 = np.polyval(np.polyder(b3), xi)
    B2 = np.polyval(b2, xi)
    v = (dB4 - 2 * B3) * (3 * dB4 - 2 * B3) / (16 * B4) - 0.25 * (ddB4 - 2 * dB3 + 4 * B2)
    scale = np.maximum(1.0, np.abs(v))
    if np.any(np.abs(v.imag) > 1e-8 * scale):
        raise ValueError("generic potential is not real for these coefficients")
    v = v.real
    return v if np.ndim(x) else float(v)


def pqrs(c_plus, c_minus, c_zero, n, m: Modulus):
    """Coefficients (P, Q, R, S) of P sn^2 + Q sn cn + R sn cn/dn^2 + S cn^2/dn^2.

    Exact when the inputs are Fractions; imaginary C+- give complex results.
    """
    k2, kp2 = m.k_sq, m.kp_sq
    diff = c_plus - c_minus
    skew = c_plus - kp2 * c_minus
    P = k2 / 4 * n * (n + 2) - c_zero / 2 * (n + 1) + (c_zero**2 - diff**2) / (4 * k2)
    Q = diff * (k2 * (n + 1) - c_zero) / (2 * k2)
    R = skew * (k2 * (n + 1) + c_zero) / (2 * k2)
    S = k2 / 4 * n * (n + 2) + c_zero / 2 * (n + 1) + (c_zero**2 - skew**2 / kp2) / (4 * k2)
    return P, Q, R, S


def gauge_constant(c_plus, c_minus, c_zero, n, m: Modulus):
    """Constant d that removes the additive offset for row-1 potentials."""
    k2, kp2 = m.k_sq, m.kp_sq
    return (c_minus**2 - (c_zero**2 + 2 * c_plus * c_minus) + c_plus**2 / kp2) / (4 * k2) \
        - Fraction(n * (n + 2), 2)


def sample_grid(spec: PotentialSpec, count: int, guard: float = 1e-6):
    """Uniform grid over the natural domain, kept ``guard * K`` away from poles."""
    a, b = spec.domain()
    if spec.singular:
        g = guard * spec.K
        return np.linspace(a + g, b - g, count)
    return np.linspace(a, b, count, endpoint=False)
