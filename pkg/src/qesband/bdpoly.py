"""Orthogonal polynomials in the energy and the critical polynomial.

After the GL(2) change of variable that sends two roots (xi1, xi2) of B4
to 0 and infinity, the series coefficients P_j(E) of the gauged
eigenfunction obey the three-term recursion

    -a_j P_{j+1} = (E + b_j) P_j + c_j P_{j-1},
    a_j = (2j - n + 1) C0-^ + C-^,
    b_j = d1 + C0^ (j - n/2) + C00^ (j - n/2)^2,
    c_j = j (j - 1 - n) [(2j - n - 1) C+0^ + C+^],

with P_{-1} = 0, P_0 = 1.  The monic polynomials P~_j = w_j P_j obey
P~_{j+1} = (E - lambda_j) P~_j - rho_j P~_{j-1} and rho_{n+1} = 0, so the
band-edge energies are the zeros of P~_{n+1}.

Two independent routes give (lambda, rho, omega): ``recursion_coefficients``
uses the closed forms per case, ``recursion_from_hatted`` derives them from
the hatted coefficients.  The hatted coefficients themselves are checked
against a direct GL(2) transform of B4 and A2 (``gl2_transform``).

All arithmetic stays in Fractions when k^2 and the potential parameters
are rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from qesband.elliptic import Modulus, as_number
from qesband.errors import RestrictionViolated, ZeroDenominator
from qesband.potentials import HALF, is_half_odd, is_nonneg_integer

CASE_IDS = (1, 2, 3, 4, 5, 6, 7, 8)

# quartic-row of the coordinate map used by each case
CASE_ROW = {1: 1, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1, 7: 2, 8: 3}

SYSTEM_OF_CASE = {1: "m+l", 2: "m-l-1", 3: "m-1/2", 4: "m-1/2", 5: "l-1/2",
                  6: "l-1/2", 7: "tan", 8: "cot"}


@dataclass(frozen=True)
class Hatted:
    """Transformed coefficients; C++^ = C--^ = 0 by construction."""

    c_p0: object
    c_00: object
    c_0m: object
    c_p: object
    c_0: object
    c_m: object


@dataclass(frozen=True)
class AlgebraizationCase:
    case_id: int
    modulus: Modulus
    n: int
    m: Optional[object]
    l: Optional[object]
    quadratic: tuple  # (C++, C+0, C00, C0-, C--) of the gauged Hamiltonian
    c_plus: complex
    c_minus: complex
    c_zero: object
    d: object
    xi1: complex
    xi2: complex
    hatted: Hatted
    d1: object

    @property
    def row_id(self) -> int:
        return CASE_ROW[self.case_id]

    @property
    def system(self) -> str:
        return SYSTEM_OF_CASE[self.case_id]

    @property
    def exact(self) -> bool:
        return isinstance(self.d1, Fraction)

    def denominators(self) -> list:
        """a_j for j = 0..n+1 (must all be nonzero)."""
        h = self.hatted
        return [(2 * j - self.n + 1) * h.c_0m + h.c_m for j in range(self.n + 2)]


@dataclass(frozen=True)
class CriticalPolynomialBundle:
    n: int
    lam: tuple
    rho: tuple
    omega: tuple
    monic_coeffs: Optional[tuple] = None

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.lam + self.rho)


# ------------------------------------------------------------ case building


def _spin(case_id, m, l, n):
    if case_id == 1:
        return m + l
    if case_id == 2:
        return m - l - 1
    if case_id in (3, 4):
        return m - HALF
    if case_id in (5, 6):
        return l - HALF
    return n


def _check_restrictions(case_id, m, l, spin):
    if not is_nonneg_integer(spin):
        raise RestrictionViolated(
            f"case {case_id}: spin {spin} is not a non-negative integer for m={m}, l={l}")
    if case_id in (1, 2) and is_half_odd(m):
        raise RestrictionViolated(
            f"case {case_id}: m={m} is half an odd integer; oblique lines are cut there")


def hatted_coefficients(case_id: int, modulus: Modulus, m=None, l=None, n=None) -> AlgebraizationCase:
    """Build an algebraization case with its raw and transformed coefficients.

    Cases 1-6 take (m, l) of the associated Lame potential, cases 7 and 8
    take n for the tan and cot families.
    """
    if case_id not in CASE_IDS:
        raise ValueError(f"unknown case {case_id}")
    if case_id <= 6:
        if m is None or l is None:
            raise ValueError(f"case {case_id} needs m and l")
        m, l = as_number(m), as_number(l)
        spin = _spin(case_id, m, l, None)
        _check_restrictions(case_id, m, l, spin)
    else:
        if n is None:
            raise ValueError(f"case {case_id} needs n")
        spin = as_number(n)
        if not is_nonneg_integer(spin):
            raise RestrictionViolated(f"case {case_id}: n={n} must be a non-negative integer")
    n_int = int(spin)
    exact = modulus.exact and all(isinstance(v, Fraction) for v in (m, l) if v is not None)
    k2 = modulus.k_sq if exact else modulus.k2
    kp2 = 1 - k2
    kp = math.sqrt(float(kp2))
    if not exact:
        m = float(m) if m is not None else None
        l = float(l) if l is not None else None
    nn = Fraction(n_int) if exact else float(n_int)
    half = HALF if exact else 0.5

    if case_id <= 6:
        quadratic = (kp2, 0, 1 + kp2, 0, 1)
        if case_id == 1:
            cp = cm = 0
            c0 = k2 * (l - m)
            d = -k2 * (l - m) ** 2 / 4 - nn * (nn + 2) / 2
            xi1, xi2 = -1j, 1j
            hat = Hatted(k2 / 2, 2 * (k2 - 2), k2 / 2, k2 * (m - l) / 2, 0 * k2, k2 * (l - m) / 2)
        elif case_id == 2:
            cp = cm = 0
            c0 = -k2 * (l + m + 1)
            d = -k2 * (l + m + 1) ** 2 / 4 - nn * (nn + 2) / 2
            xi1, xi2 = -1j, 1j
            hat = Hatted(k2 / 2, 2 * (k2 - 2), k2 / 2, k2 * (l + m + 1) / 2, 0 * k2,
                         -k2 * (l + m + 1) / 2)
        elif case_id in (3, 4):
            sign = 1 if case_id == 3 else -1
            cp = cm = sign * 1j * kp * float(2 * l + 1)
            c0 = -k2 * (m + half)
            d = -(2 * l + 1) ** 2 / 4 - k2 * (m + half) ** 2 / 4 - nn * (nn + 2) / 2
            xi1, xi2 = sign * 1j / kp, -sign * 1j / kp
            hat = Hatted(-k2 / 2, 2 * (k2 - 2), -k2 / 2, k2 * (m - 2 * l - half) / 2,
                         (2 * l + 1) * (k2 - 2), -k2 * (2 * l + m + 3 * half) / 2)
        else:
            sign = 1 if case_id == 5 else -1
            cp = sign * 1j * float(kp2) * float(2 * m + 1)
            cm = sign * 1j * float(2 * m + 1)
            c0 = k2 * (l + half)
            d = -(2 * m + 1) ** 2 / 4 - k2 * (l + half) ** 2 / 4 - nn * (nn + 2) / 2
            xi1, xi2 = sign * 1j, -sign * 1j
            hat = Hatted(k2 / 2, 2 * (k2 - 2), k2 / 2, k2 * (2 * m - l + half) / 2,
                         (2 * m + 1) * (k2 - 2), k2 * (2 * m + l + 3 * half) / 2)
    elif case_id == 7:
        quadratic = (k2, 0, -(1 + k2), 0, 1)
        cp = cm = 0
        c0 = -kp2 * (nn + 4)
        d = (3 * nn**2 + 12 * nn + 8 - k2 * (nn**2 + 8 * nn + 8)) / 4
        xi1, xi2 = 1.0, -1.0
        hat = Hatted(-kp2 / 2, 2 * (1 + k2), -kp2 / 2, kp2 * (nn + 4) / 2, 0 * k2,
                     -kp2 * (nn + 4) / 2)
    else:
        quadratic = (-k2, 0, 2 * k2 - 1, 0, kp2)
        cp = cm = 0
        c0 = -(nn + 4)
        d = (3 * nn**2 + 12 * nn + 8) / 4 - k2 * nn * (nn + 2) / 2
        xi1, xi2 = 1.0, -1.0
        hat = Hatted(-half, 2 * (1 - 2 * k2), -half, (nn + 4) / 2, 0 * k2, -(nn + 4) / 2)

    d1 = d + nn * (nn + 2) / 12 * (quadratic[2] - hat.c_00)
    case = AlgebraizationCase(case_id, modulus, n_int, m, l, quadratic, complex(cp), complex(cm),
                              c0, d, complex(xi1), complex(xi2), hat, d1)
    for j, a in enumerate(case.denominators()[: n_int + 1]):
        if a == 0:
            raise ZeroDenominator(f"case {case_id}: leading recursion coefficient vanishes at j={j}")
    return case


def cases_for_family(family, modulus: Modulus) -> list[AlgebraizationCase]:
    """Every algebraization that applies to a closed-form family."""
    from qesband.potentials import AssociatedLame, CotFamily, TanFamily, classify

    if isinstance(family, TanFamily):
        return [hatted_coefficients(7, modulus, n=family.n)]
    if isinstance(family, CotFamily):
        return [hatted_coefficients(8, modulus, n=family.n)]
    if isinstance(family, AssociatedLame):
        info = classify(family.m, family.l)
        m, l = info.canonical_point
        return [hatted_coefficients(c, modulus, m=m, l=l) for c in info.case_ids()]
    raise TypeError(f"no algebraization for {family!r}")


# -------------------------------------------------------- GL(2) transform


def gl2_transform(quartic: Sequence, linear: Sequence, xi1: complex, xi2: complex) -> dict:
    """Coefficients of B4^ and A2^ after sending xi1 -> 0 and xi2 -> infinity.

    ``quartic`` is (C++, C+0, C00, C0-, C--) and ``linear`` is (C+, C0, C-).
    Uses xi = (xi2 y - xi1) / (y - 1); computed numerically in complex
    arithmetic from polynomial products, independently of the closed forms.
    """
    cpp, cp0, c00, c0m, cmm = (complex(v) for v in quartic)
    cp, c0, cm = (complex(v) for v in linear)
    num = np.array([xi2, -xi1], dtype=complex)  # e y + f
    den = np.array([1.0, -1.0], dtype=complex)  # g y + h
    det = xi1 - xi2

    def homog(coeffs, degree):
        total = np.zeros(degree + 1, dtype=complex)
        for power, c in enumerate(coeffs):  # c multiplies xi^power
            term = np.array([c], dtype=complex)
            for _ in range(power):
                term = np.polymul(term, num)
            for _ in range(degree - power):
                term = np.polymul(term, den)
            total = np.polyadd(total, term)
        return total  # highest power first

    b4 = homog([cmm, 2 * c0m, c00, 2 * cp0, cpp], 4) / det**2
    a2 = homog([cm, c0, cp], 2) / det
    b4 = np.concatenate([np.zeros(5 - len(b4)), b4])
    a2 = np.concatenate([np.zeros(3 - len(a2)), a2])
    return {
        "c_pp": b4[0], "c_p0": b4[1] / 2, "c_00": b4[2], "c_0m": b4[3] / 2, "c_mm": b4[4],
        "c_p": a2[0], "c_0": a2[1], "c_m": a2[2],
    }


# -------------------------------------------------------- recursion tables


def _prod(values, start):
    out = start
    for v in values:
        out = out * v
    return out


def recursion_coefficients(case: AlgebraizationCase) -> CriticalPolynomialBundle:
    """lambda_j, rho_j (j = 0..n+1) and omega_j (j = 0..n+1) from the closed forms."""
    n = case.n
    exact = case.exact
    k2 = case.modulus.k_sq if exact else case.modulus.k2
    kp2 = 1 - k2
    one = Fraction(1) if exact else 1.0
    half = HALF if exact else 0.5
    m, l = case.m, case.l
    cid = case.case_id
    lam, rho, omega = [], [], []
    for j in range(n + 2):
        if cid in (1, 2):
            p, q = m * (m + 1), l * (l + 1)
            lam_base = k2 / 2 * (p + q)
            if cid == 1:
                r = (k2 / 2) ** 2 * j * (l + m + 1 - j) * (2 * j - 2 * l - 1) * (2 * m - 2 * j + 1)
                lj = lam_base + (2 - k2) / 2 * (l + m - 2 * j) ** 2
            else:
                r = (k2 / 2) ** 2 * j * (m - l - j) * (2 * m - 2 * j + 1) * (2 * j + 2 * l + 1)
                lj = lam_base + (2 - k2) / 2 * (m - l - 1 - 2 * j) ** 2
            w = (k2 / 2) ** j * _prod((2 * m - 2 * i - 1 for i in range(j)), one)
        elif cid in (3, 4):
            r = (k2 / 2) ** 2 * j * (j - m - half) * (2 * j - 2 * m + 2 * l) * (2 * j + 2 * l + 1)
            lj = (k2 / 4 * (2 * m * m + 2 * m - half) + (2 * l + 1) ** 2 / 4
                  + (2 - k2) / 2 * (2 * j - m + half) * (2 * j - m + 2 * l + 3 * half))
            w = (k2 / 2) ** j * _prod((2 * l + 2 * i + 1 for i in range(1, j + 1)), one)
        elif cid in (5, 6):
            r = (k2 / 2) ** 2 * j * (j - l - half) * (2 * j - 2 * l + 2 * m) * (2 * j + 2 * m + 1)
            lj = (k2 / 4 * (2 * l * l + 2 * l - half) + (2 * m + 1) ** 2 / 4
                  + (2 - k2) / 2 * (2 * j - l + half) * (2 * j - l + 2 * m + 3 * half))
            w = (-k2 / 2) ** j * _prod((2 * m + 2 * i + 1 for i in range(1, j + 1)), one)
        elif cid == 7:
            r = (kp2 / 2) ** 2 * j * (j - n - 1) * (2 * j - 2 * n - 5) * (2 * j + 3)
            lj = -kp2 / 2 * (n + 1) * (n + 4) - (1 + k2) / 2 * (n - 2 * j) ** 2
            w = (kp2 / 2) ** j * _prod((2 * j + 3 - 2 * i for i in range(j + 2)), one) / 3
        else:
            r = one / 4 * j * (j - n - 1) * (2 * j - 2 * n - 5) * (2 * j + 3)
            lj = -one / 2 * (n + 1) * (n + 4) - (1 - 2 * k2) / 2 * (n - 2 * j) ** 2
            w = (one / 2) ** j * _prod((2 * j + 3 - 2 * i for i in range(j + 2)), one) / 3
        lam.append(lj * one)
        rho.append(r * one)
        omega.append(w * one)
    return CriticalPolynomialBundle(n, tuple(lam), tuple(rho), tuple(omega))


def _abc(case: AlgebraizationCase, j: int):
    h = case.hatted
    n = case.n
    half_n = Fraction(n, 2) if case.exact else n / 2
    a = (2 * j - n + 1) * h.c_0m + h.c_m
    b = case.d1 + h.c_0 * (j - half_n) + h.c_00 * (j - half_n) ** 2
    c = j * (j - 1 - n) * ((2 * j - n - 1) * h.c_p0 + h.c_p)
    return a, b, c


def recursion_from_hatted(case: AlgebraizationCase) -> CriticalPolynomialBundle:
    """Derive (lambda, rho, omega) from the raw recursion by monic rescaling.

    With w_j = prod_{i<j} (-a_i): lambda_j = -b_j and rho_j = c_j a_{j-1}.
    """
    lam, rho, omega = [], [], []
    w = Fraction(1) if case.exact else 1.0
    prev_a = None
    for j in range(case.n + 2):
        a, b, c = _abc(case, j)
        lam.append(-b)
        rho.append(c * prev_a if j > 0 else 0 * b)
        omega.append(w)
        w = w * (-a)
        prev_a = a
    return CriticalPolynomialBundle(case.n, tuple(lam), tuple(rho), tuple(omega))


def critical_polynomial(bundle: CriticalPolynomialBundle) -> tuple:
    """Coefficients of the monic P~_{n+1}(E), highest power first."""
    prev = [0 * bundle.lam[0]]
    cur = [1 + 0 * bundle.lam[0]]
    for j in range(bundle.n + 1):
        # (E - lam_j) * cur - rho_j * prev, lists highest power first
        nxt = cur + [0 * cur[0]]
        for i, c in enumerate(cur):
            nxt[i + 1] -= bundle.lam[j] * c
        shift = len(nxt) - len(prev)
        for i, c in enumerate(prev):
            nxt[i + shift] -= bundle.rho[j] * c
        prev, cur = cur, nxt
    return tuple(cur)


def with_polynomial(bundle: CriticalPolynomialBundle) -> CriticalPolynomialBundle:
    return CriticalPolynomialBundle(bundle.n, bundle.lam, bundle.rho, bundle.omega,
                                    critical_polynomial(bundle))


def monic_values(bundle: CriticalPolynomialBundle, E, upto: Optional[int] = None) -> list:
    """[P~_0(E), ..., P~_{upto}(E)] by the recurrence (upto defaults to n+1)."""
    upto = bundle.n + 1 if upto is None else upto
    vals = [1 + 0 * E]
    prev = 0 * E
    for j in range(upto):
        nxt = (E - bundle.lam[j]) * vals[-1] - bundle.rho[j] * prev
        prev = vals[-1]
        vals.append(nxt)
    return vals


def monic_value_and_derivative(bundle: CriticalPolynomialBundle, E: float):
    """P~_{n+1}(E) and its derivative, by differentiating the recurrence."""
    p_prev, p = 0.0, 1.0
    dp_prev, dp = 0.0, 0.0
    for j in range(bundle.n + 1):
        lam, rho = float(bundle.lam[j]), float(bundle.rho[j])
        p_next = (E - lam) * p - rho * p_prev
        dp_next = p + (E - lam) * dp - rho * dp_prev
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def raw_sequence(case: AlgebraizationCase, E) -> list:
    """Series coefficients P_0(E) .. P_{n+1}(E) of the transformed eigenfunction."""
    vals = [1 + 0 * E]
    prev = 0 * E
    for j in range(case.n + 1):
        a, b, c = _abc(case, j)
        nxt = -((E + b) * vals[-1] + c * prev) / a
        prev = vals[-1]
        vals.append(nxt)
    return vals


def build(case: AlgebraizationCase) -> CriticalPolynomialBundle:
    """Closed-form bundle with its monic coefficients attached."""
    return with_polynomial(recursion_coefficients(case))
