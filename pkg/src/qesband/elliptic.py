"""Jacobi elliptic functions sn, cn, dn and the complete integral K.

Everything is computed from the arithmetic-geometric mean of (1, k'):
K = pi / (2 agm(1, k')), and the functions by the descending Landen
recursion on the amplitude.  Arguments are first reduced modulo the half
period 2K, using sn(x + 2K) = -sn x, cn(x + 2K) = -cn x, dn(x + 2K) = dn x,
so the recursion only ever sees |x| <= K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np

from qesband import _kernels
from qesband.errors import InvalidModulus

Number = Union[int, float, Fraction]

_AGM_TOL = 1e-16


def as_number(value) -> Number:
    """Parse ``"p/q"``, ``"0.3"``, ints, floats and Fractions.

    Strings containing a decimal point or exponent stay floating; everything
    else is kept exact.
    """
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE") and "/" not in text:
            return float(text)
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as a number")


@dataclass(frozen=True)
class Modulus:
    """Elliptic parameter k^2 in the open interval (0, 1).

    ``k_sq`` may be a Fraction (exact mode) or a float.
    """

    k_sq: Number
    kp_sq: Number = field(init=False)

    def __post_init__(self):
        k_sq = as_number(self.k_sq)
        if not (0 < k_sq < 1):
            raise InvalidModulus(f"k^2 must lie strictly inside (0, 1), got {k_sq}")
        object.__setattr__(self, "k_sq", k_sq)
        object.__setattr__(self, "kp_sq", 1 - k_sq)

    @property
    def exact(self) -> bool:
        return isinstance(self.k_sq, Fraction)

    @property
    def k2(self) -> float:
        return float(self.k_sq)

    @property
    def kp2(self) -> float:
        return float(self.kp_sq)

    @property
    def kp(self) -> float:
        return math.sqrt(float(self.kp_sq))

    @cached_property
    def agm_table(self) -> tuple[np.ndarray, np.ndarray]:
        """AGM sequences (a_j, c_j) starting from a_0 = 1, b_0 = k', c_0 = k."""
        a, b, c = 1.0, self.kp, math.sqrt(self.k2)
        a_seq, c_seq = [a], [c]
        while abs(c) > _AGM_TOL * a:
            a, b = 0.5 * (a + b), math.sqrt(a * b)
            c = c * c / (4.0 * a)
            a_seq.append(a)
            c_seq.append(c)
            if len(a_seq) > 64:
                break
        return np.array(a_seq), np.array(c_seq)

    @cached_property
    def K(self) -> float:
        a, _ = self.agm_table
        return math.pi / (2.0 * a[-1])

    def __str__(self):
        return str(self.k_sq)


class JacobiTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


def complete_K(m: Modulus) -> float:
    """Quarter period K(k^2) = integral_0^{pi/2} da / sqrt(1 - k^2 sin^2 a)."""
    return m.K


def _reduce(x, m: Modulus):
    """Split x = x_r + 2K r with x_r in [-K, K]; returns (x_r, r)."""
    two_k = 2.0 * m.K
    r = np.rint(np.asarray(x, dtype=float) / two_k)
    return x - two_k * r, r


def jacobi_arrays(x, m: Modulus):
    """Vectorised sn, cn, dn and the (continuous) amplitude am(x).

    Returns four arrays shaped like ``x``.
    """
    x = np.asarray(x, dtype=float)
    xr, r = _reduce(x, m)
    a, c = m.agm_table
    phi = np.asarray(_kernels.landen_am(xr, a, c), dtype=float).reshape(x.shape)
    sign = np.where(np.mod(r, 2.0) == 0.0, 1.0, -1.0)
    s = np.sin(phi)
    co = np.cos(phi)
    dn = np.sqrt(co * co + m.kp2 * s * s)
    return sign * s, sign * co, dn, phi + math.pi * r


def jacobi(x: float, m: Modulus) -> JacobiTriple:
    sn, cn, dn, _ = jacobi_arrays(np.array([float(x)]), m)
    return JacobiTriple(float(sn[0]), float(cn[0]), float(dn[0]))


def amplitude(x, m: Modulus):
    """Jacobi amplitude am(x), continuous and increasing, am(x + 2K) = am(x) + pi."""
    return jacobi_arrays(x, m)[3]
