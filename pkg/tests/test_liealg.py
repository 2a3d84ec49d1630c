from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from qesband import bdpoly
from qesband.elliptic import Modulus
from qesband.liealg import assemble_exact, assemble_hamiltonian, generators
from qesband.spectra import isolate_roots

H = Fraction(1, 2)


def bracket(a, b):
    return a.dot(b) - b.dot(a)


def test_trivial_generators():
    g = generators(0)
    for t in (g.t_plus, g.t_zero, g.t_minus):
        assert_array_equal(t, [[0.0]])
    assert_array_equal(generators(1).t_zero, np.diag([-0.5, 0.5]))


def test_generators_act_on_monomials():
    n = 4
    g = generators(n)
    # T+ xi^2 = (2 - n) xi^3, T- xi^2 = 2 xi
    e2 = np.eye(n + 1)[:, 2]
    assert_array_equal(g.t_plus.dot(e2), (2 - n) * np.eye(n + 1)[:, 3])
    assert_array_equal(g.t_minus.dot(e2), 2 * np.eye(n + 1)[:, 1])
    # xi^n is annihilated by T+, so the span is invariant
    assert_array_equal(g.t_plus[:, n], 0.0)


def doubled(t):
    # twice every entry is an integer, so the brackets are exact in int64
    out = np.array([[int(2 * v) for v in row] for row in t], dtype=np.int64)
    assert all(Fraction(int(a), 2) == v for a, v in zip(out.flat, t.flat))
    return out


def test_commutators_exact_up_to_50():
    for n in range(51):
        g = generators(n, exact=True)
        tp, t0, tm = doubled(g.t_plus), doubled(g.t_zero), doubled(g.t_minus)
        # scaled relations: [2A, 2B] = 4[A, B]
        assert not np.any(bracket(tp, tm) + 4 * t0)
        assert not np.any(bracket(t0, tp) - 2 * tp)
        assert not np.any(bracket(t0, tm) + 2 * tm)


def test_negative_spin_rejected():
    with pytest.raises(ValueError):
        generators(-1)


def test_one_by_one_matrices():
    m = Modulus(Fraction(2, 9))
    h5 = assemble_hamiltonian(bdpoly.hatted_coefficients(5, m, m=1, l=H))
    assert_allclose(h5.entries, [[(9 + 2 / 9) / 4]], rtol=1e-14)
    h1 = assemble_hamiltonian(bdpoly.hatted_coefficients(1, m, m=0, l=0))
    assert_allclose(h1.entries, [[0.0]], atol=1e-15)
    case7 = bdpoly.hatted_coefficients(7, m, n=0)
    assert assemble_exact(case7)[0, 0] == -2 * m.kp_sq


def test_half_integer_cases_use_rotated_basis():
    m = Modulus(0.4)
    assert assemble_hamiltonian(bdpoly.hatted_coefficients(1, m, m=2, l=1)).basis == "monomial"
    rotated = assemble_hamiltonian(bdpoly.hatted_coefficients(3, m, m=Fraction(5, 2), l=H))
    assert rotated.basis == "rotated" and rotated.entries.dtype == float


def test_modulus_mismatch():
    case = bdpoly.hatted_coefficients(7, Modulus(0.4), n=1)
    with pytest.raises(ValueError):
        assemble_hamiltonian(case, Modulus(0.5))


CASES = [
    (1, dict(m=3, l=1)), (2, dict(m=4, l=1)), (1, dict(m=Fraction(8, 3), l=Fraction(4, 3))),
    (3, dict(m=Fraction(7, 2), l=Fraction(3, 2))), (4, dict(m=Fraction(5, 2), l=Fraction(2, 5))),
    (5, dict(m=Fraction(4, 3), l=Fraction(7, 2))), (6, dict(m=2, l=Fraction(5, 2))),
    (7, dict(n=5)), (8, dict(n=6)),
]


@pytest.mark.parametrize("cid, params", CASES)
def test_eigenvalues_equal_critical_roots(cid, params):
    rng = np.random.default_rng(100 + cid)
    for a, b in zip(rng.integers(1, 80, 20), rng.integers(1, 80, 20)):
        case = bdpoly.hatted_coefficients(cid, Modulus(Fraction(int(a), int(a + b))), **params)
        eig = assemble_hamiltonian(case).eigenvalues()
        roots = isolate_roots(bdpoly.build(case))
        assert_allclose(eig, np.sort(roots), rtol=0, atol=1e-9 * max(1.0, np.max(np.abs(roots))))


@pytest.mark.parametrize("cid, params", [c for c in CASES if c[0] in (1, 2, 7, 8)])
def test_exact_matrix_matches_float(cid, params):
    case = bdpoly.hatted_coefficients(cid, Modulus(Fraction(3, 8)), **params)
    exact = np.array(assemble_exact(case), dtype=float)
    assert_allclose(assemble_hamiltonian(case).entries, exact, rtol=1e-13, atol=1e-13)
