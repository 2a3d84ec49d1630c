from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qesband import associated_lame, bdpoly
from qesband.elliptic import Modulus, jacobi_arrays
from qesband.eigenfunctions import descriptors_for
from qesband.liealg import assemble_hamiltonian
from qesband.potentials import CotFamily, PotentialSpec, TanFamily, canonicalize, eval_potential
from qesband.spectra import solve_spec

SETTINGS = settings(max_examples=25, deadline=None)

k2_rational = st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50), max_denominator=60)
k2_float = st.floats(min_value=0.02, max_value=0.98)
small_rational = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@SETTINGS
@given(k2_float, st.floats(min_value=-20, max_value=20))
def test_jacobi_identities(q, x):
    sn, cn, dn, _ = jacobi_arrays(np.array([x]), Modulus(q))
    assert_allclose(sn**2 + cn**2, 1.0, atol=1e-13)
    assert_allclose(dn**2 + q * sn**2, 1.0, atol=1e-13)


@SETTINGS
@given(small_rational, small_rational, k2_float)
def test_canonical_point_preserves_potential(m, l, q):
    cm, cl = canonicalize(m, l)
    assert cm >= -Fraction(1, 2) and cl >= -Fraction(1, 2)
    assert canonicalize(cm, cl) == (cm, cl)
    x = np.linspace(-1.3, 1.3, 17)
    original = eval_potential(associated_lame(m, l, q), x)
    direct = eval_potential(associated_lame(cm, cl, q), x)
    spec = associated_lame(cm, cl, q)
    swapped = eval_potential(spec, x + spec.K)
    scale = max(1.0, float(np.max(np.abs(original))))
    assert min(np.max(np.abs(direct - original)), np.max(np.abs(swapped - original))) <= 1e-9 * scale


@SETTINGS
@given(st.integers(0, 4), st.integers(0, 4), k2_rational)
def test_integer_points_have_2m_plus_1_levels(a, b, q):
    m, l = max(a, b), min(a, b)
    spec = solve_spec(associated_lame(m, l, q))
    assert len(spec.with_multiplicity()) == 2 * m + 1
    # tunnelling pairs can share a double; the sharpened roots stay ordered
    roots = [e.root for e in spec.entries]
    assert all(b > a for a, b in zip(roots, roots[1:]))


@SETTINGS
@given(st.sampled_from([7, 8]), st.integers(0, 6), k2_rational)
def test_roots_real_simple_and_match_matrix(cid, n, q):
    case = bdpoly.hatted_coefficients(cid, Modulus(q), n=n)
    spec = solve_spec(PotentialSpec((TanFamily if cid == 7 else CotFamily)(n), Modulus(q)))
    roots = spec.energies
    assert len(roots) == n + 1
    eig = assemble_hamiltonian(case).eigenvalues()
    assert_allclose(eig, roots, rtol=0, atol=1e-8 * max(1.0, float(np.max(np.abs(roots)))))


@SETTINGS
@given(st.integers(1, 3), st.sampled_from([Fraction(1, 2), Fraction(3, 2)]), k2_float)
def test_half_integer_states_are_bounded_and_paired(j, l, q):
    m = Fraction(2 * j + 1, 2)
    spec = solve_spec(associated_lame(m, l, q))
    assert all(e.degeneracy == 2 for e in spec.entries)
    x = np.linspace(-spec.spec.K, spec.spec.K, 129)
    for desc in descriptors_for(spec):
        vals = desc(x)
        assert np.all(np.isfinite(vals)) and np.max(np.abs(vals)) <= 1 + 1e-3


@SETTINGS
@given(st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8]), k2_rational)
def test_dual_derivation(cid, q):
    params = {1: dict(m=2, l=1), 2: dict(m=3, l=1), 3: dict(m=Fraction(5, 2), l=Fraction(1, 3)),
              4: dict(m=Fraction(5, 2), l=Fraction(1, 3)), 5: dict(m=Fraction(2, 3), l=Fraction(5, 2)),
              6: dict(m=Fraction(2, 3), l=Fraction(5, 2)), 7: dict(n=4), 8: dict(n=4)}[cid]
    case = bdpoly.hatted_coefficients(cid, Modulus(q), **params)
    table, derived = bdpoly.recursion_coefficients(case), bdpoly.recursion_from_hatted(case)
    assert table.lam == derived.lam and table.rho == derived.rho
