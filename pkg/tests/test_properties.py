"""Property-based checks of the group action and the series engine."""

import cmath

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from symheun.core import CanonicalParams, SymmetricHeunParams, cross_ratio
from symheun.errors import DegeneratePoint, ZeroSingularPoint
from symheun.mobius import MobiusMap, apply_chain, decompose_to_generators
from symheun.series import taylor_coefficients

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


@st.composite
def mobius(draw):
    m = [draw(cplx) for _ in range(4)]
    det = m[0] * m[3] - m[1] * m[2]
    # well conditioned: |det| not small against the entries
    assume(abs(det) > 0.1 * max(1.0, max(abs(v) for v in m)) ** 2)
    return MobiusMap(*m)


@st.composite
def four_points(draw):
    z = [draw(cplx) for _ in range(4)]
    assume(min(abs(a - b) for i, a in enumerate(z) for b in z[i + 1:]) > 0.05)
    return z


@settings(max_examples=200, deadline=None)
@given(mobius(), four_points())
def test_cross_ratio_invariant(M, z):
    assume(min(abs(M.m21 * v + M.m22) for v in z) > 0.05)
    w = [M(v) for v in z]
    assume(max(abs(v) for v in w) < 1e3)
    a, b = cross_ratio(z), cross_ratio(w)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@settings(max_examples=200, deadline=None)
@given(mobius(), st.lists(cplx, min_size=3, max_size=3))
def test_decomposition_reproduces_map(M, probes):
    C = decompose_to_generators(M).compose()
    for z in probes:
        den = M.m21 * z + M.m22
        assume(abs(den) > 0.05)
        assert abs(C(z) - M(z)) <= 1e-9 * max(1.0, abs(M(z)))


phis = st.floats(0.2, 1.37)
chis = st.builds(complex, st.floats(0, 1.57), st.floats(-0.3, 0.3))


@settings(max_examples=40, deadline=None)
@given(phis, st.lists(chis, min_size=4, max_size=4), cplx, cplx, cplx)
def test_series_linear_in_initial_data(phi, chi, lam, a, b):
    p = CanonicalParams(phi, tuple(chi), lam)
    f1 = taylor_coefficients(p, (1, 0), 60).coeffs
    f2 = taylor_coefficients(p, (0, 1), 60).coeffs
    f = taylor_coefficients(p, (a, b), 60).coeffs
    assert np.max(np.abs(f - (a * f1 + b * f2)) / np.maximum(1.0, np.abs(f))) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(phis, st.lists(chis, min_size=4, max_size=4), cplx)
def test_canonical_points_are_roots_of_biquadratic(phi, chi, lam):
    p = CanonicalParams(phi, tuple(chi), lam)
    c2 = cmath.cos(2 * phi)
    for z in p.points.z:
        assert abs(z ** 4 - 2 * c2 * z ** 2 + 1) <= 1e-13


@st.composite
def symmetric(draw):
    z = draw(four_points())
    assume(min(abs(v) for v in z) > 0.1)
    chi = [draw(chis) for _ in range(4)]
    return SymmetricHeunParams(tuple(z), tuple(chi), draw(cplx))


@settings(max_examples=60, deadline=None)
@given(symmetric(), mobius(), mobius())
def test_decompositions_agree_on_q_and_lam(S, A, B):
    direct = decompose_to_generators(A @ B)
    split = decompose_to_generators(B) + decompose_to_generators(A)
    try:
        one = apply_chain(S, direct)
        two = apply_chain(S, split)
    except (ZeroSingularPoint, DegeneratePoint):
        assume(False)
    scale = max(1.0, *(abs(v) for v in one.points.z))
    assume(scale < 50)
    assert np.allclose(one.points.z, two.points.z, rtol=1e-9, atol=1e-9)
    assert np.allclose(one.q, two.q, rtol=1e-7, atol=1e-7 * max(1.0, np.max(np.abs(one.q))))
    assert abs(one.lam - two.lam) <= 1e-7 * max(1.0, abs(one.lam), float(np.max(np.abs(one.q))))
