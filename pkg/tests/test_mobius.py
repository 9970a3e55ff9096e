import math

import numpy as np
import pytest

from symheun.core import (
    CanonicalParams,
    SymmetricHeunParams,
    canonical_points,
    cross_ratio,
    elementary_symmetric,
    is_circular,
    q_from_indices,
)
from symheun.errors import SingularMap
from symheun.mobius import (
    INF,
    Dilate,
    GeneratorChain,
    Invert,
    MobiusMap,
    Translate,
    act_generator,
    apply_chain,
    apply_map,
    canonicalize,
    decompose_to_generators,
    invert_canonical,
    invert_canonical_general,
    map_from_triples,
)
from symheun.odeint import OdeState, Path, integrate_path, residual_norm, second_derivative


def _sym(rng, scale=1.0):
    z = scale * (rng.normal(size=4) + 1j * rng.normal(size=4))
    chi = rng.uniform(0, 1.5, 4) + 0.2j * rng.normal(size=4)
    return SymmetricHeunParams(tuple(z), tuple(chi), complex(*rng.normal(size=2)))


def test_apply_map_basics():
    assert apply_map(MobiusMap.identity(), 3 - 2j) == 3 - 2j
    assert apply_map(MobiusMap(0, 1, 1, 0), 2) == 0.5
    assert apply_map(MobiusMap(1, 1, 0, 1), INF) == INF
    assert apply_map(MobiusMap(0, 1, 1, 0), 0) == INF
    with pytest.raises(SingularMap):
        MobiusMap(1, 2, 2, 4)


def test_map_from_triples():
    M = map_from_triples((0, 1, INF), (0, 1, INF))
    assert M.same_as(MobiusMap.identity())
    dst = canonical_points(math.pi / 3)[:3]
    M = map_from_triples((0, 1, INF), dst)
    got = [apply_map(M, v) for v in (0, 1, INF)]
    assert np.allclose(got, dst, atol=1e-13, rtol=0)
    rng = np.random.default_rng(5)
    for _ in range(50):
        src = rng.normal(size=4) + 1j * rng.normal(size=4)
        dst = rng.normal(size=3) + 1j * rng.normal(size=3)
        M = map_from_triples(src[:3], dst)
        w4 = apply_map(M, src[3])
        a, b = cross_ratio(src), cross_ratio([*dst, w4])
        assert abs(a - b) <= 1e-11 * abs(a)


def test_decompose():
    assert len(decompose_to_generators(MobiusMap.identity())) == 0
    assert decompose_to_generators(MobiusMap(0, 1, 1, 0)).steps == (Invert(),)
    rng = np.random.default_rng(6)
    for _ in range(100):
        M = MobiusMap(*(rng.normal(size=4) + 1j * rng.normal(size=4)))
        chain = decompose_to_generators(M)
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert np.allclose(chain.compose()(z), M(z), rtol=1e-12, atol=0)


def test_generator_laws():
    rng = np.random.default_rng(7)
    p = _sym(rng)
    t = act_generator(p, Translate(0.4 - 1j))
    assert np.allclose(t.points.array, p.points.array + 0.4 - 1j)
    assert np.allclose(t.q, p.q, rtol=1e-12) and t.lam == p.lam
    d = act_generator(p, Dilate(2))
    assert np.allclose(d.q, 8 * p.q, rtol=1e-12) and abs(d.lam - 4 * p.lam) < 1e-14
    back = act_generator(act_generator(p, Invert()), Invert())
    assert np.allclose(back.points.array, p.points.array, rtol=1e-13)
    assert np.allclose(back.q, p.q, rtol=1e-13)
    assert abs(back.lam - p.lam) <= 1e-13 * max(1, abs(p.lam))


def test_generators_preserve_q_constraint():
    rng = np.random.default_rng(8)
    gens = [lambda: Translate(complex(*rng.normal(size=2))), lambda: Dilate(complex(*rng.normal(size=2))),
            lambda: Invert()]
    for k in range(1000):
        p = _sym(rng)
        g = gens[k % 3]()
        out = act_generator(p, g)
        forced = q_from_indices(out.points, out.alpha, out.beta)
        assert np.max(np.abs(out.q - forced)) <= 1e-12 * np.max(np.abs(forced))


def test_canonicalize_canonical_input():
    p = CanonicalParams(0.6, (0.1, 0.2, 0.3, 0.4), 1 - 1j)
    can, chain = canonicalize(p)
    assert abs(can.phi - 0.6) < 1e-13
    assert abs(can.lam - p.lam) < 1e-12
    z = np.array([0.3, 2 - 1j, -0.5j])
    assert np.allclose(chain.compose()(z), z, atol=1e-12)


def test_canonicalize_real_points():
    p = SymmetricHeunParams((2, 3, 5, 7), (0.1, 0.2, 0.3, 0.4), 0.5)
    can, chain = canonicalize(p)
    assert abs(can.phi - math.asin(1 / math.sqrt(1.2))) < 1e-13
    assert abs(can.phi.imag) == 0
    img = chain.compose()(p.points.array)
    s = elementary_symmetric(img)
    assert max(abs(s[0]), abs(s[2]), abs(s[3] - 1)) <= 1e-12


def test_canonicalize_random_circular():
    rng = np.random.default_rng(9)
    for _ in range(50):
        c, r = complex(*rng.normal(size=2)), rng.uniform(0.5, 3)
        ang = np.sort(rng.uniform(0, 2 * math.pi, 4))
        z = c + r * np.exp(1j * ang)
        p = SymmetricHeunParams(tuple(z), tuple(rng.uniform(0, 1.5, 4)), complex(*rng.normal(size=2)))
        can, chain = canonicalize(p)
        img = chain.compose()(p.points.array)
        assert is_circular(tuple(img))
        assert np.allclose(np.abs(img), 1, atol=1e-12)
        assert abs(cross_ratio(img) - cross_ratio(z)) <= 1e-12 * abs(cross_ratio(z))
        assert np.allclose(img, canonical_points(can.phi), atol=1e-11)


def test_canonical_pullback_residual():
    # F o m^{-1} solves the canonical equation when F solves the original one
    rng = np.random.default_rng(10)
    for _ in range(10):
        p = _sym(rng)
        can, chain = canonicalize(p)
        m = chain.compose()
        u0 = 0.0
        z0 = complex(m.inverse()(u0))
        z1 = complex(m.inverse()(0.3 + 0.2j))
        st = integrate_path(p, Path.through([z0, z1], p), OdeState(z0, 1.0, 0.5), tol=1e-12)[-1]
        du = complex(m.derivative(z1))
        F, dF = st.F, st.dF / du
        u1 = complex(m(z1))
        ddF = second_derivative(can, u1, F, dF)
        # compare with a direct canonical integration for the same data
        st2 = integrate_path(can, Path.through([u0, u1], can),
                             OdeState(u0, 1.0, 0.5 / complex(m.derivative(z0))), tol=1e-12)[-1]
        assert abs(st2.F - F) <= 1e-8 * abs(F)
        assert residual_norm(can, F, dF, ddF, u1) <= 1e-8


def test_invert_canonical():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    back = invert_canonical(invert_canonical(p))
    assert abs(back.lam - p.lam) <= 1e-13 and np.allclose(back.chi, p.chi, atol=1e-13)
    a, b = invert_canonical(p), invert_canonical_general(p)
    assert abs(a.lam - b.lam) <= 1e-12 * abs(a.lam)
    z = CanonicalParams(0.7, (0, math.pi / 2, 0, 0), 2 - 1j)
    assert invert_canonical(z).lam == z.lam


def test_chain_inverse():
    rng = np.random.default_rng(11)
    chain = GeneratorChain((Translate(0.3), Invert(), Dilate(2 - 1j), Translate(-1j)))
    p = _sym(rng)
    back = apply_chain(apply_chain(p, chain), chain.inverse())
    assert np.allclose(back.points.array, p.points.array, rtol=1e-12)
    assert abs(back.lam - p.lam) <= 1e-11 * max(1, abs(p.lam))


def test_decompose_nearly_affine():
    for c in (1e-14, 1e-9, 1e-4):
        M = MobiusMap(1.2 + 0.3j, -0.7, c, 0.9 - 0.1j)
        chain = decompose_to_generators(M)
        z = np.array([0.3 + 0.2j, -1.1, 2j])
        assert np.allclose(chain.compose()(z), M(z), rtol=1e-13, atol=0)
