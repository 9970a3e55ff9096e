import math

import numpy as np
import pytest

from symheun.core import CanonicalParams, SymmetricHeunParams
from symheun.evaluate import INNER, OUTER, CanonicalEvaluator, FrameEvaluator
from symheun.errors import ClearanceViolation
from symheun.odeint import OdeState, Path, integrate_path


@pytest.fixture(scope="module")
def params():
    return CanonicalParams(0.9, (0.4, 1.1 + 0.2j, 0.7, 0.3 - 0.1j), 0.6 - 0.3j)


def _direct(p, u, init=(1.0, 0.0)):
    """Integrate from the origin along a radial ray, detouring off the circle if needed."""
    th = np.angle(u)
    pts = p.points.array
    if min(abs(pts - np.exp(1j * th))) < 0.1:
        th += 0.15
    mid = 0.8 * np.exp(1j * th)
    path = Path.through([0.0, mid, u], p)
    return integrate_path(p, path, OdeState(0.0, *init), tol=1e-13)[-1]


@pytest.mark.parametrize("r", [0.3, 0.9, 1.0, 1.02, 1.1, 1.6, 3.0])
def test_regions_match_direct_integration(params, r):
    ev = CanonicalEvaluator(params)
    # angles in the middle of the arcs between neighbouring singular points
    ang = np.sort(np.mod(np.angle(params.points.array), 2 * math.pi))
    mids = 0.5 * (ang + np.roll(ang, -1) + np.array([0, 0, 0, 2 * math.pi]))
    u = r * np.exp(1j * mids)
    vals = ev.evaluate(u)
    for uk, v in zip(u, vals):
        st = _direct(params, uk)
        assert abs(v.F - st.F) <= 1e-9 * max(1.0, abs(st.F))
        assert abs(v.dF - st.dF) <= 1e-8 * max(1.0, abs(st.dF))
    expect = "taylor" if r <= INNER else "laurent" if r >= OUTER else "ode"
    assert {v.region for v in vals} == {expect}


def test_close_to_singular_point(params):
    z1 = params.points.z[0]
    u = z1 * (1 - 0.03)
    (v,) = CanonicalEvaluator(params).evaluate([u])
    st = _direct(params, u)
    assert v.region == "ode"
    assert abs(v.F - st.F) <= 1e-8 * abs(st.F)


def test_singular_point_itself_reported(params):
    (v,) = CanonicalEvaluator(params).evaluate([params.points.z[1]])
    assert isinstance(v, ClearanceViolation)


def test_symmetric_frame_is_pull_back(params):
    # a Mobius image of the canonical configuration; F is a pure pull-back
    a, b = 1.3 + 0.4j, -0.2 + 0.7j
    sym = SymmetricHeunParams(tuple(a * z + b for z in params.points.z), params.chi, params.lam * a ** -2)
    fe = FrameEvaluator(sym)
    z = [a * 0.2j + b, a * (0.5 - 0.1j) + b]
    rows = fe.evaluate(z)
    u = [fe.to_u(v) for v in z]
    ref = FrameEvaluator(fe.canonical).evaluate(u)
    for (_, v), (_, r) in zip(rows, ref):
        assert abs(v["F"] - r["F"]) <= 1e-11 * abs(r["F"])
        assert v["residual"] <= 1e-8


def test_parallel_matches_serial(params):
    rng = np.random.default_rng(4)
    z = 2.5 * (rng.uniform(-1, 1, 300) + 1j * rng.uniform(-1, 1, 300))
    a = FrameEvaluator(params).evaluate(z)
    b = FrameEvaluator(params).evaluate(z, workers=4, batch=32)
    for (za, va), (zb, vb) in zip(a, b):
        assert za == zb
        if isinstance(va, Exception):
            assert type(va) is type(vb)
        else:
            assert va == vb
