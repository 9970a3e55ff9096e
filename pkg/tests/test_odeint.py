import math

import numpy as np
import pytest

from conftest import random_circular
from symheun import kernels
from symheun.core import CanonicalParams, FuchsianParams, SymmetricHeunParams
from symheun.errors import ClearanceViolation, DegeneratePoint, StepUnderflow
from symheun.odeint import (
    OdeState,
    Path,
    RationalODE,
    integrate_path,
    linear_form,
    residual_norm,
    second_derivative,
    transport,
)
from symheun.series import eval_series, series_to_tolerance, sqrt_P

CONST = CanonicalParams(0.9, (0, 0, 0, 0), 0)


def test_constant_solution():
    path = Path.through([0, 0.5 + 0.5j, -0.3 + 0.9j, -2 + 0.1j], CONST)
    states = integrate_path(CONST, path, OdeState(0, 1, 0), tol=1e-10)
    assert all(abs(s.F - 1) <= 1e-10 and abs(s.dF) <= 1e-10 for s in states)
    assert residual_norm(CONST, 1.0, 0.0, 0.0, 0.3 + 0.2j) == 0


@pytest.mark.parametrize("seed", range(5))
def test_transport_matches_series(seed):
    p = random_circular(np.random.default_rng(100 + seed), 1)[0]
    sol = series_to_tolerance(p, (1, 0), 0.5, 1e-13)
    st = transport(p, 0.0, 1.0, 0.0, [0.5], tol=1e-12)
    assert abs(st.F - eval_series(sol, 0.5)[0]) <= 1e-8 * abs(st.F)


def test_path_reversal():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    tol = 1e-10
    wp = [0.1, 0.6 + 0.2j, 0.2 + 0.7j]
    fwd = integrate_path(p, Path.through(wp, p), OdeState(0.1, 1.0, -0.5j), tol=tol)[-1]
    back = integrate_path(p, Path.through(wp[::-1], p), OdeState(fwd.z, fwd.F, fwd.dF), tol=tol)[-1]
    assert abs(back.F - 1.0) <= 10 * tol and abs(back.dF + 0.5j) <= 10 * tol


def test_order_check():
    # halving tol must at least halve the error on a fixed problem set
    ps = random_circular(np.random.default_rng(15), 10)
    ref = [eval_series(series_to_tolerance(p, (1, 0), 0.5, 1e-14), 0.5)[0] for p in ps]

    def err(tol):
        return sum(abs(integrate_path(p, Path.through([0, 0.5], p), OdeState(0, 1, 0), tol=tol)[-1].F - r)
                   for p, r in zip(ps, ref))

    for tol in (1e-6, 1e-8):
        assert err(tol / 2) * 2 <= err(tol)


def test_wronskian_transport():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    tol = 1e-10
    path = Path.through([0, 0.3 + 0.3j, 0.7 - 0.1j, 0.2 - 0.6j], p)
    a = integrate_path(p, path, OdeState(0, 1, 0), tol=tol)
    b = integrate_path(p, path, OdeState(0, 0, 1), tol=tol)
    W = [sqrt_P(p, s.z) * (s.F * t.dF - t.F * s.dF) for s, t in zip(a, b)]
    assert max(abs(w - W[0]) for w in W) <= 100 * tol


def test_residual_detects_corruption():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    sol = series_to_tolerance(p, (1, 0), 0.8, 1e-13)
    z = 0.4 + 0.3j
    F, dF, ddF, _ = eval_series(sol, z)
    assert residual_norm(p, F, dF, ddF, z) <= 1e-12
    assert residual_norm(p, 1.01 * F, dF, ddF, z) > 1e-4
    with pytest.raises(DegeneratePoint):
        residual_norm(p, F, dF, ddF, p.points.z[0])


def test_second_derivative_consistent():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    sol = series_to_tolerance(p, (0.2, 1), 0.8, 1e-13)
    F, dF, ddF, _ = eval_series(sol, -0.2 + 0.5j)
    assert abs(second_derivative(p, -0.2 + 0.5j, F, dF) - ddF) <= 1e-11 * abs(ddF)


def test_linear_forms_agree():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    z = np.array([0.3 + 0.1j, -1.5j, 2.0])
    outs = [linear_form(x).coefficients(z) for x in (p, p.to_symmetric(), p.to_symmetric().to_fuchsian())]
    for pq in outs[1:]:
        assert np.allclose(pq[0], outs[0][0], rtol=1e-12) and np.allclose(pq[1], outs[0][1], rtol=1e-12)


def test_rational_ode_generic():
    # hypergeometric-like check: F'' + F = 0 has no singular points; exact solution cos
    ode = RationalODE((), (), (1.0,), (), 1.0)
    st = integrate_path(ode, Path.through([0, 2 + 1j], []), OdeState(0, 1, 0), tol=1e-12)[-1]
    assert abs(st.F - np.cos(2 + 1j)) <= 1e-10 * abs(st.F)


def test_clearance():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    z1 = p.points.z[0]
    with pytest.raises(ClearanceViolation):
        Path.through([0, 2 * z1], p, floor=0.05)
    assert Path.through([0, 0.5], p).clearance > 0.3


def test_step_underflow():
    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    z1 = p.points.z[0]
    with pytest.raises(StepUnderflow):
        integrate_path(p, Path.through([0.5 * z1, 2 * z1], p), OdeState(0.5 * z1, 1, 0), tol=1e-12)


def test_backend_parity():
    from symheun import _pykernels

    p = CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2 - 1j)
    form = linear_form(p)
    args = (np.array(form.spts), np.array(form.A), np.array(form.num), np.array(form.droots), form.lead,
            np.array([0, 0.4 + 0.3j, -0.2 + 0.6j]), 1.0, 0.5, 1e-11, 1e-13, 100000)
    a = kernels.integrate_polyline(*args)
    b = _pykernels.integrate_polyline(*args)
    assert np.allclose(a[0], b[0], rtol=1e-13) and a[2] == b[2]
    rows = np.random.default_rng(1).normal(size=(50, 9)) * 0.1 + 0j
    assert np.allclose(kernels.recurrence(rows, 1, 0.5, 49), _pykernels.recurrence(rows, 1, 0.5, 49), rtol=1e-13)
    c = np.random.default_rng(2).normal(size=30) + 0j
    w = np.array([0.3 + 0.2j, -0.5])
    for x, y in zip(kernels.horner_d2(c, w), _pykernels.horner_d2(c, w)):
        assert np.allclose(x, y, rtol=1e-13)


def test_shifted_form_same_solution(canonical):
    w = canonical.points.z[0]
    form = linear_form(canonical)
    path = [0.0, 0.3 + 0.2j, -0.2 + 0.5j]
    a = integrate_path(form, path, OdeState(0.0, 1.0, 0.5), tol=1e-12)
    b = integrate_path(form.shifted(w), [z - w for z in path], OdeState(-w, 1.0, 0.5), tol=1e-12)
    assert abs(b[-1].F - a[-1].F) <= 1e-10 * abs(a[-1].F)
    assert 0j in form.shifted(w).spts
