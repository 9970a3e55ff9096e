"""Evaluation of one canonical solution anywhere off the unit circle's singular points.

Region rule on ``|u|``: Taylor series up to 0.95, Laurent companion from 1.05
on, and integration from radius 0.8 in between.  Outside the circle the
solution depends on where the continuation crosses it; the crossing is
radial, so each arc between neighbouring singular points gets its own
connection coefficients onto the Laurent basis.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import CanonicalParams, FuchsianParams, SymmetricHeunParams
from .errors import ClearanceViolation, NumericalFailure, OutOfDomain
from .mobius import MobiusMap, canonicalize
from .odeint import Path, OdeState, integrate_path, residual_norm, second_derivative
from .series import RATIO_CAP, eval_series, laurent_to_tolerance, series_to_tolerance
from .transform import StandardHeunParams, nu_transform, reduce_standard

INNER = 0.95
OUTER = 1.05
START_RADIUS = 0.8
CONNECT_RADIUS = 1.25
RAY_CLEARANCE = 0.1
RAY_STEP = 0.07
RAY_TRIES = 5


def _crossing_angle(theta: float, points: np.ndarray, r0: float, target: complex | None):
    """Angle whose ray start ``r0 e^{i theta}`` keeps ``RAY_CLEARANCE`` (``+0.07`` steps).

    A ray ending at a ``target`` closer than that to a singular point only
    has to stay as clear as its end point allows.
    """
    need = RAY_CLEARANCE
    if target is not None:
        need = min(need, 0.9 * float(np.min(np.abs(points - target))))
    for k in range(RAY_TRIES + 1):
        th = theta + k * RAY_STEP
        a = r0 * cmath.exp(1j * th)
        b = target if target is not None else CONNECT_RADIUS * cmath.exp(1j * th)
        d = min(_seg_dist(a, b, p) for p in points)
        if d >= need:
            return th
    raise ClearanceViolation("no continuation ray clears the singular points")


def _seg_dist(a, b, p):
    d = b - a
    if d == 0:
        return abs(p - a)
    t = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(a + t * d - p)


@dataclass
class PointValue:
    F: complex
    dF: complex
    ddF: complex
    tail: float
    region: str


class CanonicalEvaluator:
    """Solution of canonical parameters with ``(F(0), F'(0)) = init``."""

    def __init__(self, params: CanonicalParams, init=(1.0, 0.0), tol: float = 1e-12,
                 max_terms: int = 20000, engine: str = "oracle"):
        self.params = params
        self.init = (complex(init[0]), complex(init[1]))
        self.tol = tol
        self.max_terms = max_terms
        self.engine = engine
        self.points = params.points.array
        self._taylor = None
        self._taylor_radius = 0.0
        self._laurent = None
        self._laurent_radius = math.inf
        self._sector_coeffs: dict[int, np.ndarray] = {}

    def taylor(self, radius: float):
        radius = max(radius, START_RADIUS)
        if self._taylor is None or radius > self._taylor_radius:
            self._taylor = series_to_tolerance(self.params, self.init, radius, self.tol, self.engine,
                                               N_max=self.max_terms)
            self._taylor_radius = radius
        return self._taylor

    def laurent(self, radius: float):
        radius = min(radius, CONNECT_RADIUS)
        if self._laurent is None or radius < self._laurent_radius:
            self._laurent = tuple(
                laurent_to_tolerance(self.params, b, radius, self.tol, self.engine) for b in ((1, 0), (0, 1))
            )
            self._laurent_radius = radius
        return self._laurent

    def _sector(self, theta: float) -> int:
        ang = np.sort(np.mod(np.angle(self.points), 2 * math.pi))
        t = math.fmod(theta, 2 * math.pi) % (2 * math.pi)
        return int(np.searchsorted(ang, t) % len(ang))

    def _connection(self, sector: int, radius: float) -> np.ndarray:
        if sector in self._sector_coeffs:
            return self._sector_coeffs[sector]
        ang = np.sort(np.mod(np.angle(self.points), 2 * math.pi))
        lo = ang[sector - 1] if sector > 0 else ang[-1] - 2 * math.pi
        mid = 0.5 * (lo + ang[sector])
        a = START_RADIUS * cmath.exp(1j * mid)
        b = CONNECT_RADIUS * cmath.exp(1j * mid)
        F0, dF0, _, _ = eval_series(self.taylor(START_RADIUS), a, ratio_cap=RATIO_CAP)
        st = integrate_path(self.params, Path.through([a, b], self.params, RAY_CLEARANCE * 0.999),
                            OdeState(a, F0, dF0), tol=min(self.tol, 1e-12))[-1]
        G = self.laurent(radius)
        vals = [eval_series(g, b, ratio_cap=RATIO_CAP) for g in G]
        M = np.array([[vals[0][0], vals[1][0]], [vals[0][1], vals[1][1]]])
        c = np.linalg.solve(M, np.array([st.F, st.dF]))
        self._sector_coeffs[sector] = c
        return c

    def prepare(self, u) -> None:
        """Build every shared expansion ``u`` needs, so later calls only read them."""
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        r = np.abs(u)
        if np.any(r < OUTER):
            self.taylor(float(np.max(r[r <= INNER], initial=START_RADIUS)))
        outer = r >= OUTER
        if np.any(outer):
            rad = float(np.min(r[outer]))
            self.laurent(rad)
            for v in u[outer]:
                try:
                    th = _crossing_angle(cmath.phase(v), self.points, START_RADIUS, None)
                    self._connection(self._sector(th), rad)
                except (NumericalFailure, ClearanceViolation):
                    pass  # reported per point by evaluate()

    def evaluate(self, u) -> list:
        """Values at every ``u``; entries are :class:`PointValue` or the raised exception."""
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        r = np.abs(u)
        inner = r <= INNER
        outer = r >= OUTER
        out: list = [None] * u.size
        if np.any(inner):
            sol = self.taylor(float(np.max(r[inner])))
            for k in np.flatnonzero(inner):
                try:
                    F, dF, ddF, tail = eval_series(sol, u[k], tol=self.tol, ratio_cap=RATIO_CAP)
                    out[k] = PointValue(F, dF, ddF, tail, "taylor")
                except NumericalFailure as err:
                    out[k] = err
        if np.any(outer):
            rad = float(np.min(r[outer]))
            for k in np.flatnonzero(outer):
                try:
                    th = _crossing_angle(cmath.phase(u[k]), self.points, START_RADIUS, None)
                    c = self._connection(self._sector(th), rad)
                    G = self.laurent(rad)
                    v = [eval_series(g, u[k], tol=self.tol, ratio_cap=RATIO_CAP) for g in G]
                    F = c[0] * v[0][0] + c[1] * v[1][0]
                    dF = c[0] * v[0][1] + c[1] * v[1][1]
                    ddF = c[0] * v[0][2] + c[1] * v[1][2]
                    tail = abs(c[0]) * v[0][3] + abs(c[1]) * v[1][3]
                    out[k] = PointValue(F, dF, ddF, tail, "laurent")
                except (NumericalFailure, ClearanceViolation) as err:
                    out[k] = err
        for k in np.flatnonzero(~inner & ~outer):
            try:
                th = _crossing_angle(cmath.phase(u[k]), self.points, START_RADIUS, u[k])
                a = START_RADIUS * cmath.exp(1j * th)
                F0, dF0, _, tail = eval_series(self.taylor(START_RADIUS), a, ratio_cap=RATIO_CAP)
                st = integrate_path(self.params, Path.through([a, u[k]], self.params),
                                    OdeState(a, F0, dF0), tol=min(self.tol, 1e-12))[-1]
                ddF = complex(second_derivative(self.params, u[k], st.F, st.dF))
                out[k] = PointValue(st.F, st.dF, ddF, tail, "ode")
            except (NumericalFailure, ClearanceViolation) as err:
                out[k] = err
        return out


class FrameEvaluator:
    """Evaluate in the frame of the input parameters.

    ``standard`` and ``fuchsian`` inputs return ``W`` (the unknown of the
    input equation); symmetric and canonical inputs return ``F``.  The
    residual is measured in the canonical frame.  ``init`` is always the
    canonical ``(F(0), F'(0))``.
    """

    def __init__(self, params, init=(1.0, 0.0), tol: float = 1e-12, max_terms: int = 20000,
                 engine: str = "oracle"):
        self.input = params
        self.reduction = None
        self.prefactor = None
        if isinstance(params, CanonicalParams):
            can, to_u = params, MobiusMap.identity()
        elif isinstance(params, SymmetricHeunParams):
            can, chain = canonicalize(params)
            to_u = chain.compose()
        elif isinstance(params, FuchsianParams):
            sym, self.prefactor = nu_transform(params)
            can, chain = canonicalize(sym)
            to_u = chain.compose()
        elif isinstance(params, StandardHeunParams):
            self.reduction = reduce_standard(params)
            can, to_u = self.reduction.canonical, self.reduction.to_canonical
        else:
            raise TypeError(f"unsupported parameters {type(params).__name__}")
        self.canonical = can
        self.to_u = to_u
        self.engine = CanonicalEvaluator(can, init, tol, max_terms, engine)

    def evaluate(self, z, workers: int = 1, batch: int = 64):
        """Rows ``(z, values)`` in input order; ``values`` is a dict or the raised exception.

        With ``workers > 1`` the points are split into batches evaluated by a
        thread pool after the shared expansions have been built once.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        u = np.array([self.to_u(v) for v in z])
        if workers > 1 and u.size > batch:
            self.engine.prepare(u)
            chunks = [u[k:k + batch] for k in range(0, u.size, batch)]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                vals = [v for part in pool.map(self.engine.evaluate, chunks) for v in part]
        else:
            vals = self.engine.evaluate(u)
        rows = []
        for zk, uk, v in zip(z, u, vals):
            if isinstance(v, Exception):
                rows.append((zk, v))
                continue
            res = residual_norm(self.canonical, v.F, v.dF, v.ddF, uk)
            if self.reduction is not None:
                W, dW = self.reduction.reconstruct(zk, v.F, v.dF)
            else:
                du = self.to_u.derivative(zk)
                W, dW = v.F, v.dF * du
                if self.prefactor is not None:
                    g = self.prefactor(zk)
                    L = complex(self.prefactor.log_derivative(zk))
                    W, dW = g * v.F, g * (L * v.F + dW)
            rows.append((zk, {"F": complex(W), "dF": complex(dW), "tail": v.tail, "residual": float(res),
                              "region": v.region}))
        return rows


__all__ = ["CanonicalEvaluator", "FrameEvaluator", "PointValue", "OutOfDomain"]
