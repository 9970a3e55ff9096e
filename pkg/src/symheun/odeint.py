"""Adaptive integration of second-order Fuchsian equations along complex polylines.

Every supported parameter record reduces to a :class:`RationalODE`::

    F'' + p(z) F' + q(z) F = 0,
    p(z) = sum_k A_k / (z - s_k),   q(z) = num(z) / (lead * prod_i (z - r_i)),

which is what the kernels integrate.  The denominator of ``q`` is kept in
factored form so that it stays accurate close to its roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .core import (
    TOL_DEGENERATE,
    CanonicalParams,
    FuchsianParams,
    SymmetricHeunParams,
    accessory_Q,
    eval_P,
)
from .errors import ClearanceViolation, DegeneratePoint, NotConverged, StepUnderflow

DEFAULT_TOL = 1e-10
CLEARANCE_FLOOR = 0.05


@dataclass(frozen=True)
class RationalODE:
    spts: tuple
    A: tuple
    num: tuple
    droots: tuple
    lead: complex = 1.0

    @property
    def singular_points(self) -> np.ndarray:
        return np.unique(np.array(self.spts + self.droots, dtype=complex))

    def coefficients(self, z):
        z = np.asarray(z, dtype=complex)
        p = np.zeros(z.shape, dtype=complex)
        for s, a in zip(self.spts, self.A):
            p = p + a / (z - s)
        nv = np.polynomial.polynomial.polyval(z, np.array(self.num, dtype=complex))
        dv = np.full(z.shape, complex(self.lead))
        for r in self.droots:
            dv = dv * (z - r)
        return p, nv / dv

    def ode_form(self) -> "RationalODE":
        return self

    def shifted(self, w: complex) -> "RationalODE":
        """The same equation in ``t = z - w``."""
        num = np.polynomial.Polynomial(np.array(self.num, dtype=complex))(np.polynomial.Polynomial([w, 1.0]))
        return RationalODE(tuple(s - w for s in self.spts), self.A, tuple(complex(c) for c in num.coef),
                           tuple(r - w for r in self.droots), self.lead)


def _four_point_form(points, A, q, lam) -> RationalODE:
    pp = np.polynomial.polynomial
    z = points.array
    P = np.array([1.0 + 0j])
    for zj in z:
        P = pp.polymul(P, [-zj, 1.0])
    num = lam * P
    for j in range(4):
        part = np.array([1.0 + 0j])
        for k in range(4):
            if k != j:
                part = pp.polymul(part, [-z[k], 1.0])
        num = pp.polyadd(num, q[j] * part)
    return RationalODE(tuple(z), tuple(complex(a) for a in A), tuple(num), tuple(z) + tuple(z), 1.0)


def linear_form(params) -> RationalODE:
    """Reduce any supported parameter record to a :class:`RationalODE`."""
    if isinstance(params, (CanonicalParams, SymmetricHeunParams, FuchsianParams)):
        return _four_point_form(params.points, params.derivative_residues, params.q, params.lam)
    if hasattr(params, "ode_form"):
        return params.ode_form()
    raise TypeError(f"cannot build an ODE from {type(params).__name__}")


@dataclass(frozen=True)
class OdeState:
    z: complex
    F: complex
    dF: complex


def _segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - p)


@dataclass(frozen=True)
class Path:
    """Polyline with its minimum distance to the singular set."""

    waypoints: tuple
    clearance: float

    @classmethod
    def through(cls, waypoints: Sequence[complex], singular, floor: float = 0.0) -> "Path":
        wp = tuple(complex(w) for w in waypoints)
        if len(wp) < 2:
            raise ValueError("a path needs at least two waypoints")
        if hasattr(singular, "ode_form") or not np.iterable(singular):
            singular = linear_form(singular).singular_points
        pts = [complex(s) for s in np.atleast_1d(singular)]
        clearance = min(
            _segment_distance(wp[i], wp[i + 1], s) for i in range(len(wp) - 1) for s in pts
        ) if pts else np.inf
        if clearance <= floor or clearance <= 0:
            raise ClearanceViolation(f"path passes within {clearance:.3g} of a singular point")
        return cls(wp, float(clearance))

    @property
    def length(self) -> float:
        w = self.waypoints
        return float(sum(abs(w[i + 1] - w[i]) for i in range(len(w) - 1)))


def integrate_path(
    params,
    path: Path,
    init: OdeState,
    tol: float = DEFAULT_TOL,
    hmin_rel: float = 1e-13,
    max_steps: int = 2_000_000,
) -> list[OdeState]:
    """Dormand-Prince 5(4) transport of ``(F, F')`` along ``path``.

    Returns one state per waypoint.  Raises :class:`StepUnderflow` when the
    required step drops below ``hmin_rel`` times the path length.
    """
    if not isinstance(path, Path):
        path = Path.through(path, params)
    if abs(complex(init.z) - path.waypoints[0]) > 1e-14 * max(1.0, abs(init.z)):
        raise ValueError("initial state must sit on the first waypoint")
    form = linear_form(params)
    F, dF, steps, status = kernels.integrate_polyline(
        np.array(form.spts, dtype=complex),
        np.array(form.A, dtype=complex),
        np.array(form.num, dtype=complex),
        np.array(form.droots, dtype=complex),
        complex(form.lead),
        np.array(path.waypoints, dtype=complex),
        complex(init.F),
        complex(init.dF),
        float(tol),
        float(hmin_rel),
        int(max_steps),
    )
    if status == kernels.STATUS_UNDERFLOW:
        raise StepUnderflow(f"step size underflow after {steps} steps (near-singular path?)")
    if status == kernels.STATUS_MAXSTEPS:
        raise NotConverged(f"integration exceeded {max_steps} steps")
    return [OdeState(z, f, g) for z, f, g in zip(path.waypoints, F, dF)]


def transport(params, z0, F0, dF0, waypoints, tol: float = DEFAULT_TOL, **kw) -> OdeState:
    """State at the last waypoint of the polyline ``z0 -> waypoints...``."""
    path = Path.through([z0, *waypoints], params)
    return integrate_path(params, path, OdeState(z0, F0, dF0), tol, **kw)[-1]


def second_derivative(params, z, F, dF):
    p, q = linear_form(params).coefficients(z)
    return -p * dF - q * F


def residual_norm(params, F, dF, ddF, z):
    """Scaled defect of ``(F, F', F'')`` at ``z``.

    For the four-point forms this is
    ``|P F'' + P sum_j A_j F'/(z - z_j) + (lam + Q) F| / (1 + |P F''| + |lam F|)``,
    which for the symmetric equation (``A_j = 1/2``) is
    ``|P F'' + P' F'/2 + (lam + Q) F| / (1 + |P F''| + |lam F|)``.
    Other forms use ``|F'' + p F' + q F| / (1 + |F''| + |q F|)``.
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(params, (CanonicalParams, SymmetricHeunParams, FuchsianParams)):
        pts = params.points
        if np.any(np.abs(z[..., None] - pts.array) <= TOL_DEGENERATE * pts.scale):
            raise DegeneratePoint("residual requested on a singular point")
        P, _ = eval_P(params if isinstance(params, CanonicalParams) else pts, z)
        Pp = P * np.sum(np.asarray(params.derivative_residues) / (z[..., None] - pts.array), axis=-1)
        Q = np.sum(params.q / (z[..., None] - pts.array), axis=-1)
        lam = params.lam
        res = np.abs(P * ddF + Pp * dF + (lam + Q) * F) / (1.0 + np.abs(P * ddF) + np.abs(lam * F))
    else:
        form = linear_form(params)
        sing = form.singular_points
        if np.any(np.abs(z[..., None] - sing) <= TOL_DEGENERATE * max(1.0, float(np.max(np.abs(sing))))):
            raise DegeneratePoint("residual requested on a singular point")
        p, q = form.coefficients(z)
        res = np.abs(ddF + p * dF + q * F) / (1.0 + np.abs(ddF) + np.abs(q * F))
    return float(res) if np.ndim(res) == 0 else res


__all__ = [
    "RationalODE",
    "OdeState",
    "Path",
    "integrate_path",
    "transport",
    "residual_norm",
    "second_derivative",
    "linear_form",
    "accessory_Q",
]
