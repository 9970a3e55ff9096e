"""Complex parameter algebra for the symmetric four-point Heun equation.

The symmetric equation reads::

    F'' + 1/2 * sum_j F'/(z - z_j) + (lam + Q(z)) / P(z) * F = 0,
    P(z) = prod_j (z - z_j),   Q(z) = sum_j q_j / (z - z_j),

with exponents ``alpha_j = cos(chi_j)**2 / 2`` and ``beta_j = sin(chi_j)**2 / 2``
at every singular point, so that ``q_j = alpha_j * beta_j * P'(z_j)``.

All parameter records are frozen; derived quantities (symmetric functions,
accessory residues, trigonometric factors) are computed once at construction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateCrossRatio, DegeneratePoint, ZeroSingularPoint

TOL_DEGENERATE = 1e-10
FUCHS_TOL = 1e-12


def _as_complex_tuple(values, length, name):
    vals = tuple(complex(v) for v in values)
    if len(vals) != length:
        raise ValueError(f"{name} needs {length} entries, got {len(vals)}")
    for v in vals:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"{name} contains a non-finite value: {v!r}")
    return vals


def _finite(value, name):
    v = complex(value)
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise ValueError(f"{name} is not finite: {v!r}")
    return v


def elementary_symmetric(z: Sequence[complex]) -> tuple[complex, complex, complex, complex]:
    """Return ``(s1, s2, s3, s4)`` with ``prod(x - z_j) = x^4 - s1 x^3 + s2 x^2 - s3 x + s4``."""
    z1, z2, z3, z4 = (complex(v) for v in z)
    s1 = z1 + z2 + z3 + z4
    s2 = z1 * z2 + z1 * z3 + z1 * z4 + z2 * z3 + z2 * z4 + z3 * z4
    s3 = z1 * z2 * z3 + z1 * z2 * z4 + z1 * z3 * z4 + z2 * z3 * z4
    s4 = z1 * z2 * z3 * z4
    return s1, s2, s3, s4


def poly_from_sigma(sigma) -> np.ndarray:
    """Ascending coefficients of ``P`` built from its symmetric functions."""
    s1, s2, s3, s4 = sigma
    return np.array([s4, -s3, s2, -s1, 1.0], dtype=complex)


@dataclass(frozen=True)
class PointConfig:
    """Four finite, pairwise distinct, nonzero singular points."""

    z: tuple
    sigma: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        z = _as_complex_tuple(self.z, 4, "z")
        object.__setattr__(self, "z", z)
        scale = self.scale
        for i in range(4):
            for j in range(i + 1, 4):
                if abs(z[i] - z[j]) <= TOL_DEGENERATE * scale:
                    raise DegeneratePoint(f"singular points {i + 1} and {j + 1} coincide")
        for j, v in enumerate(z):
            if abs(v) <= TOL_DEGENERATE * scale:
                raise ZeroSingularPoint(f"singular point {j + 1} is at the origin")
        object.__setattr__(self, "sigma", elementary_symmetric(z))

    @property
    def scale(self) -> float:
        return max(1.0, max(abs(v) for v in self.z))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.z, dtype=complex)

    def dP_at_roots(self) -> np.ndarray:
        """``P'(z_j)`` as products of root differences."""
        z = self.z
        return np.array(
            [np.prod([z[j] - z[k] for k in range(4) if k != j]) for j in range(4)], dtype=complex
        )


def eval_P(points, z):
    """Return ``(P(z), P'(z))``.

    ``points`` is a :class:`PointConfig` or anything exposing ``.points``; for
    canonical parameters the biquadratic ``z^4 - 2 cos(2 phi) z^2 + 1`` is used.
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(points, CanonicalParams):
        c = points.cos2phi
        z2 = z * z
        return z2 * z2 - 2.0 * c * z2 + 1.0, 4.0 * z * (z2 - c)
    if not isinstance(points, PointConfig):
        points = points.points
    coeffs = poly_from_sigma(points.sigma)
    P = np.polynomial.polynomial.polyval(z, coeffs)
    dP = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(coeffs))
    return P, dP


def uniformize_indices(chi):
    """Exponents ``(alpha, beta) = (cos^2 chi / 2, sin^2 chi / 2)``; works on arrays."""
    if isinstance(chi, (complex, float, int)):
        return 0.5 * cmath.cos(chi) ** 2, 0.5 * cmath.sin(chi) ** 2
    chi = np.asarray(chi, dtype=complex)
    return 0.5 * np.cos(chi) ** 2, 0.5 * np.sin(chi) ** 2


def chi_from_alpha(alpha: complex) -> complex:
    """Principal ``chi`` with ``cos(chi)**2 / 2 == alpha``."""
    return cmath.acos(cmath.sqrt(2.0 * complex(alpha)))


def q_from_chi(points: PointConfig, chi) -> np.ndarray:
    """``q_j = sin(2 chi_j)^2 / 16 * prod_{k != j} (z_j - z_k)``."""
    s = np.sin(2.0 * np.asarray(chi, dtype=complex)) ** 2
    return s / 16.0 * points.dP_at_roots()


def q_from_indices(points: PointConfig, alpha, beta) -> np.ndarray:
    """``q_j = alpha_j beta_j P'(z_j)``, with ``P'`` from the expanded polynomial."""
    _, dP = eval_P(points, points.array)
    return np.asarray(alpha, dtype=complex) * np.asarray(beta, dtype=complex) * dP


@dataclass(frozen=True)
class FuchsianParams:
    """Four finite singular points with free exponents and accessory ``lam``."""

    points: PointConfig
    alpha: tuple
    beta: tuple
    lam: complex

    def __post_init__(self):
        if not isinstance(self.points, PointConfig):
            object.__setattr__(self, "points", PointConfig(self.points))
        object.__setattr__(self, "alpha", _as_complex_tuple(self.alpha, 4, "alpha"))
        object.__setattr__(self, "beta", _as_complex_tuple(self.beta, 4, "beta"))
        object.__setattr__(self, "lam", _finite(self.lam, "lam"))
        total = sum(self.alpha) + sum(self.beta)
        if abs(total - 2.0) > FUCHS_TOL * max(1.0, sum(abs(v) for v in self.alpha + self.beta)):
            raise ValueError(f"Fuchs relation violated: sum of exponents is {total}")

    @property
    def q(self) -> np.ndarray:
        return q_from_indices(self.points, self.alpha, self.beta)

    @property
    def derivative_residues(self) -> np.ndarray:
        return 1.0 - np.array(self.alpha) - np.array(self.beta)


@dataclass(frozen=True)
class SymmetricHeunParams:
    points: PointConfig
    chi: tuple
    lam: complex

    def __post_init__(self):
        if not isinstance(self.points, PointConfig):
            object.__setattr__(self, "points", PointConfig(self.points))
        object.__setattr__(self, "chi", _as_complex_tuple(self.chi, 4, "chi"))
        object.__setattr__(self, "lam", _finite(self.lam, "lam"))

    @property
    def alpha(self) -> np.ndarray:
        return uniformize_indices(self.chi)[0]

    @property
    def beta(self) -> np.ndarray:
        return uniformize_indices(self.chi)[1]

    @property
    def q(self) -> np.ndarray:
        return q_from_chi(self.points, self.chi)

    @property
    def derivative_residues(self) -> np.ndarray:
        return np.full(4, 0.5, dtype=complex)

    def to_fuchsian(self) -> FuchsianParams:
        a, b = uniformize_indices(self.chi)
        return FuchsianParams(self.points, a, b, self.lam)


def canonical_points(phi: complex) -> tuple:
    e = cmath.exp(1j * phi)
    return (e, -1.0 / e, -e, 1.0 / e)


@dataclass(frozen=True)
class CanonicalParams:
    """Parameters on the biquadratic configuration ``e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}``."""

    phi: complex
    chi: tuple
    lam: complex
    cos2phi: complex = field(init=False, repr=False, compare=False)
    sin2phi: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "phi", _finite(self.phi, "phi"))
        object.__setattr__(self, "chi", _as_complex_tuple(self.chi, 4, "chi"))
        object.__setattr__(self, "lam", _finite(self.lam, "lam"))
        object.__setattr__(self, "cos2phi", cmath.cos(2.0 * self.phi))
        object.__setattr__(self, "sin2phi", cmath.sin(2.0 * self.phi))
        if abs(self.sin2phi) <= TOL_DEGENERATE:
            raise DegeneratePoint("sin(2 phi) vanishes: canonical points collide")

    @property
    def points(self) -> PointConfig:
        return PointConfig(canonical_points(self.phi))

    @property
    def q(self) -> np.ndarray:
        return q_from_chi(self.points, self.chi)

    @property
    def alpha(self) -> np.ndarray:
        return uniformize_indices(self.chi)[0]

    @property
    def beta(self) -> np.ndarray:
        return uniformize_indices(self.chi)[1]

    @property
    def derivative_residues(self) -> np.ndarray:
        return np.full(4, 0.5, dtype=complex)

    def to_symmetric(self) -> SymmetricHeunParams:
        return SymmetricHeunParams(self.points, self.chi, self.lam)

    def with_lambda(self, lam: complex) -> "CanonicalParams":
        return CanonicalParams(self.phi, self.chi, lam)


def _points_of(params) -> PointConfig:
    return params if isinstance(params, PointConfig) else params.points


def accessory_Q(params, z):
    """``Q(z) = sum_j q_j / (z - z_j)`` for symmetric or canonical parameters."""
    pts = _points_of(params)
    zz = np.asarray(z, dtype=complex)
    zj = pts.array
    dist = np.abs(zz[..., None] - zj)
    if np.any(dist <= TOL_DEGENERATE * pts.scale):
        raise DegeneratePoint("Q evaluated on a singular point")
    out = np.sum(params.q / (zz[..., None] - zj), axis=-1)
    return complex(out) if out.ndim == 0 else out


def cross_ratio(z: Sequence[complex]) -> complex:
    """``a = (z1 - z3)(z2 - z4) / ((z2 - z3)(z1 - z4))``."""
    z1, z2, z3, z4 = (complex(v) for v in z)
    scale = max(1.0, abs(z1), abs(z2), abs(z3), abs(z4))
    for i, u in enumerate((z1, z2, z3, z4)):
        for j, v in enumerate((z1, z2, z3, z4)):
            if i < j and abs(u - v) <= TOL_DEGENERATE * scale:
                raise DegeneratePoint("cross ratio of coincident points")
    return (z1 - z3) * (z2 - z4) / ((z2 - z3) * (z1 - z4))


def is_circular(points, tol: float = 1e-9) -> bool:
    """True when the four points are concyclic (real cross ratio)."""
    z = _points_of(points).z if not isinstance(points, (list, tuple)) else points
    a = cross_ratio(z)
    return abs(a.imag) <= tol * (1.0 + abs(a))


def phi_from_cross_ratio(a: complex) -> complex:
    """Solve ``a = 1 / sin(phi)^2`` on the principal branch.

    The result has ``0 <= Re phi <= pi/2``.  On the edges (``Re phi`` equal to 0
    or pi/2, which happens for real ``a < 1``) the sign of ``Im phi`` is chosen
    nonnegative.  Circular quadruples given in cyclic order have ``a >= 1`` and
    hence a real ``phi``.
    """
    a = complex(a)
    if abs(a) <= TOL_DEGENERATE or abs(a - 1.0) <= TOL_DEGENERATE or not cmath.isfinite(a):
        raise DegenerateCrossRatio(f"cross ratio {a} is degenerate")
    phi = cmath.asin(1.0 / cmath.sqrt(a))
    if phi.real < 0 or (phi.real == 0 and phi.imag < 0):
        phi = -phi
    edge = 1e-14
    if abs(phi.real - math.pi / 2) <= edge or abs(phi.real) <= edge:
        phi = complex(phi.real, abs(phi.imag))
    return phi


def sum_q_over_z(params) -> complex:
    """``sum_j q_j / z_j`` computed termwise from the points."""
    return complex(np.sum(params.q / _points_of(params).array))
