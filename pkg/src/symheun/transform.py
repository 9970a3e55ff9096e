"""Reduction of the popular Heun form to the symmetric four-point form.

Two steps: a Möbius map sends the singular point at infinity to a finite
position (:func:`relocate_infinity`), then a multiplicative shift
``W = F * prod (w - w_j)^{nu_j}`` moves every exponent pair onto the
``alpha + beta = 1/2`` line (:func:`nu_transform`).  :func:`reduce_standard`
chains both with canonicalisation and keeps what is needed to map solutions
back and forth.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .core import (
    TOL_DEGENERATE,
    CanonicalParams,
    FuchsianParams,
    PointConfig,
    SymmetricHeunParams,
    chi_from_alpha,
    eval_P,
)
from .errors import BranchAmbiguity, CollidingPlacement, DegeneratePoint, ProbeFailure, ZeroSingularPoint
from .mobius import GeneratorChain, MobiusMap, canonicalize
from .odeint import RationalODE

PROBE_SEED = 20240611
RELOCATE_STEP = 0.31
RELOCATE_ATTEMPTS = 5


@dataclass(frozen=True)
class StandardHeunParams:
    """Popular form ``W'' + (g/z + d/(z-1) + e/(z-a)) W' + (al*be*z - lam)/(z(z-1)(z-a)) W = 0``."""

    a: complex
    gamma: complex
    delta: complex
    epsilon: complex
    alpha: complex
    beta: complex
    lam: complex

    def __post_init__(self):
        for name in ("a", "gamma", "delta", "epsilon", "alpha", "beta", "lam"):
            v = complex(getattr(self, name))
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        lhs = self.gamma + self.delta + self.epsilon
        rhs = self.alpha + self.beta + 1.0
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs), abs(rhs)):
            raise ValueError("gamma + delta + epsilon must equal alpha + beta + 1")
        if min(abs(self.a), abs(self.a - 1.0)) <= TOL_DEGENERATE * max(1.0, abs(self.a)):
            raise DegeneratePoint("a must differ from 0 and 1")

    @classmethod
    def from_exponents(cls, a, gamma, delta, alpha, beta, lam) -> "StandardHeunParams":
        """Fill ``epsilon`` from the Fuchs relation."""
        return cls(a, gamma, delta, alpha + beta + 1.0 - gamma - delta, alpha, beta, lam)

    @property
    def singular_points(self) -> tuple:
        return (0j, 1 + 0j, self.a)

    def ode_form(self) -> RationalODE:
        return RationalODE(
            (0j, 1 + 0j, self.a),
            (self.gamma, self.delta, self.epsilon),
            (-self.lam, self.alpha * self.beta),
            (0j, 1 + 0j, self.a),
            1.0,
        )

    def coefficients(self, z):
        return self.ode_form().coefficients(z)


@dataclass(frozen=True)
class NuShift:
    nu: tuple

    def __post_init__(self):
        nu = tuple(complex(v) for v in self.nu)
        if len(nu) != 4:
            raise ValueError("nu needs four entries")
        if abs(sum(nu)) > 1e-13 * max(1.0, sum(abs(v) for v in nu)):
            raise ValueError("nu shifts must sum to zero")
        object.__setattr__(self, "nu", nu)

    @property
    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.nu)


def _segment_clearance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    t = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(a + t * d - p)


@dataclass(frozen=True)
class Prefactor:
    """``g(w) = prod_j (w - w_j)^{nu_j}``, principal at ``anchor`` and continued along segments."""

    points: PointConfig
    nu: NuShift
    anchor: complex

    def __post_init__(self):
        if not isinstance(self.points, PointConfig):
            object.__setattr__(self, "points", PointConfig(self.points))
        if not isinstance(self.nu, NuShift):
            object.__setattr__(self, "nu", NuShift(self.nu))
        object.__setattr__(self, "anchor", complex(self.anchor))
        if np.min(np.abs(self.anchor - self.points.array)) <= TOL_DEGENERATE * self.points.scale:
            raise BranchAmbiguity("anchor sits on a singular point")

    def log_value(self, z, path=()) -> complex:
        """Continuous ``log g`` at ``z`` reached from the anchor via ``path`` waypoints."""
        z = complex(z)
        nodes = [self.anchor, *[complex(w) for w in path], z]
        zj = self.points.array
        eps = TOL_DEGENERATE * self.points.scale
        total = 0j
        for j in range(4):
            if self.nu.nu[j] == 0:
                continue
            acc = cmath.log(self.anchor - zj[j])
            for a, b in zip(nodes[:-1], nodes[1:]):
                if _segment_clearance(a, b, zj[j]) <= eps:
                    raise BranchAmbiguity("continuation segment passes through a singular point")
                # a segment missing z_j subtends less than pi, so the principal
                # argument of the ratio is the continuous increment
                acc += cmath.log((b - zj[j]) / (a - zj[j]))
            total += self.nu.nu[j] * acc
        return total

    def __call__(self, z, path=()) -> complex:
        return cmath.exp(self.log_value(z, path))

    def log_derivative(self, z):
        """``g'/g = sum nu_j / (z - z_j)``."""
        z = np.asarray(z, dtype=complex)
        return np.sum(np.array(self.nu.nu) / (z[..., None] - self.points.array), axis=-1)


def prefactor_eval(pf: Prefactor, z, path=()) -> complex:
    return pf(z, path)


def _probe_points(points: PointConfig, count: int = 5) -> np.ndarray:
    r = 0.5 * float(np.min(np.abs(points.array)))
    ang = np.random.default_rng(PROBE_SEED).uniform(0.0, 2.0 * np.pi, count)
    return r * np.exp(1j * ang)


def _accessory_from_probe(q_of_w, points: PointConfig, q_res, probes, tol):
    """Constant part of ``q(w) P(w) - sum q_j / (w - w_j)`` checked across probes."""
    P, _ = eval_P(points, probes)
    vals = q_of_w(probes) * P - np.sum(q_res / (probes[:, None] - points.array), axis=1)
    lam = complex(vals[0])
    scale = 1.0 + abs(lam) + float(np.max(np.abs(q_res))) / max(float(np.min(np.abs(probes[:, None] - points.array))), 1e-300)
    dev = float(np.max(np.abs(vals[1:] - lam))) / scale
    if dev > tol:
        raise ProbeFailure(f"accessory parameter depends on the probe point (spread {dev:.3g})")
    return lam


def relocate_infinity(std: StandardHeunParams, z_star: complex = -1.0, z_star2: complex = 2.0):
    """Send ``(0, 1, a, inf)`` to four finite points with ``M(z) = (z - z*)/(z - z**)``.

    Returns ``(FuchsianParams, MobiusMap)``.  The exponent pairs are carried
    over unchanged; ``lam`` of the result is read off the transformed
    equation at probe points.
    """
    sing = std.singular_points
    zs, zss = complex(z_star), complex(z_star2)
    tol = TOL_DEGENERATE * max(1.0, abs(std.a))
    for _ in range(RELOCATE_ATTEMPTS + 1):
        if min(abs(zs - s) for s in sing) > tol and min(abs(zss - s) for s in sing) > tol and abs(zs - zss) > tol:
            break
        zs += RELOCATE_STEP
        zss += RELOCATE_STEP
    else:
        raise CollidingPlacement("could not place the relocation anchors away from 0, 1, a")
    M = MobiusMap(1.0, -zs, 1.0, -zss)
    w = [M(s) for s in sing] + [1.0 + 0j]
    if min(abs(v) for v in w) <= TOL_DEGENERATE * max(1.0, max(abs(v) for v in w)):
        raise ZeroSingularPoint("a relocated singular point landed at the origin")
    pts = PointConfig(tuple(w))
    alpha = (0.0, 0.0, 0.0, std.alpha)
    beta = (1.0 - std.gamma, 1.0 - std.delta, 1.0 - std.epsilon, std.beta)
    Minv = M.inverse()
    form = std.ode_form()

    def q_w(wv):
        z = np.array([Minv(v) for v in wv])
        _, q = form.coefficients(z)
        return q / M.derivative(z) ** 2

    def p_w(wv):
        z = np.array([Minv(v) for v in wv])
        p, _ = form.coefficients(z)
        d1 = M.derivative(z)
        d2 = -2.0 * M.m21 * d1 / (M.m21 * z + M.m22)
        return p / d1 + d2 / d1**2

    probes = _probe_points(pts)
    A = 1.0 - np.array(alpha) - np.array(beta)
    p_expected = np.sum(A / (probes[:, None] - pts.array), axis=1)
    if np.max(np.abs(p_w(probes) - p_expected)) > 1e-10 * (1.0 + np.max(np.abs(p_expected))):
        raise ProbeFailure("relocated first-derivative coefficient is not of four-point form")
    draft = FuchsianParams(pts, alpha, beta, 0.0)
    lam = _accessory_from_probe(q_w, pts, draft.q, probes, 1e-10)
    return FuchsianParams(pts, alpha, beta, lam), M


def nu_shifts(fp: FuchsianParams) -> NuShift:
    s = np.array(fp.alpha) + np.array(fp.beta)
    nu = s / 2.0 - 0.25
    nu = nu - nu.sum() / 4.0  # absorb roundoff of the Fuchs sum
    return NuShift(tuple(nu))


def nu_transform(fp: FuchsianParams, anchor: complex | None = None):
    """Shift exponents to ``alpha_j + beta_j = 1/2``.

    Returns ``(SymmetricHeunParams, Prefactor)`` with ``W = Prefactor * F``.
    The prefactor is anchored at ``anchor`` (default: the origin, or a probe
    point if the origin is singular).
    """
    nu = nu_shifts(fp)
    pts = fp.points
    if anchor is None:
        anchor = 0j
        if np.min(np.abs(pts.array)) <= TOL_DEGENERATE * pts.scale:
            anchor = complex(0.5 * float(np.min(np.abs(pts.array[np.abs(pts.array) > 0]))))
    pf = Prefactor(pts, nu, anchor)
    a_hat = np.array(fp.alpha) - np.array(nu.nu)
    chi = tuple(chi_from_alpha(a) for a in a_hat)
    if nu.is_trivial:
        chi = tuple(chi_from_alpha(a) for a in fp.alpha)
        return SymmetricHeunParams(pts, chi, fp.lam), pf
    draft = SymmetricHeunParams(pts, chi, 0.0)
    nuv = np.array(nu.nu)
    A = fp.derivative_residues
    qf = fp.q

    def q_F(w):
        d = w[:, None] - pts.array
        P, _ = eval_P(pts, w)
        L = np.sum(nuv / d, axis=1)
        dL = -np.sum(nuv / d**2, axis=1)
        p = np.sum(A / d, axis=1)
        q = (fp.lam + np.sum(qf / d, axis=1)) / P
        return dL + L * L + p * L + q

    probes = _probe_points(pts)
    try:
        lam = _accessory_from_probe(q_F, pts, draft.q, probes, 1e-8)
    except ProbeFailure as err:
        raise ProbeFailure(f"nu-transform verification failed: {err}") from None
    return SymmetricHeunParams(pts, chi, lam), pf


@dataclass(frozen=True)
class StandardReduction:
    """Standard parameters carried through to canonical form, with the maps between frames.

    Frames: ``z`` (popular form), ``w = M(z)`` (four finite points),
    ``u = C(w)`` (canonical).  ``W(z) = g(w) F(u)``.
    """

    standard: StandardHeunParams
    relocation: MobiusMap
    fuchsian: FuchsianParams
    symmetric: SymmetricHeunParams
    prefactor: Prefactor
    canonical: CanonicalParams
    chain: GeneratorChain

    @property
    def to_canonical(self) -> MobiusMap:
        """Composite ``z -> u``."""
        return self.chain.compose() @ self.relocation

    def u_of_z(self, z):
        return self.to_canonical(z)

    def z_of_u(self, u):
        return self.to_canonical.inverse()(u)

    def canonical_init(self, W0: complex, dW0: complex) -> tuple[complex, complex]:
        """``(F(0), F'(0))`` in the canonical frame from ``(W, W')`` at ``z_of_u(0)``."""
        z0 = self.z_of_u(0.0)
        w0 = self.relocation(z0)
        g = self.prefactor(w0)
        L = complex(self.prefactor.log_derivative(w0))
        f0 = W0 / g
        dFw = dW0 / (g * self.relocation.derivative(z0)) - L * f0
        return f0, dFw / self.chain.compose().derivative(w0)

    def reconstruct(self, z, F: complex, dF: complex) -> tuple[complex, complex]:
        """``(W(z), W'(z))`` from canonical values ``F(u), F'(u)`` at ``u = u_of_z(z)``.

        The prefactor branch is continued along the straight ``w``-segment
        from the anchor, which is the principal continuation when both ends
        share a half-plane free of singular points.
        """
        w = self.relocation(z)
        g = self.prefactor(w)
        L = complex(self.prefactor.log_derivative(w))
        C = self.chain.compose()
        W = g * F
        dW = self.relocation.derivative(z) * g * (L * F + C.derivative(w) * dF)
        return W, dW


def reduce_standard(std: StandardHeunParams, **relocate_kw) -> StandardReduction:
    fp, M = relocate_infinity(std, **relocate_kw)
    sym, _ = nu_transform(fp)
    can, chain = canonicalize(sym)
    C0 = chain.compose()
    z0 = (C0 @ M).inverse()(0.0)
    pf = Prefactor(fp.points, nu_shifts(fp), M(z0))
    return StandardReduction(std, M, fp, sym, pf, can, chain)


__all__ = [
    "StandardHeunParams",
    "NuShift",
    "Prefactor",
    "StandardReduction",
    "relocate_infinity",
    "nu_shifts",
    "nu_transform",
    "prefactor_eval",
    "reduce_standard",
]
