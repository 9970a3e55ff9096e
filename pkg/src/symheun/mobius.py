"""Fractional-linear maps and their extended action on Heun parameters.

The group acts on the full tuple ``(z; z_1..z_4; q_1..q_4; lam)`` through
three generators:

* ``Translate(zeta)``: points shift, ``q`` and ``lam`` are unchanged;
* ``Dilate(t)``: points scale by ``t``, ``q -> t^3 q``, ``lam -> t^2 lam``;
* ``Invert()``: ``z -> 1/z``, ``q_j -> -q_j / (z_j^2 s4)``,
  ``lam -> (lam - sum_j q_j / z_j) / s4``.

A solution ``F`` of the source equation becomes ``F o g^{-1}`` for the image
parameters; no prefactor is involved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .core import (
    TOL_DEGENERATE,
    CanonicalParams,
    PointConfig,
    SymmetricHeunParams,
    canonical_points,
    cross_ratio,
    elementary_symmetric,
    phi_from_cross_ratio,
    q_from_indices,
    sum_q_over_z,
)
from .errors import DegeneratePoint, SingularMap, ZeroSingularPoint

INF = complex(math.inf, 0.0)


def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (m11 z + m12) / (m21 z + m22)``."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm = max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))
        if norm == 0 or abs(self.det) <= 1e-14 * norm * norm:
            raise SingularMap("Mobius map has vanishing determinant")

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __call__(self, z):
        return apply_map(self, z)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        # (self @ other)(z) == self(other(z))
        a = np.array([[self.m11, self.m12], [self.m21, self.m22]])
        b = np.array([[other.m11, other.m12], [other.m21, other.m22]])
        c = a @ b
        return MobiusMap(c[0, 0], c[0, 1], c[1, 0], c[1, 1])

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.m22, -self.m12, -self.m21, self.m11)

    def normalized(self) -> "MobiusMap":
        """Same projective map scaled to unit determinant."""
        s = cmath.sqrt(self.det)
        return MobiusMap(self.m11 / s, self.m12 / s, self.m21 / s, self.m22 / s)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return self.det / (self.m21 * z + self.m22) ** 2

    def same_as(self, other: "MobiusMap", tol: float = 1e-12) -> bool:
        """Projective equality of the matrices."""
        a = np.array([self.m11, self.m12, self.m21, self.m22])
        b = np.array([other.m11, other.m12, other.m21, other.m22])
        a = a / a[np.argmax(np.abs(a))]
        b = b / b[np.argmax(np.abs(a))]
        return bool(np.max(np.abs(a - b)) <= tol)


def apply_map(M: MobiusMap, z):
    """Evaluate ``M`` at ``z`` (scalar or array); ``INF`` is a valid input and output."""
    if np.ndim(z) == 0:
        z = complex(z)
        if is_inf(z):
            return INF if M.m21 == 0 else M.m11 / M.m21
        den = M.m21 * z + M.m22
        if den == 0:
            return INF
        return (M.m11 * z + M.m12) / den
    zz = np.asarray(z, dtype=complex)
    return np.array([apply_map(M, v) for v in zz.ravel()], dtype=complex).reshape(zz.shape)


def _to_standard(p1, p2, p3) -> MobiusMap:
    """Map sending ``(p1, p2, p3)`` to ``(0, 1, inf)``."""
    if is_inf(p1):
        return MobiusMap(0, p2 - p3, 1, -p3)
    if is_inf(p2):
        return MobiusMap(1, -p1, 1, -p3)
    if is_inf(p3):
        return MobiusMap(1, -p1, 0, p2 - p1)
    return MobiusMap(p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1))


def _check_triple(t):
    finite = [complex(v) for v in t if not is_inf(v)]
    if len(finite) < len(t) - 1:
        raise DegeneratePoint("triple contains infinity twice")
    scale = max([1.0] + [abs(v) for v in finite])
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if abs(finite[i] - finite[j]) <= TOL_DEGENERATE * scale:
                raise DegeneratePoint("triple has repeated entries")


def map_from_triples(src: Sequence[complex], dst: Sequence[complex]) -> MobiusMap:
    """Unique map with ``M(src[k]) == dst[k]`` for ``k = 0, 1, 2``."""
    _check_triple(src)
    _check_triple(dst)
    return (_to_standard(*dst).inverse() @ _to_standard(*src)).normalized()


@dataclass(frozen=True)
class Translate:
    zeta: complex

    def as_map(self) -> MobiusMap:
        return MobiusMap(1, self.zeta, 0, 1)


@dataclass(frozen=True)
class Dilate:
    t: complex

    def __post_init__(self):
        if complex(self.t) == 0:
            raise ValueError("dilatation factor must be nonzero")

    def as_map(self) -> MobiusMap:
        return MobiusMap(self.t, 0, 0, 1)


@dataclass(frozen=True)
class Invert:
    def as_map(self) -> MobiusMap:
        return MobiusMap(0, 1, 1, 0)


Generator = Union[Translate, Dilate, Invert]


@dataclass(frozen=True)
class GeneratorChain:
    """Generators applied in order: ``steps[0]`` acts first."""

    steps: tuple = ()

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def compose(self) -> MobiusMap:
        M = MobiusMap.identity()
        for g in self.steps:
            M = g.as_map() @ M
        return M

    def __add__(self, other: "GeneratorChain") -> "GeneratorChain":
        return GeneratorChain(tuple(self.steps) + tuple(other.steps))

    def inverse(self) -> "GeneratorChain":
        inv = []
        for g in reversed(self.steps):
            if isinstance(g, Translate):
                inv.append(Translate(-g.zeta))
            elif isinstance(g, Dilate):
                inv.append(Dilate(1.0 / g.t))
            else:
                inv.append(Invert())
        return GeneratorChain(tuple(inv))


def decompose_to_generators(M: MobiusMap, tol: float = 1e-15) -> GeneratorChain:
    """Write ``M`` as Translate -> Invert -> Dilate -> Translate (or Translate -> Dilate).

    When ``|m21|`` is small against ``|m11|`` (nearly affine maps) that chain
    cancels catastrophically, so Translate -> Invert -> Translate -> Invert ->
    Dilate is used instead.  Trivial steps (zero shift, unit dilatation) are
    dropped, so the identity gives an empty chain.
    """
    M = M.normalized()
    a, b, c, d = M.m11, M.m12, M.m21, M.m22
    steps: list = []
    if abs(c) <= tol * max(abs(a), abs(b), abs(d), 1.0):
        # M(z) = (a/d) (z + b/a)
        steps.append(Translate(b / a))
        steps.append(Dilate(a / d))
    elif abs(c) >= abs(a):
        # M(z) = a/c - 1 / (c^2 (z + d/c))
        steps.append(Translate(d / c))
        steps.append(Invert())
        steps.append(Dilate(-1.0 / (c * c)))
        steps.append(Translate(a / c))
    else:
        # M(z) = a^2 / (1/(z + b/a) + a c), using ad - bc = 1
        steps.append(Translate(b / a))
        steps.append(Invert())
        steps.append(Translate(a * c))
        steps.append(Invert())
        steps.append(Dilate(a * a))
    out = []
    for g in steps:
        if isinstance(g, Translate) and abs(g.zeta) <= tol:
            continue
        if isinstance(g, Dilate) and abs(g.t - 1.0) <= tol:
            continue
        out.append(g)
    return GeneratorChain(tuple(out))


def act_generator(params, g: Generator):
    """Push symmetric (or canonical) parameters through one generator.

    The exponents, hence ``chi``, are Mobius invariants; ``lam`` follows the
    generator's law and the transformed ``q`` is checked against both the law
    and ``alpha_j beta_j P'(z_j)`` at the new points.
    """
    if isinstance(params, CanonicalParams):
        params = params.to_symmetric()
    z = params.points.array
    q = params.q
    if isinstance(g, Translate):
        new_z = z + g.zeta
        new_q = q
        new_lam = params.lam
    elif isinstance(g, Dilate):
        new_z = z * g.t
        new_q = q * g.t**3
        new_lam = params.lam * g.t**2
    elif isinstance(g, Invert):
        s4 = params.points.sigma[3]
        new_z = 1.0 / z
        new_q = -q / (z * z * s4)
        new_lam = (params.lam - sum_q_over_z(params)) / s4
    else:
        raise TypeError(f"not a generator: {g!r}")
    scale = max(1.0, float(np.max(np.abs(new_z))))
    if np.any(np.abs(new_z) <= TOL_DEGENERATE * scale):
        raise ZeroSingularPoint(f"{g!r} moves a singular point to the origin")
    out = SymmetricHeunParams(PointConfig(new_z), params.chi, new_lam)
    a, b = out.alpha, out.beta
    forced = q_from_indices(out.points, a, b)
    qscale = max(1e-300, float(np.max(np.abs(forced))), float(np.max(np.abs(new_q))))
    if np.max(np.abs(forced - new_q)) > 1e-9 * qscale:
        raise ArithmeticError("transformed q violates q_j = alpha_j beta_j P'(z_j)")
    return out


def apply_chain(params, chain: GeneratorChain):
    for g in chain:
        params = act_generator(params, g)
    return params


def _canonical_chain(params: SymmetricHeunParams, phi: complex, pre_shift: complex):
    src = params.points.array + pre_shift
    dst = canonical_points(phi)
    M = map_from_triples(src[:3], dst[:3])
    w4 = apply_map(M, src[3])
    if abs(w4 - dst[3]) > 1e-9:
        raise ArithmeticError("fourth point misses its canonical target")
    chain = decompose_to_generators(M)
    if pre_shift != 0:
        chain = GeneratorChain((Translate(pre_shift),)) + chain
    return chain


def canonicalize(params, max_retries: int = 5):
    """Move the singular points onto ``e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}``.

    Labels keep their order: input point ``k`` becomes canonical point ``k``.
    Returns the canonical parameters and the generator chain realising the
    move.  When an intermediate step would put a point at the origin, a
    pre-translation by ``0.37 * scale`` (growing on each retry) is inserted.
    """
    if isinstance(params, CanonicalParams):
        params = params.to_symmetric()
    a = cross_ratio(params.points.z)
    phi = phi_from_cross_ratio(a)
    scale = params.points.scale
    last_err = None
    for attempt in range(max_retries + 1):
        shift = 0.0 if attempt == 0 else 0.37 * scale * (1.0 + 0.5 * (attempt - 1))
        try:
            chain = _canonical_chain(params, phi, shift)
            image = apply_chain(params, chain)
            break
        except ZeroSingularPoint as err:
            last_err = err
    else:
        raise last_err
    s1, s2, s3, s4 = elementary_symmetric(image.points.z)
    if max(abs(s1), abs(s3), abs(s4 - 1.0)) > 1e-9:
        raise ArithmeticError("canonical images violate the symmetric constraints")
    return CanonicalParams(phi, params.chi, image.lam), chain


def invert_canonical(params: CanonicalParams) -> CanonicalParams:
    """Inversion restricted to the canonical configuration.

    ``lam -> lam - (i/4) sin(2 phi) rho_2``; the images of the points are
    relabelled ``(1, 2, 3, 4) -> (4, 3, 2, 1)`` so the result is canonical
    again with the same ``phi``.
    """
    s = np.sin(2.0 * np.array(params.chi)) ** 2
    rho2 = (s[0] + s[2]) - (s[1] + s[3])
    lam = params.lam - 0.25j * params.sin2phi * rho2
    return CanonicalParams(params.phi, tuple(reversed(params.chi)), lam)


def invert_canonical_general(params: CanonicalParams) -> CanonicalParams:
    """Same result through the general inversion law (cross-check path)."""
    inv = act_generator(params, Invert())
    z = inv.points.z
    # images of (1,2,3,4) are canonical points (4,3,2,1)
    target = canonical_points(params.phi)
    if max(abs(z[k] - target[3 - k]) for k in range(4)) > 1e-12:
        raise ArithmeticError("inverted canonical points are not a relabelling")
    return CanonicalParams(params.phi, tuple(reversed(inv.chi)), inv.lam)
