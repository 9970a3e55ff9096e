"""Two-point singular boundary problems for the symmetric equation.

A solution is required to behave like ``(z - z_i)^{theta_i}`` at one end of
a contour and like ``(z - z_j)^{theta_j}`` at the other.  Admissible ``lam``
are zeros of the matching Wronskian

    D(lam) = P^{1/2} (F_L F_R' - F_R F_L'),

and eigenfunctions for distinct ``lam`` are orthogonal with respect to
``P^{-1/2} dz`` along the contour.

Local solutions at the ends use the full Frobenius series (not only the
leading power), so the detachment offset only enters through the accuracy of
the integrator.  For circular configurations with real ``chi`` a Möbius map
sending the contour onto ``[-1, 1]`` makes the problem real; :class:`RealFrame`
carries the affine relation between its accessory parameter ``mu`` and the
canonical ``lam``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import CanonicalParams, SymmetricHeunParams
from .errors import (
    BranchAmbiguity,
    ClearanceViolation,
    NoConvergence,
    QuadratureNotConverged,
    ReturnsFewer,
)
from .mobius import apply_chain, decompose_to_generators, map_from_triples
from .odeint import CLEARANCE_FLOOR, OdeState, Path, integrate_path, linear_form
from .quadrature import LEVEL_CAP, tanh_sinh_rule

SHOOT_TOL = 1e-12
EIGEN_DEFECT = 1e-8
MAX_ITER = 200
GRID_STEP = 0.01
UNMATCHED_TOL = 1e-8
# ODE tolerance for the unmatched far-end sweep (local error floor sits near roundoff there)
FAR_TOL = 1e-10


# ---------------------------------------------------------------- endpoints


@dataclass(frozen=True)
class EndpointData:
    """Boundary condition at singular point ``j`` (labels 1..4).

    ``exponent_choice`` is ``"alpha"``, ``"beta"`` or ``None`` (the exponent
    with the larger real part).  ``offset`` is the detachment distance used
    when shooting.
    """

    j: int
    exponent_choice: str | None = None
    offset: float = 1e-3
    n_terms: int | None = None

    def __post_init__(self):
        if self.j not in (1, 2, 3, 4):
            raise ValueError("singular index must be 1..4")
        if self.exponent_choice not in (None, "alpha", "beta"):
            raise ValueError("exponent_choice must be 'alpha', 'beta' or None")
        if not (1e-4 <= self.offset <= 1e-2):
            raise ValueError("offset must lie in [1e-4, 1e-2]")

    def exponent(self, params) -> complex:
        a = complex(params.alpha[self.j - 1])
        b = complex(params.beta[self.j - 1])
        if self.exponent_choice == "alpha":
            theta = a
        elif self.exponent_choice == "beta":
            theta = b
        else:
            theta = a if a.real >= b.real else b
        if theta.real < -0.25:
            raise ValueError("exponent makes F^2 P^{-1/2} non-integrable")
        return theta

    def halved(self) -> "EndpointData":
        return EndpointData(self.j, self.exponent_choice, max(self.offset / 2, 1e-4), self.n_terms)


@dataclass(frozen=True)
class EigenResult:
    lam: complex
    defect: float
    iterations: int
    mu: float | None = None
    eps_shift: float | None = None
    branch: complex | None = None


# ---------------------------------------------------------------- local series


class LocalSolution:
    """Frobenius solution ``(z - s)^theta * sum c_k (z - s)^k`` at a singular point."""

    def __init__(self, params, s: complex, theta: complex):
        self.form = linear_form(params)
        self.s = complex(s)
        self.theta = complex(theta)
        sing = self.form.singular_points
        others = sing[np.abs(sing - self.s) > 1e-12 * max(1.0, abs(self.s))]
        self.radius = float(np.min(np.abs(others - self.s)))
        self._a, self._b = self._local_coefficients(256)
        a0, b0 = self._a[0], self._b[0]
        ind = self.theta * (self.theta - 1) + a0 * self.theta + b0
        if abs(ind) > 1e-9 * (1 + abs(self.theta) ** 2 + abs(a0 * self.theta) + abs(b0)):
            raise ValueError("requested exponent is not a root of the indicial equation")
        self._c = np.array([1.0 + 0j])

    def _local_coefficients(self, K):
        """Taylor coefficients of ``t p(s+t)`` and ``t^2 q(s+t)``."""
        f, s = self.form, self.s
        tol = 1e-12 * max(1.0, abs(s))
        m = np.arange(1, K + 1)
        a = np.zeros(K + 1, dtype=complex)
        for sk, Ak in zip(f.spts, f.A):
            d = sk - s
            if abs(d) <= tol:
                a[0] += Ak
            else:
                a[1:] += -Ak / d**m
        num = np.array([0j])
        for c in reversed(f.num):
            num = np.polynomial.polynomial.polyadd(np.polynomial.polynomial.polymul(num, [s, 1.0]), [c])
        den = np.array([complex(f.lead)])
        hits = 0
        for r in f.droots:
            if abs(r - s) <= tol:
                hits += 1
            else:
                den = np.polynomial.polynomial.polymul(den, [s - r, 1.0])
        if hits > 2:
            raise ValueError("irregular singular point")
        num = np.concatenate([np.zeros(2 - hits, dtype=complex), num])
        b = np.zeros(K + 1, dtype=complex)
        nn = np.zeros(K + 1, dtype=complex)
        nn[: min(K + 1, num.size)] = num[: K + 1]
        for k in range(K + 1):
            acc = nn[k]
            for l in range(1, min(k, den.size - 1) + 1):
                acc -= den[l] * b[k - l]
            b[k] = acc / den[0]
        return a, b

    def _grow(self, K):
        c = self._c
        if c.size > K:
            return
        a, b, th = self._a, self._b, self.theta
        if K >= a.size:
            self._a, self._b = a, b = self._local_coefficients(2 * K)
        out = np.zeros(K + 1, dtype=complex)
        out[: c.size] = c
        for k in range(c.size, K + 1):
            j = np.arange(0, k)  # c_j with j = k - m
            rhs = -np.sum(out[:k] * (a[k - j] * (th + j) + b[k - j]))
            x = th + k
            out[k] = rhs / (x * (x - 1) + a[0] * x + b[0])
        self._c = out

    def terms_for(self, t_abs: float, n_terms: int | None = None) -> int:
        if n_terms is not None:
            return n_terms
        ratio = t_abs / self.radius
        if ratio >= 0.9:
            raise ValueError("local series evaluated too close to another singular point")
        if ratio <= 0:
            return 1
        return int(min(2000, max(8, math.ceil(math.log(1e-18) / math.log(ratio)) + 4)))

    def eval(self, t, n_terms: int | None = None):
        """``(F, F')`` at offsets ``t = z - s`` (array)."""
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        K = self.terms_for(float(np.max(np.abs(t))), n_terms)
        self._grow(K)
        c = self._c[: K + 1]
        S = np.zeros_like(t)
        dS = np.zeros_like(t)
        k = np.arange(K + 1)
        for kk in range(K, -1, -1):
            S = S * t + c[kk]
            dS = dS * t + (self.theta + kk) * c[kk]
        lt = np.log(t)
        pw = np.exp(self.theta * lt)
        return pw * S, pw * dS / t


# ---------------------------------------------------------------- contour geometry


class Contour:
    """Polyline from singular point ``z_i`` to singular point ``z_j``.

    Points on it are addressed as ``(segment, d0, d1)`` with ``d0``/``d1`` the
    distances to the segment ends, so offsets from the singular ends are exact.
    """

    def __init__(self, params, waypoints: Sequence[complex], floor: float = CLEARANCE_FLOOR):
        if isinstance(waypoints, Path):
            waypoints = waypoints.waypoints
        self.w = np.array([complex(v) for v in waypoints])
        if self.w.size < 2:
            raise ValueError("contour needs at least two waypoints")
        pts = params.points.array
        self.points = pts
        tol = 1e-9 * params.points.scale
        ia = np.flatnonzero(np.abs(pts - self.w[0]) <= tol)
        ib = np.flatnonzero(np.abs(pts - self.w[-1]) <= tol)
        if ia.size != 1 or ib.size != 1 or ia[0] == ib[0]:
            raise ValueError("contour must start and end on two distinct singular points")
        self.i, self.j = int(ia[0]) + 1, int(ib[0]) + 1
        self.w[0], self.w[-1] = pts[ia[0]], pts[ib[0]]
        self.L = np.abs(np.diff(self.w))
        if np.any(self.L == 0):
            raise ValueError("repeated waypoint")
        self.u = np.diff(self.w) / self.L
        self.cum = np.concatenate([[0.0], np.cumsum(self.L)])
        others = [p for k, p in enumerate(pts) if k + 1 not in (self.i, self.j)]
        clear = min(_seg_dist(self.w[k], self.w[k + 1], p) for k in range(self.L.size) for p in others)
        for p, skip in ((pts[self.i - 1], 0), (pts[self.j - 1], self.L.size - 1)):
            for k in range(self.L.size):
                if k != skip:
                    clear = min(clear, _seg_dist(self.w[k], self.w[k + 1], p))
        if clear <= floor:
            raise ClearanceViolation(f"contour passes within {clear:.3g} of a singular point")
        self.clearance = float(clear)
        self._log_base = self._continue_logs()
        self._branch_sign = self._fix_branch()

    @property
    def length(self) -> float:
        return float(self.cum[-1])

    def locate(self, s: float):
        k = int(np.clip(np.searchsorted(self.cum, s, side="right") - 1, 0, self.L.size - 1))
        return k, s - self.cum[k], self.cum[k + 1] - s

    def point(self, k, d0, d1):
        d0 = np.asarray(d0, dtype=float)
        d1 = np.asarray(d1, dtype=float)
        return np.where(d0 <= d1, self.w[k] + d0 * self.u[k], self.w[k + 1] - d1 * self.u[k])

    def at(self, s: float) -> complex:
        k, d0, d1 = self.locate(s)
        return complex(self.point(k, d0, d1))

    def _continue_logs(self):
        """Continuous ``log(z - z_m)`` at every waypoint, for every singular point."""
        nw = self.w.size
        base = np.zeros((nw, 4), dtype=complex)
        for m in range(4):
            zm = self.points[m]
            if m + 1 == self.i:
                base[1, m] = np.log(self.L[0]) + 1j * cmath.phase(self.u[0])
                start = 1
            else:
                base[0, m] = cmath.log(self.w[0] - zm)
                start = 0
            for k in range(start, nw - 1):
                if m + 1 == self.j and k == nw - 2:
                    base[k + 1, m] = np.nan
                    continue
                base[k + 1, m] = base[k, m] + cmath.log((self.w[k + 1] - zm) / (self.w[k] - zm))
        return base

    def log_factors(self, k, d0, d1):
        """Continuous ``log(z - z_m)`` for points on segment ``k`` (shape (n, 4))."""
        d0 = np.atleast_1d(np.asarray(d0, dtype=float))
        d1 = np.atleast_1d(np.asarray(d1, dtype=float))
        z = self.point(k, d0, d1)
        out = np.empty((z.size, 4), dtype=complex)
        last = self.L.size - 1
        for m in range(4):
            zm = self.points[m]
            if m + 1 == self.i and k == 0:
                out[:, m] = np.log(d0) + 1j * cmath.phase(self.u[0])
            elif m + 1 == self.j and k == last:
                # z - z_j = -d1 u; continue from the segment start
                ref = self.w[k] - zm
                out[:, m] = self._log_base[k, m] + np.log((-d1 * self.u[k]) / ref)
            else:
                out[:, m] = self._log_base[k, m] + np.log((z - zm) / (self.w[k] - zm))
        return out

    def _fix_branch(self) -> float:
        # principal P^{1/2} just after the start fixes the overall sign
        d0 = 1e-3 * self.L[0]
        lf = self.log_factors(0, d0, self.L[0] - d0)
        cont = np.exp(0.5 * np.sum(lf))
        z = self.point(0, d0, self.L[0] - d0)
        prin = np.sqrt(np.prod(z - self.points))
        return 1.0 if abs(cont - prin) <= abs(cont + prin) else -1.0

    def sqrt_P(self, k, d0, d1, power: float = 0.5):
        """``P^{power}`` (``power = +-1/2``) on the contour branch."""
        lf = self.log_factors(k, d0, d1)
        return self._branch_sign * np.exp(power * np.sum(lf, axis=1))

    def segment_between(self, s0: float, s1: float):
        """Waypoints from arclength ``s0`` to ``s1`` (either direction)."""
        inner = [self.w[k] for k in range(1, self.w.size - 1) if min(s0, s1) < self.cum[k] < max(s0, s1)]
        if s1 < s0:
            inner = inner[::-1]
        return [self.at(s0), *inner, self.at(s1)]


def _seg_dist(a, b, p):
    d = b - a
    t = min(1.0, max(0.0, ((p - a) * np.conj(d)).real / abs(d) ** 2))
    return abs(a + t * d - p)


# ---------------------------------------------------------------- shooting


def _as_params(params, lam):
    if isinstance(params, CanonicalParams):
        return params.with_lambda(lam)
    return SymmetricHeunParams(params.points, params.chi, lam)


def _check_endpoints(contour: Contour, endpoints):
    left, right = endpoints
    if (left.j, right.j) != (contour.i, contour.j):
        raise ValueError(f"endpoints {left.j},{right.j} do not match contour ends {contour.i},{contour.j}")


@dataclass
class _Shot:
    D: complex
    scaled: float
    FL: complex
    dFL: complex
    FR: complex
    dFR: complex
    sqrtP: complex
    z: complex


def _shoot(params, lam, contour: Contour, endpoints, match: float = 0.5, tol: float = SHOOT_TOL,
           scale=(1.0, 1.0)) -> _Shot:
    p = _as_params(params, lam)
    left, right = endpoints
    locL = LocalSolution(p, contour.w[0], left.exponent(p))
    locR = LocalSolution(p, contour.w[-1], right.exponent(p))
    sm = match * contour.length
    epsL, epsR = left.offset, right.offset
    if not (epsL < sm < contour.length - epsR):
        raise ValueError("matching point must lie between the detachment points")
    FL0, dFL0 = locL.eval(epsL * contour.u[0], left.n_terms)
    FR0, dFR0 = locR.eval(-epsR * contour.u[-1], right.n_terms)
    wl = contour.segment_between(epsL, sm)
    wr = contour.segment_between(contour.length - epsR, sm)
    sl = integrate_path(p, Path(tuple(wl), contour.clearance), OdeState(wl[0], scale[0] * FL0[0], scale[0] * dFL0[0]), tol)[-1]
    sr = integrate_path(p, Path(tuple(wr), contour.clearance), OdeState(wr[0], scale[1] * FR0[0], scale[1] * dFR0[0]), tol)[-1]
    k, d0, d1 = contour.locate(sm)
    sP = complex(contour.sqrt_P(k, d0, d1)[0])
    D = sP * (sl.F * sr.dF - sr.F * sl.dF)
    denom = abs(sP) * (abs(sl.F * sr.dF) + abs(sr.F * sl.dF))
    return _Shot(D, abs(D) / denom if denom > 0 else math.inf, sl.F, sl.dF, sr.F, sr.dF, sP, sl.z)


def shoot_defect(params, lam, contour, endpoints, match: float = 0.5, tol: float = SHOOT_TOL,
                 scale=(1.0, 1.0)) -> complex:
    """Matching Wronskian ``P^{1/2}(F_L F_R' - F_R F_L')`` at arclength fraction ``match``.

    ``F_L`` and ``F_R`` are normalised to leading coefficient 1 at their
    singular points (times ``scale``).  ``contour`` is a :class:`Contour` or a
    waypoint sequence ``(z_i, ..., z_j)``.
    """
    if not isinstance(contour, Contour):
        contour = Contour(params, contour)
    _check_endpoints(contour, endpoints)
    return _shoot(params, lam, contour, endpoints, match, tol, scale).D


def scaled_defect(params, lam, contour, endpoints, match: float = 0.5, tol: float = SHOOT_TOL) -> float:
    """``|D| / (|P^{1/2}| (|F_L F_R'| + |F_R F_L'|))``: scale-free boundary residual."""
    if not isinstance(contour, Contour):
        contour = Contour(params, contour)
    _check_endpoints(contour, endpoints)
    return _shoot(params, lam, contour, endpoints, match, tol).scaled


# ---------------------------------------------------------------- real frame


@dataclass(frozen=True)
class RealFrame:
    """Möbius frame sending contour ends to ``-1, 1`` and the circle to the real line.

    ``mu = scale * lam + shift`` is the accessory parameter there.
    """

    scale: complex
    shift: complex
    params: SymmetricHeunParams = field(repr=False)

    def lam(self, mu):
        return (np.asarray(mu) - self.shift) / self.scale

    def mu(self, lam):
        return self.scale * np.asarray(lam) + self.shift


def real_line_frame(params: CanonicalParams, contour) -> RealFrame:
    if not isinstance(contour, Contour):
        contour = Contour(params, contour)
    mid = contour.at(0.5 * contour.length)
    if abs(mid) == 0:
        raise ValueError("contour midpoint at the origin")
    c = mid / abs(mid)
    T = map_from_triples((contour.w[0], c, contour.w[-1]), (-1.0, 0.0, 1.0))
    chain = decompose_to_generators(T)
    base = _as_params(params, 0.0)
    sym0 = apply_chain(base.to_symmetric() if isinstance(base, CanonicalParams) else base, chain)
    sym1 = apply_chain(_as_params(params, 1.0).to_symmetric() if isinstance(params, CanonicalParams)
                       else _as_params(params, 1.0), chain)
    shift = sym0.lam
    scale = sym1.lam - sym0.lam
    return RealFrame(complex(scale), complex(shift), sym0)


# ---------------------------------------------------------------- regions and root finding


@dataclass(frozen=True)
class Interval:
    """Real interval ``[lo, hi]`` of ``mu`` (``lam`` itself when ``frame`` is None)."""

    lo: float
    hi: float
    frame: RealFrame | None = None
    step: float = 0.1

    def lam(self, mu):
        return mu if self.frame is None else self.frame.lam(mu)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, lam) -> bool:
        return abs(lam - self.center) <= self.radius * (1 + 1e-12)


def scan_defect(params, contour, endpoints, region: Interval, step: float = GRID_STEP):
    """Defect on a grid of ``region``; returns ``(mu, D, psi, brackets)``.

    ``D`` is rotated by the common phase ``psi = arg(sum D^2)/2`` so that it
    is real in a real setup; brackets are the grid cells where it changes sign.
    """
    if not isinstance(contour, Contour):
        contour = Contour(params, contour)
    _check_endpoints(contour, endpoints)
    n = int(round((region.hi - region.lo) / step))
    mu = region.lo + step * np.arange(n + 1)
    D = np.array([_shoot(params, region.lam(m), contour, endpoints).D for m in mu])
    psi = 0.5 * cmath.phase(np.sum(D * D))
    r = D * cmath.exp(-1j * psi)
    re = r.real
    brackets = [(mu[k], mu[k + 1]) for k in range(n) if re[k] == 0 or re[k] * re[k + 1] < 0]
    return mu, r, psi, brackets


def _secant(g, x0, x1, max_iter=MAX_ITER, xtol=1e-14):
    g0, g1 = g(x0), g(x1)
    for it in range(1, max_iter + 1):
        if g1 == 0:
            return x1, it
        if g1 == g0:
            x2 = x1 + 1e-7 * max(1.0, abs(x1))
        else:
            x2 = x1 - g1 * (x1 - x0) / (g1 - g0)
        if not cmath.isfinite(x2):
            break
        x0, g0 = x1, g1
        x1, g1 = x2, g(x2)
        if abs(x1 - x0) <= xtol * max(1.0, abs(x1)):
            return x1, it
    raise NoConvergence(f"secant iteration did not converge in {max_iter} steps")


def _illinois(f, a, b, fa, fb, max_iter=MAX_ITER, xtol=1e-14):
    """Bracketed secant (Illinois variant) for a real function."""
    side = 0
    for it in range(1, max_iter + 1):
        c = (a * fb - b * fa) / (fb - fa)
        fc = f(c)
        if fc == 0 or abs(b - a) <= xtol * max(1.0, abs(c)):
            return c, it
        if fc * fb < 0:
            a, fa = b, fb
            b, fb = c, fc
            side = 0
        else:
            b, fb = c, fc
            fa *= 0.5 if side == 1 else 1.0
            side = 1
        if abs(b - a) <= xtol * max(1.0, abs(b)):
            return b, it
    raise NoConvergence(f"bracketed secant did not converge in {max_iter} steps")


def _refine(params, contour, endpoints, lam0, lam1, found, tol):
    def g(lam):
        d = _shoot(params, lam, contour, endpoints, tol=tol).D
        for r in found:
            d /= lam - r
        return d

    return _secant(g, lam0, lam1)


def _offset_shift(params, contour, endpoints, lam, tol):
    halved = (endpoints[0].halved(), endpoints[1].halved())
    lam2, _ = _refine(params, contour, halved, lam, lam * (1 + 1e-7) + 1e-9, [], tol)
    return abs(lam2 - lam) / max(1.0, abs(lam))


def find_eigenvalues(params, contour, endpoints, region, count: int, tol: float = SHOOT_TOL,
                     check_offset: bool = True) -> list[EigenResult]:
    """Zeros of the matching Wronskian inside ``region``.

    For an :class:`Interval` the defect is pre-scanned on the region's grid,
    sign changes are refined by a bracketed secant and polished by complex
    secant steps.  For a :class:`Disk` a complex secant is started from
    deterministic seeds with deflation of the roots already found.  Each
    result is re-solved with halved detachment offsets; ``eps_shift`` is the
    relative change, which must stay below 1e-6.
    """
    if not isinstance(contour, Contour):
        contour = Contour(params, contour)
    _check_endpoints(contour, endpoints)
    found: list[EigenResult] = []
    if isinstance(region, Interval):
        mu, r, psi, brackets = scan_defect(params, contour, endpoints, region, region.step)
        rot = cmath.exp(-1j * psi)

        def f(m):
            return (_shoot(params, region.lam(m), contour, endpoints, tol=tol).D * rot).real

        for a, b in brackets:
            if len(found) == count:
                break
            fa, fb = f(a), f(b)
            if fa == 0:
                m, it = a, 0
            elif fb == 0:
                m, it = b, 0
            else:
                m, it = _illinois(f, a, b, fa, fb)
            lam = complex(region.lam(m))
            found.append(_finish(params, contour, endpoints, lam, it, tol, check_offset, region))
    else:
        seeds = [region.center + region.radius * 0.5 * cmath.exp(2j * math.pi * k / 7) * (k % 3 + 1) / 3
                 for k in range(4 * count + 4)]
        roots: list[complex] = []
        for s in seeds:
            if len(found) == count:
                break
            try:
                lam, it = _refine(params, contour, endpoints, s, s + 0.01 * region.radius, roots, tol)
            except NoConvergence:
                continue
            if not region.contains(lam) or any(abs(lam - r) <= 1e-8 * max(1, abs(r)) for r in roots):
                continue
            roots.append(lam)
            found.append(_finish(params, contour, endpoints, lam, it, tol, check_offset, region))
    if len(found) < count:
        raise ReturnsFewer(f"found {len(found)} of {count} eigenvalues in the region", found)
    return found


def _finish(params, contour, endpoints, lam, it, tol, check_offset, region):
    # polish off the grid line with the complex secant
    lam, it2 = _refine(params, contour, endpoints, lam, lam * (1 + 1e-9) + 1e-12, [], tol)
    shot = _shoot(params, lam, contour, endpoints, tol=tol)
    if shot.scaled > EIGEN_DEFECT:
        raise NoConvergence(f"eigenvalue {lam} has defect {shot.scaled:.3g}")
    shift = _offset_shift(params, contour, endpoints, lam, tol) if check_offset else None
    if shift is not None and shift > 1e-6:
        raise NoConvergence(f"eigenvalue {lam} moves by {shift:.3g} when the offset is halved")
    mu = None
    if isinstance(region, Interval) and region.frame is not None:
        mu = float(region.frame.mu(lam).real)
    return EigenResult(lam, shot.scaled, it + it2, mu, shift, shot.sqrtP)


# ---------------------------------------------------------------- orthogonality


class _ContourFunction:
    """Values of the left-normalised solution at arbitrary contour nodes.

    Nodes near the start use the local series there; interior nodes are
    reached by one integration sweep.  Near the far end the solution is
    replaced by the matched local series when ``lam`` is an eigenvalue, and
    otherwise integrated up to ``cut`` from the end (closer nodes dropped).
    """

    def __init__(self, params, lam, contour: Contour, endpoints, tol=SHOOT_TOL, eigen_tol=1e-6, cut=1e-9):
        self.p = _as_params(params, lam)
        self.c = contour
        left, right = endpoints
        self.locL = LocalSolution(self.p, contour.w[0], left.exponent(self.p))
        self.locR = LocalSolution(self.p, contour.w[-1], right.exponent(self.p))
        self.rL = min(0.4 * self.locL.radius, 0.9 * contour.L[0])
        self.rR = min(0.4 * self.locR.radius, 0.9 * contour.L[-1])
        if self.rL + self.rR >= contour.length:
            self.rR = 0.45 * contour.length
            self.rL = min(self.rL, 0.45 * contour.length)
        self.tol = tol
        self.cut = cut * contour.length
        shot = _shoot(params, lam, contour, endpoints, tol=tol)
        self.matched = shot.scaled <= eigen_tol
        self.scaled_defect = shot.scaled

    def values(self, nodes):
        """``nodes``: list of ``(segment, d0, d1)`` arrays; returns F per node (nan if dropped)."""
        c = self.c
        last = c.L.size - 1
        seg = np.concatenate([np.full(d0.size, k) for k, d0, _ in nodes])
        d0 = np.concatenate([n[1] for n in nodes])
        d1 = np.concatenate([n[2] for n in nodes])
        s = c.cum[seg] + d0
        tail = c.length - s
        tail = np.where(seg == last, d1, tail)
        head = np.where(seg == 0, d0, s)
        F = np.full(s.size, np.nan, dtype=complex)
        inL = head <= self.rL
        if np.any(inL):
            F[inL] = self.locL.eval(head[inL] * c.u[0])[0]
        inR = (tail <= self.rR) & ~inL
        mid = ~inL & ~inR
        t0 = self.rL
        F0, dF0 = self.locL.eval(np.array([t0 * c.u[0]]))
        s_end = c.length - self.rR
        order = np.flatnonzero(mid)
        marks = [(t0, c.at(t0), -1)]
        marks += [(s[i], complex(c.point(seg[i], d0[i], d1[i])), i) for i in order]
        marks.append((s_end, c.at(s_end), -2))
        end_state = self._sweep(F, marks, OdeState(marks[0][1], F0[0], dF0[0]), self.p, self.tol)
        if not np.any(inR):
            return F
        if self.matched:
            tR = np.where(seg[inR] == last, -d1[inR] * c.u[last], c.point(seg[inR], d0[inR], d1[inR]) - c.w[-1])
            GR, _ = self.locR.eval(tR)
            zb = c.at(s_end)
            G0, dG0 = self.locR.eval(np.array([zb - c.w[-1]]))
            num = end_state.F * np.conj(G0[0]) + end_state.dF * np.conj(dG0[0])
            kappa = num / (abs(G0[0]) ** 2 + abs(dG0[0]) ** 2)
            F[inR] = kappa * GR
            return F
        # unmatched: keep integrating, in coordinates centred on the far end so
        # that the distance to it keeps full relative precision
        far = np.flatnonzero(inR & (tail > self.cut))
        if far.size == 0:
            return F
        w = c.w[-1]
        shifted = linear_form(self.p).shifted(w)
        t = np.where(seg[far] == last, -d1[far] * c.u[last], c.point(seg[far], d0[far], d1[far]) - w)
        marks = [(s_end, c.at(s_end) - w, -1)]
        marks += [(s[i], complex(ti), i) for i, ti in zip(far, t)]
        init = OdeState(marks[0][1], end_state.F, end_state.dF)
        self._sweep(F, marks, init, shifted, max(self.tol, FAR_TOL), shift=w)
        return F

    def _sweep(self, F, marks, init, params, tol, shift=0.0):
        """Integrate through ``marks`` (arclength, point, key) in arclength order.

        Writes ``F[key]`` for keys >= 0 and returns the state at key -2.
        Contour corners are inserted as extra waypoints; ``shift`` is the
        offset of the coordinates used by ``marks`` and ``params``.
        """
        c = self.c
        lo, hi = min(m[0] for m in marks), max(m[0] for m in marks)
        marks = marks + [(c.cum[k], c.w[k] - shift, -1) for k in range(1, c.w.size - 1) if lo < c.cum[k] < hi]
        marks.sort(key=lambda m: m[0])
        wp = [marks[0][1]]
        keys = [[marks[0][2]]]
        for _, zm, key in marks[1:]:
            if zm == wp[-1]:
                keys[-1].append(key)
                continue
            wp.append(zm)
            keys.append([key])
        path = Path(tuple(wp), c.clearance) if shift == 0 else Path.through(wp, params)
        states = integrate_path(params, path, init, tol)
        end_state = None
        for st, ks in zip(states, keys):
            for key in ks:
                if key >= 0:
                    F[key] = st.F
                elif key == -2:
                    end_state = st
        return end_state


def _contour_nodes(contour: Contour, level: int):
    rule = tanh_sinh_rule(level)
    nodes, weights = [], []
    for k, L in enumerate(contour.L):
        d0 = L * rule.left
        d1 = L * rule.right
        nodes.append((k, d0, d1))
        weights.append(L * rule.weight * contour.u[k])
    return nodes, weights


def _resolve_lam(sol):
    return sol.lam if isinstance(sol, EigenResult) else complex(sol)


def orthogonality_integral(params, solA, solB, contour, endpoints, tol: float = 1e-12,
                           level_cap: int = LEVEL_CAP, return_info: bool = False):
    """``int F_A F_B P^{-1/2} dz`` along the contour.

    ``solA``/``solB`` are accessory values or :class:`EigenResult`.  Both
    functions are left-normalised (leading coefficient 1 at the contour
    start).  Convergence is judged relative to ``int |F_A F_B P^{-1/2}| |dz|``;
    when either ``lam`` is not an eigenvalue the tolerance is relaxed to
    ``UNMATCHED_TOL``.  Raises :class:`QuadratureNotConverged` when
    ``level_cap`` is hit.
    """
    if not isinstance(contour, Contour):
        try:
            contour = Contour(params, contour)
        except ClearanceViolation as err:
            raise BranchAmbiguity(f"P^(-1/2) branch is ambiguous: {err}") from None
    _check_endpoints(contour, endpoints)
    fa = _ContourFunction(params, _resolve_lam(solA), contour, endpoints)
    same = _resolve_lam(solA) == _resolve_lam(solB)
    fb = fa if same else _ContourFunction(params, _resolve_lam(solB), contour, endpoints)
    if not (fa.matched and fb.matched):
        # the unmatched far-end tail is cut off, which limits attainable accuracy
        tol = max(tol, UNMATCHED_TOL)
    prev = None
    change = math.inf
    for level in range(1, level_cap + 1):
        nodes, weights = _contour_nodes(contour, level)
        A = fa.values(nodes)
        B = A if same else fb.values(nodes)
        w = np.concatenate(weights)
        mP = np.concatenate([contour.sqrt_P(k, d0, d1, -0.5) for k, d0, d1 in nodes])
        g = A * B * mP * w
        ok = np.isfinite(g)
        val = complex(np.sum(g[ok]))
        # relative to the absolute integral: the value itself is ~0 for orthogonal pairs
        size = float(np.sum(np.abs(g[ok])))
        if prev is not None:
            change = abs(val - prev) / max(size, 1e-300)
            if level >= 4 and change <= tol:
                break
        prev = val
    else:
        raise QuadratureNotConverged(f"quadrature level cap {level_cap} reached (last change {change:.3g})")
    if return_info:
        return val, {"level": level, "change": change, "abs_integral": size, "matched": (fa.matched, fb.matched),
                     "branch": complex(contour.sqrt_P(*contour.locate(0.5 * contour.length))[0])}
    return val


def overlap_ratio(params, solA, solB, contour, endpoints, tol: float = 1e-12) -> float:
    """``|int F_A F_B dmu| / (||F_A|| ||F_B||)`` with ``||F||^2 = |int F^2 dmu|``."""
    if not isinstance(contour, Contour):
        contour = Contour(params, contour)
    ab = orthogonality_integral(params, solA, solB, contour, endpoints, tol)
    aa = orthogonality_integral(params, solA, solA, contour, endpoints, tol)
    bb = orthogonality_integral(params, solB, solB, contour, endpoints, tol)
    return abs(ab) / math.sqrt(abs(aa) * abs(bb))


def golden_problem():
    """Reference setup: phi = pi/3, chi = (pi/4, pi/6, pi/8, pi/10), contour z4 -> 1 -> z1."""
    params = CanonicalParams(math.pi / 3, (math.pi / 4, math.pi / 6, math.pi / 8, math.pi / 10), 0.0)
    z = params.points.z
    contour = Contour(params, (z[3], 1.0, z[0]))
    endpoints = (EndpointData(4), EndpointData(1))
    return params, contour, endpoints


__all__ = [
    "EndpointData",
    "EigenResult",
    "LocalSolution",
    "Contour",
    "RealFrame",
    "Interval",
    "Disk",
    "shoot_defect",
    "scaled_defect",
    "scan_defect",
    "find_eigenvalues",
    "orthogonality_integral",
    "overlap_ratio",
    "real_line_frame",
    "golden_problem",
]
