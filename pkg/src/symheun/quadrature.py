"""Double-exponential (tanh-sinh) nodes on the unit interval.

Nodes are returned together with their distances to *both* ends, computed
without cancellation, so integrands with algebraic endpoint singularities
can be evaluated from the exact offset rather than from ``1 - x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

T_MAX = 4.5
LEVEL_CAP = 12


@dataclass(frozen=True)
class TanhSinhRule:
    level: int
    x: np.ndarray       # node in (0, 1)
    left: np.ndarray    # x, accurate near 0
    right: np.ndarray   # 1 - x, accurate near 1
    weight: np.ndarray

    def __len__(self):
        return self.x.size


def tanh_sinh_rule(level: int, t_max: float = T_MAX) -> TanhSinhRule:
    """Rule with step ``h = 2**-level`` truncated at ``|u| <= t_max``.

    With ``v = (pi/2) sinh u`` the node is ``x = 1/(1 + exp(-2v))`` and the
    weight ``h * pi * cosh(u) * x * (1 - x)``.
    """
    h = 2.0**-level
    n = int(np.floor(t_max / h))
    u = h * np.arange(-n, n + 1)
    v = 0.5 * np.pi * np.sinh(u)
    left = 1.0 / (1.0 + np.exp(-2.0 * v))
    right = 1.0 / (1.0 + np.exp(2.0 * v))
    w = h * np.pi * np.cosh(u) * left * right
    keep = (left > 0) & (right > 0)
    return TanhSinhRule(level, left[keep], left[keep], right[keep], w[keep])


def integrate_unit(f, tol: float = 1e-12, min_level: int = 3, level_cap: int = LEVEL_CAP):
    """Integrate ``f(left, right)`` over ``(0, 1)``; returns ``(value, level, change)``.

    Stops when two successive levels agree to ``tol`` relative.  The caller
    decides what to do when ``level_cap`` is reached (``change`` is reported).
    """
    prev = None
    change = np.inf
    for level in range(1, level_cap + 1):
        rule = tanh_sinh_rule(level)
        val = complex(np.sum(rule.weight * f(rule.left, rule.right)))
        if prev is not None:
            change = abs(val - prev) / max(abs(val), 1e-300)
            if level >= min_level and change <= tol:
                return val, level, change
        prev = val
    return prev, level_cap, change
