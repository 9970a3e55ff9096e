"""Pure-Python implementations of the hot loops.

Signatures mirror ``_kernels.pyx`` exactly; :mod:`symheun.kernels` picks one.
"""

import numpy as np

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

# error per unit step (tol scaled by h / path length) keeps the global error
# proportional to tol; below this fraction the scaling stops, so roundoff in
# the estimate cannot force steps to underflow next to a singular point
UNIT_FLOOR = 1e-4

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2


def recurrence(rows, f0, f1, N):
    """``f_n = -sum_{k=1..8} rows[n, k] f_{n-k}`` with ``f_{<0} = 0``."""
    f = [0j] * (N + 1)
    f[0] = complex(f0)
    if N >= 1:
        f[1] = complex(f1)
    r = rows.tolist()
    for n in range(2, N + 1):
        row = r[n]
        acc = 0j
        for k in range(1, 9 if n >= 8 else n + 1):
            acc += row[k] * f[n - k]
        f[n] = -acc
    return np.array(f, dtype=complex)


def horner_d2(coeffs, z):
    """Value, first and second derivative of ``sum_n coeffs[n] z^n``."""
    c = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    p = np.full(z.shape, c[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    ddp = np.zeros(z.shape, dtype=complex)
    for k in range(len(c) - 2, -1, -1):
        ddp = ddp * z + dp
        dp = dp * z + p
        p = p * z + c[k]
    return p, dp, 2.0 * ddp


def _coeffs(z, spts, A, num, droots, lead):
    p = 0j
    for s, a in zip(spts, A):
        p += a / (z - s)
    nv = 0j
    for c in reversed(num):
        nv = nv * z + c
    dv = lead
    for r in droots:
        dv *= z - r
    return p, nv / dv


def integrate_polyline(spts, A, num, droots, lead, waypoints, F0, dF0, tol, hmin_rel, max_steps):
    """Adaptive Dormand-Prince 5(4) for ``F'' + p F' + q F = 0`` along a polyline.

    ``p = sum A_k / (z - spts_k)`` and ``q = num(z) / (lead * prod(z - droots))``.
    Returns ``(F, dF, steps, status)`` with states at every waypoint.
    """
    spts = [complex(v) for v in spts]
    A = [complex(v) for v in A]
    num = [complex(v) for v in num]
    droots = [complex(v) for v in droots]
    lead = complex(lead)
    wp = [complex(v) for v in waypoints]
    nw = len(wp)
    Fo = np.zeros(nw, dtype=complex)
    Go = np.zeros(nw, dtype=complex)
    y0, y1 = complex(F0), complex(dF0)
    Fo[0], Go[0] = y0, y1
    total = sum(abs(wp[i + 1] - wp[i]) for i in range(nw - 1))
    hmin = hmin_rel * total
    singular = spts + droots
    M0, M1 = abs(y0), abs(y1)
    steps = 0
    h = 0.0
    for seg in range(nw - 1):
        za, zb = wp[seg], wp[seg + 1]
        L = abs(zb - za)
        if L == 0:
            Fo[seg + 1], Go[seg + 1] = y0, y1
            continue
        u = (zb - za) / L
        if h == 0.0:
            dmin = min([abs(za - s) for s in singular] + [L])
            h = 0.05 * dmin
        s = 0.0
        while s < L:
            if steps >= max_steps:
                return Fo, Go, steps, STATUS_MAXSTEPS
            last = s + h >= L
            hs = L - s if last else h
            kF = [0j] * 7
            kG = [0j] * 7
            for i in range(7):
                zi = za + u * (s + _C[i] * hs)
                yf, yg = y0, y1
                for j, a in enumerate(_A[i]):
                    yf += hs * a * kF[j]
                    yg += hs * a * kG[j]
                if i == 6:
                    nf, ng = yf, yg
                p, q = _coeffs(zi, spts, A, num, droots, lead)
                kF[i] = u * yg
                kG[i] = u * (-p * yg - q * yf)
            eF = hs * sum(e * k for e, k in zip(_E, kF))
            eG = hs * sum(e * k for e, k in zip(_E, kG))
            sF = tol * max(hs / total, UNIT_FLOOR) * (max(abs(y0), abs(nf)) + 1e-3 * M0) + 1e-300
            sG = tol * max(hs / total, UNIT_FLOOR) * (max(abs(y1), abs(ng)) + 1e-3 * M1) + 1e-300
            err = max(abs(eF) / sF, abs(eG) / sG)
            steps += 1
            if err <= 1.0:
                s = L if last else s + hs
                y0, y1 = nf, ng
                M0 = max(M0, abs(y0))
                M1 = max(M1, abs(y1))
                fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.25))
                h = max(h, hs * fac) if last else hs * fac
            else:
                h = hs * max(0.2, 0.9 * err ** -0.25)
                if h < hmin:
                    return Fo, Go, steps, STATUS_UNDERFLOW
        Fo[seg + 1], Go[seg + 1] = y0, y1
    return Fo, Go, steps, STATUS_OK

