# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; same signatures as ``_pykernels``."""

import numpy as np

from libc.math cimport pow

cdef extern from "complex.h" nogil:
    double cabs(double complex)

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double UNIT_FLOOR = 1e-4  # see _pykernels

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2


def recurrence(const double complex[:, :] rows, double complex f0, double complex f1, Py_ssize_t N):
    out = np.zeros(N + 1, dtype=np.complex128)
    cdef double complex[:] f = out
    cdef Py_ssize_t n, k, kmax
    cdef double complex acc
    f[0] = f0
    if N >= 1:
        f[1] = f1
    for n in range(2, N + 1):
        acc = 0
        kmax = 8 if n >= 8 else n
        for k in range(1, kmax + 1):
            acc = acc + rows[n, k] * f[n - k]
        f[n] = -acc
    return out


def horner_d2(coeffs, z):
    cdef const double complex[:] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    zarr = np.ascontiguousarray(z, dtype=np.complex128)
    shape = zarr.shape
    cdef const double complex[:] zz = zarr.ravel()
    cdef Py_ssize_t m = zz.shape[0], nc = c.shape[0], i, k
    P = np.empty(m, dtype=np.complex128)
    D = np.empty(m, dtype=np.complex128)
    DD = np.empty(m, dtype=np.complex128)
    cdef double complex[:] Pv = P, Dv = D, DDv = DD
    cdef double complex x, p, dp, ddp
    for i in range(m):
        x = zz[i]
        p = c[nc - 1]
        dp = 0
        ddp = 0
        for k in range(nc - 2, -1, -1):
            ddp = ddp * x + dp
            dp = dp * x + p
            p = p * x + c[k]
        Pv[i] = p
        Dv[i] = dp
        DDv[i] = 2.0 * ddp
    return P.reshape(shape), D.reshape(shape), DD.reshape(shape)


cdef inline void _coeffs(double complex z, const double complex[:] spts, const double complex[:] A,
                         const double complex[:] num, const double complex[:] droots, double complex lead,
                         double complex* p, double complex* q) noexcept nogil:
    cdef Py_ssize_t k
    cdef double complex pv = 0, nv = 0, dv = lead
    for k in range(spts.shape[0]):
        pv = pv + A[k] / (z - spts[k])
    for k in range(num.shape[0] - 1, -1, -1):
        nv = nv * z + num[k]
    for k in range(droots.shape[0]):
        dv = dv * (z - droots[k])
    p[0] = pv
    q[0] = nv / dv


def integrate_polyline(spts, A, num, droots, lead, waypoints, F0, dF0, double tol, double hmin_rel,
                       long max_steps):
    cdef const double complex[:] sp = np.ascontiguousarray(spts, dtype=np.complex128)
    cdef const double complex[:] Av = np.ascontiguousarray(A, dtype=np.complex128)
    cdef const double complex[:] nm = np.ascontiguousarray(num, dtype=np.complex128)
    cdef const double complex[:] dr = np.ascontiguousarray(droots, dtype=np.complex128)
    cdef const double complex[:] wp = np.ascontiguousarray(waypoints, dtype=np.complex128)
    cdef double complex ld = lead
    cdef Py_ssize_t nw = wp.shape[0], seg, i
    Fo = np.zeros(nw, dtype=np.complex128)
    Go = np.zeros(nw, dtype=np.complex128)
    cdef double complex[:] Fv = Fo, Gv = Go
    cdef double complex y0 = F0, y1 = dF0, nf, ng, za, zb, u, p, q, zi
    cdef double complex k1f, k2f, k3f, k4f, k5f, k6f, k7f, k1g, k2g, k3g, k4g, k5g, k6g, k7g
    cdef double complex yf, yg, eF, eG
    cdef double total = 0, hmin, L, s, h = 0, hs, err, sF, sG, fac, dmin, M0, M1, d
    cdef long steps = 0
    cdef bint last
    Fv[0] = y0
    Gv[0] = y1
    for seg in range(nw - 1):
        total += cabs(wp[seg + 1] - wp[seg])
    hmin = hmin_rel * total
    M0 = cabs(y0)
    M1 = cabs(y1)
    for seg in range(nw - 1):
        za = wp[seg]
        zb = wp[seg + 1]
        L = cabs(zb - za)
        if L == 0:
            Fv[seg + 1] = y0
            Gv[seg + 1] = y1
            continue
        u = (zb - za) / L
        if h == 0:
            dmin = L
            for i in range(sp.shape[0]):
                d = cabs(za - sp[i])
                if d < dmin:
                    dmin = d
            for i in range(dr.shape[0]):
                d = cabs(za - dr[i])
                if d < dmin:
                    dmin = d
            h = 0.05 * dmin
        s = 0
        while s < L:
            if steps >= max_steps:
                return Fo, Go, steps, STATUS_MAXSTEPS
            last = s + h >= L
            hs = L - s if last else h

            _coeffs(za + u * s, sp, Av, nm, dr, ld, &p, &q)
            k1f = u * y1
            k1g = u * (-p * y1 - q * y0)

            yf = y0 + hs * A21 * k1f
            yg = y1 + hs * A21 * k1g
            _coeffs(za + u * (s + C2 * hs), sp, Av, nm, dr, ld, &p, &q)
            k2f = u * yg
            k2g = u * (-p * yg - q * yf)

            yf = y0 + hs * (A31 * k1f + A32 * k2f)
            yg = y1 + hs * (A31 * k1g + A32 * k2g)
            _coeffs(za + u * (s + C3 * hs), sp, Av, nm, dr, ld, &p, &q)
            k3f = u * yg
            k3g = u * (-p * yg - q * yf)

            yf = y0 + hs * (A41 * k1f + A42 * k2f + A43 * k3f)
            yg = y1 + hs * (A41 * k1g + A42 * k2g + A43 * k3g)
            _coeffs(za + u * (s + C4 * hs), sp, Av, nm, dr, ld, &p, &q)
            k4f = u * yg
            k4g = u * (-p * yg - q * yf)

            yf = y0 + hs * (A51 * k1f + A52 * k2f + A53 * k3f + A54 * k4f)
            yg = y1 + hs * (A51 * k1g + A52 * k2g + A53 * k3g + A54 * k4g)
            _coeffs(za + u * (s + C5 * hs), sp, Av, nm, dr, ld, &p, &q)
            k5f = u * yg
            k5g = u * (-p * yg - q * yf)

            yf = y0 + hs * (A61 * k1f + A62 * k2f + A63 * k3f + A64 * k4f + A65 * k5f)
            yg = y1 + hs * (A61 * k1g + A62 * k2g + A63 * k3g + A64 * k4g + A65 * k5g)
            _coeffs(za + u * (s + hs), sp, Av, nm, dr, ld, &p, &q)
            k6f = u * yg
            k6g = u * (-p * yg - q * yf)

            nf = y0 + hs * (B1 * k1f + B3 * k3f + B4 * k4f + B5 * k5f + B6 * k6f)
            ng = y1 + hs * (B1 * k1g + B3 * k3g + B4 * k4g + B5 * k5g + B6 * k6g)
            _coeffs(za + u * (s + hs), sp, Av, nm, dr, ld, &p, &q)
            k7f = u * ng
            k7g = u * (-p * ng - q * nf)

            eF = hs * (E1 * k1f + E3 * k3f + E4 * k4f + E5 * k5f + E6 * k6f + E7 * k7f)
            eG = hs * (E1 * k1g + E3 * k3g + E4 * k4g + E5 * k5g + E6 * k6g + E7 * k7g)
            sF = tol * max(hs / total, UNIT_FLOOR) * (max(cabs(y0), cabs(nf)) + 1e-3 * M0) + 1e-300
            sG = tol * max(hs / total, UNIT_FLOOR) * (max(cabs(y1), cabs(ng)) + 1e-3 * M1) + 1e-300
            err = max(cabs(eF) / sF, cabs(eG) / sG)
            steps += 1
            if err <= 1.0:
                s = L if last else s + hs
                y0 = nf
                y1 = ng
                M0 = max(M0, cabs(y0))
                M1 = max(M1, cabs(y1))
                if err == 0:
                    fac = 5.0
                else:
                    fac = min(5.0, max(0.2, 0.9 * pow(err, -0.25)))
                if last:
                    h = max(h, hs * fac)
                else:
                    h = hs * fac
            else:
                h = hs * max(0.2, 0.9 * pow(err, -0.25))
                if h < hmin:
                    return Fo, Go, steps, STATUS_UNDERFLOW
        Fv[seg + 1] = y0
        Gv[seg + 1] = y1
    return Fo, Go, steps, STATUS_OK
