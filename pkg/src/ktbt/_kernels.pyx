# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sensing kernel; see ``_kernels_py.py`` for the reference twin."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def sense_all(double[::1] rx, double[::1] ry,
              double[::1] tx, double[::1] ty, signed char[::1] tstate,
              double[:, ::1] obstacles, double d_t, double d_c):
    cdef Py_ssize_t n = rx.shape[0]
    cdef Py_ssize_t m = tx.shape[0]
    cdef Py_ssize_t nobs = obstacles.shape[0]
    cdef Py_ssize_t i, j, k, best
    cdef double px, py, sx, sy, dx, dy, d2, best_d2, cx, cy
    cdef double x0, y0, x1, y1
    cdef double dt2 = d_t * d_t
    cdef double dc2 = d_c * d_c
    cdef long count

    vcx_a = np.zeros(n, dtype=np.float64)
    vcy_a = np.zeros(n, dtype=np.float64)
    fcx_a = np.zeros(n, dtype=np.float64)
    fcy_a = np.zeros(n, dtype=np.float64)
    nc_a = np.zeros(n, dtype=np.int64)
    near_a = np.full(n, -1, dtype=np.int64)
    cdef double[::1] vcx = vcx_a
    cdef double[::1] vcy = vcy_a
    cdef double[::1] fcx = fcx_a
    cdef double[::1] fcy = fcy_a
    cdef long long[::1] ncontact = nc_a
    cdef long long[::1] nearest = near_a

    for i in range(n):
        px = rx[i]
        py = ry[i]
        sx = 0.0
        sy = 0.0
        count = 0
        for j in range(n):
            if j == i:
                continue
            dx = rx[j] - px
            dy = ry[j] - py
            if dx * dx + dy * dy <= dc2:
                if count == 0:
                    fcx[i] = dx
                    fcy[i] = dy
                sx += dx
                sy += dy
                count += 1
        for k in range(nobs):
            x0 = obstacles[k, 0]
            y0 = obstacles[k, 1]
            x1 = obstacles[k, 2]
            y1 = obstacles[k, 3]
            cx = x0 if px < x0 else (x1 if px > x1 else px)
            cy = y0 if py < y0 else (y1 if py > y1 else py)
            dx = cx - px
            dy = cy - py
            if dx * dx + dy * dy <= dc2:
                if count == 0:
                    fcx[i] = dx
                    fcy[i] = dy
                sx += dx
                sy += dy
                count += 1
        vcx[i] = sx
        vcy[i] = sy
        ncontact[i] = count

        best = -1
        best_d2 = dt2
        for k in range(m):
            if tstate[k] != 0:
                continue
            dx = tx[k] - px
            dy = ty[k] - py
            d2 = dx * dx + dy * dy
            if d2 < best_d2 or (d2 == best_d2 and best < 0):
                best = k
                best_d2 = d2
        nearest[i] = best
    return (vcx_a.tolist(), vcy_a.tolist(), nc_a.tolist(),
            fcx_a.tolist(), fcy_a.tolist(), near_a.tolist())
