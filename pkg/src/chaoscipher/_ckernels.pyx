# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; twins of ``_pykernels`` with identical arithmetic."""

from libc.math cimport isfinite
from libc.stdint cimport uint8_t, uint64_t, int32_t

import numpy as np

BACKEND = "cython"

DEF SAMPLE_BYTES = 16
DEF MAX_REJECTIONS = 256

OK = 0
NEED_BYTES = 1
CAP_EXCEEDED = 2

cdef double Z0_RADIUS = 0.9
cdef double Z0_MIN2 = 0.01
cdef double Z0_MAX2 = 0.81
cdef double GUARD_HI2 = 1e12
cdef double GUARD_LO2 = 1e-12
cdef double SCALE = 1.1102230246251565e-16  # 2**-53


cdef inline uint64_t load_be64(const uint8_t* p) nogil:
    cdef uint64_t v = 0
    cdef int i
    for i in range(8):
        v = (v << 8) | p[i]
    return v


cdef inline double unit(uint64_t u) nogil:
    return 2.0 * (<double>(u >> 11) * SCALE) - 1.0


def run_orbit(const uint8_t[::1] buf, Py_ssize_t pos, double zr, double zi,
              double delta, Py_ssize_t nsteps, double[:, ::1] trace=None):
    cdef Py_ssize_t end = buf.shape[0]
    cdef Py_ssize_t p, done = 0, reseeds = 0
    cdef int tries
    cdef double ur, ui, cr, ci, sr, si, nr, ni, r2
    cdef bint reseed
    cdef bint tracing = trace is not None
    cdef const uint8_t* base = &buf[0] if end > 0 else NULL
    with nogil:
        while done < nsteps:
            p = pos
            tries = 0
            while True:
                if p + SAMPLE_BYTES > end:
                    with gil:
                        return NEED_BYTES, pos, zr, zi, done, reseeds
                ur = unit(load_be64(base + p))
                ui = unit(load_be64(base + p + 8))
                p += SAMPLE_BYTES
                # accept in unit coordinates; scaling first can underflow
                if ur * ur + ui * ui <= 1.0:
                    cr = ur * delta
                    ci = ui * delta
                    break
                tries += 1
                if tries >= MAX_REJECTIONS:
                    with gil:
                        return CAP_EXCEEDED, pos, zr, zi, done, reseeds
            sr = zr * zr - zi * zi
            si = 2.0 * zr * zi
            nr = (sr * zr - si * zi) + (cr * zr - ci * zi)
            ni = (sr * zi + si * zr) + (cr * zi + ci * zr)
            reseed = False
            if not (isfinite(nr) and isfinite(ni)):
                reseed = True
            else:
                r2 = nr * nr + ni * ni
                if r2 > GUARD_HI2 or r2 < GUARD_LO2:
                    reseed = True
            if reseed:
                tries = 0
                while True:
                    if p + SAMPLE_BYTES > end:
                        with gil:
                            return NEED_BYTES, pos, zr, zi, done, reseeds
                    nr = unit(load_be64(base + p)) * Z0_RADIUS
                    ni = unit(load_be64(base + p + 8)) * Z0_RADIUS
                    p += SAMPLE_BYTES
                    r2 = nr * nr + ni * ni
                    if Z0_MIN2 <= r2 and r2 <= Z0_MAX2:
                        break
                    tries += 1
                    if tries >= MAX_REJECTIONS:
                        with gil:
                            return CAP_EXCEEDED, pos, zr, zi, done, reseeds
                reseeds += 1
            zr = nr
            zi = ni
            pos = p
            if tracing:
                trace[done, 0] = zr
                trace[done, 1] = zi
            done += 1
    return OK, pos, zr, zi, done, reseeds


def escape_rows(const double[::1] xs, const double[::1] ys,
                const double[::1] omega_re, const double[::1] omega_im,
                bint cubic, int max_iter, double r2, int32_t[:, ::1] out,
                Py_ssize_t row0, Py_ssize_t row1):
    cdef Py_ssize_t i, j
    cdef int m, res
    cdef double a, b, sr, si, nr, ni, cr, ci
    cdef Py_ssize_t w = xs.shape[0]
    with nogil:
        for j in range(row0, row1):
            for i in range(w):
                a = xs[i]
                b = ys[j]
                res = max_iter
                if not (a * a + b * b <= r2):
                    res = 0
                else:
                    for m in range(max_iter):
                        cr = omega_re[m]
                        ci = omega_im[m]
                        sr = a * a - b * b
                        si = 2.0 * a * b
                        if cubic:
                            nr = (sr * a - si * b) + (cr * a - ci * b)
                            ni = (sr * b + si * a) + (cr * b + ci * a)
                        else:
                            nr = sr + cr
                            ni = si + ci
                        a = nr
                        b = ni
                        if not (a * a + b * b <= r2):
                            res = m + 1
                            break
                out[j, i] = res


def linear_complexity(bits):
    cdef const uint8_t[::1] s = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t n = s.shape[0]
    cdef uint8_t[::1] c = np.zeros(n + 1, dtype=np.uint8)
    cdef uint8_t[::1] b = np.zeros(n + 1, dtype=np.uint8)
    cdef uint8_t[::1] t = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, L = 0, m = -1, shift
    cdef uint8_t d
    c[0] = 1
    b[0] = 1
    with nogil:
        for i in range(n):
            d = s[i]
            for j in range(1, L + 1):
                d ^= c[j] & s[i - j]
            if d:
                t[:] = c
                shift = i - m
                for j in range(n + 1 - shift):
                    c[j + shift] ^= b[j]
                if 2 * L <= i:
                    L = i + 1 - L
                    m = i
                    b[:] = t
    return L


def gf2_rank(matrix):
    cdef uint8_t[:, ::1] a = np.array(matrix, dtype=np.uint8, order="C", copy=True)
    cdef Py_ssize_t nrows = a.shape[0], ncols = a.shape[1]
    cdef Py_ssize_t rank = 0, col, i, k, pivot
    cdef uint8_t tmp
    with nogil:
        for col in range(ncols):
            pivot = -1
            for i in range(rank, nrows):
                if a[i, col]:
                    pivot = i
                    break
            if pivot < 0:
                continue
            if pivot != rank:
                for k in range(ncols):
                    tmp = a[rank, k]
                    a[rank, k] = a[pivot, k]
                    a[pivot, k] = tmp
            for i in range(nrows):
                if i != rank and a[i, col]:
                    for k in range(col, ncols):
                        a[i, k] ^= a[rank, k]
            rank += 1
    return rank
