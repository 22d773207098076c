"""Pure-Python kernels, used when the compiled extension is unavailable.

Every function here has a twin in ``_ckernels.pyx`` and the two must agree
bit for bit; the floating-point expressions are written out in the same
order in both files.
"""

import math
import struct

import numpy as np

BACKEND = "python"

OK = 0
NEED_BYTES = 1
CAP_EXCEEDED = 2

SAMPLE_BYTES = 16
MAX_REJECTIONS = 256
Z0_RADIUS = 0.9
Z0_MIN2 = 0.01
Z0_MAX2 = 0.81
GUARD_HI2 = 1e12
GUARD_LO2 = 1e-12

_unpack = struct.Struct(">QQ").unpack_from
_SCALE = 2.0 ** -53


def _unit(u):
    # 53 random bits -> [-1, 1); exact in binary64
    return 2.0 * ((u >> 11) * _SCALE) - 1.0


def run_orbit(buf, pos, zr, zi, delta, nsteps, trace=None):
    """Advance the orbit ``nsteps`` times reading sampling bytes from ``buf``.

    Returns ``(status, pos, zr, zi, done, reseeds)``.  On ``NEED_BYTES`` the
    position and point are those at the start of the unfinished step, so the
    caller can extend the buffer and call again.
    """
    end = len(buf)
    done = 0
    reseeds = 0
    while done < nsteps:
        p = pos
        tries = 0
        while True:
            if p + SAMPLE_BYTES > end:
                return NEED_BYTES, pos, zr, zi, done, reseeds
            a, b = _unpack(buf, p)
            p += SAMPLE_BYTES
            ur = _unit(a)
            ui = _unit(b)
            # accept in unit coordinates; scaling first can underflow
            if ur * ur + ui * ui <= 1.0:
                cr = ur * delta
                ci = ui * delta
                break
            tries += 1
            if tries >= MAX_REJECTIONS:
                return CAP_EXCEEDED, pos, zr, zi, done, reseeds
        sr = zr * zr - zi * zi
        si = 2.0 * zr * zi
        nr = (sr * zr - si * zi) + (cr * zr - ci * zi)
        ni = (sr * zi + si * zr) + (cr * zi + ci * zr)
        reseed = False
        if not (math.isfinite(nr) and math.isfinite(ni)):
            reseed = True
        else:
            r2 = nr * nr + ni * ni
            if r2 > GUARD_HI2 or r2 < GUARD_LO2:
                reseed = True
        if reseed:
            tries = 0
            while True:
                if p + SAMPLE_BYTES > end:
                    return NEED_BYTES, pos, zr, zi, done, reseeds
                a, b = _unpack(buf, p)
                p += SAMPLE_BYTES
                nr = _unit(a) * Z0_RADIUS
                ni = _unit(b) * Z0_RADIUS
                r2 = nr * nr + ni * ni
                if Z0_MIN2 <= r2 <= Z0_MAX2:
                    break
                tries += 1
                if tries >= MAX_REJECTIONS:
                    return CAP_EXCEEDED, pos, zr, zi, done, reseeds
            reseeds += 1
        zr, zi = nr, ni
        pos = p
        if trace is not None:
            trace[done, 0] = zr
            trace[done, 1] = zi
        done += 1
    return OK, pos, zr, zi, done, reseeds


def escape_rows(xs, ys, omega_re, omega_im, cubic, max_iter, r2, out, row0, row1):
    """Fill ``out[row0:row1]`` with escape iterations (vectorised over pixels)."""
    zr = np.broadcast_to(xs[None, :], (row1 - row0, xs.shape[0])).copy()
    zi = np.broadcast_to(ys[row0:row1, None], zr.shape).copy()
    res = np.full(zr.shape, max_iter, dtype=np.int32)
    alive = np.ones(zr.shape, dtype=bool)
    esc = zr * zr + zi * zi > r2
    res[esc] = 0
    alive &= ~esc
    for m in range(max_iter):
        idx = np.nonzero(alive)
        if idx[0].size == 0:
            break
        a = zr[idx]
        b = zi[idx]
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
        zr[idx] = nr
        zi[idx] = ni
        with np.errstate(over="ignore", invalid="ignore"):
            gone = ~(nr * nr + ni * ni <= r2)
        if gone.any():
            gi = (idx[0][gone], idx[1][gone])
            res[gi] = m + 1
            alive[gi] = False
    out[row0:row1] = res


def linear_complexity(bits):
    """Berlekamp-Massey over GF(2); ``bits`` is a sequence of 0/1."""
    s = [int(x) for x in bits]
    n = len(s)
    c = [0] * (n + 1)
    b = [0] * (n + 1)
    c[0] = b[0] = 1
    L = 0
    m = -1
    for i in range(n):
        d = s[i]
        for j in range(1, L + 1):
            d ^= c[j] & s[i - j]
        if d:
            t = c[:]
            shift = i - m
            for j in range(n + 1 - shift):
                c[j + shift] ^= b[j]
            if 2 * L <= i:
                L = i + 1 - L
                m = i
                b = t
    return L


def gf2_rank(matrix):
    """Rank over GF(2) of a 2-D 0/1 array."""
    rows = []
    for row in np.asarray(matrix, dtype=np.uint8):
        v = 0
        for bit in row:
            v = (v << 1) | int(bit)
        rows.append(v)
    rank = 0
    ncols = np.asarray(matrix).shape[1]
    for col in range(ncols - 1, -1, -1):
        mask = 1 << col
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & mask:
                rows[i] ^= rows[rank]
        rank += 1
    return rank
