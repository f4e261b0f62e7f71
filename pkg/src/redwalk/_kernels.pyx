# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled walk and coupling kernels.

Mirror of ``_kernels_py.py``: same operations in the same order, so the
two backends agree bit for bit. The batch loops run without the GIL and
draw directly from each walk's numpy bit generator.
"""

from libc.math cimport atan2, sqrt, fabs, floor, fmod, cos, sin, isfinite
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

import numpy as np

cdef double TWO_PI = 6.283185307179586
cdef double PI = 3.141592653589793
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef int RENORM_EVERY = 64
cdef double DESCENT_TOL = 1e-10

cdef enum:
    OK = 0
    EXHAUSTED = 1
    AMBIGUOUS = 2
    NONFINITE = 3


cdef struct Params:
    double g[3][4]
    int kind[3]
    double p1[3]
    double p2[3]
    double base[3]
    double ep[3][4]
    double x0
    double y0


cdef struct WalkOut:
    int status
    long steps
    long moves
    int full
    double lo
    double hi
    double a
    double b
    double c
    double d


cdef inline double pymod(double x, double m) noexcept nogil:
    cdef double r = fmod(x, m)
    if r < 0.0:
        r += m
    elif r == 0.0:
        r = 0.0
    return r


cdef inline double endpoint_angle(double p, double q, double x0, double y0) noexcept nogil:
    if q < 0.0 or (q == 0.0 and p < 0.0):
        p = -p
        q = -q
    return pymod(-2.0 * atan2(y0 * q, p - x0 * q), TWO_PI)


cdef Params pack(params) except *:
    cdef Params P
    gens, kinds, p1, p2, base, ends, x0, y0 = params
    cdef int r, k
    for r in range(3):
        for k in range(4):
            P.g[r][k] = gens[r][k]
        P.kind[r] = kinds[r]
        P.p1[r] = p1[r]
        P.p2[r] = p2[r]
        P.base[r] = base[r]
        (e0, e1), (e2, e3) = ends[r]
        P.ep[r][0] = e0
        P.ep[r][1] = e1
        P.ep[r][2] = e2
        P.ep[r][3] = e3
    P.x0 = x0
    P.y0 = y0
    return P


cdef WalkOut run(Params* P, bitgen_t* rng, long max_steps, double target) noexcept nogil:
    cdef WalkOut o
    cdef double a = 1.0, b = 0.0, c = 0.0, d = 1.0
    cdef double s, yz, nr, ni, dr, di, den, wr, wi, v, ex
    cdef double t1, t2, gap, start, width, shift, mid, sc
    cdef double na, nb, nc, nd
    cdef double ep1, eq1, ep2, eq2
    cdef long count = 0
    cdef int r
    o.full = 1
    o.lo = 0.0
    o.hi = TWO_PI
    o.steps = 0
    o.moves = 0
    o.status = EXHAUSTED
    while o.steps < max_steps:
        r = <int>(rng.next_uint64(rng.state) % 3)
        s = a * d - b * c
        yz = P.y0 if s > 0.0 else -P.y0
        nr = d * P.x0 - b
        ni = d * yz
        dr = a - c * P.x0
        di = -c * yz
        den = dr * dr + di * di
        wr = (nr * dr + ni * di) / den
        wi = (ni * dr - nr * di) / den
        if P.kind[r] == 0:
            v = (wr - P.p1[r]) / wi
        else:
            ex = wr - P.p1[r]
            v = (ex * ex + wi * wi - P.p2[r] * P.p2[r]) / (2.0 * P.p2[r] * wi)
        if not isfinite(v):
            o.status = NONFINITE
            break
        if fabs(v) < DESCENT_TOL:
            o.status = AMBIGUOUS
            break
        o.steps += 1
        if v * P.base[r] < 0.0:
            continue
        ep1 = P.ep[r][0]
        eq1 = P.ep[r][1]
        ep2 = P.ep[r][2]
        eq2 = P.ep[r][3]
        t1 = endpoint_angle(a * ep1 + b * eq1, c * ep1 + d * eq1, P.x0, P.y0)
        t2 = endpoint_angle(a * ep2 + b * eq2, c * ep2 + d * eq2, P.x0, P.y0)
        gap = pymod(t2 - t1, TWO_PI)
        if gap < PI:
            start = t1
            width = gap
        else:
            start = t2
            width = TWO_PI - gap
        if o.full:
            o.lo = start
            o.hi = start + width
            o.full = 0
        else:
            shift = floor(((o.lo + o.hi) * 0.5 - (start + width * 0.5)) / TWO_PI + 0.5)
            start = start + shift * TWO_PI
            if start > o.lo:
                o.lo = start
            if start + width < o.hi:
                o.hi = start + width
            if o.hi < o.lo:
                mid = (o.lo + o.hi) * 0.5
                o.lo = mid
                o.hi = mid
        na = a * P.g[r][0] + b * P.g[r][2]
        nb = a * P.g[r][1] + b * P.g[r][3]
        nc = c * P.g[r][0] + d * P.g[r][2]
        nd = c * P.g[r][1] + d * P.g[r][3]
        a = na
        b = nb
        c = nc
        d = nd
        count += 1
        if count % RENORM_EVERY == 0:
            sc = sqrt(fabs(a * d - b * c))
            a = a / sc
            b = b / sc
            c = c / sc
            d = d / sc
        o.moves += 1
        if o.hi - o.lo < target:
            o.status = OK
            break
    o.a = a
    o.b = b
    o.c = c
    o.d = d
    return o


cdef bitgen_t** _pointers(list bitgens) except NULL:
    cdef Py_ssize_t n = len(bitgens), k
    cdef bitgen_t** ptrs = <bitgen_t**>malloc(max(n, 1) * sizeof(bitgen_t*))
    if ptrs == NULL:
        raise MemoryError()
    for k in range(n):
        ptrs[k] = <bitgen_t*>PyCapsule_GetPointer(bitgens[k].capsule, "BitGenerator")
    return ptrs


cdef tuple _as_tuple(WalkOut o):
    return (o.status, o.steps, o.moves, o.full, o.lo, o.hi, o.a, o.b, o.c, o.d)


def walk_one(params, bg, long max_steps, double target, trace=None):
    if trace is not None:
        raise ValueError("tracing is only available in the Python kernel")
    cdef Params P = pack(params)
    cdef bitgen_t* rng = <bitgen_t*>PyCapsule_GetPointer(bg.capsule, "BitGenerator")
    cdef WalkOut o
    with bg.lock:
        with nogil:
            o = run(&P, rng, max_steps, target)
    return _as_tuple(o)


def walk_batch(params, list bitgens, long max_steps, double target):
    cdef Params P = pack(params)
    cdef Py_ssize_t n = len(bitgens), k
    cdef bitgen_t** ptrs = _pointers(bitgens)
    cdef WalkOut* outs = <WalkOut*>malloc(max(n, 1) * sizeof(WalkOut))
    if outs == NULL:
        free(ptrs)
        raise MemoryError()
    try:
        with nogil:
            for k in range(n):
                outs[k] = run(&P, ptrs[k], max_steps, target)
        return [_as_tuple(outs[k]) for k in range(n)]
    finally:
        free(ptrs)
        free(outs)


cdef void coupling_run(double* cre, double* cim, double* rad, bitgen_t* rng,
                       long m_max, double* out) noexcept nogil:
    cdef double tx = <double>(rng.next_uint64(rng.state) >> 11) * INV_2_53 * TWO_PI
    cdef double ty = <double>(rng.next_uint64(rng.state) >> 11) * INV_2_53 * TWO_PI
    cdef double xr = cos(tx), xi = sin(tx), yr = cos(ty), yi = sin(ty)
    cdef double ex, ey, q, cr, ci, r2
    cdef long m
    cdef int r
    ex = xr - yr
    ey = xi - yi
    out[0] = sqrt(ex * ex + ey * ey)
    for m in range(m_max):
        r = <int>(rng.next_uint64(rng.state) % 3)
        cr = cre[r]
        ci = cim[r]
        r2 = rad[r] * rad[r]
        ex = xr - cr
        ey = xi - ci
        q = ex * ex + ey * ey
        if q > r2:
            xr = r2 * ex / q + cr
            xi = r2 * ey / q + ci
        ex = yr - cr
        ey = yi - ci
        q = ex * ex + ey * ey
        if q > r2:
            yr = r2 * ex / q + cr
            yi = r2 * ey / q + ci
        ex = xr - yr
        ey = xi - yi
        out[m + 1] = sqrt(ex * ex + ey * ey)


def coupling_batch(circles, list bitgens, long m_max):
    cdef double cre[3]
    cdef double cim[3]
    cdef double rad[3]
    cdef int r
    for r in range(3):
        cre[r] = circles[0][r]
        cim[r] = circles[1][r]
        rad[r] = circles[2][r]
    cdef Py_ssize_t n = len(bitgens), k
    res = np.empty((n, m_max + 1), dtype=np.float64)
    cdef double[:, ::1] view = res
    cdef bitgen_t** ptrs = _pointers(bitgens)
    try:
        with nogil:
            for k in range(n):
                coupling_run(cre, cim, rad, ptrs[k], m_max, &view[k, 0])
    finally:
        free(ptrs)
    return res.tolist()


def coupling_one(circles, bg, long m_max):
    return coupling_batch(circles, [bg], m_max)[0]
