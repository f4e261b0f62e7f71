"""Pure-Python walk and coupling kernels.

Reference implementation of the compiled kernels in ``_kernels.pyx``.
Both run the same IEEE double operations in the same order, so results
agree bit for bit. Complex numbers are spelled out as (re, im) pairs for
that reason.

Random indices are ``raw % 3`` over the raw 64-bit output of the walk's
own Philox stream; step s consumes the s-th raw value.
"""

import math

TWO_PI = 2.0 * math.pi
INV_2_53 = 1.0 / 9007199254740992.0
RENORM_EVERY = 64
DESCENT_TOL = 1e-10

OK = 0
EXHAUSTED = 1
AMBIGUOUS = 2
NONFINITE = 3

RAW_BLOCK = 256


def pymod(x, m):
    r = math.fmod(x, m)
    if r < 0.0:
        r += m
    elif r == 0.0:
        r = 0.0
    return r


class _Raw:
    """Sequential raw uint64 draws from a numpy bit generator."""

    __slots__ = ("bg", "buf", "pos")

    def __init__(self, bg):
        self.bg = bg
        self.buf = []
        self.pos = 0

    def next(self):
        if self.pos == len(self.buf):
            self.buf = self.bg.random_raw(RAW_BLOCK).tolist()
            self.pos = 0
        v = self.buf[self.pos]
        self.pos += 1
        return v


def endpoint_angle(p, q, x0, y0):
    """Disk angle of the projective boundary point (p, q), disk centered at x0 + i y0."""
    if q < 0.0 or (q == 0.0 and p < 0.0):
        p = -p
        q = -q
    return pymod(-2.0 * math.atan2(y0 * q, p - x0 * q), TWO_PI)


def walk_one(params, bg, max_steps, target, trace=None):
    """Run one walk. Returns (status, steps, moves, full, lo, hi, a, b, c, d).

    params = (gens, kinds, p1, p2, base, ends, x0, y0), see walk.pack_params.
    When ``trace`` is a list, one record per step is appended:
    (step, index, lazy, a, b, c, d, lo, hi, full, crossed_endpoints).
    """
    gens, kinds, p1, p2, base, ends, x0, y0 = params
    raw = _Raw(bg)
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    count = 0
    full = 1
    lo, hi = 0.0, TWO_PI
    steps = 0
    moves = 0
    status = EXHAUSTED
    while steps < max_steps:
        r = raw.next() % 3
        s = a * d - b * c
        yz = y0 if s > 0.0 else -y0
        nr = d * x0 - b
        ni = d * yz
        dr = a - c * x0
        di = -c * yz
        den = dr * dr + di * di
        wr = (nr * dr + ni * di) / den
        wi = (ni * dr - nr * di) / den
        if kinds[r] == 0:
            v = (wr - p1[r]) / wi
        else:
            ex = wr - p1[r]
            v = (ex * ex + wi * wi - p2[r] * p2[r]) / (2.0 * p2[r] * wi)
        if not math.isfinite(v):
            status = NONFINITE
            break
        if math.fabs(v) < DESCENT_TOL:
            status = AMBIGUOUS
            break
        steps += 1
        if v * base[r] < 0.0:
            if trace is not None:
                trace.append((steps, r, True, a, b, c, d, lo, hi, full, None))
            continue
        # the crossed line is u(L_r); zeta lies on its far side from z0
        (ep1, eq1), (ep2, eq2) = ends[r]
        t1 = endpoint_angle(a * ep1 + b * eq1, c * ep1 + d * eq1, x0, y0)
        t2 = endpoint_angle(a * ep2 + b * eq2, c * ep2 + d * eq2, x0, y0)
        gap = pymod(t2 - t1, TWO_PI)
        if gap < math.pi:
            start = t1
            width = gap
        else:
            start = t2
            width = TWO_PI - gap
        if full:
            lo = start
            hi = start + width
            full = 0
        else:
            shift = math.floor(((lo + hi) * 0.5 - (start + width * 0.5)) / TWO_PI + 0.5)
            start = start + shift * TWO_PI
            if start > lo:
                lo = start
            if start + width < hi:
                hi = start + width
            if hi < lo:
                mid = (lo + hi) * 0.5
                lo = mid
                hi = mid
        g = gens[r]
        na = a * g[0] + b * g[2]
        nb = a * g[1] + b * g[3]
        nc = c * g[0] + d * g[2]
        nd = c * g[1] + d * g[3]
        a, b, c, d = na, nb, nc, nd
        count += 1
        if count % RENORM_EVERY == 0:
            sc = math.sqrt(math.fabs(a * d - b * c))
            a = a / sc
            b = b / sc
            c = c / sc
            d = d / sc
        moves += 1
        if trace is not None:
            trace.append((steps, r, False, a, b, c, d, lo, hi, full,
                          ((a * ep1 + b * eq1, c * ep1 + d * eq1),
                           (a * ep2 + b * eq2, c * ep2 + d * eq2))))
        if hi - lo < target:
            status = OK
            break
    return (status, steps, moves, full, lo, hi, a, b, c, d)


def walk_batch(params, bitgens, max_steps, target):
    return [walk_one(params, bg, max_steps, target) for bg in bitgens]


def coupling_one(circles, bg, m_max):
    """Chord distances |X_m - Y_m| for m = 0..m_max under one shared index stream."""
    cre, cim, rad = circles
    raw = _Raw(bg)
    tx = (raw.next() >> 11) * INV_2_53 * TWO_PI
    ty = (raw.next() >> 11) * INV_2_53 * TWO_PI
    xr, xi = math.cos(tx), math.sin(tx)
    yr, yi = math.cos(ty), math.sin(ty)
    ex = xr - yr
    ey = xi - yi
    out = [math.sqrt(ex * ex + ey * ey)]
    for _ in range(m_max):
        r = raw.next() % 3
        cr, ci, r2 = cre[r], cim[r], rad[r] * rad[r]
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
        out.append(math.sqrt(ex * ex + ey * ey))
    return out


def coupling_batch(circles, bitgens, m_max):
    return [coupling_one(circles, bg, m_max) for bg in bitgens]
