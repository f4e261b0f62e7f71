"""The interrobang function.

On rationals it is given by the three-branch recursion

    ‽(0) = 0
    ‽(x) = 4^-n (1 - 2 ‽({1/x}))                 0 < x <= 1/2, n = floor(1/x)
    ‽(x) = 3/8 - 3/4 ‽(1/x - 1) - 1/2 ‽(1 - x)   1/2 < x <= 1

which terminates because every argument on the right has smaller height.
It extends to a continuous strictly increasing function on [0, 1]; real
arguments are handled by rational brackets, and quadratic irrationals
exactly through a finite linear system.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import (
    DomainError,
    InternalInvariantError,
    NonconvergentInputError,
    SingularMatrixError,
)
from .minkowski import first_partial_quotient_of_inverse, qmark_surd
from .numeric_core import (
    QuadraticSurd,
    RationalMatrix,
    cf_of_surd,
    floor_recip,
    is_diagonally_dominant,
    solve_exact,
)

__all__ = [
    "InterroContext",
    "InterroBracket",
    "SurdSystem",
    "interro",
    "interro_rational",
    "interro_recursive",
    "interro_bracket",
    "interro_surd",
    "surd_system",
    "interro_inverse",
    "fraction_search",
    "fractions_in_interval",
    "saturation_chain",
    "interro_grid",
]

ONE_HALF = Fraction(1, 2)
THREE_EIGHTHS = Fraction(3, 8)
_3_4 = Fraction(3, 4)

DEFAULT_MEMO_SIZE = 1 << 20


class InterroContext:
    """Evaluator for ‽ on rationals with its own bounded LRU memo.

    Keys are (numerator, denominator) in lowest terms. Contexts are not
    shared across threads; see :func:`default_context`.
    """

    def __init__(self, maxsize: int = DEFAULT_MEMO_SIZE):
        self.maxsize = max(16, int(maxsize))
        self._memo = OrderedDict()
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._memo)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise DomainError(f"‽ is defined on [0, 1], got {x}")
        return self._value(x.numerator, x.denominator)

    def _store(self, key, value):
        memo = self._memo
        memo[key] = value
        if len(memo) > self.maxsize:
            memo.popitem(last=False)

    def _value(self, p: int, q: int) -> Fraction:
        memo = self._memo
        root = (p, q)
        if root in memo:
            self.hits += 1
            memo.move_to_end(root)
            return memo[root]
        # values computed in this call stay in `work` until it returns, so
        # LRU eviction can never drop a child before its parent reads it
        work = {}

        def known(k):
            if k in work:
                return True
            if k in memo:
                work[k] = memo[k]
                return True
            return False

        stack = [root]
        while stack:
            key = stack[-1]
            if known(key):
                stack.pop()
                continue
            p, q = key
            if p == 0:
                work[key] = Fraction(0)
                stack.pop()
                continue
            self.misses += 1
            if 2 * p <= q:
                n, r = divmod(q, p)
                child = (r, p)
                if not known(child):
                    stack.append(child)
                    continue
                v = (1 - 2 * work[child]) / (1 << (2 * n))
            else:
                c1, c2 = (q - p, p), (q - p, q)
                missing = [c for c in (c1, c2) if not known(c)]
                if missing:
                    stack.extend(missing)
                    continue
                v = THREE_EIGHTHS - _3_4 * work[c1] - work[c2] / 2
            work[key] = v
            self._store(key, v)
            stack.pop()
        value = work[root]
        self._store(root, value)
        return value


_local = threading.local()


def default_context() -> InterroContext:
    """Per-thread evaluation context."""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = InterroContext()
    return ctx


def interro_rational(x, context: InterroContext | None = None) -> Fraction:
    """‽(x) for rational x in [0, 1]. The result is a dyadic rational."""
    return (context or default_context())(x)


def interro_recursive(x) -> Fraction:
    """Direct transcription of the recursion, no memo. Used as an oracle."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    if x <= ONE_HALF:
        n, frac = floor_recip(x)
        return Fraction(1, 4 ** n) * (1 - 2 * interro_recursive(frac))
    return THREE_EIGHTHS - _3_4 * interro_recursive(1 / x - 1) - ONE_HALF * interro_recursive(1 - x)


# ---------------------------------------------------------------------------
# quadratic irrationals


@dataclass(frozen=True)
class SurdSystem:
    """Linear system for ‽ at the points x_i = ?^-1(i/n), n = den ?(x).

    Unknown number p of the system is ‽(x_{indices[p]}). The rows are
    those of the full (n+1)-row system restricted to ``indices``, which is
    closed under the references of its rows, so the restriction has the
    same solution on those indices.
    """

    n: int
    index: int  # n * ?(x)
    indices: tuple  # original row indices, increasing
    partial_quotients: tuple  # floor(1/x_i) per row (0 for i = 0)
    A: RationalMatrix
    b: tuple
    D: tuple

    @property
    def position(self) -> int:
        """Position of the unknown ‽(x) in the solution vector."""
        return self.indices.index(self.index)

    def scaled(self) -> RationalMatrix:
        """A times the diagonal matrix D."""
        return RationalMatrix([[v * self.D[j] for j, v in enumerate(row)] for row in self.A.rows])


def _surd_row(n: int, i: int):
    """(k, {j: coefficient}, b_i) for row i of the full system."""
    if i == 0:
        return 0, {0: Fraction(1)}, Fraction(0)
    coeffs = {i: Fraction(1)}
    if 2 * i <= n:
        k = first_partial_quotient_of_inverse(Fraction(i, n))
        j = 2 * n - (1 << k) * i
        if not 0 <= j <= n:
            raise InternalInvariantError(
                f"index 2n - 2^k i = {j} outside [0, {n}] (i={i}, k={k})")
        # coinciding targets add up
        coeffs[j] = coeffs.get(j, 0) + Fraction(2, 4 ** k)
        return k, coeffs, Fraction(1, 4 ** k)
    for j, c in ((2 * n - 2 * i, _3_4), (n - i, ONE_HALF)):
        coeffs[j] = coeffs.get(j, 0) + c
    return 1, coeffs, THREE_EIGHTHS


def surd_system(x: QuadraticSurd, full: bool = False) -> SurdSystem:
    """Assemble the system for ‽(x).

    With ``full`` every row i = 0..n is included; otherwise only the rows
    reachable from i = n ?(x), which keeps the system small when n is large.
    """
    qx = qmark_surd(x)
    n, index = qx.denominator, qx.numerator
    rows = {}
    if full:
        for i in range(n + 1):
            rows[i] = _surd_row(n, i)
    else:
        todo = [index]
        while todo:
            i = todo.pop()
            if i in rows:
                continue
            rows[i] = _surd_row(n, i)
            todo.extend(j for j in rows[i][1] if j not in rows)
    indices = tuple(sorted(rows))
    pos = {i: p for p, i in enumerate(indices)}
    A = RationalMatrix.zeros(len(indices))
    for i in indices:
        for j, c in rows[i][1].items():
            A[pos[i], pos[j]] = c
    b = tuple(rows[i][2] for i in indices)
    ks = tuple(rows[i][0] for i in indices)
    D = tuple(1 if 2 * i <= n else 4 for i in indices)
    return SurdSystem(n, index, indices, ks, A, b, D)


def interro_surd(x: QuadraticSurd) -> Fraction:
    """‽(x) for a quadratic irrational 0 < x < 1, as an exact rational."""
    if not isinstance(x, QuadraticSurd):
        raise DomainError("interro_surd needs an irrational QuadraticSurd")
    if not (x > 0 and x < 1):
        raise DomainError(f"interro_surd needs 0 < x < 1, got {x}")
    system = surd_system(x)
    if not is_diagonally_dominant(system.scaled()):
        raise InternalInvariantError("AD is not diagonally dominant")
    try:
        solution = solve_exact(system.A, system.b)
    except SingularMatrixError as exc:
        raise InternalInvariantError(f"surd system is singular: {exc}") from exc
    return solution[system.position]


def interro(x):
    """‽ on a rational or quadratic-surd argument."""
    if isinstance(x, QuadraticSurd):
        return interro_surd(x)
    return interro_rational(x)


# ---------------------------------------------------------------------------
# real arguments


@dataclass(frozen=True)
class InterroBracket:
    lower: Fraction
    upper: Fraction
    arg_lower: Fraction
    arg_upper: Fraction

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def __contains__(self, v) -> bool:
        return self.lower <= v <= self.upper


class _Locator:
    """Exact three-way comparison of a real query against rationals."""

    def __init__(self, x, budget: int):
        self.budget = budget
        self.used = 0
        self.exact = None
        self.stream = None
        self.lo = self.hi = None
        if isinstance(x, QuadraticSurd):
            self.exact = x
        elif isinstance(x, (int, Fraction)):
            self.exact = Fraction(x)
        elif isinstance(x, tuple) and len(x) == 2 and not isinstance(x[0], tuple):
            self.stream = iter([x])
        elif isinstance(x, Iterable):
            self.stream = iter(x)
        else:
            raise DomainError(
                "real queries must be exact rationals, surds, rational intervals or interval streams")
        if self.stream is not None:
            self._advance()

    def _advance(self):
        try:
            lo, hi = next(self.stream)
        except StopIteration:
            raise NonconvergentInputError("interval stream exhausted before reaching target") from None
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise DomainError("interval endpoints out of order")
        if self.lo is not None and (lo < self.lo or hi > self.hi):
            lo, hi = max(lo, self.lo), min(hi, self.hi)
        self.lo, self.hi = lo, hi
        self.used += 1
        if self.used > self.budget:
            raise NonconvergentInputError(f"budget of {self.budget} refinements exceeded")

    def compare(self, m: Fraction) -> int:
        """Sign of x - m."""
        if self.exact is not None:
            d = self.exact - m
            return (d > 0) - (d < 0)
        while True:
            if m < self.lo:
                return 1
            if m > self.hi:
                return -1
            if self.lo == self.hi == m:
                return 0
            self._advance()

    def bounds(self):
        if self.exact is not None:
            return None
        return self.lo, self.hi


def _gallop(cmp_fn, base, step, direction, enough=None):
    """Largest k >= 1 with cmp_fn(base + k*step) == direction, given k = 1 works.

    base and step are (p, q) integer pairs. When ``enough(point)`` is given
    the search stops at the first valid k whose point already satisfies it,
    which keeps partial quotients (and the cost of evaluating ‽ at the
    point) small when the target has a huge one.
    """
    def point(k):
        return Fraction(base[0] + k * step[0], base[1] + k * step[1])

    def valid(k):
        return cmp_fn(point(k)) == direction

    if enough is not None and enough(point(1)):
        return 1
    hi = 2
    while valid(hi):
        if enough is not None and enough(point(hi)):
            # smallest k in (hi/2, hi] that is enough; all of them are valid
            lo = hi // 2
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if enough(point(mid)):
                    hi = mid
                else:
                    lo = mid
            return hi
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if valid(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _stern_brocot_descend(cmp_fn, done, start=((0, 1), (1, 1)), capped=False):
    """Narrow a Stern-Brocot interval around a target.

    cmp_fn(m) is the sign of (target - m); done(L, R) stops the descent.
    Returns (L, R) as Fractions, equal when the target was hit exactly.
    With ``capped`` each run of mediants also stops as soon as done holds.
    """
    (lp, lq), (rp, rq) = start
    while True:
        L, R = Fraction(lp, lq), Fraction(rp, rq)
        if done(L, R):
            return L, R
        m = Fraction(lp + rp, lq + rq)
        c = cmp_fn(m)
        if c == 0:
            return m, m
        if c > 0:
            enough = (lambda P: done(P, R)) if capped else None
            k = _gallop(cmp_fn, (lp, lq), (rp, rq), 1, enough)
            lp, lq = lp + k * rp, lq + k * rq
        else:
            enough = (lambda P: done(L, P)) if capped else None
            k = _gallop(cmp_fn, (rp, rq), (lp, lq), -1, enough)
            rp, rq = rp + k * lp, rq + k * lq


def _sign_cmp(t: Fraction):
    return lambda m: (t > m) - (t < m)


def _outer_bracket(lo: Fraction, hi: Fraction, eps: Fraction, f) -> "InterroBracket":
    """Bracket for ‽ on all of [lo, hi] from small-height rationals outside it."""
    tol = eps / 3
    done = lambda L, R: f(R) - f(L) < tol
    a, _ = _stern_brocot_descend(_sign_cmp(lo), done, capped=True)
    _, b = _stern_brocot_descend(_sign_cmp(hi), done, capped=True)
    return InterroBracket(f(a), f(b), a, b)


def interro_bracket(x, eps, budget: int = 10_000, context: InterroContext | None = None) -> InterroBracket:
    """Rational bracket for ‽(x) of width < eps.

    x may be a Fraction (exact hit), a QuadraticSurd, a rational interval
    (lo, hi), or an iterable of nested rational intervals converging to x.
    The bracket comes from a Stern-Brocot descent toward x; monotonicity
    of ‽ makes [‽(arg_lower), ‽(arg_upper)] contain ‽(x).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    f = context or default_context()
    loc = _Locator(x, budget)
    if loc.exact is not None and not isinstance(loc.exact, QuadraticSurd):
        v = f(loc.exact)
        return InterroBracket(v, v, loc.exact, loc.exact)
    if loc.exact is not None and not (loc.exact > 0 and loc.exact < 1):
        raise DomainError("surd argument must lie in (0, 1)")
    if loc.stream is not None and (loc.lo < 0 or loc.hi > 1):
        lo, hi = max(loc.lo, Fraction(0)), min(loc.hi, Fraction(1))
        if lo > hi:
            raise DomainError("query interval misses [0, 1]")
        loc.lo, loc.hi = lo, hi

    steps = [0]

    def done(L, R):
        steps[0] += 1
        if steps[0] > budget:
            raise NonconvergentInputError(f"no bracket of width {eps} within {budget} steps")
        return f(R) - f(L) < eps

    try:
        L, R = _stern_brocot_descend(loc.compare, done, capped=True)
    except NonconvergentInputError:
        # the descent stalled (e.g. at a rational inside every interval); the
        # tightest interval seen still brackets ‽(x) by monotonicity
        if loc.stream is None:
            raise
        out = _outer_bracket(loc.lo, loc.hi, eps, f)
        if out.width < eps:
            return out
        raise
    return InterroBracket(f(L), f(R), L, R)


def interro_inverse(y, eps, context: InterroContext | None = None):
    """Rational interval (lo, hi) of width < eps containing ‽^-1(y).

    Bisection by Stern-Brocot mediants; collapses to (x, x) when a
    mediant hits the preimage exactly.
    """
    y = Fraction(y)
    eps = Fraction(eps)
    if not 0 <= y <= THREE_EIGHTHS:
        raise DomainError(f"‽^-1 is defined on [0, 3/8], got {y}")
    if eps <= 0:
        raise DomainError("eps must be positive")
    if y == 0:
        return Fraction(0), Fraction(0)
    if y == THREE_EIGHTHS:
        return Fraction(1), Fraction(1)
    f = context or default_context()

    def cmp_fn(m):
        d = y - f(m)
        return (d > 0) - (d < 0)

    return _stern_brocot_descend(cmp_fn, lambda L, R: R - L < eps)


def fractions_in_interval(lo, hi, max_den: int):
    """All p/q in [lo, hi] ∩ [0, 1] with q <= max_den, in increasing order.

    Walks the Stern-Brocot tree, jumping over runs of mediants that stay
    on one side of the interval.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    out = []
    for end in (Fraction(0), Fraction(1)):
        if lo <= end <= hi:
            out.append(end)
    stack = [(0, 1, 1, 1)]
    while stack:
        lp, lq, rp, rq = stack.pop()
        mq = lq + rq
        if mq > max_den:
            continue
        mp = lp + rp
        m = Fraction(mp, mq)
        if m < lo:
            # largest k with (lp + k rp)/(lq + k rq) < lo and denominator in range
            num = lo * lq - lp
            den = rp - lo * rq
            k = -((-num) // den) - 1 if den > 0 else (max_den - lq) // rq
            k = max(1, min(k, (max_den - lq) // rq))
            stack.append((lp + k * rp, lq + k * rq, rp, rq))
        elif m > hi:
            num = rp - hi * rq
            den = hi * lq - lp
            k = -((-num) // den) - 1 if den > 0 else (max_den - rq) // lq
            k = max(1, min(k, (max_den - rq) // lq))
            stack.append((lp, lq, rp + k * lp, rq + k * lq))
        else:
            out.append(m)
            stack.append((lp, lq, mp, mq))
            stack.append((mp, mq, rp, rq))
    return sorted(set(out))


def fraction_search(y, max_den: int, context: InterroContext | None = None):
    """A/B with B <= max_den and ‽(A/B) = y exactly, or None."""
    y = Fraction(y)
    if not 0 <= y <= THREE_EIGHTHS:
        return None
    f = context or default_context()
    # two fractions with denominators <= N differ by at least 1/N^2
    lo, hi = interro_inverse(y, Fraction(1, 2 * max_den * max_den), context=f)
    for cand in fractions_in_interval(lo, hi, max_den):
        if f(cand) == y:
            return cand
    return None


def saturation_chain(a, b, eps, context: InterroContext | None = None):
    """Rationals a = x_0 < ... < x_n = b with |‽(x_{i+1}) - ‽(x_i)| < eps.

    Built by inserting mediants wherever a gap is still too large.
    """
    a, b, eps = Fraction(a), Fraction(b), Fraction(eps)
    if not 0 <= a <= b <= 1:
        raise DomainError("chain endpoints must satisfy 0 <= a <= b <= 1")
    f = context or default_context()
    if a == b:
        return [a]
    done = [a]
    todo = [b]
    while todo:
        left, right = done[-1], todo[-1]
        if f(right) - f(left) < eps:
            done.append(todo.pop())
            continue
        m = Fraction(left.numerator + right.numerator, left.denominator + right.denominator)
        if not left < m < right:
            m = (left + right) / 2
        todo.append(m)
    return done


def interro_grid(n: int, context: InterroContext | None = None):
    """[(k/n, ‽(k/n)) for k = 0..n] for plotting."""
    f = context or default_context()
    return [(Fraction(k, n), f(Fraction(k, n))) for k in range(n + 1)]


def _surd_residual(x: QuadraticSurd) -> Fraction:
    """Left minus right side of the defining equation at a surd x."""
    v = interro_surd(x)
    if x <= ONE_HALF:
        n, frac = floor_recip(x)
        rhs = Fraction(1, 4 ** n) * (1 - 2 * interro_surd(frac))
    else:
        rhs = THREE_EIGHTHS - _3_4 * interro_surd(1 / x - 1) - ONE_HALF * interro_surd(1 - x)
    return v - rhs


def _cf_of(x):
    return cf_of_surd(x)
