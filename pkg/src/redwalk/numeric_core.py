"""Exact arithmetic: rationals, quadratic surds, continued fractions,
periodic binary expansions and a fraction-preserving linear solver.

Rationals are :class:`fractions.Fraction` throughout; they are already
canonical (lowest terms, positive denominator).
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import DomainError, SingularMatrixError

__all__ = [
    "Fraction",
    "QuadraticSurd",
    "ContinuedFraction",
    "PeriodicBinary",
    "RationalMatrix",
    "height",
    "is_dyadic",
    "cf_of_rational",
    "cf_of_surd",
    "surd_of_cf",
    "floor_recip",
    "binary_of_rational",
    "rational_of_binary",
    "solve_exact",
    "is_diagonally_dominant",
    "parse_exact",
    "format_exact",
    "exact_floor",
]


def height(x) -> int:
    """|a| + |b| for x = a/b in lowest terms."""
    x = Fraction(x)
    return abs(x.numerator) + x.denominator


def is_dyadic(x) -> bool:
    q = Fraction(x).denominator
    return q & (q - 1) == 0


_TRIAL_LIMIT = 10**12


def _squarefree_split(n: int):
    """Return (f, s) with n = f*f*s and s squarefree."""
    if n > _TRIAL_LIMIT:
        # discriminants of long periods run to many digits; trial division would not finish
        from sympy import factorint

        f, s = 1, 1
        for p, e in factorint(n).items():
            p, e = int(p), int(e)
            f *= p ** (e // 2)
            s *= p ** (e % 2)
        return f, s
    f, s = 1, 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1 if p == 2 else 2
    return f, s * n


def _sign_pq(p: Fraction, q: Fraction, d: int) -> int:
    """Sign of p + q*sqrt(d) for rationals p, q and non-square d."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    return sp if p * p > q * q * d else sq


class QuadraticSurd:
    """Exact irrational number (a + b*sqrt(d))/c.

    Normalized at construction: d squarefree and >= 2, c > 0,
    gcd(a, b, c) = 1, b != 0. Use :meth:`make` when the data may describe
    a rational number; it returns a Fraction in that case.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        a, b, c, d = int(a), int(b), int(c), int(d)
        if c == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if d < 0:
            raise DomainError("negative radicand: only real surds are supported")
        f, d = _squarefree_split(d) if d > 0 else (0, 0)
        b *= f
        if b == 0 or d == 1 or d == 0:
            raise DomainError("value is rational; use QuadraticSurd.make")
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        self.a, self.b, self.c, self.d = a // g, b // g, c // g, d

    @classmethod
    def make(cls, a, b, c, d):
        """Build (a + b*sqrt(d))/c, returning a Fraction when it is rational."""
        if d > 0:
            f, s = _squarefree_split(int(d))
            if s == 1:
                return Fraction(int(a) + int(b) * f, int(c))
        if b == 0 or d == 0:
            return Fraction(int(a), int(c))
        return cls(a, b, c, d)

    @classmethod
    def sqrt(cls, d: int):
        return cls.make(0, 1, 1, d)

    @classmethod
    def _from_pq(cls, p: Fraction, q: Fraction, d: int):
        """Build p + q*sqrt(d) from rational parts."""
        den = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
        return cls.make(p.numerator * (den // p.denominator),
                        q.numerator * (den // q.denominator), den, d)

    # -- rational parts -------------------------------------------------
    @property
    def rational_part(self) -> Fraction:
        return Fraction(self.a, self.c)

    @property
    def irrational_coeff(self) -> Fraction:
        return Fraction(self.b, self.c)

    def _pq(self):
        return Fraction(self.a, self.c), Fraction(self.b, self.c)

    def conjugate(self):
        return QuadraticSurd(self.a, -self.b, self.c, self.d)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise DomainError("surds with different radicands do not mix")
            return other._pq()
        if isinstance(other, (int, Fraction)) or isinstance(other, _RationalABC):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p, q = self._pq()
        return QuadraticSurd._from_pq(p + o[0], q + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p, q = self._pq()
        return QuadraticSurd._from_pq(p - o[0], q - o[1], self.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p, q = self._pq()
        r, s = o
        return QuadraticSurd._from_pq(p * r + q * s * self.d, p * s + q * r, self.d)

    __rmul__ = __mul__

    def reciprocal(self):
        p, q = self._pq()
        n = p * p - q * q * self.d
        return QuadraticSurd._from_pq(p / n, -q / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadraticSurd):
            return self * other.reciprocal()
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * (1 / o[0])

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.reciprocal() * o[0]

    # -- order ----------------------------------------------------------
    def sign(self) -> int:
        p, q = self._pq()
        return _sign_pq(p, q, self.d)

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p, q = self._pq()
        return _sign_pq(p - o[0], q - o[1], self.d)

    def __lt__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s < 0

    def __le__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s <= 0

    def __gt__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s > 0

    def __ge__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s >= 0

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)
        return False

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __floor__(self) -> int:
        bd = self.b * self.b * self.d
        r = math.isqrt(bd)
        fb = r if self.b > 0 else -r - 1
        return (self.a + fb) // self.c

    def __float__(self):
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}{sign}{abs(self.b)}√{self.d})/{self.c}"


def exact_floor(x) -> int:
    return math.floor(x)


# ---------------------------------------------------------------------------
# continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    """[q0; q1, ..., qm, (p1, ..., pk) repeated]."""

    preperiod: tuple
    period: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(v) for v in self.preperiod))
        object.__setattr__(self, "period", tuple(int(v) for v in self.period))
        if not self.preperiod:
            raise DomainError("continued fraction needs an integer part")
        if any(v < 1 for v in self.preperiod[1:] + self.period):
            raise DomainError("partial quotients after the first must be positive")

    @property
    def is_rational(self) -> bool:
        return not self.period

    def canonical(self) -> "ContinuedFraction":
        pre, per = list(self.preperiod), list(self.period)
        if not per:
            while len(pre) > 1 and pre[-1] == 1:
                pre.pop()
                pre[-1] += 1
            return ContinuedFraction(tuple(pre))
        k = len(per)
        for size in range(1, k + 1):
            if k % size == 0 and per == per[:size] * (k // size):
                per = per[:size]
                break
        # fold the tail of the preperiod into the period
        while len(pre) > 1 and pre[-1] == per[-1]:
            pre.pop()
            per = [per[-1]] + per[:-1]
        return ContinuedFraction(tuple(pre), tuple(per))

    def terms(self):
        """Infinite (or finite) iterator over partial quotients."""
        yield from self.preperiod
        if self.period:
            while True:
                yield from self.period

    def convergents(self):
        """Yield successive convergents p/q as Fractions."""
        p0, q0, p1, q1 = 1, 0, 0, 1
        for a in self.terms():
            p0, p1 = a * p0 + p1, p0
            q0, q1 = a * q0 + q1, q0
            yield Fraction(p0, q0)

    def __str__(self):
        head = ", ".join(str(v) for v in self.preperiod[1:])
        body = f"[{self.preperiod[0]}"
        if head:
            body += "; " + head
        if self.period:
            body += ("; " if not head else ", ") + "(" + ", ".join(map(str, self.period)) + ")"
        return body + "]"


def cf_of_rational(x) -> ContinuedFraction:
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    terms = []
    while q:
        a = p // q
        terms.append(a)
        p, q = q, p - a * q
    return ContinuedFraction(tuple(terms)).canonical()


def cf_of_surd(x: QuadraticSurd) -> ContinuedFraction:
    """Eventually periodic continued fraction of a quadratic irrational."""
    if not isinstance(x, QuadraticSurd):
        raise DomainError("cf_of_surd needs an irrational QuadraticSurd")
    # rewrite as (P + sqrt(D))/Q with Q | D - P^2
    P, Q, D = x.a, x.c, x.b * x.b * x.d
    if x.b < 0:
        P, Q = -P, -Q
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    s = math.isqrt(D)
    seen = {}
    terms = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(terms)
        a = (P + s) // Q if Q > 0 else (P + s + 1) // Q
        terms.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    pre, per = terms[:start], terms[start:]
    if not pre:
        pre, per = per[:1], per[1:] + per[:1]
    return ContinuedFraction(tuple(pre), tuple(per)).canonical()


def _mobius_cf(terms):
    A, B, C, D = 1, 0, 0, 1
    for t in terms:
        A, B, C, D = A * t + B, A, C * t + D, C
    return A, B, C, D


def surd_of_cf(cf: ContinuedFraction):
    """Exact value of a continued fraction: Fraction or QuadraticSurd."""
    if not cf.period:
        v = Fraction(cf.preperiod[-1])
        for t in reversed(cf.preperiod[:-1]):
            v = t + 1 / v
        return v
    A, B, C, D = _mobius_cf(cf.period)
    # tail y = (A y + B)/(C y + D), y > 1, a root of C y^2 + (D - A) y - B.
    # Divide out the content first: long periods give huge coefficients,
    # but the reduced form has the small discriminant of the input.
    g = math.gcd(C, D - A, B)
    p, q, r = (A - D) // g, B // g, C // g
    y = QuadraticSurd.make(p, 1, 2 * r, p * p + 4 * q * r)
    v = y
    for t in reversed(cf.preperiod):
        v = t + 1 / v
    return v


def floor_recip(x):
    """(floor(1/x), 1/x - floor(1/x)) for 0 < x <= 1, exact."""
    if not isinstance(x, QuadraticSurd):
        x = Fraction(x)
    if not (x > 0 and x <= 1):
        raise DomainError(f"floor_recip needs 0 < x <= 1, got {x}")
    inv = 1 / x
    n = math.floor(inv)
    return n, inv - n


# ---------------------------------------------------------------------------
# periodic binary expansions


@dataclass(frozen=True)
class PeriodicBinary:
    """integer_part . preperiod_bits (period_bits)*"""

    integer_part: int
    preperiod_bits: tuple = ()
    period_bits: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "preperiod_bits", tuple(int(b) for b in self.preperiod_bits))
        object.__setattr__(self, "period_bits", tuple(int(b) for b in self.period_bits))
        if any(b not in (0, 1) for b in self.preperiod_bits + self.period_bits):
            raise DomainError("bits must be 0 or 1")

    @property
    def is_dyadic(self) -> bool:
        return not self.period_bits

    def value(self) -> Fraction:
        return rational_of_binary(self)

    def canonical(self) -> "PeriodicBinary":
        return binary_of_rational(self.value()) if self.value() <= 1 else self

    def bits(self):
        """Infinite iterator over the fractional bits."""
        yield from self.preperiod_bits
        if self.period_bits:
            while True:
                yield from self.period_bits
        else:
            while True:
                yield 0

    def __str__(self):
        s = f"{self.integer_part}." + "".join(map(str, self.preperiod_bits))
        if self.period_bits:
            s += "(" + "".join(map(str, self.period_bits)) + ")"
        return s


def binary_of_rational(x) -> PeriodicBinary:
    """Canonical binary expansion of a rational in [0, 1] by long division."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"binary expansion needs 0 <= x <= 1, got {x}")
    if x == 1:
        return PeriodicBinary(1)
    p, q = x.numerator, x.denominator
    seen = {}
    bits = []
    r = p
    while r and r not in seen:
        seen[r] = len(bits)
        r *= 2
        bits.append(r // q)
        r %= q
    if not r:
        return PeriodicBinary(0, tuple(bits))
    start = seen[r]
    return PeriodicBinary(0, tuple(bits[:start]), tuple(bits[start:]))


def rational_of_binary(b: PeriodicBinary) -> Fraction:
    value = Fraction(b.integer_part)
    n = len(b.preperiod_bits)
    if n:
        value += Fraction(int("".join(map(str, b.preperiod_bits)), 2), 1 << n)
    k = len(b.period_bits)
    if k:
        value += Fraction(int("".join(map(str, b.period_bits)), 2), ((1 << k) - 1) << n)
    return value


# ---------------------------------------------------------------------------
# exact linear algebra


class RationalMatrix:
    """Dense matrix of Fractions, stored row-major."""

    def __init__(self, rows):
        self.rows = [[Fraction(v) for v in row] for row in rows]
        if not self.rows or any(len(r) != len(self.rows[0]) for r in self.rows):
            raise DomainError("matrix must be nonempty and rectangular")

    @classmethod
    def zeros(cls, n, m=None):
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __setitem__(self, ij, v):
        i, j = ij
        self.rows[i][j] = Fraction(v)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            cols = list(zip(*other.rows))
            return RationalMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols]
                                   for r in self.rows])
        return [sum(a * Fraction(b) for a, b in zip(r, other)) for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __repr__(self):
        return f"RationalMatrix({[[str(v) for v in r] for r in self.rows]})"


def solve_exact(A: RationalMatrix, b) -> list:
    """Solve A x = b by Gaussian elimination over the rationals.

    The pivot is the first nonzero entry at or below the diagonal.
    """
    n, m = A.shape
    if n != m:
        raise DomainError("solve_exact needs a square matrix")
    if len(b) != n:
        raise DomainError("right-hand side has the wrong length")
    M = [row[:] + [Fraction(v)] for row, v in zip(A.rows, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no nonzero pivot in column {col}")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        for r in range(col + 1, n):
            f = M[r][col]
            if f:
                f *= inv
                row = M[r]
                for k in range(col, n + 1):
                    if prow[k]:
                        row[k] -= f * prow[k]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        row = M[i]
        s = row[n] - sum(row[k] * x[k] for k in range(i + 1, n) if row[k])
        x[i] = s / row[i]
    return x


def is_diagonally_dominant(A: RationalMatrix) -> bool:
    n, m = A.shape
    if n != m:
        raise DomainError("diagonal dominance needs a square matrix")
    return all(abs(row[i]) > sum(abs(v) for j, v in enumerate(row) if j != i)
               for i, row in enumerate(A.rows))


# ---------------------------------------------------------------------------
# text form


_BINOPS = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        # floats are re-read from source text so that "0.1" means 1/10
        raise DomainError("internal: float constant reached evaluator")
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left, right = _eval_node(node.left), _eval_node(node.right)
        if isinstance(node.op, ast.Div) and right == 0 and not isinstance(right, QuadraticSurd):
            raise DomainError("division by zero")
        if isinstance(node.op, ast.Div):
            return left / right
        return {ast.Add: lambda: left + right, ast.Sub: lambda: left - right,
                ast.Mult: lambda: left * right}[type(node.op)]()
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt" and len(node.args) == 1):
        v = _eval_node(node.args[0])
        if isinstance(v, QuadraticSurd) or v.denominator != 1 or v < 0:
            raise DomainError("sqrt takes a nonnegative integer")
        return QuadraticSurd.sqrt(int(v))
    raise DomainError(f"unsupported syntax in exact number: {ast.dump(node)}")


def parse_exact(text: str):
    """Parse ``p/q``, decimals, or surd expressions like ``(a+b*sqrt(d))/c``.

    Returns a Fraction or a QuadraticSurd.
    """
    import re

    src = text.strip().replace("√", "sqrt").replace("−", "-")
    # sqrt5 -> sqrt(5); 2sqrt(5) -> 2*sqrt(5)
    src = re.sub(r"sqrt\s*(\d+)", r"sqrt(\1)", src)
    src = re.sub(r"(\d)\s*sqrt", r"\1*sqrt", src)
    # quote numeric literals so they are read exactly
    src = re.sub(r"(?<![\w.])(\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)", r"'\1'", src)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse exact number {text!r}") from exc
    try:
        return _eval_node(tree)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse exact number {text!r}: {exc}") from exc


def format_exact(v) -> str:
    """'p/q' for rationals, '(a+b√d)/c' for surds."""
    if isinstance(v, QuadraticSurd):
        return str(v)
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"
