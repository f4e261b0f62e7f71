"""Minkowski's question-mark function and its inverse.

Exact on rationals (values are dyadic) and on quadratic irrationals
(values are rational). The encoding between continued fractions and
binary expansions is the run-length one: for x = [0; a1, a2, ...] the
binary expansion of ?(x) is a1-1 zeros, then a2 ones, a3 zeros, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .numeric_core import (
    ContinuedFraction,
    PeriodicBinary,
    QuadraticSurd,
    binary_of_rational,
    cf_of_surd,
    floor_recip,
    is_dyadic,
    rational_of_binary,
    surd_of_cf,
)

__all__ = [
    "QMarkValue",
    "QMarkContext",
    "qmark",
    "qmark_rational",
    "qmark_surd",
    "qmark_inverse",
    "first_partial_quotient_of_inverse",
    "binary_runs",
]


@dataclass(frozen=True)
class QMarkValue:
    value: Fraction
    is_dyadic: bool


class QMarkContext:
    """Evaluation context owning its memo table.

    One context per thread or per batch; nothing is shared globally.
    """

    def __init__(self):
        self._memo = {}

    def __call__(self, x) -> Fraction:
        return self.qmark_rational(x)

    def qmark_rational(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise DomainError(f"? is defined on [0, 1], got {x}")
        # unroll ?(x) = 2^-n (2 - ?({1/x})) into a chain, then fold back
        chain = []
        memo = self._memo
        while x != 0:
            key = (x.numerator, x.denominator)
            if key in memo:
                break
            n, frac = floor_recip(x)
            chain.append((key, n))
            x = frac
        value = Fraction(0) if x == 0 else memo[(x.numerator, x.denominator)]
        for key, n in reversed(chain):
            value = (2 - value) / (1 << n)
            memo[key] = value
        return value


def qmark_rational(x, context: QMarkContext | None = None) -> Fraction:
    """?(x) for rational x in [0, 1]; the result is dyadic."""
    return (context or QMarkContext()).qmark_rational(x)


def _qmark_recursive(x: Fraction) -> Fraction:
    """Memo-free evaluation of the defining recursion (used as an oracle)."""
    if x == 0:
        return Fraction(0)
    n, frac = floor_recip(x)
    return (2 - _qmark_recursive(frac)) / (1 << n)


def _runs_to_bits(runs, first_symbol=0):
    bits = []
    sym = first_symbol
    for r in runs:
        bits.extend([sym] * r)
        sym ^= 1
    return bits


def qmark_surd(x: QuadraticSurd) -> Fraction:
    """?(x) for a quadratic irrational 0 < x < 1; the result is rational."""
    if not isinstance(x, QuadraticSurd):
        raise DomainError("qmark_surd needs an irrational QuadraticSurd")
    if not (x > 0 and x < 1):
        raise DomainError(f"qmark_surd needs 0 < x < 1, got {x}")
    cf = cf_of_surd(x)
    pre, per = list(cf.preperiod[1:]), list(cf.period)
    if not pre:
        pre, per = per[:1], per[1:] + per[:1]
    runs_pre = [pre[0] - 1] + pre[1:]
    pre_bits = _runs_to_bits(runs_pre)
    # symbol that the first period run carries
    sym = len(runs_pre) % 2
    per_runs = per * (2 if len(per) % 2 else 1)
    per_bits = _runs_to_bits(per_runs, sym)
    return rational_of_binary(PeriodicBinary(0, pre_bits, per_bits))


def qmark(x):
    """Dispatch on rational or surd argument."""
    if isinstance(x, QuadraticSurd):
        return qmark_surd(x)
    return qmark_rational(x)


def binary_runs(b: PeriodicBinary):
    """Run lengths of the fractional bits, starting with the run of zeros.

    Returns (prefix_runs, periodic_runs). For a dyadic expansion the
    trailing infinite run of zeros is dropped and periodic_runs is empty.
    The first run may have length 0 when the expansion starts with 1.
    """
    if b.integer_part:
        raise DomainError("binary_runs needs an expansion of a value < 1")
    if not b.period_bits:
        bits = list(b.preperiod_bits)
        while bits and bits[-1] == 0:
            bits.pop()
        return _count_runs(bits), []
    pre, per = list(b.preperiod_bits), list(b.period_bits)
    if len(set(per)) < 2:
        raise DomainError("binary expansion is not canonical")
    L = len(pre)
    word = pre + per + per
    t = next(t for t in range(1, len(per) + 1) if word[L + t] != word[L + t - 1])
    prefix = word[:L + t]
    rotated = per[t:] + per[:t]
    prefix_runs = _count_runs(prefix)
    periodic_runs = _count_runs(rotated, leading=rotated[0])
    return prefix_runs, periodic_runs


def _count_runs(bits, leading=0):
    runs = []
    sym = leading
    i = 0
    n = len(bits)
    while i < n:
        j = i
        while j < n and bits[j] == sym:
            j += 1
        runs.append(j - i)
        sym ^= 1
        i = j
    return runs


def qmark_inverse(y):
    """Exact preimage of y in [0, 1] under ?.

    Dyadic y gives a rational; any other rational gives a quadratic surd.
    """
    y = Fraction(y)
    if not 0 <= y <= 1:
        raise DomainError(f"?^-1 is defined on [0, 1], got {y}")
    if y == 0 or y == 1:
        return y
    prefix_runs, periodic_runs = binary_runs(binary_of_rational(y))
    pre = [0, prefix_runs[0] + 1] + prefix_runs[1:]
    return surd_of_cf(ContinuedFraction(tuple(pre), tuple(periodic_runs)).canonical())


def first_partial_quotient_of_inverse(y) -> int:
    """floor(1 / ?^-1(y)) read off the binary expansion of y, for 0 < y <= 1.

    The count of leading zeros is taken from the expansion ending in
    repeated ones when y is a power of 1/2, since ?^-1(2^-k) = 1/(k+1).
    """
    y = Fraction(y)
    if not 0 < y <= 1:
        raise DomainError(f"need 0 < y <= 1, got {y}")
    if y == 1:
        return 1
    p, q = y.numerator, y.denominator
    zeros = max(0, q.bit_length() - p.bit_length() - 1)
    while (p << (zeros + 1)) < q:
        zeros += 1
    if p == 1 and is_dyadic(y):
        zeros += 1
    return zeros + 1
