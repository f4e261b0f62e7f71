"""Closed-form law of the boundary limit for PGL2(Z).

F(x) = Pr[ζ <= x] is piecewise affine in the interrobang function:

    ‽(-1/x)                          x <= -2
    1/4 - ‽(-x-1)/2                  -2 <= x <= -1
    1/4 + ‽(-1-1/x)/2 + ‽(x+1)/2     -1 <= x <= -1/2
    1/2 - ‽(-x)/2                    -1/2 <= x <= 0
    1/2 + ‽(x)                       0 <= x <= 1
    7/8 + ‽(x-1)/4                   1 <= x <= 2
    1 - ‽(1/x)/2                     2 <= x

Neighbouring pieces agree at the breakpoints; a breakpoint is evaluated
with the piece to its right. The boundary one-way reflections are
τ1(x) = -1/2 - |x + 1/2|, τ2(x) = 1/x for |x| > 1 (else x), τ3(x) = |x|.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .hyperbolic import Boundary
from .interrobang import interro_rational, interro_surd
from .numeric_core import QuadraticSurd

__all__ = [
    "BREAKPOINTS",
    "INF_MEASURE",
    "CdfValue",
    "cdf",
    "F",
    "cdf_branch",
    "branch_of",
    "boundary_tau",
    "preimage_intervals",
    "interval_measure",
    "StationarityResult",
    "stationarity_check",
    "ks_distance",
    "InverseCdfTable",
    "cdf_grid",
    "write_cdf_csv",
]

BREAKPOINTS = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1), Fraction(2))
# The single point ∞ carries no mass: F is continuous with F(x) -> 1 as x -> ∞.
INF_MEASURE = Fraction(0)

POS_INF = math.inf
NEG_INF = -math.inf

_1_4 = Fraction(1, 4)
_1_2 = Fraction(1, 2)
_7_8 = Fraction(7, 8)


@dataclass(frozen=True)
class CdfValue:
    value: Fraction | None
    branch: int | None
    bracket: tuple | None = None

    def to_json(self) -> dict:
        out = {}
        if self.value is not None:
            out["value"] = f"{self.value.numerator}/{self.value.denominator}"
        if self.bracket is not None:
            out["bracket"] = [f"{v.numerator}/{v.denominator}" for v in self.bracket]
        if self.branch is not None:
            out["branch"] = self.branch
        return out


def _interro(y):
    if isinstance(y, QuadraticSurd):
        return interro_surd(y)
    return interro_rational(y)


def branch_of(x) -> int:
    """Index 1..7 of the piece used at x (breakpoints go to the right-hand piece)."""
    return 1 + sum(1 for b in BREAKPOINTS if x >= b)


def cdf_branch(x, k: int) -> Fraction:
    """Evaluate piece k at x, which must lie in that piece's closed interval."""
    if k == 1:
        return _interro(-1 / x)
    if k == 2:
        return _1_4 - _interro(-x - 1) / 2
    if k == 3:
        return _1_4 + _interro(-1 - 1 / x) / 2 + _interro(x + 1) / 2
    if k == 4:
        return _1_2 - _interro(-x) / 2
    if k == 5:
        return _1_2 + _interro(x)
    if k == 6:
        return _7_8 + _interro(x - 1) / 4
    if k == 7:
        return 1 - _interro(1 / x) / 2
    raise DomainError(f"no branch {k}")


def _exact(x):
    if isinstance(x, (QuadraticSurd, Fraction)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x):
            return x
        return Fraction(x)
    if isinstance(x, str):
        from .numeric_core import parse_exact
        return parse_exact(x)
    raise DomainError(f"cannot evaluate F at {x!r}")


def cdf(x) -> CdfValue:
    """F(x) exactly for rational or quadratic-surd x; ±∞ allowed.

    A pair (lo, hi) of rationals is treated as a real number known only to
    lie in [lo, hi] and gives a bracket [F(lo), F(hi)].
    """
    if isinstance(x, tuple):
        lo, hi = (_exact(v) for v in x)
        if lo > hi:
            raise DomainError("bracket endpoints out of order")
        flo, fhi = cdf(lo), cdf(hi)
        branch = flo.branch if flo.branch == fhi.branch else None
        return CdfValue(None, branch, (flo.value, fhi.value))
    if isinstance(x, Boundary):
        x = math.inf if x.infinite else Fraction(x.x)
    x = _exact(x)
    if isinstance(x, float):
        return CdfValue(Fraction(1) if x > 0 else Fraction(0), 7 if x > 0 else 1)
    k = branch_of(x)
    return CdfValue(cdf_branch(x, k), k)


def F(x) -> Fraction:
    return cdf(x).value


# ---------------------------------------------------------------------------
# stationarity


def boundary_tau(i: int, x):
    """The one-way reflection τ_i on the extended real line (exact for rationals)."""
    if isinstance(x, Boundary):
        if x.infinite:
            return Boundary.finite(0.0) if i == 2 else x
        return Boundary.finite(float(boundary_tau(i, Fraction(x.x))))
    x = Fraction(x)
    if i == 1:
        return -1 - x if x > -_1_2 else x
    if i == 2:
        return 1 / x if abs(x) > 1 else x
    if i == 3:
        return -x if x < 0 else x
    raise DomainError(f"no one-way reflection {i}")


def preimage_intervals(i: int, x: Fraction):
    """τ_i^{-1}((-∞, x]) ∩ R as disjoint intervals (lo, hi); ±inf are float infinities.

    Endpoint openness is not recorded since the law has no atoms.
    """
    x = Fraction(x)
    if i == 1:
        if x >= -_1_2:
            return [(NEG_INF, POS_INF)]
        return [(NEG_INF, x), (-1 - x, POS_INF)]
    if i == 2:
        if x < -1:
            return []
        if x < 0:
            return [(1 / x, x)]
        if x == 0:
            return [(NEG_INF, Fraction(0))]
        if x < 1:
            return [(NEG_INF, x), (1 / x, POS_INF)]
        return [(NEG_INF, POS_INF)]
    if i == 3:
        if x < 0:
            return []
        return [(-x, x)]
    raise DomainError(f"no one-way reflection {i}")


def _F_ext(v) -> Fraction:
    if v == NEG_INF:
        return Fraction(0)
    if v == POS_INF:
        return Fraction(1)
    return F(v)


def interval_measure(intervals) -> Fraction:
    return sum((_F_ext(hi) - _F_ext(lo) for lo, hi in intervals), Fraction(0))


@dataclass(frozen=True)
class StationarityResult:
    x: Fraction
    lhs: Fraction  # F(x)
    rhs: Fraction  # (1/3) Σ μ(τ_i^{-1}(-∞, x])
    pieces: tuple

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        f = lambda v: f"{v.numerator}/{v.denominator}"
        return {"x": f(self.x), "equal": self.ok, "lhs": f(self.lhs), "rhs": f(self.rhs),
                "preimage_measures": [f(p) for p in self.pieces]}


def stationarity_check(x) -> StationarityResult:
    """Compare F(x) with the averaged pushforward mass of (-∞, x], exactly."""
    x = Fraction(x)
    pieces = tuple(interval_measure(preimage_intervals(i, x)) + INF_MEASURE for i in (1, 2, 3))
    return StationarityResult(x, F(x), sum(pieces, Fraction(0)) / 3, pieces)


# ---------------------------------------------------------------------------
# empirical comparison


def ks_distance(ecdf, grid) -> float:
    """max over the grid of |F_emp(x) - F(x)|, F evaluated exactly then rounded."""
    grid = list(grid)
    if not grid:
        raise DomainError("ks_distance needs a nonempty grid")
    emp = ecdf.evaluate(grid) if hasattr(ecdf, "evaluate") else np.array([ecdf(x) for x in grid])
    exact = np.array([float(F(x)) for x in grid])
    return float(np.max(np.abs(emp - exact)))


class InverseCdfTable:
    """Sampler from F by bisection in a table of exact values.

    The table starts on a coarse grid over [-span, span] and splits every
    cell holding more than ``max_mass`` of probability at its mediant, so
    linear interpolation inside a cell is off by at most ``max_mass``.
    Beyond the table the remaining mass is below 4^-span.
    """

    def __init__(self, span: int = 20, max_mass: float = 1e-4):
        pts = [Fraction(k, 4) for k in range(-4 * span, 4 * span + 1)]
        vals = [F(x) for x in pts]
        xs, fs = [pts[0]], [vals[0]]
        stack = list(zip(pts[1:], vals[1:]))[::-1]
        while stack:
            x1, f1 = stack[-1]
            x0, f0 = xs[-1], fs[-1]
            if float(f1 - f0) <= max_mass:
                xs.append(x1)
                fs.append(f1)
                stack.pop()
                continue
            m = Fraction(x0.numerator + x1.numerator, x0.denominator + x1.denominator)
            stack.append((m, F(m)))
        self.xf = [float(x) for x in xs]
        self.fs = [float(v) for v in fs]

    def __len__(self):
        return len(self.xf)

    def quantile(self, u: float) -> float:
        k = bisect_right(self.fs, u)
        if k == 0:
            return self.xf[0]
        if k == len(self.fs):
            return self.xf[-1]
        f0, f1 = self.fs[k - 1], self.fs[k]
        x0, x1 = self.xf[k - 1], self.xf[k]
        return x0 + (x1 - x0) * (u - f0) / (f1 - f0)

    def sample(self, n: int, seed: int) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(seed))
        us = rng.random(n)
        return np.array([self.quantile(u) for u in us])


def cdf_grid(lo, hi, n: int):
    """[(x, F(x)) for x on the uniform rational grid lo = x_0 < ... < x_n = hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if n < 1 or lo >= hi:
        raise DomainError("need n >= 1 and lo < hi")
    return [(lo + (hi - lo) * k / n, F(lo + (hi - lo) * k / n)) for k in range(n + 1)]


def write_cdf_csv(rows, path, manifest_lines=()):
    with open(path, "w", newline="") as fh:
        for line in manifest_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["x", "F", "F_float"])
        for x, v in rows:
            w.writerow([f"{x.numerator}/{x.denominator}", f"{v.numerator}/{v.denominator}", repr(float(v))])
