"""The ten acceptance criteria, each at its stated tolerance and time limit.

Every test carries a ``criterion_k`` marker; the terminal summary prints
one PASS/FAIL line per criterion. Run alone with

    pytest tests/test_acceptance.py
"""

import math
import time
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np
import pytest

from redwalk.hyperbolic import Boundary
from redwalk.interrobang import (
    InterroContext,
    fraction_search,
    interro_bracket,
    interro_inverse,
    interro_rational,
    interro_recursive,
    interro_surd,
    surd_system,
)
from redwalk.numeric_core import QuadraticSurd, is_diagonally_dominant, is_dyadic
from redwalk.pgl2_cdf import BREAKPOINTS, F, cdf_branch, ks_distance, stationarity_check
from redwalk.triangle_group import contraction_constant, pgl2_config, tau_word
from redwalk.walk import angle_of, arc_contains, batch_sample, coupling_experiment, run_walk, walk_states

Fr = Fraction
PGL2 = pgl2_config()


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


def digits(v: Fraction, n: int) -> str:
    getcontext().prec = n + 20
    return str(Decimal(v.numerator) / Decimal(v.denominator))[: n + 2]


@pytest.mark.criterion_1
def test_criterion_1_special_values():
    with Timer(1):
        ctx = InterroContext()
        assert ctx(Fr(0)) == 0
        assert ctx(Fr(1)) == Fr(3, 8)
        for n in range(2, 21):
            assert ctx(Fr(1, n)) == Fr(1, 4**n)


@pytest.mark.criterion_2
def test_criterion_2_constants():
    with Timer(30):
        for y, printed in ((Fr(1, 8), "0.61242994"), (Fr(1, 4), "0.61834758")):
            lo, hi = interro_inverse(y, Fr(1, 10**9))
            assert hi - lo < Fr(1, 10**9)
            assert digits(lo, 8) == digits(hi, 8) == printed


@pytest.mark.criterion_3
def test_criterion_3_fraction_search():
    with Timer(600):
        assert fraction_search(Fr(1, 8), 100000) is None
        assert fraction_search(Fr(1, 4), 100000) is None
    # the interval search agrees with brute force where brute force is feasible
    ctx = InterroContext()
    values = {ctx(Fr(p, q)): Fr(p, q) for q in range(1, 151) for p in range(q + 1)}
    assert Fr(1, 8) not in values and Fr(1, 4) not in values
    for y in list(values)[::97]:
        assert fraction_search(y, 150) == values[y]


@pytest.mark.criterion_4
def test_criterion_4_monotonicity_and_recursion():
    with Timer(120):
        ctx = InterroContext()
        xs = sorted({Fr(p, q) for q in range(1, 201) for p in range(q + 1)})
        vals = [ctx(x) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(isinstance(v, Fraction) and is_dyadic(v) for v in vals)
        n = 0
        for h in range(1, 61):
            for q in range(1, h + 1):
                x = Fr(h - q, q)
                if x <= 1 and x.numerator + x.denominator == h:
                    r = interro_recursive(x)
                    assert is_dyadic(r) and r == interro_rational(x)
                    n += 1
        assert n > 500


SURDS = [QuadraticSurd(-1, 1, 1, 2), QuadraticSurd(-1, 1, 2, 5), QuadraticSurd(-1, 1, 1, 3),
         QuadraticSurd(2, -1, 1, 2), QuadraticSurd(-3, 1, 2, 13)]


@pytest.mark.criterion_5
def test_criterion_5_quadratic_pipeline():
    with Timer(60):
        for x in SURDS:
            system = surd_system(x)
            assert is_diagonally_dominant(system.scaled())
            v = interro_surd(x)
            assert isinstance(v, Fraction)
            br = interro_bracket(x, Fr(1, 10**10))
            assert abs(v - br.midpoint) < Fr(1, 10**8)


@pytest.mark.criterion_6
def test_criterion_6_breakpoints():
    with Timer(1):
        for k, b in enumerate(BREAKPOINTS, start=1):
            assert cdf_branch(b, k) == cdf_branch(b, k + 1)
        assert F(Fr(-5, 2)) == Fr(7, 128)


@pytest.mark.criterion_7
def test_criterion_7_stationarity():
    pts = {Fr(-3) + Fr(k, 40) for k in range(41)}  # [-3, -2]
    pts |= {Fr(k, 9) for k in range(-72, 73)}
    pts |= {Fr(-1) + Fr(k, 41) for k in range(1, 21)}
    pts |= set(BREAKPOINTS) | {Fr(-1000), Fr(-25, 2), Fr(25, 2), Fr(1000)}
    assert len(pts) >= 200
    with Timer(120):
        for x in sorted(pts):
            r = stationarity_check(x)
            assert r.lhs == r.rhs, f"stationarity fails at {x}"


@pytest.mark.criterion_8
def test_criterion_8_monte_carlo_law():
    with Timer(20 * 60):
        s = batch_sample(PGL2, 20240601, 10**5, 10**4, 1e-6)
        grid = [Fr(-50) + Fr(k, 4) for k in range(400)]
        d = ks_distance(s.ecdf, grid)
    print(f"criterion 8: KS = {d:.5f} over {len(grid)} points, statuses {s.status_counts}")
    assert d <= 0.01


@pytest.mark.criterion_9
def test_criterion_9_coupling_decay():
    with Timer(300):
        C = contraction_constant(PGL2).C
        t = coupling_experiment(PGL2, 99, 40, 10**4, C=C)
    print(f"criterion 9: C = {C:.6f}, mean(0) = {t.mean[0]:.4f}, mean(40) = {t.mean[40]:.3e}")
    assert 0 < C < 1
    assert t.bound_violations(3.0) == []
    assert t.monotone_violations(3.0) == []


@pytest.mark.criterion_10
def test_criterion_10_walk_soundness():
    with Timer(120):
        # never recross, 10^3 walks
        for seed in range(1000):
            seen = {}
            for key, side in walk_states(PGL2, seed, 10**4, 1e-9)[-1].crossed:
                assert seen.setdefault(key, side) == side
        # realization along walks with a 10^4-step budget
        for seed in range(50):
            states = walk_states(PGL2, seed, 10**4, 1e-12)
            for st in states:
                z = tau_word(PGL2, st.element.word, PGL2.z0)
                assert abs(z - st.z) <= 1e-9 * max(1.0, abs(st.z))
        # braid identity on 10^3 boundary points
        rng = np.random.default_rng(10)
        for x in rng.standard_cauchy(1000):
            b = Boundary.finite(x)
            lhs, rhs = tau_word(PGL2, (1, 2, 1), b), tau_word(PGL2, (2, 1, 2), b)
            if lhs.infinite or rhs.infinite:
                assert lhs == rhs
            else:
                assert abs(lhs.x - rhs.x) <= 1e-10 * max(1.0, abs(lhs.x))
        # bracket containment, short versus long budget
        for seed in range(100):
            short = run_walk(PGL2, seed, 60, 1e-12)
            long = run_walk(PGL2, seed, 600, 1e-12)
            if not short.full_circle:
                assert arc_contains(*short.bracket, angle_of(long.zeta_estimate, PGL2.z0), 1e-12)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
