import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from redwalk.errors import DomainError, SingularMatrixError
from redwalk.numeric_core import (
    ContinuedFraction,
    PeriodicBinary,
    QuadraticSurd,
    RationalMatrix,
    binary_of_rational,
    cf_of_rational,
    cf_of_surd,
    floor_recip,
    format_exact,
    height,
    is_diagonally_dominant,
    is_dyadic,
    parse_exact,
    rational_of_binary,
    solve_exact,
    surd_of_cf,
)

F = Fraction
SQRT2_M1 = QuadraticSurd(-1, 1, 1, 2)
GOLDEN = QuadraticSurd(-1, 1, 2, 5)

unit_rationals = st.builds(lambda q, p: F(p % (q + 1), q), st.integers(1, 1000), st.integers(0, 10**6))


def test_height_examples():
    assert height(F(0)) == 1
    assert height(F(2, 5)) == 7
    assert height(F(1, 2)) == 3


def test_surd_normalization():
    s = QuadraticSurd(2, 4, 2, 8)  # (2 + 4*2*sqrt2)/2 = 1 + 4 sqrt2
    assert (s.a, s.b, s.c, s.d) == (1, 4, 1, 2)
    assert QuadraticSurd(3, -1, -2, 5) == QuadraticSurd(-3, 1, 2, 5)
    assert QuadraticSurd.make(1, 2, 3, 9) == F(7, 3)
    with pytest.raises(DomainError):
        QuadraticSurd(1, 0, 1, 2)
    with pytest.raises(DomainError):
        QuadraticSurd(1, 1, 1, -2)


def test_surd_arithmetic_and_order():
    assert SQRT2_M1 * (SQRT2_M1 + 2) == 1
    assert 1 / SQRT2_M1 == SQRT2_M1 + 2
    assert GOLDEN * GOLDEN + GOLDEN == 1
    assert F(41, 100) < SQRT2_M1 < F(21, 50)
    assert math.floor(QuadraticSurd(0, 1, 1, 2)) == 1
    assert abs(float(GOLDEN) - (math.sqrt(5) - 1) / 2) < 1e-15


@given(st.integers(-20, 20), st.integers(-20, 20).filter(bool), st.integers(1, 20),
       st.sampled_from([2, 3, 5, 6, 7, 10, 13]), st.fractions(max_denominator=50))
def test_surd_comparison_matches_float(a, b, c, d, r):
    s = QuadraticSurd(a, b, c, d)
    fs = (a + b * math.sqrt(d)) / c
    if abs(fs - float(r)) > 1e-9:
        assert (s < r) == (fs < float(r))


def test_cf_examples():
    assert cf_of_rational(F(2, 5)) == ContinuedFraction((0, 2, 2))
    assert cf_of_rational(F(1)) == ContinuedFraction((1,))
    assert cf_of_rational(F(0)) == ContinuedFraction((0,))
    assert cf_of_surd(GOLDEN) == ContinuedFraction((0,), (1,))
    assert cf_of_surd(SQRT2_M1) == ContinuedFraction((0,), (2,))
    assert cf_of_surd(QuadraticSurd(1, 1, 1, 2)) == ContinuedFraction((2,), (2,))
    assert surd_of_cf(ContinuedFraction((0,), (1,))) == GOLDEN
    assert surd_of_cf(ContinuedFraction((0, 2, 2))) == F(2, 5)
    assert surd_of_cf(ContinuedFraction((0,))) == 0


def test_cf_canonical_forms():
    assert ContinuedFraction((0, 2, 1)).canonical() == ContinuedFraction((0, 3))
    assert ContinuedFraction((0,), (2, 2)).canonical() == ContinuedFraction((0,), (2,))
    assert ContinuedFraction((0, 2), (2,)).canonical() == ContinuedFraction((0,), (2,))


@given(st.fractions(min_value=-50, max_value=50, max_denominator=1000))
def test_rational_cf_roundtrip(x):
    assert surd_of_cf(cf_of_rational(x)) == x


@given(st.integers(-20, 20), st.integers(-20, 20).filter(bool), st.integers(1, 20),
       st.sampled_from([2, 3, 5, 6, 7, 10, 13]))
def test_surd_cf_roundtrip(a, b, c, d):
    s = QuadraticSurd(a, b, c, d)
    cf = cf_of_surd(s)
    assert cf.period
    assert surd_of_cf(cf) == s
    # each convergent p/q is within 1/q^2 of the value
    conv = cf.convergents()
    for _ in range(12):
        pq = next(conv)
        gap = s - pq
        assert -Fraction(1, pq.denominator**2) < gap < Fraction(1, pq.denominator**2)


def test_floor_recip_examples():
    assert floor_recip(F(2, 5)) == (2, F(1, 2))
    assert floor_recip(F(1, 2)) == (2, 0)
    assert floor_recip(SQRT2_M1) == (2, SQRT2_M1)
    with pytest.raises(DomainError):
        floor_recip(F(0))
    with pytest.raises(DomainError):
        floor_recip(F(3, 2))


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6).filter(bool))
def test_floor_recip_identity(x):
    n, frac = floor_recip(x)
    assert n + frac == 1 / x
    assert 0 <= frac < 1


def test_binary_examples():
    assert binary_of_rational(F(2, 5)) == PeriodicBinary(0, (), (0, 1, 1, 0))
    assert binary_of_rational(F(1, 2)) == PeriodicBinary(0, (1,))
    assert binary_of_rational(F(2, 3)) == PeriodicBinary(0, (), (1, 0))
    assert str(binary_of_rational(F(2, 5))) == "0.(0110)"
    assert binary_of_rational(F(1, 2)).is_dyadic


def test_binary_roundtrip_all_small_denominators():
    for q in range(1, 1001):
        for p in range(0, q + 1, max(1, q // 37)):
            x = F(p, q)
            assert rational_of_binary(binary_of_rational(x)) == x


@given(unit_rationals)
def test_dyadic_iff_no_period(x):
    assert binary_of_rational(x).is_dyadic == is_dyadic(x)


def test_solve_examples():
    b = [F(3), F(-1, 2), F(7, 9)]
    assert solve_exact(RationalMatrix.identity(3), b) == b
    assert solve_exact(RationalMatrix([[2, 0], [0, 4]]), [1, 1]) == [F(1, 2), F(1, 4)]
    with pytest.raises(SingularMatrixError):
        solve_exact(RationalMatrix([[1, 1], [1, 1]]), [1, 2])


def test_solve_needs_pivoting():
    A = RationalMatrix([[0, 1], [1, 0]])
    assert solve_exact(A, [F(2), F(3)]) == [F(3), F(2)]


@st.composite
def dominant_systems(draw):
    n = draw(st.integers(1, 12))
    frac = st.fractions(min_value=-5, max_value=5, max_denominator=20)
    rows = []
    for i in range(n):
        row = [draw(frac) for _ in range(n)]
        off = sum(abs(v) for j, v in enumerate(row) if j != i)
        row[i] = (off + draw(st.fractions(min_value=F(1, 10), max_value=3, max_denominator=10))) \
            * draw(st.sampled_from([1, -1]))
        rows.append(row)
    b = [draw(frac) for _ in range(n)]
    return RationalMatrix(rows), b


@given(dominant_systems())
def test_solve_remultiply(system):
    A, b = system
    assert is_diagonally_dominant(A)
    x = solve_exact(A, b)
    for row, bi in zip(A.rows, b):
        assert sum(a * v for a, v in zip(row, x)) == bi


def test_diagonal_dominance_examples():
    assert is_diagonally_dominant(RationalMatrix.identity(4))
    assert not is_diagonally_dominant(RationalMatrix([[1, 1], [1, 1]]))


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**4).filter(bool))
def test_height_decreases_along_recursion(x):
    if x <= F(1, 2):
        _, frac = floor_recip(x)
        assert height(frac) < height(x)
    else:
        assert height(1 / x - 1) < height(x)
        assert height(1 - x) < height(x)


def test_parse_and_format():
    assert parse_exact("2/5") == F(2, 5)
    assert parse_exact("-5/2") == F(-5, 2)
    assert parse_exact("0.61242994") == F(61242994, 10**8)
    assert parse_exact("(-1+sqrt(5))/2") == GOLDEN
    assert parse_exact("√2 − 1") == SQRT2_M1
    assert parse_exact("sqrt2/2") == QuadraticSurd(0, 1, 2, 2)
    assert parse_exact("sqrt(9)") == 3
    assert format_exact(F(-7, 3)) == "-7/3"
    assert format_exact(F(4)) == "4/1"
    assert parse_exact(format_exact(SQRT2_M1)) == SQRT2_M1
    for bad in ("1/0", "abc", "sqrt(-2)", "2**3"):
        with pytest.raises(DomainError):
            parse_exact(bad)


@given(st.integers(-20, 20), st.integers(-20, 20).filter(bool), st.integers(1, 20),
       st.sampled_from([2, 3, 5, 6, 7, 10, 13]))
def test_surd_text_roundtrip(a, b, c, d):
    s = QuadraticSurd(a, b, c, d)
    assert parse_exact(format_exact(s)) == s
