import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from redwalk.errors import DomainError
from redwalk.hyperbolic import (
    INF,
    Boundary,
    Diameter,
    Isometry,
    OrthoCircle,
    Semicircle,
    Vertical,
    apply,
    boundary_from_angle,
    cayley,
    cayley_angle,
    cayley_inverse,
    disk_angle,
    disk_line,
    disk_map,
    hpoint,
    hyperbolic_distance,
    line_through,
    reflect,
    side_of,
)

S1 = Isometry(-1, -1, 0, 1)
S2 = Isometry(0, 1, 1, 0)
S3 = Isometry(-1, 0, 0, 1)
GENS = [S1, S2, S3]

points = st.builds(complex, st.floats(-20, 20), st.floats(0.05, 20))
finite_boundary = st.floats(-50, 50).map(Boundary.finite)
lines = st.one_of(
    st.floats(-10, 10).map(Vertical),
    st.builds(Semicircle, st.floats(-10, 10), st.floats(0.1, 10)),
)
words = st.lists(st.integers(0, 2), max_size=10)


def word_isometry(word):
    g = Isometry.identity()
    for k in word:
        g = g @ GENS[k]
    return g


def close(z, w, tol):
    if isinstance(z, Boundary):
        if z.infinite or w.infinite:
            return z.infinite == w.infinite
        return abs(z.x - w.x) <= tol * max(1.0, abs(z.x))
    return abs(z - w) <= tol * max(1.0, abs(z))


def test_reflect_examples():
    assert reflect(Vertical(0), 1 + 1j) == -1 + 1j
    assert abs(reflect(Semicircle(0, 1), 2j) - 0.5j) < 1e-15
    assert reflect(Semicircle(0, 1), Boundary.finite(2)).x == 0.5
    assert reflect(Semicircle(0, 1), INF) == Boundary.finite(0)
    assert reflect(Vertical(3), INF) is INF


def test_cayley_examples():
    assert cayley(1j) == 0
    assert abs(cayley(Boundary.finite(0)) - (-1)) < 1e-15
    assert cayley_angle(Boundary.finite(0)) == math.pi
    assert cayley(INF) == 1
    assert cayley_angle(INF) == 0.0
    assert cayley_inverse(complex(1, 0)) is INF
    assert abs(cayley_inverse(0j) - 1j) < 1e-15


def test_apply_examples():
    z = 2 + 1j
    assert apply(Isometry.identity(), z) == z
    assert S2.orientation == -1
    assert abs(apply(S2, 2j) - 0.5j) < 1e-15
    assert apply(S1, Boundary.finite(0)).x == -1
    assert apply(S2, INF) == Boundary.finite(0)
    # 1/x overflows for subnormal x: the image is ∞, not a finite point
    assert apply(S2, Boundary.finite(2.225073858507e-311)) is INF


def test_side_examples():
    assert side_of(Vertical(0), 1 + 1j) == 1
    assert side_of(Semicircle(0, 1), 2j) == 1
    assert side_of(Semicircle(0, 1), 1j) == 0
    assert side_of(Semicircle(0, 1), 0.5j) == -1


def test_distance_examples():
    assert hyperbolic_distance(1j, 1j) == 0
    assert abs(hyperbolic_distance(1j, 2j) - math.log(2)) < 1e-15
    assert hyperbolic_distance(1j, apply(S2, 1j)) == 0


def test_constructors_reject_bad_input():
    with pytest.raises(DomainError):
        hpoint(1, 0)
    with pytest.raises(DomainError):
        Semicircle(0, -1)
    with pytest.raises(DomainError):
        line_through(INF, INF)
    with pytest.raises(DomainError):
        Isometry(1, 1, 1, 1).normalized()
    with pytest.raises(DomainError):
        OrthoCircle(2 + 0j, 1.0)


def test_line_through():
    assert line_through(INF, 3.0) == Vertical(3.0)
    assert line_through(-1.0, 3.0) == Semicircle(1.0, 2.0)


@given(lines, points)
def test_reflection_is_involution(L, z):
    assert close(reflect(L, reflect(L, z)), z, 1e-10)


@given(lines, finite_boundary)
def test_boundary_reflection_is_involution(L, b):
    r = reflect(L, b)
    if not r.infinite and abs(r.x) < 1e8:
        assert close(reflect(L, r), b, 1e-9)


@given(lines, points)
def test_reflection_matrix_matches_formula(L, z):
    assert close(apply(L.reflection(), z), reflect(L, z), 1e-10)


@given(lines, points)
def test_reflection_swaps_sides_and_fixes_distance(L, z):
    w = reflect(L, z)
    if abs(L.side_value(z)) > 1e-6:
        assert side_of(L, z) == -side_of(L, w)
    e1, _ = L.endpoints()
    # the geodesic from z to its mirror image meets L at right angles: equal distance to L
    assert abs(abs(L.side_value(z)) - abs(L.side_value(w))) <= 1e-8 * max(1, abs(L.side_value(z)))


@given(words, points, points)
def test_isometry_invariance(word, z, w):
    g = word_isometry(word)
    d = hyperbolic_distance(z, w)
    assert abs(hyperbolic_distance(apply(g, z), apply(g, w)) - d) <= 1e-9 * max(1.0, d)


@given(words, words, points)
def test_composition_is_action(u, v, z):
    gu, gv = word_isometry(u), word_isometry(v)
    assert close(apply(gu @ gv, z), apply(gu, apply(gv, z)), 1e-9)


@given(words, points)
def test_inverse(word, z):
    g = word_isometry(word)
    assert close(apply(g.inverse(), apply(g, z)), z, 1e-9)
    assert (g @ g.inverse()).close_to(Isometry.identity())


def test_renormalization_keeps_determinant_unit():
    g = Isometry.identity()
    big = Isometry(2, 0, 0, 0.5)
    for _ in range(1000):
        g = g @ big @ S2
    assert abs(abs(g.det) - 1) < 1e-6 or g._count < 64


@given(lines, points)
def test_cayley_conjugation(L, z):
    """φ(reflect_H(z)) equals the disk reflection of φ(z) in φ(L)."""
    D = disk_line(L)
    lhs = cayley(reflect(L, z))
    rhs = D.reflect(cayley(z))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, 1 / max(1e-300, 1 - abs(lhs)))


@given(words, finite_boundary)
def test_boundary_equivariance(word, b):
    """g on the boundary is the limit of g on interior points approaching b."""
    g = word_isometry(word)
    gb = cayley(apply(g, b))
    inner = cayley(apply(g, complex(b.x, 1e-12 * max(1.0, abs(b.x)))))
    assert abs(inner - gb) < 1e-6


@given(st.floats(0, 2 * math.pi, exclude_max=True))
def test_angle_roundtrip(t):
    b = boundary_from_angle(t)
    if not b.infinite and abs(b.x) < 1e12:
        assert abs(((cayley_angle(b) - t + math.pi) % (2 * math.pi)) - math.pi) < 1e-9


@given(points, finite_boundary)
def test_disk_map_puts_basepoint_at_center(z0, b):
    psi = disk_map(z0)
    assert abs(psi(z0)) < 1e-12
    assert abs(abs(psi(b)) - 1) < 1e-9
    assert abs(cmath.phase(psi(b)) % (2 * math.pi) - disk_angle(b, z0)) < 1e-12


def test_disk_lines():
    assert isinstance(disk_line(Vertical(0)), Diameter)
    D = disk_line(Semicircle(3, 1))
    assert isinstance(D, OrthoCircle)
    assert abs(D.r ** 2 - (abs(D.c) ** 2 - 1)) < 1e-12
    w = cayley(3 + 1j)  # on the line
    assert abs(abs(w - D.c) - D.r) < 1e-12


def test_disk_reflection_fixes_circle_points():
    D = OrthoCircle.from_angles(0.3, 1.1)
    for t in (0.3, 1.1):
        w = cmath.exp(1j * t)
        assert abs(D.reflect(w) - w) < 1e-12
    rng = np.random.default_rng(1)
    for _ in range(100):
        w = complex(*rng.uniform(-0.7, 0.7, 2))
        assert abs(D.reflect(D.reflect(w)) - w) < 1e-12
