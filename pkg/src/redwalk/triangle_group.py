"""Reflection triangle groups: configurations, one-way reflections, descents.

A configuration is three half-plane lines plus a basepoint z0 lying in the
open triangle they bound. Each pair of lines either meets at angle π/m with
z0 inside that angle, or is disjoint with z0 between them (m = ∞).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DescentAmbiguityError, DomainError, InternalInvariantError
from .hyperbolic import (
    INF,
    Boundary,
    HLine,
    Isometry,
    OrthoCircle,
    Semicircle,
    Vertical,
    apply,
    boundary_from_angle,
    disk_angle,
    line_through,
)

__all__ = [
    "ANGLE_TOL",
    "DESCENT_TOL",
    "TriangleConfig",
    "GroupElement",
    "ContractionResult",
    "validate",
    "load_config",
    "builtin",
    "pgl2_config",
    "figure2_config",
    "ideal_config",
    "one_way_reflect",
    "right_descent",
    "demazure",
    "demazure_word",
    "element_from_word",
    "contraction_constant",
]

ANGLE_TOL = 1e-9
DESCENT_TOL = 1e-10
ENDPOINT_TOL = 1e-9
TWO_PI = 2 * math.pi
INF_M = math.inf


def _fmt_m(v):
    return "inf" if v == INF_M else int(v)


def _parse_m(v):
    if v in ("inf", "∞", None) or v == INF_M:
        return INF_M
    if isinstance(v, str):
        v = int(v)
    if int(v) != v or v < 1:
        raise ConfigError(f"bad Coxeter entry {v!r}")
    return int(v)


@dataclass(frozen=True)
class TriangleConfig:
    lines: tuple
    z0: complex
    m: tuple
    name: str = "custom"
    # z0-centered disk picture: one orthocircle per line
    circles: tuple = field(default=(), compare=False, repr=False)
    generators: tuple = field(default=(), compare=False, repr=False)

    def generator(self, i: int) -> Isometry:
        return self.generators[i - 1]

    def line(self, i: int) -> HLine:
        return self.lines[i - 1]

    def base_side(self, i: int) -> float:
        return self.lines[i - 1].side_value(self.z0)

    def coxeter_json(self):
        return [[_fmt_m(v) for v in row] for row in self.m]

    def to_json(self) -> dict:
        lines = []
        for L in self.lines:
            if isinstance(L, Vertical):
                lines.append({"vertical": L.x})
            else:
                lines.append({"semicircle": [L.center, L.radius]})
        return {"name": self.name, "lines": lines, "basepoint": [self.z0.real, self.z0.imag],
                "coxeter": self.coxeter_json()}


def _line_arc(L: HLine, z0: complex):
    """(start, width) of the boundary arc on the far side of L from z0, in disk angle."""
    e1, e2 = L.endpoints()
    a1, a2 = disk_angle(e1, z0), disk_angle(e2, z0)
    gap = (a2 - a1) % TWO_PI
    if gap < math.pi:
        return a1, gap
    return a2, TWO_PI - gap


def _in_open_arc(t, start, width, tol=ENDPOINT_TOL):
    u = (t - start) % TWO_PI
    return tol < u < width - tol


def _pair_geometry(config_lines, z0, circles, i, j):
    """Return ('meet', m_float) or ('disjoint', z0_between) for lines i, j (0-based)."""
    si, wi = _line_arc(config_lines[i], z0)
    sj, wj = _line_arc(config_lines[j], z0)
    inside = [_in_open_arc(t, si, wi) for t in (sj, sj + wj)]
    if inside[0] != inside[1]:
        ci, ri = circles[i].c, circles[i].r
        cj, rj = circles[j].c, circles[j].r
        cos_t = (ri * ri + rj * rj - abs(ci - cj) ** 2) / (2 * ri * rj)
        theta = math.acos(max(-1.0, min(1.0, cos_t)))
        angle = math.pi - theta  # the sector outside both circles, which holds z0
        return "meet", math.pi / angle
    # disjoint or asymptotic: z0 is between iff neither far-side arc swallows the other
    nested = (_in_open_arc(sj + wj / 2, si, wi, -ENDPOINT_TOL) and wj <= wi) or \
             (_in_open_arc(si + wi / 2, sj, wj, -ENDPOINT_TOL) and wi <= wj)
    return "disjoint", not nested


def validate(lines, z0, m=None, name="custom") -> TriangleConfig:
    """Check the pairwise angle axiom and build a configuration.

    m may be omitted, in which case it is read off the geometry.
    """
    lines = tuple(lines)
    if len(lines) != 3 or not all(isinstance(L, HLine) for L in lines):
        raise ConfigError("a configuration needs exactly three lines")
    z0 = complex(z0)
    if not z0.imag > 0:
        raise ConfigError("basepoint must lie in the upper half-plane")
    for k, L in enumerate(lines, 1):
        if abs(L.side_value(z0)) < DESCENT_TOL:
            raise ConfigError(f"basepoint lies on line L{k}", pair=(k, k))
    if m is not None:
        m = [[_parse_m(v) for v in row] for row in m]
        if len(m) != 3 or any(len(r) != 3 for r in m):
            raise ConfigError("Coxeter matrix must be 3x3")
        for a in range(3):
            if m[a][a] != 1:
                raise ConfigError("Coxeter matrix needs ones on the diagonal")
            for b in range(3):
                if m[a][b] != m[b][a]:
                    raise ConfigError("Coxeter matrix must be symmetric", pair=(a + 1, b + 1))
    circles = []
    for L in lines:
        s, w = _line_arc(L, z0)
        circles.append(OrthoCircle.from_angles(s, s + w))
    found = [[1] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(a + 1, 3):
            kind, info = _pair_geometry(lines, z0, circles, a, b)
            pair = (a + 1, b + 1)
            if kind == "meet":
                k = round(info)
                if k < 2 or abs(info - k) > ANGLE_TOL:
                    raise ConfigError(
                        f"lines L{a+1}, L{b+1} meet at angle π/{info:.12g}, not π/m for an integer m >= 2",
                        pair=pair)
                found[a][b] = found[b][a] = k
            else:
                if not info:
                    raise ConfigError(f"basepoint is not between the disjoint lines L{a+1}, L{b+1}",
                                      pair=pair)
                found[a][b] = found[b][a] = INF_M
            if m is not None and m[a][b] != found[a][b]:
                raise ConfigError(
                    f"Coxeter entry m({a+1},{b+1}) = {_fmt_m(m[a][b])} but the geometry gives "
                    f"{_fmt_m(found[a][b])}", pair=pair)
    gens = tuple(L.reflection().normalized() for L in lines)
    return TriangleConfig(lines, z0, tuple(tuple(r) for r in found), name, tuple(circles), gens)


def _line_from_json(obj) -> HLine:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ConfigError(f"bad line record {obj!r}")
    if "vertical" in obj:
        return Vertical(float(obj["vertical"]))
    if "semicircle" in obj:
        c, r = obj["semicircle"]
        if not float(r) > 0:
            raise ConfigError("semicircle radius must be positive")
        return Semicircle(float(c), float(r))
    raise ConfigError(f"bad line record {obj!r}")


def from_json(obj: dict, name="custom") -> TriangleConfig:
    try:
        lines = [_line_from_json(o) for o in obj["lines"]]
        re, im = obj["basepoint"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    return validate(lines, complex(float(re), float(im)), obj.get("coxeter"), obj.get("name", name))


def pgl2_config(z0: complex = complex(-0.25, 1.25)) -> TriangleConfig:
    """The (2,3,∞) configuration: s1(z) = -1 - conj(z), s2(z) = 1/conj(z), s3(z) = -conj(z)."""
    return validate(
        [Vertical(-0.5), Semicircle(0.0, 1.0), Vertical(0.0)], z0,
        [[1, 3, "inf"], [3, 1, 2], ["inf", 2, 1]], name="pgl2")


def figure2_config() -> TriangleConfig:
    """A right angle between L1 and L2, the other pairs disjoint."""
    return validate(
        [Vertical(0.0), Semicircle(0.0, 1.0), Semicircle(3.0, 1.0)], complex(1.5, 1.5),
        [[1, 2, "inf"], [2, 1, "inf"], ["inf", "inf", 1]], name="figure2")


def ideal_config(theta: float = 0.0) -> TriangleConfig:
    """Ideal triangle with Cayley-disk vertices at θ + 90°, θ + 210°, θ + 330°; z0 = i."""
    verts = [boundary_from_angle(theta + math.radians(a)) for a in (90.0, 210.0, 330.0)]
    lines = [line_through(verts[1], verts[2]), line_through(verts[2], verts[0]),
             line_through(verts[0], verts[1])]
    return validate(lines, 1j, [[1, "inf", "inf"], ["inf", 1, "inf"], ["inf", "inf", 1]],
                    name="ideal")


def builtin(name: str) -> TriangleConfig:
    key, _, arg = name.partition(":")
    if key == "pgl2":
        return pgl2_config()
    if key == "figure2":
        return figure2_config()
    if key == "ideal":
        return ideal_config(math.radians(float(arg)) if arg else 0.0)
    raise ConfigError(f"unknown builtin configuration {name!r}")


def load_config(spec: str) -> TriangleConfig:
    """'builtin:<name>' or a path to a JSON configuration file."""
    if spec.startswith("builtin:"):
        return builtin(spec[len("builtin:"):])
    try:
        obj = json.loads(Path(spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {spec!r}: {exc}") from exc
    return from_json(obj, name=Path(spec).stem)


# ---------------------------------------------------------------------------
# one-way reflections and the Demazure product


def one_way_reflect(config: TriangleConfig, i: int, z):
    """τ_i: reflect in L_i when z is on the basepoint's side, otherwise leave it."""
    L = config.lines[i - 1]
    base = config.base_side(i)
    if isinstance(z, Boundary):
        s = L.boundary_side(z)
    else:
        s = L.side_value(z)
    if s * base > 0:
        return L.reflect(z)
    return z


def tau_word(config: TriangleConfig, word, z):
    """τ_{i1} ∘ ... ∘ τ_{ik} applied to z (rightmost index acts first)."""
    for i in reversed(word):
        z = one_way_reflect(config, i, z)
    return z


@dataclass(frozen=True)
class GroupElement:
    isometry: Isometry
    word: tuple = ()
    length: int = 0

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(Isometry.identity(), (), 0)

    def __call__(self, z):
        return apply(self.isometry, z)


def element_from_word(config: TriangleConfig, word) -> GroupElement:
    """s_{i1} s_{i2} ... as a group element; the word is assumed reduced."""
    g = Isometry.identity()
    for i in word:
        g = g @ config.generator(i)
    return GroupElement(g, tuple(word), len(word))


def right_descent(config: TriangleConfig, w: GroupElement, i: int) -> bool:
    """True iff w(L_i) separates z0 from w(z0), i.e. L_i separates w^-1(z0) from z0."""
    p = apply(w.isometry.inverse(), config.z0)
    v = config.lines[i - 1].side_value(p)
    if abs(v) < DESCENT_TOL:
        raise DescentAmbiguityError(f"descent test for s{i} is within {DESCENT_TOL} of the line")
    return v * config.base_side(i) < 0


def demazure(config: TriangleConfig, u: GroupElement, i: int) -> GroupElement:
    """u ⋆ s_i: u itself when i is a right descent, else u s_i."""
    if right_descent(config, u, i):
        return u
    return GroupElement(u.isometry @ config.generator(i), u.word + (i,), u.length + 1)


def demazure_word(config: TriangleConfig, word) -> GroupElement:
    """s_{i1} ⋆ s_{i2} ⋆ ... evaluated left to right."""
    u = GroupElement.identity()
    for i in word:
        u = demazure(config, u, i)
    return u


# ---------------------------------------------------------------------------
# contraction constant


@dataclass(frozen=True)
class ContractionResult:
    C: float
    argmax_angle: float
    circles: tuple  # ((c_i, r_i), ...) in the disk centered at z0
    grid_size: int


def _min_ratio(theta, centers, radii):
    x = np.exp(1j * np.asarray(theta, dtype=float))
    ratios = radii[:, None] / np.abs(x[None, :] - centers[:, None])
    return ratios.min(axis=0)


def contraction_constant(config: TriangleConfig, grid_bits: int = 16) -> ContractionResult:
    """max over the unit circle of min_i r_i / |x - c_i| in the z0-centered disk.

    Grid of 2^grid_bits angles plus golden-section refinement around the
    best grid point. Every grid point is certified to have some ratio < 1.
    """
    centers = np.array([c.c for c in config.circles])
    radii = np.array([c.r for c in config.circles])
    n = 1 << grid_bits
    theta = np.arange(n) * (TWO_PI / n)
    vals = _min_ratio(theta, centers, radii)
    if not np.all(vals < 1.0):
        k = int(np.argmax(vals))
        raise InternalInvariantError(
            f"open-cover certificate fails at angle {theta[k]!r} (min ratio {vals[k]!r})")
    k = int(np.argmax(vals))
    h = TWO_PI / n
    a, b = theta[k] - h, theta[k] + h
    f = lambda t: float(_min_ratio([t], centers, radii)[0])
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(80):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    best_t, best = max([(theta[k], float(vals[k])), (c, fc), (d, fd)], key=lambda p: p[1])
    if not best < 1.0:
        raise InternalInvariantError(f"contraction constant {best!r} is not below 1")
    circles = tuple((complex(cc.c), float(cc.r)) for cc in config.circles)
    return ContractionResult(best, best_t % TWO_PI, circles, n)
