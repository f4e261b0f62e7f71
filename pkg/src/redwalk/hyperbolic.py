"""Half-plane and disk geometry: lines, reflections, isometries, boundary.

Interior points are Python complex numbers with positive imaginary part.
Boundary points of the half-plane are :class:`Boundary` values, with the
point at infinity as a separate case rather than a large float.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ON_LINE_TOL",
    "RENORM_EVERY",
    "Boundary",
    "INF",
    "HLine",
    "Vertical",
    "Semicircle",
    "line_through",
    "DiskLine",
    "Diameter",
    "OrthoCircle",
    "Isometry",
    "reflect",
    "apply",
    "cayley",
    "cayley_inverse",
    "cayley_angle",
    "boundary_from_angle",
    "side_of",
    "side_value",
    "hyperbolic_distance",
    "disk_map",
    "disk_angle",
    "disk_line",
    "hpoint",
]

ON_LINE_TOL = 1e-12
RENORM_EVERY = 64
TWO_PI = 2.0 * math.pi


def hpoint(re: float, im: float) -> complex:
    if not im > 0:
        raise DomainError(f"point must have positive imaginary part, got {im}")
    return complex(re, im)


@dataclass(frozen=True)
class Boundary:
    """A point of the extended real line."""

    x: float = 0.0
    infinite: bool = False

    @classmethod
    def finite(cls, x) -> "Boundary":
        x = float(x)
        if not math.isfinite(x):
            raise DomainError("use Boundary.INF for the point at infinity")
        return cls(x, False)

    @classmethod
    def computed(cls, x: float) -> "Boundary":
        """A computed coordinate; an overflow to ±inf is the point ∞ to double precision."""
        return INF if math.isinf(x) else cls(float(x), False)

    @classmethod
    def from_projective(cls, p: float, q: float) -> "Boundary":
        if q == 0:
            if p == 0:
                raise DomainError("(0, 0) is not a projective point")
            return INF
        return cls.computed(p / q)

    def projective(self):
        return (1.0, 0.0) if self.infinite else (self.x, 1.0)

    @property
    def angle(self) -> float:
        """Angle of the Cayley image on the unit circle, in [0, 2π)."""
        return cayley_angle(self)

    def __float__(self):
        return math.inf if self.infinite else self.x

    def __repr__(self):
        return "Boundary(∞)" if self.infinite else f"Boundary({self.x!r})"


INF = Boundary(0.0, True)


def _as_boundary(x):
    if isinstance(x, Boundary):
        return x
    if isinstance(x, (int, float)) and not math.isinf(x):
        return Boundary.finite(x)
    if isinstance(x, float) and math.isinf(x):
        return INF
    raise DomainError(f"not a boundary point: {x!r}")


# ---------------------------------------------------------------------------
# lines of the half-plane


class HLine:
    """Base class for half-plane lines."""

    def endpoints(self):
        raise NotImplementedError

    def side_value(self, z: complex) -> float:
        """Signed sinh of the hyperbolic distance from z to the line."""
        raise NotImplementedError

    def boundary_side(self, b: Boundary) -> float:
        raise NotImplementedError

    def reflection(self) -> "Isometry":
        raise NotImplementedError


@dataclass(frozen=True)
class Vertical(HLine):
    x: float

    def endpoints(self):
        return Boundary.finite(self.x), INF

    def side_value(self, z):
        return (z.real - self.x) / z.imag

    def boundary_side(self, b):
        # the line's own endpoints (including ∞) count as on it
        return 0.0 if b.infinite else b.x - self.x

    def reflection(self):
        return Isometry(-1.0, 2.0 * self.x, 0.0, 1.0)

    def reflect(self, z):
        if isinstance(z, Boundary):
            return z if z.infinite else Boundary.computed(2 * self.x - z.x)
        return complex(2 * self.x - z.real, z.imag)


@dataclass(frozen=True)
class Semicircle(HLine):
    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("semicircle radius must be positive")

    def endpoints(self):
        return Boundary.finite(self.center - self.radius), Boundary.finite(self.center + self.radius)

    def side_value(self, z):
        w = z - self.center
        return (w.real * w.real + w.imag * w.imag - self.radius ** 2) / (2 * self.radius * z.imag)

    def boundary_side(self, b):
        if b.infinite:
            return 1.0
        return abs(b.x - self.center) - self.radius

    def reflection(self):
        c, r = self.center, self.radius
        return Isometry(c / r, (r * r - c * c) / r, 1.0 / r, -c / r)

    def reflect(self, z):
        c, r2 = self.center, self.radius ** 2
        if isinstance(z, Boundary):
            if z.infinite:
                return Boundary.finite(c)
            if z.x == c:
                return INF
            return Boundary.computed(r2 / (z.x - c) + c)
        return r2 / (z.conjugate() - c) + c


def line_through(a, b) -> HLine:
    """The line with ideal endpoints a and b."""
    a, b = _as_boundary(a), _as_boundary(b)
    if a.infinite and b.infinite or (not a.infinite and not b.infinite and a.x == b.x):
        raise DomainError("a line needs two distinct ideal endpoints")
    if a.infinite:
        return Vertical(b.x)
    if b.infinite:
        return Vertical(a.x)
    return Semicircle((a.x + b.x) / 2, abs(a.x - b.x) / 2)


def side_value(L: HLine, z: complex) -> float:
    return L.side_value(z)


def side_of(L: HLine, z: complex) -> int:
    """+1 right of a vertical / outside a semicircle, -1 the other side, 0 on the line."""
    v = L.side_value(z)
    if abs(v) <= ON_LINE_TOL:
        return 0
    return 1 if v > 0 else -1


def reflect(L: HLine, z):
    """Reflection in L applied to an interior point or a boundary point."""
    return L.reflect(z)


# ---------------------------------------------------------------------------
# isometries


class Isometry:
    """Real 2x2 matrix acting by Möbius (det > 0) or conjugate-Möbius (det < 0) maps."""

    __slots__ = ("a", "b", "c", "d", "_count")

    def __init__(self, a, b, c, d, _count=0):
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)
        self._count = _count

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def orientation(self) -> int:
        return 1 if self.det > 0 else -1

    def normalized(self) -> "Isometry":
        s = math.sqrt(abs(self.det))
        if s == 0:
            raise DomainError("singular matrix is not an isometry")
        return Isometry(self.a / s, self.b / s, self.c / s, self.d / s)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        g = Isometry(a, b, c, d, self._count + other._count + 1)
        if g._count >= RENORM_EVERY:
            g = g.normalized()
        return g

    compose = __matmul__

    def inverse(self) -> "Isometry":
        det = self.det
        return Isometry(self.d / det, -self.b / det, -self.c / det, self.a / det, self._count)

    def __call__(self, z):
        return apply(self, z)

    def close_to(self, other: "Isometry", tol: float = 1e-9) -> bool:
        """Equality as projective maps (matrices up to sign) after normalization."""
        p, q = self.normalized(), other.normalized()
        if p.orientation != q.orientation:
            return False
        u = (p.a, p.b, p.c, p.d)
        v = (q.a, q.b, q.c, q.d)
        return (max(abs(x - y) for x, y in zip(u, v)) <= tol
                or max(abs(x + y) for x, y in zip(u, v)) <= tol)

    def __repr__(self):
        return f"Isometry([[{self.a!r}, {self.b!r}], [{self.c!r}, {self.d!r}]])"


def apply(g: Isometry, z):
    """Action of g on an interior point (complex) or a Boundary point."""
    if isinstance(z, Boundary):
        p, q = z.projective()
        return Boundary.from_projective(g.a * p + g.b * q, g.c * p + g.d * q)
    if g.det < 0:
        z = z.conjugate()
    return (g.a * z + g.b) / (g.c * z + g.d)


def hyperbolic_distance(z: complex, w: complex) -> float:
    dz = z - w
    return math.acosh(1.0 + (dz.real ** 2 + dz.imag ** 2) / (2.0 * z.imag * w.imag))


# ---------------------------------------------------------------------------
# disk model


def cayley(z):
    """φ(z) = (z - i)/(z + i). Boundary points go to unit complex numbers."""
    if isinstance(z, Boundary):
        if z.infinite:
            return complex(1.0, 0.0)
        return (z.x - 1j) / (z.x + 1j)
    return (z - 1j) / (z + 1j)


def cayley_inverse(w: complex):
    """Inverse Cayley map; unit-modulus input gives a Boundary point."""
    if abs(abs(w) - 1.0) <= 1e-12:
        if abs(w - 1) <= 1e-15:
            return INF
        return Boundary.computed((1j * (1 + w) / (1 - w)).real)
    return 1j * (1 + w) / (1 - w)


def cayley_angle(b: Boundary) -> float:
    """Argument of φ(b) in [0, 2π)."""
    if b.infinite:
        return 0.0
    return math.atan2(-2.0 * b.x, b.x * b.x - 1.0) % TWO_PI


def boundary_from_angle(t: float) -> Boundary:
    """Inverse of cayley_angle: x = -cot(t/2)."""
    t = t % TWO_PI
    s = math.sin(t / 2)
    if s == 0.0:
        return INF
    x = -math.cos(t / 2) / s
    return Boundary.computed(x)


def disk_map(z0: complex):
    """ψ(z) = (z - z0)/(z - conj(z0)): half-plane to disk with z0 at the center."""
    zc = z0.conjugate()

    def psi(z):
        if isinstance(z, Boundary):
            if z.infinite:
                return complex(1.0, 0.0)
            return (z.x - z0) / (z.x - zc)
        return (z - z0) / (z - zc)

    return psi


def disk_angle(b: Boundary, z0: complex = 1j) -> float:
    """Argument of ψ(b) in [0, 2π) for the disk centered at z0."""
    if b.infinite:
        return 0.0
    return cmath.phase(disk_map(z0)(b)) % TWO_PI


class DiskLine:
    def reflect(self, w: complex) -> complex:
        raise NotImplementedError


@dataclass(frozen=True)
class Diameter(DiskLine):
    """Line through the center in the direction of the unit complex c."""

    c: complex

    def reflect(self, w):
        return w.conjugate() * self.c / self.c.conjugate()


@dataclass(frozen=True)
class OrthoCircle(DiskLine):
    """Circle centered at c orthogonal to the unit circle, r^2 = |c|^2 - 1."""

    c: complex
    r: float

    def __post_init__(self):
        if abs(self.r ** 2 - (abs(self.c) ** 2 - 1.0)) > 1e-12 * max(1.0, abs(self.c) ** 2):
            raise DomainError("orthocircle radius does not satisfy r^2 = |c|^2 - 1")

    @classmethod
    def from_angles(cls, alpha: float, beta: float) -> "OrthoCircle":
        """Circle through e^{iα}, e^{iβ}; the arc between them must be shorter than π."""
        delta = (beta - alpha) % TWO_PI
        mid = alpha + delta / 2
        if delta > math.pi:
            delta = TWO_PI - delta
            mid += math.pi
        half = delta / 2
        c = cmath.exp(1j * mid) / math.cos(half)
        return cls(c, math.sqrt(abs(c) ** 2 - 1.0))

    def reflect(self, w):
        # c + r^2/(conj(w) - conj(c)) rewritten with u = c/|c|, s = 1/|c|; stable
        # when the circle is close to a diameter and |c| is huge
        rho = abs(self.c)
        u, s = self.c / rho, 1.0 / rho
        wc = w.conjugate()
        return (u * wc - s) / (s * wc - u.conjugate())

    def outside(self, w: complex) -> bool:
        return abs(w - self.c) > self.r


def disk_line(L: HLine, z0: complex = 1j) -> DiskLine:
    """Image of L in the disk model centered at z0 (z0 = i gives the Cayley picture)."""
    e1, e2 = L.endpoints()
    a1, a2 = disk_angle(e1, z0), disk_angle(e2, z0)
    gap = (a2 - a1) % TWO_PI
    if abs(gap - math.pi) <= 1e-12:
        return Diameter(cmath.exp(1j * a1))
    return OrthoCircle.from_angles(a1, a2)
