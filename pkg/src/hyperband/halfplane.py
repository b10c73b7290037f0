"""Moebius geometry of the Poincare upper half-plane.

The half-plane H = {x + iy : y > 0} carries the metric ds^2 = (dx^2 + dy^2)/y^2.
SL(2,R) acts by g.z = (az + b)/(cz + d); the kernel of the action is {+-1}, so
everything geometric factors through PSL(2,R).  Three one-parameter subgroups
generate the group:

    e^{theta S} = [[cos t, sin t], [-sin t, cos t]]   (rotation about i)
    e^{t T}     = [[1, t], [0, 1]]                    (horizontal translation)
    e^{mu U}    = [[e^mu, 0], [0, e^-mu]]             (scaling z -> e^{2 mu} z)

and every element factors uniquely as e^{theta S} e^{mu U} e^{t T} (Iwasawa).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Tolerance ladder: two orders of headroom between successive layers of
# composed arithmetic.
CONSTRUCTION_TOL = 1e-12
COMPARISON_TOL = 1e-10
GEOMETRIC_TOL = 1e-9

_EPS = 2.220446049250313e-16
_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp split constant


def _two_product(x: float, y: float) -> tuple[float, float]:
    """Exact product x*y = p + e with p = fl(x*y)."""
    p = x * y
    cx = _SPLITTER * x
    hx = cx - (cx - x)
    lx = x - hx
    cy = _SPLITTER * y
    hy = cy - (cy - y)
    ly = y - hy
    e = ((hx * hy - p) + hx * ly + lx * hy) + lx * ly
    return p, e


def _det2(a: float, b: float, c: float, d: float) -> float:
    """a*d - b*c with compensated products (immune to cancellation)."""
    p1, e1 = _two_product(a, d)
    p2, e2 = _two_product(b, c)
    return (p1 - p2) + (e1 - e2)


@dataclass(frozen=True)
class HPoint:
    """A point x + iy of the upper half-plane, y > 0 strictly."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite half-plane point ({self.x}, {self.y})")
        if self.y <= 0.0:
            raise ValueError(f"half-plane point needs y > 0, got y = {self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class Sl2Element:
    """Real 2x2 matrix [[a, b], [c, d]] with det = 1.

    Construction renormalizes by 1/sqrt(det) and rejects input whose
    determinant is not within tolerance of 1.  The tolerance is widened by the
    float64 noise floor ~eps * max_entry^2: the determinant of a stored matrix
    of norm M is only defined to that resolution, so products of deep tiling
    words would otherwise be rejected for pure rounding drift.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c) and math.isfinite(d)):
            raise ValueError("non-finite matrix entry")
        det = _det2(a, b, c, d)
        scale = max(1.0, abs(a), abs(b), abs(c), abs(d))
        tol = 1e-9 + 64.0 * _EPS * scale * scale
        if det <= 0.0 or abs(det - 1.0) > tol:
            raise ValueError(f"matrix determinant {det} too far from 1")
        if abs(det - 1.0) > 1e-15:
            s = math.sqrt(det)
            object.__setattr__(self, "a", a / s)
            object.__setattr__(self, "b", b / s)
            object.__setattr__(self, "c", c / s)
            object.__setattr__(self, "d", d / s)

    @classmethod
    def identity(cls) -> "Sl2Element":
        return cls(1.0, 0.0, 0.0, 1.0)

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "Sl2Element") -> "Sl2Element":
        return Sl2Element(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Sl2Element":
        # det = 1 makes the adjugate the exact inverse
        return Sl2Element(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "Sl2Element":
        return Sl2Element(-self.a, -self.b, -self.c, -self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d


def exp_s(theta: float) -> Sl2Element:
    """Rotation subgroup element e^{theta S}."""
    if not math.isfinite(theta):
        raise ValueError("non-finite rotation parameter")
    c, s = math.cos(theta), math.sin(theta)
    return Sl2Element(c, s, -s, c)


def exp_t(t: float) -> Sl2Element:
    """Translation subgroup element e^{t T}, acting as z -> z + t."""
    if not math.isfinite(t):
        raise ValueError("non-finite translation parameter")
    return Sl2Element(1.0, t, 0.0, 1.0)


def exp_u(mu: float) -> Sl2Element:
    """Scaling subgroup element e^{mu U}, acting as z -> e^{2 mu} z."""
    if not math.isfinite(mu):
        raise ValueError("non-finite scaling parameter")
    e = math.exp(mu)
    return Sl2Element(e, 0.0, 0.0, 1.0 / e)


def moebius_act(g: Sl2Element, z: HPoint) -> HPoint:
    """Apply g.z = (az + b)/(cz + d).

    The imaginary part is computed as y/|cz+d|^2, which is positive by
    construction and immune to cancellation near the real axis.
    """
    cx = g.c * z.x + g.d
    cy = g.c * z.y
    den = cx * cx + cy * cy
    if den < 1e-300:
        raise ValueError("degenerate Moebius denominator |cz + d| ~ 0")
    ax = g.a * z.x + g.b
    ay = g.a * z.y
    return HPoint((ax * cx + ay * cy) / den, z.y / den)


@dataclass(frozen=True)
class IwasawaFactors:
    """Parameters of the factorization g = e^{theta S} e^{mu U} e^{t T}."""

    theta: float
    mu: float
    t: float


def iwasawa_decompose(g: Sl2Element) -> IwasawaFactors:
    """Factor g (up to sign) with theta normalized into (-pi/2, pi/2].

    The rotation angle of -g differs by pi, so folding theta by pi picks the
    unique PSL(2,R) representative; recomposition then matches +-g.
    """
    theta = math.atan2(-g.c, g.a)
    if theta <= -math.pi / 2.0:
        theta += math.pi
    elif theta > math.pi / 2.0:
        theta -= math.pi
    r2 = g.a * g.a + g.c * g.c  # = e^{2 mu}, sign-independent
    mu = 0.5 * math.log(r2)
    t = (g.a * g.b + g.c * g.d) / r2
    return IwasawaFactors(theta, mu, t)


def iwasawa_recompose(f: IwasawaFactors) -> Sl2Element:
    return exp_s(f.theta) @ exp_u(f.mu) @ exp_t(f.t)


@dataclass(frozen=True)
class OrbitCircle:
    """Euclidean circle x^2 + (y - a)^2 = b^2 traced by the rotation orbit.

    center_y is the height a of the center i*a; radius b satisfies
    a^2 - b^2 = 1.  b = 0 exactly for the fixed point z = i.
    """

    center_y: float
    radius: float


def rotation_orbit_circle(z0: HPoint) -> OrbitCircle:
    """Orbit {e^{t S} z0} as a Euclidean circle centered on the imaginary axis."""
    a = (z0.x * z0.x + z0.y * z0.y + 1.0) / (2.0 * z0.y)
    b = math.sqrt(max(a * a - 1.0, 0.0))
    return OrbitCircle(a, b)


def hyperbolic_distance(z1: HPoint, z2: HPoint) -> float:
    """Poincare distance arccosh(1 + |z1 - z2|^2 / (2 y1 y2)).

    Evaluated through asinh of the half-chord, which keeps full relative
    accuracy for nearby points where the arccosh form loses half the digits.
    """
    dx = z1.x - z2.x
    dy = z1.y - z2.y
    return 2.0 * math.asinh(math.sqrt((dx * dx + dy * dy) / (4.0 * z1.y * z2.y)))


def psl2_distance(g: Sl2Element, h: Sl2Element) -> float:
    """Max-entry distance between g and h as PSL(2,R) elements (min over sign)."""
    d_plus = max(abs(g.a - h.a), abs(g.b - h.b), abs(g.c - h.c), abs(g.d - h.d))
    d_minus = max(abs(g.a + h.a), abs(g.b + h.b), abs(g.c + h.c), abs(g.d + h.d))
    return min(d_plus, d_minus)
