"""Upper half-plane geometry: isometries, geodesics, slacks, perpendiculars."""
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .errors import (Asymptotic, Crossing, Degenerate, NonHyperbolic,
                     NonHyperbolicResolution, NotCrossing, OrientationReversing)
from .scalar import arccosh, arccosh1p, eps


@dataclass(frozen=True)
class BoundaryPoint:
    """Point of the real projective line, stored as (u, v) ~ u/v."""
    u: mpf
    v: mpf

    def __post_init__(self):
        if self.u == 0 and self.v == 0:
            raise Degenerate("boundary point (0, 0)")

    @property
    def is_infinite(self):
        return self.v == 0

    def value(self):
        """Finite coordinate, or mp.inf for the point at infinity."""
        return mp.inf if self.v == 0 else self.u / self.v

    def __repr__(self):
        if self.is_infinite:
            return "BoundaryPoint(inf)"
        return f"BoundaryPoint({mp.nstr(self.value(), 15)})"


def boundary(x, v=None):
    """Canonical boundary point from a number (or mp.inf) or a pair (u, v)."""
    if v is not None:
        u, v = mpf(x), mpf(v)
        if v == 0:
            return BoundaryPoint(mpf(1), mpf(0))
        return BoundaryPoint(u / v, mpf(1))
    if x is None:
        raise Degenerate("missing coordinate")
    if x in (mp.inf, -mp.inf, float("inf"), float("-inf")) or x == "inf":
        return BoundaryPoint(mpf(1), mpf(0))
    return BoundaryPoint(mpf(x), mpf(1))


INF = BoundaryPoint(mpf(1), mpf(0))


def det2(p, q):
    return p.u * q.v - q.u * p.v


def same_point(p, q):
    """Equality of boundary points; exact for exact inputs, else at 2^(16-prec)."""
    d = det2(p, q)
    if d == 0:
        return True
    scale = max(abs(p.u), abs(p.v)) * max(abs(q.u), abs(q.v))
    return abs(d) <= eps(16) * scale


@dataclass(frozen=True)
class Isometry:
    """[[a, b], [c, d]] with orientation = sign(det); identified with its negative."""
    a: mpf
    b: mpf
    c: mpf
    d: mpf
    orientation: int = 1

    def __matmul__(self, other):
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Isometry(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h,
                        self.orientation * other.orientation)

    def inverse(self):
        # inverse of a det +-1 matrix is the adjugate divided by det
        s = self.orientation
        return Isometry(s * self.d, -s * self.b, -s * self.c, s * self.a, s)

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        """Action on a point of the upper half-plane (mpc)."""
        z = mpc(z)
        if self.orientation < 0:
            z = z.conjugate()
        return (self.a * z + self.b) / (self.c * z + self.d)

    def on_boundary(self, p):
        return boundary(self.a * p.u + self.b * p.v, self.c * p.u + self.d * p.v)

    def is_identity(self, tol=None):
        """True if the projective class is the identity, within tol."""
        if self.orientation < 0:
            return False
        tol = eps(24) if tol is None else tol
        s = 1 if self.a + self.d >= 0 else -1
        return (abs(self.a - s) <= tol and abs(self.d - s) <= tol
                and abs(self.b) <= tol and abs(self.c) <= tol)

    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))


def isometry(a, b, c, d):
    """Isometry from an arbitrary invertible real matrix, scaled to |det| = 1."""
    a, b, c, d = mpf(a), mpf(b), mpf(c), mpf(d)
    det = a * d - b * c
    if det == 0:
        raise Degenerate("singular matrix")
    k = 1 / mp.sqrt(abs(det))
    return Isometry(a * k, b * k, c * k, d * k, 1 if det > 0 else -1)


IDENTITY = Isometry(mpf(1), mpf(0), mpf(0), mpf(1))


def translation(s):
    """Translation by s along the imaginary axis, towards infinity."""
    h = mp.exp(mpf(s) / 2)
    return Isometry(h, mpf(0), mpf(0), 1 / h)


def rotation(phi):
    """Counterclockwise rotation by phi about i."""
    c, s = mp.cos(mpf(phi) / 2), mp.sin(mpf(phi) / 2)
    return Isometry(c, s, -s, c)


@dataclass(frozen=True)
class OrientedGeodesic:
    backward: BoundaryPoint
    forward: BoundaryPoint

    def __post_init__(self):
        if same_point(self.backward, self.forward):
            raise Degenerate("geodesic with equal endpoints")

    def __neg__(self):
        return OrientedGeodesic(self.forward, self.backward)

    def __repr__(self):
        return f"OrientedGeodesic({self.backward!r} -> {self.forward!r})"


def geodesic(x, y):
    return OrientedGeodesic(boundary(x), boundary(y))


def _hyperbolic_trace(m):
    if m.orientation < 0:
        raise OrientationReversing("translation length of an orientation-reversing map")
    t = abs(m.trace)
    if t <= 2:
        raise NonHyperbolic(f"|trace| = {mp.nstr(t, 10)} <= 2")
    return t


def translation_length(m):
    t = _hyperbolic_trace(m)
    return 2 * arccosh1p(t / 2 - 1)


def axis(m):
    """(repelling, attracting) fixed points of a hyperbolic isometry."""
    t = _hyperbolic_trace(m)
    lam = (t + mp.sqrt((t - 2) * (t + 2))) / 2
    if m.trace < 0:
        lam = -lam
    mu = 1 / lam

    def eigvec(x):
        v1 = (m.b, x - m.a)
        v2 = (x - m.d, m.c)
        n1 = max(abs(v1[0]), abs(v1[1]))
        n2 = max(abs(v2[0]), abs(v2[1]))
        return boundary(*(v1 if n1 >= n2 else v2))

    return OrientedGeodesic(eigvec(mu), eigvec(lam))


def cross_ratio(a, b, c, d):
    """[a:b:c:d], normalized so that [inf:0:1:t] = t."""
    if same_point(a, b) or same_point(c, d):
        raise Degenerate("coincident points in cross ratio")
    num = det2(a, c) * det2(b, d)
    den = det2(a, d) * det2(b, c)
    if den == 0 or num == 0:
        raise Degenerate("degenerate cross ratio")
    return num / den


def _check_distinct(l, lp):
    pts = (l.backward, l.forward, lp.backward, lp.forward)
    for i in range(4):
        for j in range(i + 1, 4):
            if same_point(pts[i], pts[j]):
                raise Degenerate("geodesics share an endpoint")


def asymptotic_slack(l, lp):
    _check_distinct(l, lp)
    return mp.log(abs(cross_ratio(l.backward, lp.backward, l.forward, lp.forward)))


def crosses(l, lp):
    """True if the two geodesics intersect in the interior."""
    _check_distinct(l, lp)

    def s(y):
        return det2(l.backward, y) * det2(l.forward, y)

    return s(lp.backward) * s(lp.forward) < 0


def crossing_angle(l, lp):
    """Angle in (0, pi) between the forward directions at the crossing."""
    if not crosses(l, lp):
        raise NotCrossing("geodesics do not cross")
    cr = abs(cross_ratio(l.backward, lp.backward, l.forward, lp.forward))
    # cos^2(theta/2) = 1/cr
    return 2 * mp.atan(mp.sqrt(cr - 1))


def frame(l):
    """Orientation-preserving isometry sending (0, inf) onto l, 0 to backward."""
    f, b = l.forward, l.backward
    det = det2(f, b)
    bu, bv = (b.u, b.v) if det > 0 else (-b.u, -b.v)
    k = 1 / mp.sqrt(abs(det))
    return Isometry(f.u * k, bu * k, f.v * k, bv * k)


def _normalized(l, lp):
    """lp's endpoints after moving l to (0, inf)."""
    g = frame(l).inverse()
    return g, g.on_boundary(lp.backward), g.on_boundary(lp.forward)


def _finite(p):
    return p.u / p.v


def common_perpendicular(l, lp):
    """Common perpendicular, oriented from l towards lp, and its length."""
    _check_distinct(l, lp)
    if crosses(l, lp):
        raise Crossing("geodesics cross")
    g, p, q = _normalized(l, lp)
    p, q = _finite(p), _finite(q)
    r = mp.sqrt(p * q)
    s = 1 if p > 0 else -1
    h = g.inverse()
    perp = OrientedGeodesic(h.on_boundary(boundary(-s * r)), h.on_boundary(boundary(s * r)))
    ratio = mp.sqrt(min(abs(p), abs(q)) / max(abs(p), abs(q)))
    return perp, 2 * mp.atanh(ratio)


def perpendicular_feet(l, lp):
    """Feet of the common perpendicular on l and on lp (points of H^2)."""
    _check_distinct(l, lp)
    if crosses(l, lp):
        raise Crossing("geodesics cross")
    g, p, q = _normalized(l, lp)
    p, q = _finite(p), _finite(q)
    r2 = p * q
    x = 2 * p * q / (p + q)
    y = mp.sqrt(r2 - x * x)
    h = g.inverse()
    return h(mpc(0, mp.sqrt(r2))), h(mpc(x, y))


def intersection(l, lp):
    """Crossing point of two geodesics."""
    if not crosses(l, lp):
        raise NotCrossing("geodesics do not cross")
    g, p, q = _normalized(l, lp)
    return g.inverse()(mpc(0, mp.sqrt(-_finite(p) * _finite(q))))


def position_on(l, z):
    """Signed distance along l from frame(l)(i) to the projection of z."""
    w = frame(l).inverse()(z)
    return mp.log(abs(w)) if abs(w) else -mp.inf


def distance_to_geodesic(z, l):
    w = frame(l).inverse()(z)
    return mp.asinh(abs(w.real) / w.imag)


def distance(z, w):
    z, w = mpc(z), mpc(w)
    return arccosh1p(abs(z - w) ** 2 / (2 * z.imag * w.imag))


def reflection(l):
    """Orientation-reversing involution fixing l pointwise."""
    g = frame(l)
    mirror = Isometry(mpf(-1), mpf(0), mpf(0), mpf(1), -1)
    return g @ mirror @ g.inverse()


def resolve_crossing(L2, L3, theta):
    """Lengths of the three curves obtained by resolving a crossing.

    L2, L3 are the lengths of the two loops through the crossing point and
    theta the crossing angle.
    """
    L2, L3, theta = mpf(L2), mpf(L3), mpf(theta)
    c2, c3 = mp.cosh(L2 / 2), mp.cosh(L3 / 2)
    half_cos, half_sin = mp.cos(theta / 2), mp.sin(theta / 2)
    values = (
        2 * c2 * c3 * half_sin ** 2 - mp.cosh((L2 - L3) / 2),
        c2 * half_cos,
        c3 * half_cos,
    )
    out = []
    for k, v in enumerate(values, 1):
        if v < 1:
            raise NonHyperbolicResolution(k, v)
        out.append(2 * arccosh(v))
    return tuple(out)
