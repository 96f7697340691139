"""Projectivized multi-lengths, planar hulls in the barycentric simplex,
and azimuthality certificates for their facets."""
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .errors import DegenerateHull, DimensionError, ZeroVector
from .scalar import to_fraction


@dataclass(frozen=True)
class MultiLength:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def scaled(self, t):
        return MultiLength(tuple(t * c for c in self.coords))


@dataclass(frozen=True)
class SimplexPoint:
    bary: tuple

    def __post_init__(self):
        object.__setattr__(self, "bary", tuple(self.bary))

    def __iter__(self):
        return iter(self.bary)

    def __len__(self):
        return len(self.bary)


def _coords(p):
    if isinstance(p, (MultiLength, SimplexPoint)):
        return tuple(p)
    return tuple(p)


def projectivize(v):
    c = _coords(v)
    if any(x < 0 for x in c):
        raise ValueError("multi-lengths are non-negative")
    total = sum(c)
    if total == 0:
        raise ZeroVector("cannot projectivize the zero vector")
    if all(isinstance(x, (int, Fraction)) for x in c):
        return SimplexPoint(tuple(Fraction(x) / total for x in c))
    return SimplexPoint(tuple(mpf(x) / total for x in c))


@dataclass(frozen=True)
class Functional:
    """Omega = sum c_i e_i^*, normalized so that max |c_i| = 1."""
    c: tuple

    def __post_init__(self):
        c = tuple(self.c)
        m = max(abs(x) for x in c)
        if m == 0:
            raise ValueError("zero functional")
        if m != 1:
            c = tuple(x / m for x in c)
        object.__setattr__(self, "c", c)

    def __call__(self, v):
        return sum(ci * vi for ci, vi in zip(self.c, _coords(v)))

    def __len__(self):
        return len(self.c)


def azimuthal(f):
    """Exactly one negative coefficient, the rest non-negative, positive sum."""
    c = f.c if isinstance(f, Functional) else tuple(f)
    neg = [x for x in c if x < 0]
    return len(neg) == 1 and sum(c) > 0


def azimuthal_margin(f):
    """Positive iff azimuthal; the size says how robustly."""
    c = sorted(f.c if isinstance(f, Functional) else tuple(f))
    if any(x < 0 for x in c[1:]):
        return min(c[1:])
    return min(-c[0], sum(c))


@dataclass(frozen=True)
class Facet:
    i: int  # positions in the vertex cycle
    j: int
    functional: Functional
    azimuthal: object = None  # None until certified
    exact: tuple = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class HullCertificate:
    vertices: tuple
    vertex_ids: tuple
    facets: tuple
    verdict: str = "partial"
    tol: mpf = None
    hypotheses: tuple = ()

    @property
    def degenerate(self):
        return len(self.vertices) < 3


def _exact(points):
    out = []
    for p in points:
        c = [to_fraction(x) for x in _coords(p)]
        if len(c) != 3:
            raise DimensionError("hulls are implemented for d = 3 only")
        s = sum(c)
        if s <= 0:
            raise ZeroVector("point with zero coordinate sum")
        out.append(tuple(x / s for x in c))
    return out


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _cross3(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _norm(u):
    return mp.sqrt(_dot(u, u))


def _real(u):
    """Coordinates as mpf, so exact and binary points can be mixed."""
    return tuple(mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpf(x)
                 for x in u)


def _line_distance(p, a, b):
    """Distance from p to the line ab inside the plane of the simplex."""
    p, a, b = _real(p), _real(a), _real(b)
    d = _sub(b, a)
    n = _norm(d)
    if n == 0:
        return _norm(_sub(p, a))
    return _norm(_cross3(d, _sub(p, a))) / n


def default_tol():
    return mpf(2) ** (-(mp.prec // 2))


def convex_hull(points, tol=None):
    """Counterclockwise extreme points of the projectivized input.

    Orientation tests are exact (binary floats are converted to rationals);
    afterwards, vertices within ``tol`` of the line through their neighbours
    are merged away. Returns an uncertified HullCertificate.
    """
    points = list(points)
    if not points:
        raise ValueError("convex hull of no points")
    tol = default_tol() if tol is None else mpf(tol)
    ex = _exact(points)
    # chart (b1, b2); ties and duplicates handled exactly
    order = sorted(range(len(ex)), key=lambda k: (ex[k][0], ex[k][1]))
    uniq = []
    for k in order:
        if not uniq or ex[uniq[-1]][:2] != ex[k][:2]:
            uniq.append(k)
    if len(uniq) <= 2:
        cycle = uniq
    else:
        lower, upper = [], []
        for k in uniq:
            while len(lower) >= 2 and _cross2(ex[lower[-2]], ex[lower[-1]], ex[k]) <= 0:
                lower.pop()
            lower.append(k)
        for k in reversed(uniq):
            while len(upper) >= 2 and _cross2(ex[upper[-2]], ex[upper[-1]], ex[k]) <= 0:
                upper.pop()
            upper.append(k)
        cycle = lower[:-1] + upper[:-1]
    # the chart (b1, b2) has the same orientation as the simplex viewed from (1,1,1)
    sp = [projectivize(points[k]) for k in cycle]
    cycle, sp = _merge_collinear(cycle, sp, tol)
    return _assemble(cycle, sp, ex, tol)


def _merge_collinear(cycle, sp, tol):
    changed = True
    while changed and len(cycle) > 3:
        changed = False
        for i in range(len(cycle)):
            a, b, c = sp[i - 1], sp[i], sp[(i + 1) % len(cycle)]
            if _line_distance(tuple(b), tuple(a), tuple(c)) <= tol:
                del cycle[i], sp[i]
                changed = True
                break
    if len(cycle) == 2 and _norm(_sub(_real(sp[0]), _real(sp[1]))) <= tol:
        cycle, sp = cycle[:1], sp[:1]
    return cycle, sp


def _assemble(cycle, sp, ex, tol):
    facets = []
    if len(cycle) >= 3:
        for i in range(len(cycle)):
            j = (i + 1) % len(cycle)
            c = _cross3(ex[cycle[i]], ex[cycle[j]])
            f = Functional(tuple(mpf(x.numerator) / x.denominator for x in c))
            facets.append(Facet(i, j, f, None, c))
    return HullCertificate(tuple(sp), tuple(cycle), tuple(facets), "partial", tol)


def hull_from_vertices(vertices, tol=None):
    """Hull whose vertex cycle is taken as given (used when re-checking a
    stored certificate); facets are recomputed from consecutive pairs."""
    tol = default_tol() if tol is None else mpf(tol)
    sp = [projectivize(v) for v in vertices]
    ex = _exact(vertices)
    return _assemble(list(range(len(sp))), sp, ex, tol)


NONCONJUGACY = "components pairwise nonconjugate in PGL2(R)"


def certify(hull, witness=None):
    """Evaluate azimuthality of every facet (exact signs)."""
    facets = []
    for f in hull.facets:
        facets.append(replace(f, azimuthal=azimuthal(f.exact or f.functional)))
    ok = not hull.degenerate and all(f.azimuthal for f in facets)
    hyp = f"{NONCONJUGACY}: " + ("witnessed by distinct lengths" if witness else "assumed, not witnessed")
    return replace(hull, facets=tuple(facets), verdict="certified" if ok else "partial",
                   hypotheses=(hyp,))


def hull_margin(hull, min_vertices=3):
    """Objective for parameter searches: positive iff the hull has at least
    min_vertices vertices and every facet is azimuthal."""
    if hull.degenerate:
        return mpf(-min_vertices)
    facet_margin = min(azimuthal_margin(f.functional) for f in hull.facets)
    deficit = max(0, min_vertices - len(hull.vertices))
    return facet_margin - deficit


def exterior_angle(u, v, w):
    """Angle between v - u and w - v, in [0, pi]."""
    d1, d2 = _sub(tuple(v), tuple(u)), _sub(tuple(w), tuple(v))
    return mp.atan2(_norm(_cross3(d1, d2)), _dot(d1, d2))


def vertex_angles(hull):
    n = len(hull.vertices)
    if n < 3:
        return [mp.pi] * n
    return [exterior_angle(hull.vertices[i - 1], hull.vertices[i], hull.vertices[(i + 1) % n])
            for i in range(n)]


@dataclass(frozen=True)
class Extremality:
    kind: str  # vertex, edge, interior
    exterior_angle: object = None
    vertex: object = None  # position in the hull cycle


def extremality_report(points, tol=None, hull=None):
    points = list(points)
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    hull = convex_hull(points, tol) if hull is None else hull
    tol = hull.tol
    angles = vertex_angles(hull)
    ids = {k: i for i, k in enumerate(hull.vertex_ids)}
    out = []
    for k, p in enumerate(points):
        if k in ids:
            out.append(Extremality("vertex", angles[ids[k]], ids[k]))
            continue
        sp = tuple(projectivize(p))
        near = [i for i, v in enumerate(hull.vertices) if _norm(_sub(_real(sp), _real(v))) <= tol]
        if near:
            out.append(Extremality("vertex", angles[near[0]], near[0]))
            continue
        state, _ = contains(hull, sp, tol)
        out.append(Extremality("edge" if state == "boundary" else "interior"))
    return out


def _facet_planes(hull):
    """Affine signed-distance functions (g, h): dist(p) = g . p + h."""
    planes = []
    n = len(hull.vertices)
    unit = tuple(mpf(1) / mp.sqrt(3) for _ in range(3))
    for i in range(n):
        a = tuple(hull.vertices[i])
        b = tuple(hull.vertices[(i + 1) % n])
        d = _sub(b, a)
        ln = _norm(d)
        # in-plane left normal of d
        g = tuple(x / ln for x in _cross3(unit, d))
        planes.append((g, -_dot(g, a)))
    return planes


def contains(hull, p, tol):
    """('inside' | 'boundary' | 'outside', margin) with margin the smallest
    signed in-plane distance from p to a facet line (positive = inside)."""
    return Container(hull, tol).classify(projectivize(p))


class Container:
    """Reusable containment tester for many points against one hull."""

    def __init__(self, hull, tol):
        if hull.degenerate:
            raise DegenerateHull("containment needs at least 3 hull vertices")
        self.hull = hull
        self.tol = mpf(tol)
        self.planes = _facet_planes(hull)

    def margin(self, sp):
        sp = tuple(sp)
        return min(_dot(g, sp) + h for g, h in self.planes)

    def classify(self, sp):
        m = self.margin(sp)
        if m > self.tol:
            return "inside", m
        if m >= -self.tol:
            return "boundary", m
        return "outside", m

    def classify_many(self, points, guard=1e-9):
        """Classify many simplex points. A float64 pass settles points that
        are clearly inside; everything within ``guard`` of a facet line is
        re-checked at full precision.

        Facets shorter than 1e-12 are skipped in the float pass: a point
        outside such a facet only is within that length of its neighbours'
        lines, so it is caught by the guard.
        """
        pts = [tuple(p) for p in points]
        if not pts:
            return []
        arr = np.array([[float(x) for x in p] for p in pts])
        verts = [tuple(float(x) for x in v) for v in self.hull.vertices]
        rows = []
        n = len(verts)
        for i in range(n):
            a, b = np.array(verts[i]), np.array(verts[(i + 1) % n])
            d = b - a
            ln = np.linalg.norm(d)
            if ln < 1e-12:
                continue
            g = np.cross(np.ones(3) / np.sqrt(3), d) / ln
            rows.append((g, -g @ a))
        if rows:
            G = np.array([r[0] for r in rows])
            H = np.array([r[1] for r in rows])
            approx = (arr @ G.T + H).min(axis=1)
        else:
            approx = np.zeros(len(pts))
        out = []
        for p, m in zip(pts, approx):
            if m > guard:
                out.append(("inside", mpf(float(m))))
            else:
                out.append(self.classify(p))
        return out
