import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from limitcone import cone
from limitcone.cone import Functional, MultiLength, SimplexPoint
from limitcone.errors import DegenerateHull, DimensionError, ZeroVector
from limitcone.scalar import precision

PANTS = [(2, 2, 1), (1, 2, 2), (2, 1, 2)]


@pytest.fixture(autouse=True)
def _prec():
    with precision(256):
        yield


def _plane(p):
    s = sum(Fraction(x) for x in p)
    return tuple(Fraction(x) / s for x in p)[:2]


def _orient(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _in_triangle(p, a, b, c):
    d = [_orient(a, b, p), _orient(b, c, p), _orient(c, a, p)]
    return not (any(x < 0 for x in d) and any(x > 0 for x in d))


def _on_segment(p, a, b):
    return (_orient(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def _in_hull(p, pts):
    """Caratheodory: inside the hull iff inside a triangle (or segment) of the points."""
    if any(_on_segment(p, a, b) for a, b in combinations(pts, 2)):
        return True
    return any(_in_triangle(p, *t) for t in combinations(pts, 3))


def _extreme(k, pts):
    p = pts[k]
    rest = [q for i, q in enumerate(pts) if i != k and q != p]
    if any(q == p for i, q in enumerate(pts) if i < k):
        return False  # duplicate; count the first copy only
    return not _in_hull(p, rest) if len(rest) >= 2 else True


def test_projectivize_examples():
    assert tuple(cone.projectivize(MultiLength((12, 16, 16)))) == (
        Fraction(3, 11), Fraction(4, 11), Fraction(4, 11))
    assert tuple(cone.projectivize((1, 1, 1))) == (Fraction(1, 3),) * 3
    with pytest.raises(ZeroVector):
        cone.projectivize((0, 0, 0))
    sp = cone.projectivize((mpf(1), mpf(2), mpf(3)))
    assert abs(sum(sp) - 1) < mpf(2) ** (32 - mp.prec)


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.floats(0.01, 100)] * 3), st.floats(0.001, 1000))
def test_projectivize_scale_invariant(v, t):
    a = cone.projectivize(tuple(mpf(x) for x in v))
    b = cone.projectivize(tuple(mpf(t) * mpf(x) for x in v))
    assert all(abs(x - y) < mpf(2) ** (16 - mp.prec) for x, y in zip(a, b))


def test_convex_hull_examples():
    hull = cone.convex_hull(PANTS)
    assert len(hull.vertices) == 3 and hull.verdict == "partial"
    single = cone.convex_hull([(1, 2, 3)] * 4)
    assert len(single.vertices) == 1 and single.degenerate
    four = cone.convex_hull(PANTS + [(1, 1, 1)])
    assert len(four.vertices) == 3 and 3 not in four.vertex_ids
    with pytest.raises(DimensionError):
        cone.convex_hull([(1, 2, 3, 4)])


def test_azimuthal_examples():
    assert cone.azimuthal(Functional((-1, 1, 1)))
    assert not cone.azimuthal(Functional((1, 1, 1)))
    assert not cone.azimuthal(Functional((mpf(-2), mpf(1), mpf("0.5"))))
    assert cone.azimuthal_margin(Functional((-1, 1, 1))) > 0
    assert cone.azimuthal_margin(Functional((1, 1, 1))) < 0
    assert cone.azimuthal_margin(Functional((mpf(-2), mpf(1), mpf("0.5")))) < 0


def test_certify_pants():
    hull = cone.certify(cone.convex_hull(PANTS), witness={"w": 1})
    assert hull.verdict == "certified"
    assert all(f.azimuthal for f in hull.facets)
    assert "witnessed" in hull.hypotheses[0]
    verts = [tuple(v) for v in hull.vertices]
    for f in hull.facets:
        a, b = verts[f.i], verts[f.j]
        if {a, b} == {cone.projectivize(PANTS[0]).bary, cone.projectivize(PANTS[1]).bary}:
            c = f.exact
            assert c[0] * -3 == c[1] * 2 and c[0] == c[2]
            break
    else:
        pytest.fail("facet through (2,2,1)-(1,2,2) missing")
    assert "assumed" in cone.certify(cone.convex_hull(PANTS)).hypotheses[0]


def test_certify_partial():
    # (1,0,0) and (0,1,0) span a facet on a chamber wall: functional (0,0,1)
    hull = cone.certify(cone.convex_hull([(1, 0, 0), (0, 1, 0), (1, 1, 1), (1, 1, 3)]))
    assert hull.verdict == "partial"
    assert any(not f.azimuthal for f in hull.facets)
    assert cone.certify(cone.convex_hull([(1, 1, 1), (2, 2, 2)])).verdict == "partial"


def test_contains_examples():
    hull = cone.convex_hull(PANTS)
    assert cone.contains(hull, (1, 1, 1), mpf("1e-12"))[0] == "inside"
    assert cone.contains(hull, PANTS[0], mpf("1e-12"))[0] == "boundary"
    state, margin = cone.contains(hull, (mpf("0.9"), mpf("0.05"), mpf("0.05")), mpf("1e-12"))
    assert state == "outside" and margin < 0
    with pytest.raises(DegenerateHull):
        cone.contains(cone.convex_hull([(1, 1, 1)]), (1, 1, 1), mpf("1e-12"))


def test_hull_margin():
    hull = cone.convex_hull(PANTS)
    assert cone.hull_margin(hull, 3) > 0
    assert cone.hull_margin(hull, 5) < 0
    assert cone.hull_margin(cone.convex_hull([(1, 1, 1)]), 3) == -3


def test_extremality_examples():
    pts = PANTS + [(3, 4, 3), (1, 1, 1)]  # edge midpoint of the first facet, barycenter
    rep = cone.extremality_report(pts)
    assert [r.kind for r in rep] == ["vertex"] * 3 + ["edge", "interior"]
    for r in rep[:3]:
        assert r.exterior_angle > 0
    # equilateral-ish triangle: exterior angles sum to 2 pi
    assert abs(sum(r.exterior_angle for r in rep[:3]) - 2 * mp.pi) < mpf(2) ** -200
    with pytest.raises(ValueError):
        cone.extremality_report(PANTS[:2])


def _random_points(rng, n):
    return [tuple(rng.randint(1, 40) for _ in range(3)) for _ in range(n)]


@pytest.mark.parametrize("seed", range(12))
def test_hull_against_brute_force(seed):
    rng = random.Random(seed)
    pts = _random_points(rng, rng.randint(3, 14))
    hull = cone.convex_hull(pts, tol=0)
    plane = [_plane(p) for p in pts]
    expected = {plane[k] for k in range(len(pts)) if _extreme(k, plane)}
    # vertices strictly inside an edge are not extreme; the brute force agrees
    assert {_plane(pts[k]) for k in hull.vertex_ids} == expected
    if len(hull.vertices) >= 3:
        box = cone.Container(hull, mpf(2) ** -200)
        for _ in range(30):
            q = tuple(rng.randint(1, 40) for _ in range(3))
            state, _ = box.classify(cone.projectivize(tuple(mpf(x) for x in q)))
            inside = _in_hull(_plane(q), plane)
            assert (state != "outside") == inside


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(*[st.integers(1, 60)] * 3), min_size=3, max_size=20))
def test_hull_invariants(pts):
    hull = cone.convex_hull(pts)
    if hull.degenerate:
        return
    # facet support on every vertex (exact functionals, so exact check)
    ex = [tuple(Fraction(x) / sum(p) for x in p) for p in pts]
    for f in hull.facets:
        for k in hull.vertex_ids:
            assert sum(c * x for c, x in zip(f.exact, ex[k])) >= 0
    # idempotence
    again = cone.convex_hull([tuple(v) for v in hull.vertices])
    assert [tuple(v) for v in again.vertices] == [tuple(v) for v in hull.vertices]
    # every input point is inside or on the hull
    box = cone.Container(hull, mpf(2) ** -200)
    for p in pts:
        assert box.classify(cone.projectivize(p))[0] != "outside"
    # certification verdict agrees with the facet flags
    cert = cone.certify(hull)
    assert (cert.verdict == "certified") == all(f.azimuthal for f in cert.facets)


def test_collinear_merge():
    # (1, 1, 2) lies on the segment (2, 0, 2)-(0, 2, 2) after projectivizing
    pts = [(2, 0, 2), (0, 2, 2), (1, 1, 2), (1, 1, 0)]
    hull = cone.convex_hull(pts)
    assert len(hull.vertices) == 3
    # a point a hair off that segment is merged at the default tolerance only
    eps = mpf(2) ** -200
    pts[2] = (mpf(1), mpf(1), mpf(2) + eps)
    assert len(cone.convex_hull(pts).vertices) == 3
    assert len(cone.convex_hull(pts, tol=0).vertices) == 4
    assert cone.default_tol() == mpf(2) ** -128


def test_classify_many_matches_classify():
    rng = random.Random(5)
    hull = cone.convex_hull(_random_points(rng, 12))
    box = cone.Container(hull, mpf("1e-12"))
    pts = [cone.projectivize(tuple(mpf(rng.uniform(0.5, 40)) for _ in range(3))) for _ in range(300)]
    # include points right on the boundary
    verts = [tuple(v) for v in hull.vertices]
    for a, b in zip(verts, verts[1:] + verts[:1]):
        pts.append(SimplexPoint(tuple((x + y) / 2 for x, y in zip(a, b))))
    fast = box.classify_many(pts)
    slow = [box.classify(p) for p in pts]
    assert [s for s, _ in fast] == [s for s, _ in slow]


def _lemma_gap(c, sigma):
    c = np.asarray(c, dtype=float)
    i0 = int(np.argmin(c))
    X = -np.log(sigma)
    Xp = -np.log1p(-sigma)
    total = c.sum()
    return max(c @ X - total * X[i0], c @ Xp - total * Xp[i0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2), st.lists(st.floats(0, 1), min_size=2, max_size=2),
       st.floats(0.01, 1), st.lists(st.floats(1e-6, 1 - 1e-6), min_size=3, max_size=3))
def test_lemma_inequality(neg, pos, depth, sigma):
    c = [0.0, 0.0, 0.0]
    others = [i for i in range(3) if i != neg]
    for i, v in zip(others, pos):
        c[i] = v
    # negative coefficient smaller in size than the positive sum
    c[neg] = -depth * sum(pos)
    if not cone.azimuthal(c):
        return
    gap = _lemma_gap(c, np.array(sigma))
    if gap < 1e-9:
        with mp.workprec(256):
            cm = [mpf(x) for x in c]
            s = [mpf(x) for x in sigma]
            X = [-mp.log(x) for x in s]
            Xp = [-mp.log(1 - x) for x in s]
            total = sum(cm)
            gap = max(sum(a * b for a, b in zip(cm, X)) - total * X[neg],
                      sum(a * b for a, b in zip(cm, Xp)) - total * Xp[neg])
            assert gap >= -mpf(2) ** -200
    else:
        assert gap >= 0
