"""Trace coordinates for the one-holed torus.

Slopes p/q label simple closed curves. Traces at the three base slopes
0/1, 1/1, 1/0 determine every other trace through the edge relation
t(P + Q) = t(P) t(Q) - t(R), where R is the third vertex of the Farey
triangle on the edge PQ.
"""
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from mpmath import mp, mpf

from .errors import (BacktrackingPath, LengthNonPositive, NonConvexCocompact,
                     NotDiscretelike, PrecisionExhausted, TraceOutOfRange)
from .hyp2 import Isometry
from .scalar import arccosh, eps


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if self.q < 0:
            raise ValueError(f"slope {self.p}/{self.q} has negative denominator")
        if self.q == 0 and self.p != 1:
            raise ValueError("the only slope with q = 0 is 1/0")
        if gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not reduced")

    @classmethod
    def parse(cls, text):
        p, q = text.split("/")
        return cls(int(p), int(q))

    @classmethod
    def from_vector(cls, q, p):
        """Slope of the primitive vector (q, p) (sign ignored)."""
        if q < 0 or (q == 0 and p < 0):
            q, p = -q, -p
        return cls(p, q)

    def value(self):
        return mp.inf if self.q == 0 else Fraction(self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"


S01, S11, S10 = Slope(0, 1), Slope(1, 1), Slope(1, 0)
BASE_SLOPES = (S01, S11, S10)


@dataclass(frozen=True)
class TraceTriple:
    """Traces at 0/1, 1/1, 1/0 (in this order)."""
    A: mpf
    B: mpf
    C: mpf

    def __iter__(self):
        return iter((self.A, self.B, self.C))


@dataclass(frozen=True)
class TriangleSides:
    a: mpf
    b: mpf
    c: mpf

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if min(a, b, c) <= 0:
            raise LengthNonPositive("triangle sides must be positive")
        if not (a + b > c and b + c > a and c + a > b):
            raise ValueError("sides violate the strict triangle inequality")

    def traces(self):
        return TraceTriple(2 * mp.cosh(self.a), 2 * mp.cosh(self.b), 2 * mp.cosh(self.c))


def realize_traces(A, B, C):
    """Matrices m_a, m_b with traces A, B and tr(m_a m_b) = C."""
    A, B, C = mpf(A), mpf(B), mpf(C)
    if min(A, B, C) <= 2:
        raise TraceOutOfRange(f"traces ({A}, {B}, {C}) must all exceed 2")
    zeta = (C + mp.sqrt((C - 2) * (C + 2))) / 2
    m_a = Isometry(A, mpf(-1), mpf(1), mpf(0))
    m_b = Isometry(mpf(0), zeta, -1 / zeta, B)
    return m_a, m_b


SLOTS = "ABC"


def markoff_mutate(t, slot):
    A, B, C = t
    if slot == "A":
        return TraceTriple(B * C - A, B, C)
    if slot == "B":
        return TraceTriple(A, A * C - B, C)
    if slot == "C":
        return TraceTriple(A, B, A * B - C)
    raise ValueError(f"unknown slot {slot!r}")


def commutator_trace(t):
    A, B, C = t
    return A * A + B * B + C * C - A * B * C - 2


def peripheral_length(t):
    """Length of the boundary curve, or None when T > -2."""
    T = commutator_trace(t)
    if T > -2:
        return None
    return 2 * arccosh(-T / 2)


# Stern-Brocot descent. Vectors are (q, p). Each sector of P^1(Q) cut out by
# the base triangle is the subtree below one of its edges.
_SECTORS = {
    "unit": ((1, 0), (1, 1), (0, 1)),      # [0, 1], opposite vertex 1/0
    "upper": ((1, 1), (0, 1), (1, 0)),     # [1, inf], opposite 0/1
    "negative": ((0, -1), (1, 0), (1, 1)),  # [-inf, 0], opposite 1/1
}
_BASE_VECTORS = {(1, 0): S01, (1, 1): S11, (0, 1): S10, (0, -1): S10}
_BASE_WORDS = {(1, 0): "a", (1, 1): "ab", (0, 1): "b", (0, -1): "B"}


def sector(s):
    if s.p < 0:
        return "negative"
    if s.p <= s.q:
        return "unit"
    return "upper"


def weight(s):
    """Size of a slope within its sector: the image of p/q in [0, 1] under
    the order-3 symmetry 0 -> 1 -> inf of the base triangle has denominator
    equal to this weight."""
    if s in BASE_SLOPES:
        return 1
    sec = sector(s)
    if sec == "unit":
        return s.q
    if sec == "upper":
        return s.p
    return -s.p + s.q


def _add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def _left_of(t, m):
    # slope(t) < slope(m) with both q >= 0
    return t[1] * m[0] - m[1] * t[0] < 0


def _walk(s):
    """Triangles (L, R, O) from the sector root down to the one with L + R = s."""
    target = (s.q, s.p)
    L, R, O = _SECTORS[sector(s)]
    steps = []
    while True:
        steps.append((L, R, O))
        M = _add(L, R)
        if M == target:
            return steps
        if M[0] > target[0] + abs(target[1]):
            raise AssertionError(f"descent overshot for {s}")
        if _left_of(target, M):
            L, R, O = L, M, R
        else:
            L, R, O = M, R, L


def farey_parents(s):
    """Farey parents (left, right) of a non-base slope."""
    if s in BASE_SLOPES:
        return None
    L, R, _ = _walk(s)[-1]
    return Slope.from_vector(*L), Slope.from_vector(*R)


def slope_word(s):
    """Word in a, b (A, B inverses) for the curve of slope s."""
    if s in BASE_SLOPES:
        return _BASE_WORDS[(s.q, s.p)]
    words = dict(_BASE_WORDS)
    for L, R, _ in _walk(s):
        words[_add(L, R)] = words[L] + words[R]
    return words[(s.q, s.p)]


def farey_enumerate(q_max, sectors=("unit", "upper", "negative")):
    """All slopes of weight <= q_max with their Farey parents.

    Returns (slope, left_parent, right_parent) triples; base slopes carry
    parents (None, None) except 1/1 = 0/1 + 1/0.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    out = []
    seen = set()

    def emit(s, pl, pr):
        if s not in seen:
            seen.add(s)
            out.append((s, pl, pr))

    for sec in sectors:
        L0, R0, _ = _SECTORS[sec]
        for v in (L0, R0):
            s = _BASE_VECTORS[v]
            emit(s, *((S01, S10) if s == S11 else (None, None)))
        stack = [(L0, R0)]
        while stack:
            L, R = stack.pop()
            M = _add(L, R)
            s = Slope.from_vector(*M)
            if weight(s) > q_max:
                continue
            emit(s, Slope.from_vector(*L), Slope.from_vector(*R))
            stack.append((M, R))
            stack.append((L, M))
    return sorted(out, key=lambda r: _sort_key(r[0]))


def _sort_key(s):
    order = {"negative": 0, "unit": 1, "upper": 2}
    v = s.value()
    return (order[sector(s)], v if v != mp.inf else Fraction(10 ** 30))


@dataclass
class TorusRep:
    """Multi-Fuchsian one-holed-torus representation in trace coordinates."""
    components: tuple
    trace_cache: list = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        self.components = tuple(self.components)
        if not self.trace_cache:
            self.trace_cache = [
                {S01: t.A, S11: t.B, S10: t.C} for t in self.components
            ]

    @property
    def d(self):
        return len(self.components)

    def generators(self, i):
        """(m_a, m_b) for component i: the words a = w(0/1), b = w(1/0)."""
        t = self.components[i]
        return realize_traces(t.A, t.C, t.B)

    def multilength(self, s):
        return tuple(slope_length(self, i, s) for i in range(self.d))


def slope_trace(rep, component, s):
    cache = rep.trace_cache[component]
    if s in cache:
        return cache[s]
    tr = {v: cache[sl] for v, sl in _BASE_VECTORS.items()}
    new = {}
    for L, R, O in _walk(s):
        M = _add(L, R)
        ms = Slope.from_vector(*M)
        t = cache.get(ms)
        if t is None:
            t = tr[L] * tr[R] - tr[O]
            if t <= 2:
                raise NotDiscretelike(f"trace at {ms} in component {component} is {mp.nstr(t, 10)} <= 2")
            new[ms] = t
        tr[M] = t
    with rep._lock:
        cache.update(new)
    return tr[(s.q, s.p)]


def slope_length(rep, component, s):
    return 2 * arccosh(slope_trace(rep, component, s) / 2)


def _check_shallow(rep, depth):
    for i in range(rep.d):
        for sec in _SECTORS:
            L0, R0, _ = _SECTORS[sec]
            frontier = [(L0, R0)]
            for _ in range(depth):
                nxt = []
                for L, R in frontier:
                    M = _add(L, R)
                    try:
                        slope_trace(rep, i, Slope.from_vector(*M))
                    except NotDiscretelike as exc:
                        raise NonConvexCocompact(str(exc)) from exc
                    nxt += [(L, M), (M, R)]
                frontier = nxt


def torus_rep_from_length_triples(L, check_depth=4):
    """Representation whose component i has lengths L[i] at 0/1, 1/1, 1/0."""
    comps = []
    for row in L:
        row = [mpf(x) for x in row]
        if len(row) != 3:
            raise ValueError("each row needs three lengths")
        if min(row) <= 0:
            raise LengthNonPositive(f"length row {row} has a non-positive entry")
        t = TraceTriple(*(2 * mp.cosh(x / 2) for x in row))
        if commutator_trace(t) >= -2:
            raise NonConvexCocompact(f"commutator trace {mp.nstr(commutator_trace(t), 10)} >= -2")
        comps.append(t)
    rep = TorusRep(tuple(comps))
    _check_shallow(rep, check_depth)
    return rep


def fish_rep(a, b, check_depth=4):
    """Symmetric three-component configuration with lengths 2(a, b, b) cycled."""
    a, b = mpf(a), mpf(b)
    rows = [(2 * a, 2 * b, 2 * b), (2 * b, 2 * a, 2 * b), (2 * b, 2 * b, 2 * a)]
    return torus_rep_from_length_triples(rows, check_depth)


def parse_path(path):
    path = path.upper()
    for i, ch in enumerate(path):
        if ch not in SLOTS:
            raise ValueError(f"unknown mutation slot {ch!r}")
        if i and path[i - 1] == ch:
            raise BacktrackingPath(f"slot {ch} repeated at position {i}")
    return path


def alternating_path(depth, slots="CB"):
    return (slots * (depth // 2 + 1))[:depth]


@dataclass(frozen=True)
class SlackRecord:
    k: int
    a: mpf
    b: mpf
    c: mpf
    slack: mpf
    predicted: mpf

    @property
    def ratio(self):
        return self.slack / self.predicted


def mutation_slacks(tau0, path, depth=None, K=None):
    """Measured slack a_k + b_k - c_k along a mutation path versus
    K e^(-2(a_k + b_k)), with K = e^(a0 + b0 + c0) unless given."""
    path = parse_path(path)
    depth = len(path) if depth is None else depth
    if depth > len(path):
        raise ValueError(f"path of length {len(path)} shorter than depth {depth}")
    if K is None:
        K = mp.exp(tau0.a + tau0.b + tau0.c)
    t = tau0.traces()
    out = []
    for k in range(depth + 1):
        if k:
            t = markoff_mutate(t, path[k - 1])
            if min(t) <= 2:
                raise NotDiscretelike(f"trace <= 2 at mutation depth {k}")
            sides = sorted(arccosh(x / 2) for x in t)
        else:
            sides = sorted((tau0.a, tau0.b, tau0.c))
        a, b, c = sides
        slack = a + b - c
        floor = (k + c) * eps(16)
        if k and slack <= floor:
            raise PrecisionExhausted(
                f"slack at depth {k} is below the noise floor at {mp.prec} bits")
        out.append(SlackRecord(k, a, b, c, slack, K * mp.exp(-2 * (a + b))))
    return out


def xi_points(rep, component, q_max):
    """Points (2a / length(p/q)) * (q, p) for slopes p/q in [0, 1], q <= q_max.

    2a is the length of the 0/1 curve in the chosen component.
    """
    two_a = slope_length(rep, component, S01)
    out = []
    for s, _, _ in farey_enumerate(q_max, sectors=("unit",)):
        k = two_a / slope_length(rep, component, s)
        out.append((s, (k * s.q, k * s.p)))
    return out


def exterior_angle(prev, cur, nxt):
    """Turning angle of the polyline prev -> cur -> nxt (positive = left)."""
    ux, uy = cur[0] - prev[0], cur[1] - prev[1]
    vx, vy = nxt[0] - cur[0], nxt[1] - cur[1]
    return mp.atan2(ux * vy - uy * vx, ux * vx + uy * vy)


def xi_tip_angle(rep, component, s):
    """Exterior angle of the xi chain at s, measured against its Farey parents."""
    two_a = slope_length(rep, component, S01)

    def xi(t):
        k = two_a / slope_length(rep, component, t)
        return (k * t.q, k * t.p)

    left, right = farey_parents(s)
    # the chain runs counterclockwise from 0/1 towards 1/1
    return exterior_angle(xi(left), xi(s), xi(right))
