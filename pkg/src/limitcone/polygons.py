"""Right-angled (2g+2)-gons built as chains of right-angled pentagons."""
from dataclasses import dataclass, replace

from mpmath import mp, mpc, mpf

from .errors import AdjustmentFailed, EmbeddingFailure, FootOutsideSide, NonPositiveParam
from .hyp2 import (IDENTITY, INF, OrientedGeodesic, boundary, common_perpendicular,
                   crossing_angle, distance, distance_to_geodesic, perpendicular_feet,
                   position_on, reflection, rotation, translation)
from .scalar import eps


@dataclass(frozen=True)
class PentagonParams:
    x: mpf
    y: mpf

    def __post_init__(self):
        if not (self.x > 0 and self.y > 0):
            raise NonPositiveParam(f"pentagon parameters must be positive: {self.x}, {self.y}")


def pentagon_sides(p):
    """Counterclockwise side lengths of the right-angled pentagon with two
    adjacent-but-one sides x and y."""
    x, y = mpf(p.x), mpf(p.y)
    if not (x > 0 and y > 0):
        raise NonPositiveParam("pentagon parameters must be positive")
    return (
        mp.asinh(mp.cosh(y) / mp.sinh(x)),
        x,
        mp.acosh(1 / (mp.tanh(x) * mp.tanh(y))),
        y,
        mp.asinh(mp.cosh(x) / mp.sinh(y)),
    )


def _walk_cycle(start, lengths):
    """Turtle walk: for each length, record (start frame, length), then
    advance and turn left by a right angle. Returns records and final frame."""
    g = start
    turn = rotation(mp.pi / 2)
    records = []
    for s in lengths:
        records.append((g, s))
        g = g @ translation(s) @ turn
    return records, g


@dataclass(frozen=True)
class Piece:
    label: tuple
    start: object  # frame at the start of the piece
    length: mpf


@dataclass(frozen=True)
class EmbeddedPolygon:
    genus: int
    params: tuple
    vertices: tuple
    sides: tuple
    side_lengths: tuple
    shift: int = 0
    side_pieces: tuple = ()

    @property
    def n(self):
        return 2 * self.genus + 2

    def with_shift(self, s):
        return replace(self, shift=s % self.n)

    def position(self, label):
        """Geometric side index (0-based) carrying the 1-based label."""
        return (label - 1 - self.shift) % self.n


def _pentagon_cycle(k, x):
    """Counterclockwise (label, length) cycle of the k-th chain pentagon."""
    if k % 2:
        lo, hi = x[k - 1], x[k]
        s = pentagon_sides(PentagonParams(lo, hi))
        labels = [("b", k, 0), ("e", k - 1), ("b", k, 1), ("e", k), ("b", k, 2)]
    else:
        lo, hi = x[k], x[k - 1]
        s = pentagon_sides(PentagonParams(lo, hi))
        labels = [("b", k, 0), ("e", k), ("b", k, 1), ("e", k - 1), ("b", k, 2)]
    return list(zip(labels, s))


def _rotate_to(cycle, label):
    i = [c[0] for c in cycle].index(label)
    return cycle[i:] + cycle[:i]


def build_chain_polygon(g, params, check=True):
    """Glue 2g-2 right-angled pentagons along edges e_1 .. e_{2g-3}.

    params are the lengths x_0 .. x_{2g-2} of the chain edges; e_0 and
    e_{2g-2} end up as sides of the polygon. The first pentagon is placed
    with e_0 on the imaginary axis, starting at i and pointing up.
    """
    if g < 2:
        raise ValueError("genus must be >= 2")
    x = [mpf(v) for v in params]
    if len(x) != 2 * g - 1:
        raise ValueError(f"genus {g} needs {2 * g - 1} parameters, got {len(x)}")
    if min(x) <= 0:
        raise NonPositiveParam("chain parameters must be positive")

    half_turn = rotation(mp.pi)
    first = _rotate_to(_pentagon_cycle(1, x), ("e", 0))
    records, _ = _walk_cycle(IDENTITY, [s for _, s in first])
    pieces = [Piece(lab, fr, s) for (lab, s), (fr, _) in zip(first, records)]
    merge = [False] * len(pieces)
    for k in range(2, 2 * g - 1):
        i = [p.label for p in pieces].index(("e", k - 1))
        shared = pieces[i]
        start = shared.start @ translation(shared.length) @ half_turn
        cyc = _rotate_to(_pentagon_cycle(k, x), ("e", k - 1))
        recs, _ = _walk_cycle(start, [s for _, s in cyc])
        new = [Piece(lab, fr, s) for (lab, s), (fr, _) in zip(cyc[1:], recs[1:])]
        # the glued edge disappears; the pieces on either side of its two
        # endpoints meet at straight angles and become parts of one side
        pieces = pieces[:i] + new + pieces[i + 1:]
        merge = merge[:i] + [True] + [False] * (len(new) - 1) + merge[i + 1:]
        merge[(i + len(new)) % len(pieces)] = True
    if merge[0]:
        raise EmbeddingFailure("first piece unexpectedly merged")
    sides = []
    for p, m in zip(pieces, merge):
        if m:
            sides[-1].append(p)
        else:
            sides.append([p])
    n = 2 * g + 2
    if len(sides) != n:
        raise EmbeddingFailure(f"assembled {len(sides)} sides, expected {n}")

    geods, verts, lengths = [], [], []
    for grp in sides:
        fr = grp[0].start
        geods.append(OrientedGeodesic(fr.on_boundary(boundary(0)), fr.on_boundary(INF)))
        verts.append(fr(mpc(0, 1)))
        lengths.append(sum(p.length for p in grp))
    P = EmbeddedPolygon(g, tuple(x), tuple(verts), tuple(geods), tuple(lengths),
                        0, tuple(tuple(grp) for grp in sides))
    if check:
        check_polygon(P)
    return P


def conditioning(P):
    """Rough amplification factor of rounding errors for points of P: the
    Euclidean size of its vertices relative to their heights."""
    return max(max(1, (abs(v) ** 2 + 1) / v.imag) for v in P.vertices)


def check_polygon(P, tol=None):
    """Verify right angles, vertex incidence, side lengths and convex
    counterclockwise orientation."""
    tol = eps(24) * conditioning(P) if tol is None else tol
    n = P.n
    for i in range(n):
        prev, cur = P.sides[i - 1], P.sides[i]
        v = P.vertices[i]
        if abs(crossing_angle(prev, cur) - mp.pi / 2) > tol:
            raise EmbeddingFailure(f"angle at vertex {i} is not a right angle")
        if distance_to_geodesic(v, prev) > tol or distance_to_geodesic(v, cur) > tol:
            raise EmbeddingFailure(f"vertex {i} is off its sides")
        d = distance(v, P.vertices[(i + 1) % n])
        if abs(d - P.side_lengths[i]) > tol * max(1, d):
            raise EmbeddingFailure(f"side {i} has length {d}, expected {P.side_lengths[i]}")
    k = [_klein(v) for v in P.vertices]
    for i in range(n):
        a, b, c = k[i - 1], k[i], k[(i + 1) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) <= 0:
            raise EmbeddingFailure(f"polygon not convex counterclockwise at vertex {i}")


def _klein(z):
    w = (z - mpc(0, 1)) / (z + mpc(0, 1))
    k = 2 / (1 + abs(w) ** 2)
    return (k * w.real, k * w.imag)


@dataclass(frozen=True)
class ChordRecord:
    side_i: int
    side_j: int
    geodesic: OrientedGeodesic
    length: mpf
    parity_class: str

    @property
    def multiplicity(self):
        """Lift factor to the doubled surface's closed curves."""
        return 2 if self.parity_class == "same" else 4


def _cyclic_distance(i, j, n):
    d = abs(i - j) % n
    return min(d, n - d)


def _inside_side(P, k, z):
    """Is z on side k strictly between its endpoints?"""
    l = P.sides[k]
    t = position_on(l, z)
    t0 = position_on(l, P.vertices[k])
    t1 = position_on(l, P.vertices[(k + 1) % P.n])
    lo, hi = min(t0, t1), max(t0, t1)
    return lo < t < hi


def enumerate_chords(P):
    """Common perpendiculars between sides at cyclic distance >= 3.

    side_i, side_j are 0-based geometric positions.
    """
    n = P.n
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if _cyclic_distance(i, j, n) < 3:
                continue
            geo, length = common_perpendicular(P.sides[i], P.sides[j])
            fi, fj = perpendicular_feet(P.sides[i], P.sides[j])
            if not (_inside_side(P, i, fi) and _inside_side(P, j, fj)):
                raise FootOutsideSide(f"chord {i}-{j} has a foot outside its side")
            parity = "same" if (i - j) % 2 == 0 else "mixed"
            out.append(ChordRecord(i, j, geo, length, parity))
    return out


def edge_label(label):
    return f"e{label}"


def chord_label(l1, l2):
    l1, l2 = sorted((l1, l2))
    return f"c{l1}-{l2}"


def curve_labels(g):
    n = 2 * g + 2
    labels = [edge_label(i) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if _cyclic_distance(i, j, n) >= 3:
                labels.append(chord_label(i, j))
    return labels


def labelled_length_system(P, chords=None):
    """Length of every abstract curve label in P, read through its shift.

    Label l sits on geometric side (l - 1 - shift) mod n. Edge labels are
    "e1".."e{n}" and chord labels "c{l}-{l'}" with l < l'.
    """
    n = P.n
    chords = enumerate_chords(P) if chords is None else chords
    by_pair = {(c.side_i, c.side_j): c.length for c in chords}
    out = {}
    for label in range(1, n + 1):
        out[edge_label(label)] = P.side_lengths[P.position(label)]
    for l1 in range(1, n + 1):
        for l2 in range(l1 + 1, n + 1):
            if _cyclic_distance(l1, l2, n) < 3:
                continue
            i, j = sorted((P.position(l1), P.position(l2)))
            out[chord_label(l1, l2)] = by_pair[(i, j)]
    return out


def curve_multiplicity(label):
    """Lift factor of an edge or chord label (cancels projectively)."""
    if label.startswith("e"):
        return 2
    a, b = (int(t) for t in label[1:].split("-"))
    return 2 if (a - b) % 2 == 0 else 4


def reflection_generators(P):
    """Reflections in the sides, listed by label 1..n."""
    return [reflection(P.sides[P.position(label)]) for label in range(1, P.n + 1)]


@dataclass(frozen=True)
class AdjustResult:
    params: tuple
    multipliers: tuple
    margin: mpf
    evaluations: int


def _grid(level):
    """log2-multipliers on the dyadic grid of spacing 2^-level in [-3, 3]."""
    step = 2 ** -level
    k = int(3 / step)
    return [i * step for i in range(-k, k + 1)]


def multiplicative_adjust(params, objective, indices=None, max_level=4, max_rounds=4):
    """Deterministic coordinate descent over multipliers in [1/8, 8].

    objective(params) returns a margin; the search stops as soon as the
    margin is positive. Each parameter in ``indices`` is line-searched over a
    log2 grid that is refined dyadically around the current best value.
    Raises AdjustmentFailed with the best margin found otherwise.
    """
    base = [mpf(p) for p in params]
    indices = list(range(len(base))) if indices is None else list(indices)
    logs = [0.0] * len(base)
    evaluations = 0

    def evaluate(lg):
        nonlocal evaluations
        evaluations += 1
        return objective([b * mpf(2) ** e for b, e in zip(base, lg)])

    best = evaluate(logs)
    if best > 0:
        return AdjustResult(tuple(base), tuple(mpf(1) for _ in base), best, evaluations)
    for level in range(max_level + 1):
        step = 2.0 ** -level
        for _ in range(max_rounds):
            improved = False
            for idx in indices:
                if level == 0:
                    candidates = _grid(0)
                else:
                    candidates = [logs[idx] + k * step for k in (-1, 1)]
                for e in candidates:
                    if e == logs[idx] or abs(e) > 3:
                        continue
                    trial = list(logs)
                    trial[idx] = e
                    m = evaluate(trial)
                    if m > best:
                        best, logs, improved = m, trial, True
                        if best > 0:
                            mult = tuple(mpf(2) ** e for e in logs)
                            return AdjustResult(tuple(b * k for b, k in zip(base, mult)),
                                                mult, best, evaluations)
            if not improved:
                break
    mult = tuple(mpf(2) ** e for e in logs)
    raise AdjustmentFailed(
        f"no multipliers in [1/8, 8] satisfy the objective (best margin {mp.nstr(best, 6)})",
        best_params=tuple(b * k for b, k in zip(base, mult)), best_margin=best)
