"""Word enumeration and clouds of multi-lengths.

Free words use letters 0, 1, 2, 3 for a, b, a^-1, b^-1. Even reflection
words use the side index 0 .. n-1 of each reflection. Words are listed as
one representative per cyclic class up to inversion: the lexicographically
least rotation, which must also not exceed the least rotation of its inverse.
"""
from dataclasses import dataclass

from mpmath import mp, mpf

from .cone import MultiLength, projectivize
from .errors import EmptyCloud, NotFound
from .scalar import arccosh1p

FREE = "free"
REFLECTION = "even-reflection"
FREE_LETTERS = "abAB"


def _finv(x):
    return (x + 2) % 4


@dataclass(frozen=True)
class Word:
    letters: tuple
    kind: str = FREE

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if self.kind == FREE:
            return "".join(FREE_LETTERS[x] for x in self.letters)
        return ".".join(str(x + 1) for x in self.letters)

    def inverse(self):
        if self.kind == FREE:
            return Word(tuple(_finv(x) for x in reversed(self.letters)), self.kind)
        return Word(tuple(reversed(self.letters)), self.kind)

    def power(self, k):
        return Word(self.letters * k, self.kind)


def free_word(text):
    return Word(tuple(FREE_LETTERS.index(ch) for ch in text), FREE)


def reflection_word(labels):
    """Word from 1-based side labels."""
    return Word(tuple(int(x) - 1 for x in labels), REFLECTION)


def _min_rotation(w):
    return min(w[i:] + w[:i] for i in range(len(w))) if w else w


def canonical(word):
    """Representative of the word's class under rotation and inversion."""
    w = tuple(word.letters)
    inv = word.inverse().letters
    return Word(min(_min_rotation(w), _min_rotation(tuple(inv))), word.kind)


def _free_words(max_len):
    out = []
    w = []

    def visit(p):
        t = len(w)
        if t and p == t and (t == 1 or w[-1] != _finv(w[0])):
            inv = tuple(_finv(x) for x in reversed(w))
            tw = tuple(w)
            if tw <= _min_rotation(inv):
                out.append(tw)
        if t == max_len:
            return
        for c in range(4):
            if t:
                if c == _finv(w[-1]):
                    continue
                ref = w[t - p]
                if c < ref:
                    continue
                np_ = p if c == ref else t + 1
            else:
                np_ = 1
            w.append(c)
            visit(np_)
            w.pop()

    visit(0)
    return out


def _commute(i, j, n):
    return (i - j) % n in (1, n - 1)


def _wrap_reducible(w, n):
    """Does some letter cancel with itself across the end of the cyclic word?"""
    last = {}
    first = {}
    for k, c in enumerate(w):
        first.setdefault(c, k)
        last[c] = k
    for c, j in last.items():
        i = first[c]
        arc = w[j + 1:] + w[:i]
        if i == j:
            continue
        if all(_commute(x, c, n) for x in arc):
            return True
    return False


def _reflection_words(n, max_len):
    out = []
    w = []

    def visit(p):
        t = len(w)
        if t and t % 2 == 0 and p == t and w[-1] != w[0] and not _wrap_reducible(w, n):
            tw = tuple(w)
            if tw <= _min_rotation(tuple(reversed(w))):
                out.append(tw)
        if t == max_len:
            return
        for c in range(n):
            if t:
                ref = w[t - p]
                if c < ref:
                    continue
                # reduced in the right-angled Coxeter group: no letter may
                # meet an earlier copy of itself through commuting letters
                bad = False
                for x in reversed(w):
                    if x == c:
                        bad = True
                        break
                    if not _commute(x, c, n):
                        break
                if bad:
                    continue
                np_ = p if c == ref else t + 1
            else:
                np_ = 1
            w.append(c)
            visit(np_)
            w.pop()

    visit(0)
    return out


def enumerate_words(kind, generators, max_len):
    """Cyclically reduced, primitive (non-power) words up to max_len.

    ``generators`` is ignored for free words (rank 2); for even reflection
    words it is the number of reflections (or a list of them).
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if kind == FREE:
        words = _free_words(max_len)
    elif kind == REFLECTION:
        n = generators if isinstance(generators, int) else len(generators)
        words = _reflection_words(n, max_len)
    else:
        raise ValueError(f"unknown word kind {kind!r}")
    words.sort(key=lambda w: (len(w), w))
    return [Word(w, kind) for w in words]


def _mat(m):
    return (m.a, m.b, m.c, m.d)


def _mul(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def generator_table(kind, components):
    """Letter -> matrix tuples for each component.

    components: per component, (m_a, m_b) for free words or the list of
    reflections for even words.
    """
    table = []
    for gens in components:
        if kind == FREE:
            ma, mb = gens
            table.append([_mat(ma), _mat(mb), _mat(ma.inverse()), _mat(mb.inverse())])
        else:
            table.append([_mat(r) for r in gens])
    return table


def word_traces(table, words):
    """Traces of every word in every component, sharing prefix products."""
    order = sorted(range(len(words)), key=lambda k: words[k].letters)
    traces = [None] * len(words)
    d = len(table)
    stack = []  # (letter, products per component)
    for k in order:
        w = words[k].letters
        common = 0
        while common < len(stack) and common < len(w) and stack[common][0] == w[common]:
            common += 1
        del stack[common:]
        for pos in range(common, len(w)):
            x = w[pos]
            if pos == 0:
                prods = tuple(table[i][x] for i in range(d))
            else:
                prev = stack[-1][1]
                prods = tuple(_mul(prev[i], table[i][x]) for i in range(d))
            stack.append((x, prods))
        traces[k] = tuple(m[0] + m[3] for m in stack[-1][1])
    return traces


@dataclass(frozen=True)
class CloudPoint:
    word: Word
    ml: MultiLength
    sp: object


@dataclass
class Cloud:
    points: list
    non_hyperbolic: list  # (word, component indices)
    duplicates: int


def _length_from_trace(t):
    return 2 * arccosh1p(abs(t) / 2 - 1)


def jordan_cloud(table, words, dedup=True):
    """Multi-lengths of the words; non-hyperbolic images reported apart."""
    points, bad = [], []
    seen = set()
    dups = 0
    scale = mpf(2) ** 64
    for w, tr in zip(words, word_traces(table, words)):
        elliptic = [i for i, t in enumerate(tr) if abs(t) <= 2]
        if elliptic:
            bad.append((w, tuple(elliptic)))
            continue
        if dedup:
            key = tuple(int(mp.nint(abs(t) * scale)) for t in tr)
            if key in seen:
                dups += 1
                continue
            seen.add(key)
        ml = MultiLength(tuple(_length_from_trace(t) for t in tr))
        points.append(CloudPoint(w, ml, projectivize(ml)))
    return Cloud(points, bad, dups)


def word_multilength(table, word):
    return jordan_cloud(table, [word], dedup=False).points[0].ml


def conjugation_spot_check(table, words, tol, count=8):
    """Largest deviation of lengths under conjugation by a generator."""
    worst = mpf(0)
    picked = 0
    for w in words:
        if picked == count:
            break
        if len(w) < 2:
            continue
        x = w.letters[0]
        if w.kind == FREE:
            conj = Word((_finv(x),) + w.letters + (x,), w.kind)
        else:
            conj = Word((x,) + w.letters + (x,), w.kind)
        pts = jordan_cloud(table, [w, conj], dedup=False).points
        if len(pts) < 2:
            continue
        picked += 1
        worst = max(worst, max(abs(p - q) for p, q in zip(pts[0].ml, pts[1].ml)))
    return worst, worst <= tol


@dataclass
class ScanResult:
    records: list  # (word, ratio)
    index: int
    caveat: str = ("finite sample: the true record-breaker sequence is infinite and may "
                   "end in powers of one element, which a bounded scan cannot detect")


def record_breaker_scan(points, omega):
    """Running minima of omega(ml) / ml[i0] in order of increasing ml[i0],
    where i0 is the coordinate carrying omega's negative coefficient."""
    if not points:
        raise EmptyCloud("record-breaker scan of an empty cloud")
    c = omega.c if hasattr(omega, "c") else tuple(omega)
    i0 = min(range(len(c)), key=lambda i: c[i])
    ordered = sorted(points, key=lambda p: (p.ml.coords[i0], str(p.word)))
    out = []
    best = None
    for p in ordered:
        r = sum(ci * x for ci, x in zip(c, p.ml.coords)) / p.ml.coords[i0]
        if best is None or r < best:
            best = r
            out.append((p.word, r))
    return ScanResult(out, i0)


def nonconjugacy_witness(table, kind, max_len=6, rel_tol=None, generators=None):
    """For each pair of components, the first word (by length) whose lengths
    differ there. Raises NotFound if some pair is never separated."""
    d = len(table)
    rel_tol = mpf(2) ** (32 - mp.prec) if rel_tol is None else rel_tol
    gens = generators if generators is not None else len(table[0])
    words = enumerate_words(kind, gens, max_len)
    pending = {(i, j) for i in range(d) for j in range(i + 1, d)}
    found = {}
    for w, tr in zip(words, word_traces(table, words)):
        if any(abs(t) <= 2 for t in tr):
            continue
        ml = [_length_from_trace(t) for t in tr]
        for i, j in sorted(pending):
            if abs(ml[i] - ml[j]) > rel_tol * max(ml[i], ml[j]):
                found[(i, j)] = (w, (ml[i], ml[j]))
        pending -= set(found)
        if not pending:
            return found
    raise NotFound(max_len)
