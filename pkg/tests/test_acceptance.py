"""End-to-end acceptance checks; each records a pass/fail line (see conftest)."""
import json
import random
import shutil
import time
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp, mpf

from limitcone import cli, cone, fricke, hyp2
from limitcone.report import write_bundle
from limitcone.scalar import precision
from limitcone.scenarios import config_from_dict, run_scenario


def _mag(x):
    return mp.nstr(x, 4)


# 1

def test_pants_triangle(criterion):
    t = time.perf_counter()
    bundle = run_scenario(config_from_dict({"scenario": "pants"}))
    elapsed = time.perf_counter() - t
    hull = bundle.hull
    exact = all(isinstance(x, (int, Fraction)) for f in hull.facets for x in f.exact)
    ok = (len(hull.vertices) == 3 and hull.verdict == "certified" and exact
          and all(f.azimuthal for f in hull.facets) and elapsed < 1)
    criterion(1, ok, f"{len(hull.vertices)} vertices, {hull.verdict}, exact facets={exact}, "
                     f"{elapsed:.2f}s")


# 2

def _markoff_product(a, b, c):
    E = mp.exp
    return ((E(a + b) - E(c)) * (E(b + c) - E(a)) * (E(c + a) - E(b)) * (E(a + b + c) - 1)
            / E(2 * (a + b + c)))


def _height_c(a, b, c):
    """Height onto side c from the law of cosines."""
    cos_beta = (mp.cosh(a) * mp.cosh(c) - mp.cosh(b)) / (mp.sinh(a) * mp.sinh(c))
    return mp.asinh(mp.sinh(a) * mp.sqrt(1 - cos_beta ** 2))


def test_markoff_identity_suite(criterion):
    rng = random.Random(20240501)
    t = time.perf_counter()
    worst = {"product": mpf(0), "trace": mpf(0), "height": mpf(0)}
    with precision(256):
        tol = mpf(2) ** -192
        n = 0
        while n < 10_000:
            a, b, c = (mpf(3) + 9 * mpf(rng.random()) for _ in range(3))
            if not (a + b > c and b + c > a and c + a > b):
                continue
            n += 1
            tri = fricke.TriangleSides(a, b, c)
            T = fricke.commutator_trace(tri.traces())
            lhs, rhs = 2 - T, _markoff_product(a, b, c)
            worst["product"] = max(worst["product"], abs(lhs - rhs) / abs(rhs))

            A, B, C = tri.traces()
            x, y = fricke.realize_traces(A, B, C)
            tr_sum = (x @ y).trace + (x @ y.inverse()).trace
            worst["trace"] = max(worst["trace"], abs(x.trace * y.trace - tr_sum) / abs(tr_sum))

            ell = fricke.peripheral_length(tri.traces())
            left = mp.cosh(ell / 4)
            right = mp.sinh(c) * mp.sinh(_height_c(a, b, c))
            worst["height"] = max(worst["height"], abs(left - right) / abs(right))
    elapsed = time.perf_counter() - t
    ok = all(v < tol for v in worst.values()) and elapsed < 30
    criterion(2, ok, ", ".join(f"{k} {_mag(v)}" for k, v in worst.items())
              + f" (bound 2^-192 = {_mag(tol)}), {elapsed:.1f}s")


# 3

def test_crossing_resolution_convergence(criterion):
    t = time.perf_counter()
    details = []
    ok = True
    with precision(256):
        l = hyp2.OrientedGeodesic(hyp2.boundary(0), hyp2.INF)
        for theta in (mp.pi / 3, mp.pi / 2, 2 * mp.pi / 3):
            r = hyp2.rotation(theta)
            lp = hyp2.OrientedGeodesic(r.on_boundary(l.backward), r.on_boundary(l.forward))
            measured = hyp2.crossing_angle(l, lp)
            s_same = hyp2.asymptotic_slack(l, lp)
            s_flip = hyp2.asymptotic_slack(l, -lp)
            errors = []
            for L in (10, 15, 20):
                lam = hyp2.resolve_crossing(L, L, measured)
                pred = (2 * L - 2 * s_flip, L - s_same, L - s_same)
                errors.append(max(abs(u - v) for u, v in zip(lam, pred)))
            decreasing = errors[0] > errors[1] > errors[2]
            ok &= decreasing and errors[2] < mpf("1e-6") and abs(measured - theta) < mpf("1e-60")
            details.append(f"theta={mp.nstr(theta, 4)}: " + "/".join(_mag(e) for e in errors))
    elapsed = time.perf_counter() - t
    criterion(3, ok and elapsed < 1, "; ".join(details) + f", {elapsed:.2f}s")


# 4

def test_mutation_slack_regression(criterion):
    t = time.perf_counter()
    with precision(2048):
        tau0 = fricke.TriangleSides(mpf(6), mpf(8), mpf(8))
        recs = fricke.mutation_slacks(tau0, fricke.alternating_path(10))
    elapsed = time.perf_counter() - t
    deep = [r.ratio for r in recs[2:11]]
    ok_deep = all(abs(x - 1) <= mpf("1e-3") for x in deep)
    ok_one = abs(recs[1].ratio - 1) <= mpf("1e-2")
    criterion(4, ok_deep and ok_one and elapsed < 10,
              f"depth 1 ratio {mp.nstr(recs[1].ratio, 6)} (band 1e-2), depths 2-10 ratio "
              f"{mp.nstr(min(deep), 6)}..{mp.nstr(max(deep), 6)} (band 1e-3), {elapsed:.2f}s")


# 5, 10

@pytest.fixture(scope="module")
def hexagon(tmp_path_factory):
    out = tmp_path_factory.mktemp("hexagon")
    t = time.perf_counter()
    cfg = config_from_dict({"scenario": "hexagon", "params": {"x": "1e-4", "delta": "8"},
                            "word_max_len": 10}, out_dir=str(out))
    bundle = run_scenario(cfg)
    write_bundle(bundle, str(out))
    return bundle, out, time.perf_counter() - t


def test_hexagon(criterion, hexagon):
    bundle, _, elapsed = hexagon
    hull, cloud = bundle.hull, bundle.cloud_summary
    edges = [c for c in bundle.curves if c.kind == "edge"]
    chords = [c for c in bundle.curves if c.kind == "chord"]
    tol = hull.tol
    groups = []
    for c in edges:
        for g in groups:
            if max(abs(u - v) for u, v in zip(g[0].ml, c.ml)) <= tol:
                g.append(c)
                break
        else:
            groups.append([c])
    pairs = sorted([x.curve_id for x in g] for g in groups)
    symmetric = sorted(len(g) for g in groups) == [2, 2, 2]
    adjusted = bundle.adjustment is not None
    ok = (len(bundle.curves) == 9 and len(chords) == 3 and symmetric
          and len(hull.vertices) == 6 and hull.verdict == "certified"
          and all(f.azimuthal for f in hull.facets)
          and cloud["outside"] == 0 and cloud["tolerance"] == "1e-12"
          and elapsed < 300)
    criterion(5, ok, f"{len(bundle.curves)} classes, edge pairs {pairs}, "
                     f"{len(hull.vertices)} vertices, {hull.verdict}, "
                     f"adjusted={adjusted}, cloud {cloud['points']} points / "
                     f"{cloud['outside']} outside at 1e-12, {elapsed:.0f}s")


def test_soundness_alarm(criterion, hexagon, tmp_path, capsys):
    _, out, _ = hexagon
    assert cli.main(["verify", str(out)]) == 0
    broken = tmp_path / "broken"
    shutil.copytree(out, broken)
    report = broken / "report.json"
    data = json.loads(report.read_text())
    removed = data["hull"]["vertices"].pop(1)["curve_id"]
    report.write_text(json.dumps(data))
    capsys.readouterr()
    status = cli.main(["verify", str(broken)])
    summary = json.loads(capsys.readouterr().out)
    words_out = [i for i in summary["outside_ids"] if i.startswith("w:")]
    criterion(10, status == 3 and summary["outside"] > 0 and words_out,
              f"removed {removed}: exit {status}, {summary['outside']} rows outside "
              f"(cloud words among them: {bool(words_out)})")


# 6

def test_ngon(criterion):
    t = time.perf_counter()
    bundle = run_scenario(config_from_dict({"scenario": "ngon", "params": {"g": 3, "x": "1e-4"},
                                            "word_max_len": 4}))
    elapsed = time.perf_counter() - t
    hull = bundle.hull
    ok = hull.verdict == "certified" and len(hull.vertices) >= 11 and elapsed < 900
    mult = [mp.nstr(m, 3) for m in bundle.adjustment["multipliers"]] if bundle.adjustment else "none"
    criterion(6, ok, f"{len(hull.vertices)} vertices, {hull.verdict} at "
                     f"{bundle.precision_bits} bits, multipliers {mult}, {elapsed:.0f}s")


# 7, 8

@pytest.fixture(scope="module")
def fish():
    t = time.perf_counter()
    cfg = config_from_dict({"scenario": "fish", "params": {"a": "6", "b": "8", "q_max": 20},
                            "word_max_len": 14})
    bundle = run_scenario(cfg)
    return bundle, time.perf_counter() - t


def test_fish(criterion, fish):
    bundle, elapsed = fish
    c, hull, cloud = bundle.checks, bundle.hull, bundle.cloud_summary
    slopes = [x for x in bundle.curves if x.kind == "slope"]
    needed = int(np.ceil(3 * 2 * 20 * 8 / np.log(2))) + 64
    ok = (len(slopes) == 384 and all(x.is_vertex and x.exterior_angle > 0 for x in slopes)
          and hull.verdict == "certified" and all(f.azimuthal for f in hull.facets)
          and c["peripheral"]["passed"] and c["peripheral"]["state"] == "inside"
          and cloud["outside"] == 0 and c["vertex_attainment"]["passed"]
          and bundle.precision_bits >= needed and elapsed < 600)
    criterion(7, ok, f"{len(slopes)} slopes all angular vertices, min angle "
                     f"{_mag(c['slopes_are_angular_vertices']['min_exterior_angle'])}, peripheral "
                     f"{c['peripheral']['state']}, cloud {cloud['points']} / {cloud['outside']} "
                     f"outside, {len(c['vertex_attainment']['rows'])} slopes attained, "
                     f"{bundle.precision_bits} >= {needed} bits, {elapsed:.0f}s")


def test_angle_law(criterion, fish):
    law = fish[0].checks["angle_law"]
    ok = law["passed"] and len(law["rows"]) > 0
    criterion(8, ok, f"{len(law['rows'])} slopes, ratio {mp.nstr(law['min_ratio'], 4)}.."
                     f"{mp.nstr(law['max_ratio'], 4)} in [1/8, 8]")


# 9

def _lemma_margins(C, S):
    """max(Omega(X) - c X_i0, Omega(X') - c X'_i0) per row, in float64."""
    X, Xp = -np.log(S), -np.log1p(-S)
    c = C.sum(axis=1)
    i0 = np.argmin(C, axis=1)
    rows = np.arange(len(C))
    m1 = (C * X).sum(axis=1) - c * X[rows, i0]
    m2 = (C * Xp).sum(axis=1) - c * Xp[rows, i0]
    return np.maximum(m1, m2)


def _lemma_margin_exact(c, s):
    with precision(256):
        c = [mpf(float(x)) for x in c]
        s = [mpf(float(x)) for x in s]
        i0 = min(range(3), key=lambda i: c[i])
        tot = sum(c)
        X = [-mp.log(x) for x in s]
        Xp = [-mp.log1p(-x) for x in s]
        return max(sum(a * b for a, b in zip(c, X)) - tot * X[i0],
                   sum(a * b for a, b in zip(c, Xp)) - tot * Xp[i0])


def random_azimuthal(rng, n):
    """Rows with one negative coefficient and positive sum."""
    C = rng.uniform(0.0, 1.0, size=(n, 3))
    neg = rng.integers(0, 3, size=n)
    rows = np.arange(n)
    others = C.sum(axis=1) - C[rows, neg]
    C[rows, neg] = -rng.uniform(0.0, 1.0, size=n) * others
    return C


def test_azimuthal_disjunction(criterion):
    rng = np.random.default_rng(31)
    t = time.perf_counter()
    C = random_azimuthal(rng, 100_000)
    S = rng.uniform(0.0, 1.0, size=(100_000, 3))
    S = np.clip(S, 1e-300, np.nextafter(1.0, 0.0))
    assert all(cone.azimuthal(cone.Functional(tuple(mpf(float(x)) for x in row))) for row in C[:200])
    margins = _lemma_margins(C, S)
    # float rounding can only matter very near zero; settle those at 256 bits
    unsure = np.nonzero(margins < 1e-9)[0]
    failures = [k for k in unsure if _lemma_margin_exact(C[k], S[k]) < 0]
    elapsed = time.perf_counter() - t
    criterion(9, not failures and elapsed < 10,
              f"100000 trials, {len(unsure)} rechecked at 256 bits, {len(failures)} failures, "
              f"min margin {margins.min():.3g}, {elapsed:.1f}s")
