"""Scenario configuration and orchestration."""
import hashlib
import json
import math
import os
from dataclasses import dataclass, field

import yaml
from mpmath import mp, mpf

from . import cone, fricke, polygons, wordgen
from .errors import ConfigError, NotFound
from .scalar import DEFAULT_PRECISION, parse, precision

SCENARIOS = ("pants", "hexagon", "ngon", "fish", "custom")
ENV_PRECISION = "LIMITCONE_PRECISION_BITS"
CLOUD_TOL = "1e-12"

PANTS_VECTORS = {"a": [2, 2, 1], "b": [1, 2, 2], "ab": [2, 1, 2]}

DEFAULT_WORD_LEN = {"pants": 0, "custom": 0, "hexagon": 10, "ngon": 6, "fish": 14}


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    precision_bits: int = DEFAULT_PRECISION
    word_max_len: int = 0
    out_dir: str = None

    def echo(self):
        return {"scenario": self.scenario, "params": self.params,
                "precision_bits": self.precision_bits,
                "word_max_len": self.word_max_len}

    def content_hash(self):
        text = json.dumps(self.echo(), sort_keys=True, default=str)
        return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _positive_int(value, name, minimum=1):
    try:
        v = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an integer") from exc
    if v < minimum or str(value).strip() != str(v):
        raise ConfigError(f"{name} must be an integer >= {minimum}")
    return v


def config_from_dict(data, precision_bits=None, q_max=None, word_max_len=None, out_dir=None):
    """Validate a parsed config mapping; keyword arguments override it."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    scenario = data.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}")
    unknown = set(data) - {"scenario", "params", "precision_bits", "word_max_len", "out_dir"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    params = dict(data.get("params") or {})
    if precision_bits is None:
        precision_bits = data.get("precision_bits", os.environ.get(ENV_PRECISION, DEFAULT_PRECISION))
    precision_bits = _positive_int(precision_bits, "precision_bits", DEFAULT_PRECISION)
    if word_max_len is None:
        word_max_len = data.get("word_max_len", DEFAULT_WORD_LEN[scenario])
    word_max_len = _positive_int(word_max_len, "word_max_len", 0)
    if q_max is not None:
        params["q_max"] = q_max
    cfg = ScenarioConfig(scenario, params, precision_bits, word_max_len,
                         out_dir if out_dir is not None else data.get("out_dir"))
    _check_params(cfg)
    return cfg


def load_config(path, **overrides):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return config_from_dict(data, **overrides)


def _scalar(params, key, default=None):
    if key not in params:
        if default is None:
            raise ConfigError(f"missing parameter {key!r}")
        return parse(default)
    v = parse(params[key])
    if not v > 0:
        raise ConfigError(f"parameter {key!r} must be positive")
    return v


def _check_params(cfg):
    p = cfg.params
    with precision(cfg.precision_bits):
        if cfg.scenario == "hexagon":
            _scalar(p, "x", "1e-4")
            _scalar(p, "delta", "8")
            for s in p.get("shifts", [0, 1, 2]):
                _positive_int(s, "shift", 0)
        elif cfg.scenario == "ngon":
            g = _positive_int(p.get("g", 3), "g", 2)
            _scalar(p, "x", "1e-4")
            alphas = p.get("alphas")
            if alphas is not None:
                if len(alphas) != 2 * g - 1:
                    raise ConfigError(f"ngon with g={g} needs {2 * g - 1} alphas")
                for a in alphas:
                    if not parse(a) > 0:
                        raise ConfigError("alphas must be positive")
        elif cfg.scenario == "fish":
            a, b = _scalar(p, "a", "6"), _scalar(p, "b", "8")
            if not a < b:
                raise ConfigError("fish needs 0 < a < b")
            _positive_int(p.get("q_max", 20), "q_max", 1)
        elif cfg.scenario in ("pants", "custom"):
            vecs = p.get("vectors", PANTS_VECTORS if cfg.scenario == "pants" else None)
            if not vecs:
                raise ConfigError("custom scenario needs a 'vectors' mapping")
            for name, v in vecs.items():
                if len(v) != 3:
                    raise ConfigError(f"vector {name} must have 3 entries")
                vals = [_exact_or_scalar(x) for x in v]
                if min(vals) < 0 or max(vals) <= 0:
                    raise ConfigError(f"vector {name} must be non-negative and non-zero")


def _exact_or_scalar(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    if isinstance(x, str) and x.strip().lstrip("-").isdigit():
        return int(x)
    return parse(x)


@dataclass
class Curve:
    curve_id: str
    kind: str
    ml: tuple
    sp: tuple = None
    is_vertex: bool = False
    exterior_angle: object = None
    multiplicity: int = 1

    def __post_init__(self):
        if self.sp is None:
            self.sp = tuple(cone.projectivize(self.ml))


@dataclass
class ReportBundle:
    config: ScenarioConfig
    precision_bits: int
    hull: cone.HullCertificate
    hull_labels: list
    curves: list
    cloud: list = field(default_factory=list)
    cloud_summary: dict = None
    checks: dict = field(default_factory=dict)
    witness: dict = None
    adjustment: dict = None
    slack: dict = None
    exit_status: int = 2


def scenario_precision(cfg, lam_max):
    """max(requested, ceil(3 * lam_max / ln 2) + 64)."""
    need = math.ceil(3 * float(lam_max) / math.log(2)) + 64
    return max(cfg.precision_bits, need)


def run_scenario(cfg):
    runner = {"pants": _run_vectors, "custom": _run_vectors, "hexagon": _run_hexagon,
              "ngon": _run_ngon, "fish": _run_fish}[cfg.scenario]
    return runner(cfg)


def _classify_curves(curves, hull):
    rep = cone.extremality_report([c.ml for c in curves], hull=hull) if len(curves) >= 3 else []
    for c, r in zip(curves, rep):
        c.is_vertex = r.kind == "vertex"
        c.exterior_angle = r.exterior_angle


def _hull_labels(hull, curves):
    return [curves[k].curve_id for k in hull.vertex_ids]


def _finish(cfg, prec, hull, curves, cloud_pts, cloud_extra, checks, **extra):
    summary = None
    outside = 0
    if cloud_pts is not None:
        summary = _containment(hull, curves, cloud_pts)
        summary.update(cloud_extra)
        outside = summary["outside"]
    if hull.verdict == "certified":
        status = 3 if outside else 0
    else:
        status = 2
    bundle = ReportBundle(cfg, prec, hull, _hull_labels(hull, curves), curves,
                          cloud_pts or [], summary, checks, **extra)
    bundle.exit_status = status
    return bundle


def _containment(hull, curves, cloud_pts):
    tol = mpf(CLOUD_TOL)
    summary = {"tolerance": CLOUD_TOL, "points": len(cloud_pts), "inside": 0,
               "boundary": 0, "outside": 0, "max_outside_margin": mpf(0),
               "precision_bits": mp.prec}
    if hull.degenerate:
        summary["skipped"] = "degenerate hull"
        return summary
    box = cone.Container(hull, tol)
    for state, m in box.classify_many([c.sp for c in cloud_pts]):
        summary[state] += 1
        if state == "outside":
            summary["max_outside_margin"] = max(summary["max_outside_margin"], -m)
    # distance from every hull vertex to the closest cloud point
    if cloud_pts:
        import numpy as np
        arr = np.array([[float(x) for x in c.sp] for c in cloud_pts])
        dists = [float(np.min(np.linalg.norm(arr - np.array([float(x) for x in v]), axis=1)))
                 for v in hull.vertices]
        summary["nearest_cloud_distance"] = dists
    return summary


def _cloud_curves(table, kind, gens, max_len):
    words = wordgen.enumerate_words(kind, gens, max_len)
    cloud = wordgen.jordan_cloud(table, words)
    pts = [Curve("w:" + str(p.word), "word", p.ml.coords, tuple(p.sp)) for p in cloud.points]
    spot, ok = wordgen.conjugation_spot_check(table, words, mpf(2) ** -(mp.prec // 2))
    extra = {"words": len(words), "duplicates": cloud.duplicates,
             "non_hyperbolic": [str(w) for w, _ in cloud.non_hyperbolic],
             "conjugation_spot_check": {"max_deviation": spot, "passed": ok},
             "word_kind": kind, "max_len": max_len}
    return pts, extra, cloud


def _witness(table, kind, gens, max_len):
    try:
        found = wordgen.nonconjugacy_witness(table, kind, max_len, generators=gens)
    except NotFound as exc:
        return None, {"found": False, "max_len": exc.max_len}
    return found, {"found": True, "pairs": {
        f"{i + 1}-{j + 1}": {"word": str(w), "lengths": list(ls)} for (i, j), (w, ls) in sorted(found.items())}}


# pants / custom

def _run_vectors(cfg):
    vecs = cfg.params.get("vectors", PANTS_VECTORS)
    with precision(cfg.precision_bits) as prec:
        curves = []
        for name, v in vecs.items():
            ml = tuple(_exact_or_scalar(x) for x in v)
            curves.append(Curve(str(name), "simple", ml))
        hull = cone.certify(cone.convex_hull([c.ml for c in curves]))
        _classify_curves(curves, hull)
        checks = {"vertices": {"count": len(hull.vertices)}}
        return _finish(cfg, prec, hull, curves, None, {}, checks)


# polygons

def _polygon_curves(g, param_sets, shifts):
    polys = [polygons.build_chain_polygon(g, p).with_shift(s) for p, s in zip(param_sets, shifts)]
    systems = [polygons.labelled_length_system(P) for P in polys]
    curves = []
    for label in systems[0]:
        kind = "edge" if label.startswith("e") else "chord"
        curves.append(Curve(label, kind, tuple(sy[label] for sy in systems),
                            multiplicity=polygons.curve_multiplicity(label)))
    return polys, curves


def _polygon_hull(g, param_sets, shifts, witness=None):
    polys, curves = _polygon_curves(g, param_sets, shifts)
    hull = cone.certify(cone.convex_hull([c.ml for c in curves]), witness)
    return polys, curves, hull


def _half_perimeter_bound(g, params):
    """Upper bound for every edge/chord length over the adjustment box."""
    with precision(64):
        x = [mpf(v) / 8 for v in params]
        total = mpf(0)
        for k in range(1, 2 * g - 1):
            total += sum(polygons._pentagon_cycle(k, x)[i][1] for i in (0, 2, 4))
        total += sum(x)
        return total / 2 + 1


def _polygon_cloud(polys, max_len):
    n = polys[0].n
    table = wordgen.generator_table(wordgen.REFLECTION,
                                    [polygons.reflection_generators(P) for P in polys])
    found, witness = _witness(table, wordgen.REFLECTION, n, 4)
    if max_len:
        pts, extra, _ = _cloud_curves(table, wordgen.REFLECTION, n, max_len)
    else:
        pts, extra = None, {}
    return found, witness, pts, extra


def _adjust(base, build, min_vertices, indices=None):
    def objective(params):
        return cone.hull_margin(build(params)[2], min_vertices)

    return polygons.multiplicative_adjust(base, objective, indices=indices)


def _run_hexagon(cfg):
    p = cfg.params
    shifts = [int(s) for s in p.get("shifts", [0, 1, 2])]
    with precision(cfg.precision_bits):
        x, delta = _scalar(p, "x", "1e-4"), _scalar(p, "delta", "8")
        base = [x, delta * x, x]
        prec = scenario_precision(cfg, _half_perimeter_bound(2, base))
    with precision(prec):
        x, delta = _scalar(p, "x", "1e-4"), _scalar(p, "delta", "8")
        base = [x, delta * x, x]

        def build(params):
            return _polygon_hull(2, [params] * len(shifts), shifts)

        polys, curves, hull = build(base)
        adjustment = None
        if cone.hull_margin(hull, 6) <= 0 and p.get("adjust", True):
            res = _adjust(base, build, 6, indices=[1])
            adjustment = {"multipliers": list(res.multipliers), "params": list(res.params),
                          "margin": res.margin, "evaluations": res.evaluations,
                          "delta": res.params[1] / res.params[0]}
            base = list(res.params)
            polys, curves, hull = build(base)
        found, witness, pts, extra = _polygon_cloud(polys, cfg.word_max_len)
        hull = cone.certify(hull, found)
        _classify_curves(curves, hull)
        checks = {
            "curve_labels": {"count": len(curves), "passed": len(curves) == 9},
            "projective_classes": {"count": len(_cluster(curves, hull.tol))},
            "vertices": {"count": len(hull.vertices), "passed": len(hull.vertices) == 6},
            "params": {"values": base},
        }
        return _finish(cfg, prec, hull, curves, pts, extra, checks,
                       witness=witness, adjustment=adjustment)


def _cluster(curves, tol):
    reps = []
    for c in curves:
        if not any(max(abs(a - b) for a, b in zip(c.sp, r)) <= tol for r in reps):
            reps.append(c.sp)
    return reps


def default_alphas(g):
    """Exponents alpha_k = (8 + k sqrt 2)/8, pairwise incommensurable."""
    return [(8 + k * mp.sqrt(2)) / 8 for k in range(2 * g - 1)]


def _run_ngon(cfg):
    p = cfg.params
    g = int(p.get("g", 3))
    m = 2 * g - 1
    shifts = [0, 1, 2]

    def setup():
        x = _scalar(p, "x", "1e-4")
        alphas = [parse(a) for a in p["alphas"]] if "alphas" in p else default_alphas(g)
        return x, [x ** a for a in alphas]

    with precision(cfg.precision_bits):
        x, third = setup()
        lam = max(_half_perimeter_bound(g, [x] * m), _half_perimeter_bound(g, third))
        prec = scenario_precision(cfg, lam)
    with precision(prec):
        x, third = setup()
        base = [x] * (2 * m)

        def build(params):
            return _polygon_hull(g, [params[:m], params[m:], third], shifts)

        target = 4 * g - 1
        polys, curves, hull = build(base)
        adjustment = None
        if cone.hull_margin(hull, target) <= 0 and p.get("adjust", True):
            res = _adjust(base, build, target)
            adjustment = {"multipliers": list(res.multipliers), "params": list(res.params),
                          "margin": res.margin, "evaluations": res.evaluations}
            base = list(res.params)
            polys, curves, hull = build(base)
        found, witness, pts, extra = _polygon_cloud(polys, cfg.word_max_len)
        hull = cone.certify(hull, found)
        _classify_curves(curves, hull)
        checks = {
            "vertices": {"count": len(hull.vertices), "target": target,
                         "passed": len(hull.vertices) >= target},
            "alphas": {"values": [parse(a) for a in p["alphas"]] if "alphas" in p else default_alphas(g)},
        }
        return _finish(cfg, prec, hull, curves, pts, extra, checks,
                       witness=witness, adjustment=adjustment)


# fish

def fish_precision(cfg, b, q_max):
    return scenario_precision(cfg, 2 * q_max * b)


def _run_fish(cfg):
    p = cfg.params
    q_max = int(p.get("q_max", 20))
    with precision(cfg.precision_bits):
        b0 = _scalar(p, "b", "8")
        prec = fish_precision(cfg, b0, q_max)
    with precision(prec):
        a, b = _scalar(p, "a", "6"), _scalar(p, "b", "8")
        rep = fricke.fish_rep(a, b)
        slopes = [s for s, _, _ in fricke.farey_enumerate(q_max)]
        curves = [Curve(f"s:{s}", "slope", rep.multilength(s)) for s in slopes]
        per = tuple(fricke.peripheral_length(t) for t in rep.components)
        peripheral = Curve("peripheral", "peripheral", per)

        K = mp.exp(a + 2 * b)
        lam_max = max(max(c.ml) for c in curves)
        pred_min = K / (2 * a) * mp.exp(-lam_max)
        tol = min(cone.default_tol(), pred_min * mpf(2) ** -32)

        table = wordgen.generator_table(wordgen.FREE, [rep.generators(i) for i in range(3)])
        found, witness = _witness(table, wordgen.FREE, 2, 3)
        hull = cone.certify(cone.convex_hull([c.ml for c in curves], tol), found)
        _classify_curves(curves, hull)

        checks = {}
        angles_ok = all(c.is_vertex and c.exterior_angle > 0 for c in curves)
        checks["slopes_are_angular_vertices"] = {
            "slopes": len(curves), "vertices": len(hull.vertices), "passed": angles_ok,
            "min_exterior_angle": min(c.exterior_angle for c in curves if c.is_vertex)}
        checks["facets_azimuthal"] = {"passed": all(f.azimuthal for f in hull.facets)}
        center = tuple(mpf(1) / 3 for _ in range(3))
        state, margin = cone.contains(hull, peripheral.sp, tol)
        checks["peripheral"] = {
            "bary": list(peripheral.sp),
            "distance_to_center": max(abs(u - v) for u, v in zip(peripheral.sp, center)),
            "state": state, "margin": margin,
            "passed": state == "inside" and max(abs(u - v) for u, v in zip(peripheral.sp, center)) <= tol}
        checks["angle_law"] = _angle_law(rep, curves, slopes, a, b, q_max)

        pts, extra = None, {}
        if cfg.word_max_len:
            pts, extra, cloud = _cloud_curves(table, wordgen.FREE, 2, cfg.word_max_len)
            checks["vertex_attainment"] = _attainment(curves, slopes, cloud, hull)
        slack = _slack_regression(a, b)
        return _finish(cfg, prec, hull, curves + [peripheral], pts, extra, checks,
                       witness=witness, slack=slack)


def _angle_law(rep, curves, slopes, a, b, q_max, lo=2, hi=10):
    """Exterior angles against (K/2a) e^(-lambda) q: on the xi chain of
    component 1, and (diagnostic) on the simplex hull with the smallest
    component length."""
    K = mp.exp(a + 2 * b)
    two_a = 2 * a
    chain = fricke.xi_points(rep, 0, q_max)
    index = {s: i for i, (s, _) in enumerate(chain)}
    by_id = {c.curve_id: c for c in curves}
    rows = []
    for s in slopes:
        if fricke.sector(s) != "unit" or not (lo <= s.q <= hi):
            continue
        i = index[s]
        ang = fricke.exterior_angle(chain[i - 1][1], chain[i][1], chain[i + 1][1])
        lam1 = fricke.slope_length(rep, 0, s)
        pred = K / two_a * mp.exp(-lam1) * s.q
        c = by_id[f"s:{s}"]
        pred_min = K / two_a * mp.exp(-min(c.ml)) * s.q
        rows.append({"slope": str(s), "xi_angle": ang, "ratio": ang / pred,
                     "simplex_angle": c.exterior_angle,
                     "simplex_ratio_min_length": c.exterior_angle / pred_min})
    ratios = [r["ratio"] for r in rows]
    return {"rows": rows, "bracket": ["1/8", "8"], "min_ratio": min(ratios),
            "max_ratio": max(ratios),
            "passed": all(mpf(1) / 8 <= r <= 8 for r in ratios)}


def _attainment(curves, slopes, cloud, hull, max_weight=5):
    canon = {}
    for pt in cloud.points:
        canon[wordgen.canonical(pt.word).letters] = pt
    by_id = {c.curve_id: c for c in curves}
    rows, ok = [], True
    for s in slopes:
        if fricke.weight(s) > max_weight:
            continue
        w = wordgen.free_word(fricke.slope_word(s))
        rev = wordgen.Word(tuple(reversed(w.letters)), w.kind)
        pt = canon.get(wordgen.canonical(w).letters) or canon.get(wordgen.canonical(rev).letters)
        c = by_id[f"s:{s}"]
        if pt is None:
            rows.append({"slope": str(s), "found": False})
            ok = False
            continue
        dist = max(abs(u - v) for u, v in zip(pt.sp, c.sp))
        good = c.is_vertex and dist <= hull.tol
        ok &= good
        rows.append({"slope": str(s), "word": str(pt.word), "distance": dist, "passed": good})
    return {"rows": rows, "passed": ok}


def _slack_regression(a, b, depth=10):
    with precision(max(2048, mp.prec)) as prec:
        tau0 = fricke.TriangleSides(mpf(a), mpf(b), mpf(b))
        path = fricke.alternating_path(depth)
        recs = fricke.mutation_slacks(tau0, path)
        T = fricke.commutator_trace(tau0.traces())
        return {"precision_bits": prec, "path": path,
                "K": "exp(a0+b0+c0)",
                "rows": [{"k": r.k, "a": r.a, "b": r.b, "c": r.c, "slack": r.slack,
                          "predicted": r.predicted, "ratio": r.ratio,
                          "ratio_markoff": r.slack / ((2 - T) * mp.exp(-2 * (r.a + r.b)))}
                         for r in recs]}
