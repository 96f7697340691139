"""report.json / curves.csv output and re-verification of a stored bundle."""
import csv
import json
import os
from fractions import Fraction

from mpmath import mp, mpf

from . import cone
from .errors import ConfigError, LimitconeError
from .scalar import fmt, parse, precision

REPORT = "report.json"
CURVES = "curves.csv"
SVG = "cone.svg"
CSV_COLUMNS = ["curve_id", "kind", "len1", "len2", "len3", "bary1", "bary2", "bary3",
               "is_vertex", "exterior_angle"]
WORD_DIGITS = 20
VERIFY_TOL = "1e-12"


def _num(x, ndigits=None):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return fmt(x, ndigits)


def jsonable(obj):
    """Plain JSON data; high-precision numbers become decimal strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (Fraction, type(mpf(0)))):
        return _num(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "coords"):
        return jsonable(obj.coords)
    if hasattr(obj, "bary"):
        return jsonable(obj.bary)
    return str(obj)


def report_data(bundle):
    cfg = bundle.config
    hull = bundle.hull
    prec = bundle.precision_bits
    with precision(prec):
        by_id = {c.curve_id: c for c in bundle.curves}
        hull_data = {
            "precision_bits": prec,
            "verdict": hull.verdict,
            "tol": hull.tol,
            "hypotheses": list(hull.hypotheses),
            "vertices": [{"curve_id": lab, "multilength": by_id[lab].ml, "bary": v}
                         for lab, v in zip(bundle.hull_labels, hull.vertices)],
            "facets": [{"from": bundle.hull_labels[f.i], "to": bundle.hull_labels[f.j],
                        "functional": f.functional.c, "azimuthal": f.azimuthal,
                        "azimuthal_margin": cone.azimuthal_margin(f.functional)}
                       for f in hull.facets],
        }
        data = {
            "scenario": cfg.scenario,
            "exit_status": bundle.exit_status,
            "provenance": {"config": cfg.echo(), "config_hash": cfg.content_hash(),
                           "precision_bits": prec},
            "hull": hull_data,
            "checks": {"precision_bits": prec, **bundle.checks},
        }
        if bundle.cloud_summary is not None:
            data["cloud"] = bundle.cloud_summary
        if bundle.witness is not None:
            data["nonconjugacy_witness"] = {"precision_bits": prec, **bundle.witness}
        if bundle.adjustment is not None:
            data["adjustment"] = {"precision_bits": prec, **bundle.adjustment}
        if bundle.slack is not None:
            data["slack_regression"] = bundle.slack
        return jsonable(data)


def _csv_row(c, ndigits=None):
    return [c.curve_id, c.kind,
            *[_num(x, ndigits) for x in c.ml],
            *[_num(x, ndigits) for x in c.sp],
            "true" if c.is_vertex else "false",
            "" if c.exterior_angle is None else _num(c.exterior_angle, ndigits)]


def write_bundle(bundle, out_dir):
    """Write report.json and curves.csv; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    rpath = os.path.join(out_dir, REPORT)
    cpath = os.path.join(out_dir, CURVES)
    with open(rpath, "w") as fh:
        json.dump(report_data(bundle), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with precision(bundle.precision_bits), open(cpath, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in bundle.curves:
            w.writerow(_csv_row(c))
        for c in bundle.cloud:
            w.writerow(_csv_row(c, WORD_DIGITS))
    return rpath, cpath


def load_report(bundle_dir):
    path = os.path.join(bundle_dir, REPORT)
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def read_curves(bundle_dir):
    with open(os.path.join(bundle_dir, CURVES), newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and set(rows[0]) != set(CSV_COLUMNS):
        raise ConfigError("curves.csv has unexpected columns")
    return rows


def _value(text):
    if "/" in text:
        return Fraction(text)
    return parse(text)


def verify(bundle_dir, tol=VERIFY_TOL):
    """Recheck every stored curve and cloud point against the stored hull.

    Returns (exit_status, summary): 0 if nothing lies outside, 3 otherwise.
    """
    data = load_report(bundle_dir)
    prec = int(data["hull"]["precision_bits"])
    with precision(prec):
        verts = [tuple(_value(x) for x in v["bary"]) for v in data["hull"]["vertices"]]
        if len(verts) < 3:
            raise LimitconeError("stored hull has fewer than 3 vertices")
        hull = cone.hull_from_vertices(verts)
        box = cone.Container(hull, mpf(tol))
        rows = read_curves(bundle_dir)
        pts = [tuple(_value(r[f"bary{i}"]) for i in (1, 2, 3)) for r in rows]
        counts = {"inside": 0, "boundary": 0, "outside": 0}
        outside = []
        worst = mpf(0)
        for r, (state, m) in zip(rows, box.classify_many(pts)):
            counts[state] += 1
            if state == "outside":
                outside.append(r["curve_id"])
                worst = max(worst, -m)
        summary = {"precision_bits": prec, "tolerance": tol, "rows": len(rows), **counts,
                   "max_outside_margin": fmt(worst, 10) if outside else "0",
                   "outside_ids": outside[:20]}
    return (3 if outside else 0), summary


def curve_rows(bundle_dir):
    """(curve_id, kind, bary floats, is_vertex) for rendering a stored bundle."""
    out = []
    for r in read_curves(bundle_dir):
        with mp.workdps(30):
            bary = tuple(float(_value(r[f"bary{i}"])) for i in (1, 2, 3))
        out.append((r["curve_id"], r["kind"], bary, r["is_vertex"] == "true"))
    return out
