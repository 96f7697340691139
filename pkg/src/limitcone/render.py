"""Static SVG of a projectivized cone inside the barycentric triangle."""
import math
from fractions import Fraction

from mpmath import mp

from .errors import DegenerateHull
from .report import curve_rows, load_report

SIDE = 1000.0
LEFT, BASE = 60.0, 926.0
HEIGHT = SIDE * math.sqrt(3) / 2
CORNERS = ((LEFT, BASE), (LEFT + SIDE, BASE), (LEFT + SIDE / 2, BASE - HEIGHT))
CORNER_NAMES = ("[1:0:0]", "[0:1:0]", "[0:0:1]")
MAX_LABELS = 24
AZIMUTHAL = "#1b7837"
OTHER = "#b2182b"

ZOOM_BELOW = 300.0  # hull extents smaller than this get a zoomed inset
INSET = (1140.0, 80.0, 400.0)  # left, top, size

PREAMBLE = """<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="990" viewBox="0 0 %d 990">
<rect x="0" y="0" width="%d" height="990" fill="white"/>
<g font-family="Helvetica, Arial, sans-serif">
"""
POSTAMBLE = """</g>
</svg>
"""


def to_svg_xy(bary):
    """Map barycentric coordinates to the drawing, clamped to the triangle."""
    b = [min(max(float(x), 0.0), 1.0) for x in bary]
    s = sum(b) or 1.0
    b = [x / s for x in b]
    x = sum(w * c[0] for w, c in zip(b, CORNERS))
    y = sum(w * c[1] for w, c in zip(b, CORNERS))
    return x, y


def _float(text):
    text = str(text)
    if "/" in text:
        return float(Fraction(text))
    with mp.workdps(30):
        return float(mp.mpf(text))


def _pt(xy):
    return "%.3f,%.3f" % xy


def _escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _hull_layer(vxy, verts, facets, total, dots, r, labels=True):
    """Hull polygon, facets, vertex dots and labels in drawing coordinates."""
    out = []
    if len(vxy) >= 2:
        out.append('<polygon points="%s" fill="#d9f0d3" fill-opacity="0.35" stroke="none"/>\n'
                   % " ".join(_pt(p) for p in vxy))
    ids = [v["curve_id"] for v in verts]
    for f in facets:
        i, j = ids.index(f["from"]), ids.index(f["to"])
        if f["azimuthal"]:
            style = 'stroke="%s" stroke-width="2"' % AZIMUTHAL
        else:
            style = 'stroke="%s" stroke-width="2" stroke-dasharray="8,5"' % OTHER
        out.append('<line x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" %s/>\n'
                   % (vxy[i] + vxy[j] + (style,)))
    out.append('<g fill="#777777" stroke="none">\n')
    for xy in dots:
        out.append('<circle cx="%.3f" cy="%.3f" r="1.2"/>\n' % xy)
    out.append("</g>\n")
    labelled = sorted(range(len(verts)), key=lambda k: (total[k], k))[:MAX_LABELS] if labels else []
    out.append('<g fill="black">\n')
    for k in range(len(verts)):
        out.append('<circle cx="%.3f" cy="%.3f" r="%.1f"/>\n' % (vxy[k] + (r,)))
    for k in sorted(labelled):
        out.append('<text x="%.3f" y="%.3f" font-size="13">%s</text>\n'
                   % (vxy[k][0] + 6, vxy[k][1] - 6, _escape(ids[k])))
    out.append("</g>\n")
    return out


def _dedup(points):
    seen = set()
    out = []
    for xy in points:
        key = "%.1f,%.1f" % xy
        if key not in seen:
            seen.add(key)
            out.append(xy)
    return sorted(out)


def render_svg(data, rows):
    """SVG text for a report dict and its curve rows (see report.curve_rows)."""
    verts = data["hull"]["vertices"]
    if not verts:
        raise DegenerateHull("cannot render an empty hull")
    facets = data["hull"]["facets"]
    vxy = [to_svg_xy([_float(x) for x in v["bary"]]) for v in verts]
    total = [sum(_float(x) for x in v["multilength"]) for v in verts]
    words = [to_svg_xy(bary) for _, kind, bary, _ in rows if kind == "word"]
    others = [to_svg_xy(bary) for _, kind, bary, vertex in rows if kind != "word" and not vertex]

    xs, ys = [p[0] for p in vxy], [p[1] for p in vxy]
    extent = max(max(xs) - min(xs), max(ys) - min(ys))
    inset = extent < ZOOM_BELOW
    width = 1560 if inset else 1120
    out = [PREAMBLE % (width, width, width)]
    out.append('<polygon points="%s" fill="none" stroke="black" stroke-width="2"/>\n'
               % " ".join(_pt(c) for c in CORNERS))
    places = ((20.0, BASE + 34, "start"), (1100.0, BASE + 34, "end"),
              (CORNERS[2][0], CORNERS[2][1] - 14, "middle"))
    for (x, y, anchor), name in zip(places, CORNER_NAMES):
        out.append('<text x="%.3f" y="%.3f" font-size="18" text-anchor="%s">%s</text>\n'
                   % (x, y, anchor, name))
    for xy in others:
        out.append('<circle cx="%.3f" cy="%.3f" r="3" fill="none" stroke="black"/>\n' % xy)

    if not inset:
        out += _hull_layer(vxy, verts, facets, total, _dedup(words), 3.5)
    else:
        out += _hull_layer(vxy, verts, facets, total, _dedup(words), 1.5, labels=False)
        left, top, size = INSET
        pad = 0.08 * extent
        x0, y0 = min(xs) - pad, min(ys) - pad
        scale = size / (extent + 2 * pad)

        def zoom(p):
            return left + (p[0] - x0) * scale, top + (p[1] - y0) * scale

        inside = [p for p in words if x0 <= p[0] <= x0 + extent + 2 * pad
                  and y0 <= p[1] <= y0 + extent + 2 * pad]
        out.append('<rect x="%.3f" y="%.3f" width="%.3f" height="%.3f" fill="none" '
                   'stroke="#999999"/>\n' % (left, top, size, size))
        out.append('<text x="%.3f" y="%.3f" font-size="14">zoom x%.1f</text>\n'
                   % (left, top - 8, scale))
        out += _hull_layer([zoom(p) for p in vxy], verts, facets, total,
                           _dedup([zoom(p) for p in inside]), 2.0)
        for p in others:
            out.append('<circle cx="%.3f" cy="%.3f" r="3" fill="none" stroke="black"/>\n'
                       % zoom(p))

    title = "%s: %d hull vertices, %s" % (data["scenario"], len(verts), data["hull"]["verdict"])
    out.append('<text x="20" y="30" font-size="20">%s</text>\n' % _escape(title))
    out.append(POSTAMBLE)
    return "".join(out)


def render_bundle(bundle_dir, path):
    svg = render_svg(load_report(bundle_dir), curve_rows(bundle_dir))
    with open(path, "w") as fh:
        fh.write(svg)
    return path
