"""A small static SVG line/scatter renderer for experiment reports."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=170, top=40, bottom=55)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.4g}"


def _range(values, pad=0.05):
    values = [v for v in values if v is not None and math.isfinite(v)]
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    if hi == lo:
        d = abs(lo) * 0.1 or 0.5
        return lo - d, hi + d
    d = (hi - lo) * pad
    return lo - d, hi + d


def line_chart(series, title, xlabel, ylabel, xlim=None, ylim=None, diagonal=False) -> str:
    """Render ``series`` (a list of ``(label, xs, ys)``) as an SVG document string.

    ``None`` y-values are skipped.  ``diagonal`` draws the reference line y = x.
    """
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x0, x1 = xlim or _range(xs_all)
    y0, y1 = ylim or _range(ys_all)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(x0, x1):
        if x0 <= t <= x1:
            X = sx(t)
            bottom = MARGIN["top"] + ph
            out.append(f'<line x1="{X:.1f}" y1="{bottom}" x2="{X:.1f}" y2="{bottom + 5}" stroke="black"/>')
            out.append(f'<line x1="{X:.1f}" y1="{MARGIN["top"]}" x2="{X:.1f}" y2="{bottom}" stroke="#eee"/>')
            out.append(f'<text x="{X:.1f}" y="{bottom + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in nice_ticks(y0, y1):
        if y0 <= t <= y1:
            Y = sy(t)
            left = MARGIN["left"]
            out.append(f'<line x1="{left - 5}" y1="{Y:.1f}" x2="{left}" y2="{Y:.1f}" stroke="black"/>')
            out.append(f'<line x1="{left}" y1="{Y:.1f}" x2="{left + pw}" y2="{Y:.1f}" stroke="#eee"/>')
            out.append(f'<text x="{left - 8}" y="{Y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    cy = MARGIN["top"] + ph / 2
    out.append(f'<text x="16" y="{cy:.1f}" text-anchor="middle" transform="rotate(-90 16 {cy:.1f})">{escape(ylabel)}</text>')

    if diagonal:
        a, b = max(x0, y0), min(x1, y1)
        if a < b:
            out.append(f'<line x1="{sx(a):.1f}" y1="{sy(a):.1f}" x2="{sx(b):.1f}" y2="{sy(b):.1f}" '
                       'stroke="#888" stroke-dasharray="4,3"/>')

    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = [(sx(x), sy(y)) for x, y in zip(xs, ys) if y is not None and math.isfinite(y)]
        if len(pts) > 1:
            path = " ".join(f"{X:.1f},{Y:.1f}" for X, Y in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for X, Y in pts:
            out.append(f'<circle cx="{X:.1f}" cy="{Y:.1f}" r="2.5" fill="{color}"/>')
        ly = MARGIN["top"] + 12 + 18 * k
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _closest(values, target):
    return min(values, key=lambda v: (abs(v - target), v))


def report_plots(report) -> dict[str, str]:
    """The five standard figures for one ``(p, N)`` report, keyed by file name."""
    cfg = report.config
    tag = f"p{cfg.p}_N{cfg.N}"
    methods = ("leveraging-ci", "bootstrap")
    r_grid = sorted(cfg.r_grid)
    alphas = sorted(cfg.alpha_grid)
    a05 = _closest(alphas, 0.05)

    cov_series = []
    for r in r_grid[:3]:
        for m in methods:
            rows = [report.row(r, a, m) for a in alphas]
            cov_series.append((f"{m} r={r}", [1.0 - a for a in alphas], [row.coverage for row in rows]))

    def per_r(attr, a):
        return [(m, r_grid, [getattr(report.row(r, a, m), attr) for r in r_grid]) for m in methods]

    time_series = per_r("time_ms", alphas[0])
    roc_series = []
    for (r, m), pts in sorted(report.roc.items()):
        roc_series.append((f"{m} r={r}", [0.0] + [q.fpr for q in pts], [0.0] + [q.tpr for q in pts]))

    return {
        f"coverage_{tag}.svg": line_chart(cov_series, f"Coverage (p={cfg.p}, N={cfg.N})",
                                          "nominal coverage", "actual coverage",
                                          xlim=(0.0, 1.0), ylim=(0.0, 1.0), diagonal=True),
        f"time_{tag}.svg": line_chart(time_series, f"Computation time (p={cfg.p}, N={cfg.N})",
                                      "r", "time (ms)"),
        f"type1_{tag}.svg": line_chart(per_r("type1", a05), f"Type 1 error at alpha={a05:g}",
                                       "r", "type 1 error rate"),
        f"type2_{tag}.svg": line_chart(per_r("type2", a05), f"Type 2 error at alpha={a05:g}",
                                       "r", "type 2 error rate"),
        f"roc_{tag}.svg": line_chart(roc_series, f"ROC (p={cfg.p}, N={cfg.N})",
                                     "false positive rate", "true positive rate",
                                     xlim=(0.0, 1.0), ylim=(0.0, 1.0), diagonal=True),
    }
