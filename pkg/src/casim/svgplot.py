"""Deterministic SVG plotting for per-episode trace metrics.

Hand-rolled so identical traces produce byte-identical files (no timestamps,
no generated ids). One polyline per series; per-episode means on the y axis.
"""

from .errors import CasimError
from .trace import COLUMNS

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
WIDTH, HEIGHT = 720, 480
MARGIN = 60


def _fmt(x):
    return format(float(x), ".6g")


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def series_svg(series, title, ylabel, path):
    """Write polyline series: list of (label, xs, ys)."""
    if not series:
        raise CasimError("nothing to plot")
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" '
        'stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 16}" text-anchor="middle" '
        'font-size="12">episode</text>',
        f'<text x="16" y="{HEIGHT // 2}" font-size="12" '
        f'transform="rotate(-90 16 {HEIGHT // 2})" text-anchor="middle">{ylabel}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10" '
        f'text-anchor="middle">{_fmt(x_lo)}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10" '
        f'text-anchor="middle">{_fmt(x_hi)}</text>',
        f'<text x="{MARGIN - 6}" y="{HEIGHT - MARGIN}" font-size="10" '
        f'text-anchor="end">{_fmt(y_lo)}</text>',
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" font-size="10" '
        f'text-anchor="end">{_fmt(y_hi)}</text>',
    ]
    for si, (label, xs, ys) in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        px = _scale(xs, x_lo, x_hi, MARGIN, WIDTH - MARGIN)
        py = _scale(ys, y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
        if len(xs) == 1:
            parts.append(f'<circle cx="{_fmt(px[0])}" cy="{_fmt(py[0])}" r="3" '
                         f'fill="{color}"/>')
        else:
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                         f'points="{pts}"/>')
        ly = MARGIN + 16 * si
        parts.append(f'<line x1="{WIDTH - MARGIN + 6}" y1="{ly}" x2="{WIDTH - MARGIN + 26}" '
                     f'y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{WIDTH - MARGIN + 30}" y="{ly + 4}" '
                     f'font-size="11">{label}</text>')
    parts.append("</svg>")
    data = "\n".join(parts) + "\n"
    try:
        with open(path, "w") as fh:
            fh.write(data)
    except OSError as exc:
        raise CasimError(f"cannot write plot to {path}: {exc}") from exc
    return path


def emit_plot(trace, metric, path):
    """Per-episode mean of a trace column, one polyline per UE."""
    if metric not in COLUMNS:
        raise CasimError(f"unknown metric {metric!r}")
    ues = sorted(set(int(u) for u in trace.rows["ue"]))
    series = []
    for u in ues:
        eps, vals = trace.episode_mean(metric, ue=u)
        series.append((f"UE{u + 1}", list(eps), list(vals)))
    title = f"{trace.scenario_name or 'trace'}: {metric}"
    return series_svg(series, title, metric, path)


def comparison_plot(named_traces, metric, path, title=""):
    """Network-level per-episode means, one polyline per configuration."""
    if metric not in COLUMNS:
        raise CasimError(f"unknown metric {metric!r}")
    series = []
    for label, trace in named_traces:
        eps, vals = trace.episode_mean(metric)
        series.append((label, list(eps), list(vals)))
    return series_svg(series, title or metric, metric, path)
