"""Deterministic report artifacts: ranking CSV, bar chart and radar chart SVG.

Output depends only on the inputs: fixed canvas, fixed palette, fixed
number formatting, no timestamps. All text uses LF line endings.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .errors import MissingRatio
from .indicators import RatioTable, format_fixed, format_sig, rank

GENERATED_NOTE = "generated by unibench"
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
WIDTH, HEIGHT = 800, 600


@dataclass
class ReportBundle:
    ranking: list
    ratio_table: RatioTable
    results: list
    generated_note: str = GENERATED_NOTE
    # column order for ratio columns; derived from the results when empty
    indicator_ids: tuple = field(default_factory=tuple)


def _ratio_columns(bundle):
    if bundle.indicator_ids:
        used = {iid for r in bundle.results for iid in r.included_indicators}
        return [iid for iid in bundle.indicator_ids if iid in used]
    cols = []
    for r in bundle.results:
        for iid in r.included_indicators:
            if iid not in cols:
                cols.append(iid)
    return cols


def emit_ranking_csv(bundle: ReportBundle) -> str:
    cols = _ratio_columns(bundle)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "subject", "cmi", *cols])
    for row in bundle.ranking:
        ratios = bundle.ratio_table.ratios_for(row.subject_id)
        w.writerow([row.rank, row.subject_id, format_fixed(row.cmi),
                    *(format_sig(ratios[c]) if c in ratios else "" for c in cols)])
    # rows whose order is not recoverable from the printed cmi
    clashes = []
    for a, b in zip(bundle.ranking, bundle.ranking[1:]):
        if a.cmi != b.cmi and format_fixed(a.cmi) == format_fixed(b.cmi):
            for row in (a, b):
                entry = f"{row.subject_id}={row.cmi!r}"
                if entry not in clashes:
                    clashes.append(entry)
    if clashes:
        buf.write("# cmi ties at 2 decimals ordered by full precision: " + " ".join(clashes) + "\n")
    return buf.getvalue()


def _attr(s):
    return escape(s, {'"': "&quot;"})


def _num(x):
    return f"{x:.2f}"


def _svg_open(title, note):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f"<title>{escape(title)}</title>",
        f"<desc>{escape(note)}</desc>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.2f}" y="32.00" text-anchor="middle" font-size="20">{escape(title)}</text>',
    ]


def emit_bar_chart_svg(results, title="Lightness Indicator", note=GENERATED_NOTE) -> str:
    if not results:
        raise ValueError("bar chart needs at least one result")
    rows = rank(results)
    left, right, top, bottom = 70.0, 30.0, 60.0, 80.0
    plot_w = WIDTH - left - right
    plot_h = HEIGHT - top - bottom
    axis_max = max(r.cmi for r in rows) * 1.1
    base_y = top + plot_h

    out = _svg_open(title, note)
    for k in range(6):
        v = axis_max * k / 5
        y = base_y - plot_h * k / 5
        out.append(f'<line class="grid" x1="{_num(left)}" y1="{_num(y)}" x2="{_num(left + plot_w)}" '
                   f'y2="{_num(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{_num(left - 8)}" y="{_num(y + 4)}" text-anchor="end" font-size="12">'
                   f'{format_fixed(v)}</text>')
    out.append(f'<line class="axis" x1="{_num(left)}" y1="{_num(top)}" x2="{_num(left)}" y2="{_num(base_y)}" '
               f'stroke="#000000"/>')
    out.append(f'<line class="axis" x1="{_num(left)}" y1="{_num(base_y)}" x2="{_num(left + plot_w)}" '
               f'y2="{_num(base_y)}" stroke="#000000"/>')

    slot = plot_w / len(rows)
    for i, row in enumerate(rows):
        h = row.cmi / axis_max * plot_h
        x = left + i * slot + slot * 0.2
        cx = left + (i + 0.5) * slot
        out.append(f'<rect class="bar" data-subject="{_attr(row.subject_id)}" x="{_num(x)}" '
                   f'y="{_num(base_y - h)}" width="{_num(slot * 0.6)}" height="{_num(h)}" '
                   f'fill="{PALETTE[i % len(PALETTE)]}"/>')
        out.append(f'<text x="{_num(cx)}" y="{_num(base_y - h - 6)}" text-anchor="middle" font-size="12">'
                   f'{format_fixed(row.cmi)}</text>')
        out.append(f'<text x="{_num(cx)}" y="{_num(base_y + 20)}" text-anchor="middle" font-size="12">'
                   f'{escape(row.subject_id)}</text>')
    if 1.0 <= axis_max:
        y1 = base_y - plot_h / axis_max
        out.append(f'<line class="reference" x1="{_num(left)}" y1="{_num(y1)}" x2="{_num(left + plot_w)}" '
                   f'y2="{_num(y1)}" stroke="#555555" stroke-dasharray="6,4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_radar_chart_svg(table: RatioTable, subjects, indicator_ids, title="Lightness Indicator",
                         note=GENERATED_NOTE) -> str:
    """One closed polygon per subject; ``subjects`` should already be in rank order."""
    indicator_ids = list(indicator_ids)
    values = {}
    for sid in subjects:
        for iid in indicator_ids:
            if (sid, iid) not in table.entries:
                raise MissingRatio(sid, iid)
            values[(sid, iid)] = table.entries[(sid, iid)]
    n = len(indicator_ids)
    cx, cy, radius = WIDTH / 2, HEIGHT / 2 + 20, 210.0
    scale_max = (max(values.values()) if values else 1.0) * 1.1

    def point(i, r):
        ang = -math.pi / 2 + 2 * math.pi * i / n
        return cx + r * math.cos(ang), cy + r * math.sin(ang)

    out = _svg_open(title, note)
    if n:
        for frac in (0.25, 0.5, 0.75, 1.0):
            pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in (point(i, radius * frac) for i in range(n)))
            out.append(f'<polygon class="ring" points="{pts}" fill="none" stroke="#dddddd"/>')
        for i, iid in enumerate(indicator_ids):
            x, y = point(i, radius)
            lx, ly = point(i, radius + 22)
            out.append(f'<line class="axis" data-indicator="{_attr(iid)}" x1="{_num(cx)}" y1="{_num(cy)}" '
                       f'x2="{_num(x)}" y2="{_num(y)}" stroke="#999999"/>')
            out.append(f'<text x="{_num(lx)}" y="{_num(ly + 4)}" text-anchor="middle" font-size="12">'
                       f'{escape(iid)}</text>')
        if 1.0 <= scale_max:
            pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in (point(i, radius / scale_max) for i in range(n)))
            out.append(f'<polygon class="reference" points="{pts}" fill="none" stroke="#555555" '
                       f'stroke-dasharray="6,4"/>')
        for k, sid in enumerate(subjects):
            color = PALETTE[k % len(PALETTE)]
            pts = " ".join(
                f"{_num(x)},{_num(y)}"
                for x, y in (point(i, radius * values[(sid, iid)] / scale_max) for i, iid in enumerate(indicator_ids))
            )
            out.append(f'<polygon class="series" data-subject="{_attr(sid)}" points="{pts}" fill="{color}" '
                       f'fill-opacity="0.15" stroke="{color}" stroke-width="2"/>')
    else:
        out.append(f'<text x="{_num(cx)}" y="{_num(cy)}" text-anchor="middle" font-size="14">'
                   f'no indicator is shared by every subject</text>')
    for k, sid in enumerate(subjects):
        y = 60 + 18 * k
        out.append(f'<rect x="20.00" y="{_num(y - 10)}" width="12.00" height="12.00" '
                   f'fill="{PALETTE[k % len(PALETTE)]}"/>')
        out.append(f'<text x="38.00" y="{_num(y)}" font-size="12">{escape(sid)}</text>')
    out.append(f'<text x="{_num(WIDTH - 20)}" y="{_num(HEIGHT - 16)}" text-anchor="end" font-size="11">'
               f'radial scale 0 to {format_sig(scale_max, 3)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
