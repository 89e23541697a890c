"""Tiny SVG writers for trajectory norms and sweep grids."""

import math
from xml.sax.saxutils import escape

PANEL_W, PANEL_H, PAD = 260, 160, 34


def _header(width, height):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def norm_panels(panels, columns=4):
    """One panel per ``(title, norms)``, norms drawn on a log10 axis."""
    rows = max(1, math.ceil(len(panels) / columns))
    cols = min(columns, max(1, len(panels)))
    out = _header(cols * PANEL_W, rows * PANEL_H)
    for n, (title, norms) in enumerate(panels):
        ox = (n % columns) * PANEL_W
        oy = (n // columns) * PANEL_H
        w, h = PANEL_W - 2 * PAD, PANEL_H - 2 * PAD
        logs = [math.log10(max(v, 1e-300)) for v in norms]
        lo, hi = min(logs), max(logs)
        if hi - lo < 1e-12:
            lo, hi = lo - 1, hi + 1
        K = max(1, len(logs) - 1)
        pts = " ".join(
            f"{ox + PAD + w * k / K:.2f},{oy + PAD + h * (1 - (v - lo) / (hi - lo)):.2f}" for k, v in enumerate(logs)
        )
        out.append(f'<rect x="{ox + PAD}" y="{oy + PAD}" width="{w}" height="{h}" fill="none" stroke="#888"/>')
        out.append(f'<polyline points="{pts}" fill="none" stroke="#1f5fbf" stroke-width="1"/>')
        out.append(f'<text x="{ox + PAD}" y="{oy + PAD - 8}">{escape(str(title))}</text>')
        out.append(f'<text x="{ox + 2}" y="{oy + PAD + 8}">1e{hi:.0f}</text>')
        out.append(f'<text x="{ox + 2}" y="{oy + PAD + h}">1e{lo:.0f}</text>')
        out.append(f'<text x="{ox + PAD + w - 20}" y="{oy + PAD + h + 14}">k={K}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_grid(result):
    """Feasible (tau, L) points; red where the tau is already feasible at L=1."""
    taus = [s.tau for s in result.summary]
    lemma = {s.tau: s.lemma_feasible for s in result.summary}
    step = 24
    width = PAD * 2 + step * (len(taus) + 1)
    height = PAD * 2 + step * (result.L_max + 1)
    out = _header(width, height)
    for i, tau in enumerate(taus):
        x = PAD + step * (i + 1)
        out.append(f'<text x="{x - 4}" y="{height - 8}">{tau}</text>')
    for L in range(1, result.L_max + 1):
        y = height - PAD - step * L
        out.append(f'<text x="6" y="{y + 4}">{L}</text>')
    for r in result.rows:
        if r.status != "feasible":
            continue
        x = PAD + step * (taus.index(r.tau) + 1)
        y = height - PAD - step * r.L
        color = "#d62728" if lemma[r.tau] else "#1f5fbf"
        out.append(f'<circle cx="{x}" cy="{y}" r="6" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
