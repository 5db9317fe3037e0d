"""Minimal SVG rendering of an orbit-centre curve, no plotting library needed."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

SIZE = 480
MARGIN = 40
N_ARROWS = 12


def _fmt(v):
    return format(float(v), ".3f")


def orbit_svg(xc, yc, title: str = "", metadata: str = "") -> str:
    """(x_c, y_c) polyline on the [-1, 1]^2 box with direction arrowheads."""
    xc = np.asarray(xc, dtype=float)
    yc = np.asarray(yc, dtype=float)
    if xc.shape != yc.shape or xc.ndim != 1 or xc.size < 2:
        raise ValueError("need two equal-length 1-d coordinate arrays with at least two points")
    scale = (SIZE - 2 * MARGIN) / 2.0
    px = MARGIN + (xc + 1.0) * scale
    py = MARGIN + (1.0 - yc) * scale  # svg y grows downward

    points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
    ]
    if title:
        lines.append(f"<title>{escape(title)}</title>")
    if metadata:
        lines.append(f"<desc>{escape(metadata)}</desc>")
    lines += [
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="8" refY="5" markerWidth="7" markerHeight="7" orient="auto">',
        '<path d="M0,0 L10,5 L0,10 z" fill="#c0392b"/>',
        "</marker>",
        "</defs>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE - 2 * MARGIN}" height="{SIZE - 2 * MARGIN}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
        f'<line x1="{MARGIN}" y1="{SIZE / 2:g}" x2="{SIZE - MARGIN}" y2="{SIZE / 2:g}" stroke="#ccc"/>',
        f'<line x1="{SIZE / 2:g}" y1="{MARGIN}" x2="{SIZE / 2:g}" y2="{SIZE - MARGIN}" stroke="#ccc"/>',
        f'<polyline fill="none" stroke="#1f4e79" stroke-width="1.2" points="{points}"/>',
    ]
    # short segments along the path carry the arrowheads
    n = xc.size
    for k in range(1, N_ARROWS + 1):
        i = min(k * (n - 1) // (N_ARROWS + 1), n - 2)
        if px[i] == px[i + 1] and py[i] == py[i + 1]:
            continue
        lines.append(
            f'<line x1="{_fmt(px[i])}" y1="{_fmt(py[i])}" x2="{_fmt(px[i + 1])}" y2="{_fmt(py[i + 1])}" '
            'stroke="none" marker-end="url(#arrow)"/>'
        )
    lines.append(
        f'<circle cx="{_fmt(px[0])}" cy="{_fmt(py[0])}" r="3" fill="#2e7d32"/>'
    )
    lines += [
        f'<text x="{SIZE / 2:g}" y="{SIZE - 12}" text-anchor="middle" font-size="13">x_c</text>',
        f'<text x="14" y="{SIZE / 2:g}" text-anchor="middle" font-size="13">y_c</text>',
        "</svg>",
        "",
    ]
    return "\n".join(lines)


def write_orbit_svg(path, xc, yc, title: str = "", metadata: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(orbit_svg(xc, yc, title, metadata))
