"""SVG rendering of a planar star of empty triangles."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .enumeration import deg_k_max, star
from .geom import GeometryError, as_point_set

SIZE = 800.0
MARGIN = 0.05


def _fmt(x: float) -> str:
    return repr(float(x))


def render_star_svg(X, k: int, witness=None, title: str | None = None) -> str:
    """Points, the base tuple and every triangle of its star.

    The witness defaults to the smallest k-tuple of maximal degree.
    """
    ps = as_point_set(X)
    if ps.dim != 2:
        raise GeometryError("star rendering needs planar points")
    if witness is None:
        degree, witness = deg_k_max(ps, k)
    triangles = star(witness, ps)
    degree = len(triangles)

    pts = ps.coords
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    inner = SIZE * (1.0 - 2.0 * MARGIN)
    scale = inner / span
    # center the smaller extent inside the square viewport
    offset = SIZE * MARGIN + 0.5 * (inner - (hi - lo) * scale)
    screen = np.empty_like(pts)
    screen[:, 0] = offset[0] + (pts[:, 0] - lo[0]) * scale
    screen[:, 1] = SIZE - (offset[1] + (pts[:, 1] - lo[1]) * scale)

    def xy(i: int) -> str:
        return f"{_fmt(screen[i, 0])},{_fmt(screen[i, 1])}"

    caption = f"n={ps.n} k={k} degree={degree}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(SIZE)}" height="{int(SIZE)}" '
        f'viewBox="0 0 {int(SIZE)} {int(SIZE)}">',
        f"<title>{escape(title or caption)}</title>",
        '<rect x="0" y="0" width="800" height="800" fill="white"/>',
        '<g id="star">',
    ]
    for tri in triangles:
        pts_attr = " ".join(xy(i) for i in tri)
        out.append(f'<polygon class="spike" data-vertices="{" ".join(map(str, tri))}" '
                   f'points="{pts_attr}" fill="#4a90d9" fill-opacity="0.15" '
                   f'stroke="#1f4e8c" stroke-width="1"/>')
    out.append("</g>")
    if len(witness) == 2:
        a, b = witness
        out.append(f'<line class="base" x1="{_fmt(screen[a, 0])}" y1="{_fmt(screen[a, 1])}" '
                   f'x2="{_fmt(screen[b, 0])}" y2="{_fmt(screen[b, 1])}" '
                   f'stroke="#c0392b" stroke-width="3"/>')
    out.append('<g id="points">')
    base = set(witness)
    for i in range(ps.n):
        if i in base:
            continue
        out.append(f'<circle class="point" data-index="{i}" cx="{_fmt(screen[i, 0])}" '
                   f'cy="{_fmt(screen[i, 1])}" r="3" fill="black"/>')
    for i in witness:
        out.append(f'<circle class="witness" data-index="{i}" cx="{_fmt(screen[i, 0])}" '
                   f'cy="{_fmt(screen[i, 1])}" r="6" fill="#c0392b"/>')
    out.append("</g>")
    out.append(f'<text class="caption" x="{_fmt(SIZE * MARGIN)}" y="{_fmt(SIZE - SIZE * MARGIN / 3)}" '
               f'font-family="sans-serif" font-size="16">{escape(caption)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
