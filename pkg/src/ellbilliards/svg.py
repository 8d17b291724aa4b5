"""Static SVG scene of a billiard and its Poncelet grid."""

from __future__ import annotations

import numpy as np

from .billiard import PonceletGrid, is_at_infinity
from .confocal import ConfocalEllipse

MARGIN = 0.05


def _num(x) -> str:
    return repr(round(float(x), 12) + 0.0)


def _ellipse_path(ell: ConfocalEllipse, cls: str) -> str:
    a, b = _num(ell.a_e), _num(ell.b_e)
    return (
        f'<path class="{cls}" d="M {a} 0 A {a} {b} 0 1 0 -{a} 0 '
        f'A {a} {b} 0 1 0 {a} 0 Z"/>'
    )


def _clip_ray(p, direction, half_w, half_h):
    """Endpoint of the ray ``p + s*direction`` (s >= 0) on the view box."""
    limits = []
    for k, half in ((0, half_w), (1, half_h)):
        if direction[k] > 0:
            limits.append((half - p[k]) / direction[k])
        elif direction[k] < 0:
            limits.append((-half - p[k]) / direction[k])
    s = max(min(limits), 0.0) if limits else 0.0
    return p + s * np.asarray(direction)


def grid_svg(grid: PonceletGrid) -> str:
    bil = grid.base
    fam = bil.fam
    finite = [e for e in grid.grid_ellipses if not e.at_infinity]
    outer = max([bil.ellipse] + finite, key=lambda e: e.a_e)
    half_w = outer.a_e * (1 + MARGIN)
    half_h = outer.b_e * (1 + MARGIN)
    N = bil.count

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_num(-half_w)} {_num(-half_h)} {_num(2 * half_w)} {_num(2 * half_h)}">',
        "<style>path, polygon, line { fill: none; vector-effect: non-scaling-stroke; }"
        " .caustic { stroke: blue; } .ellipse { stroke: red; } .billiard { stroke: black; }"
        " .grid-ellipse { stroke: green; stroke-dasharray: 4 2; } .ray { stroke: gray; }"
        " .grid-point { fill: gray; } .vertex { fill: red; } .contact { fill: blue; }</style>",
        '<g transform="scale(1,-1)">',
        _ellipse_path(fam.caustic, "caustic"),
        _ellipse_path(bil.ellipse, "ellipse"),
    ]
    lines.extend(_ellipse_path(e, "grid-ellipse") for e in finite)
    pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in bil.vertices)
    lines.append(f'<polygon class="billiard" points="{pts}"/>')

    r = 0.01 * max(half_w, half_h)
    for (i, j), p in sorted(grid.grid_points.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if is_at_infinity(p):
            # the parallel sides meet at infinity; draw the side as a clipped ray
            base = bil.vertices[(i + (j + 1) // 2) % N]
            end = _clip_ray(base, p.direction, half_w, half_h)
            lines.append(
                f'<line class="ray" x1="{_num(base[0])}" y1="{_num(base[1])}" '
                f'x2="{_num(end[0])}" y2="{_num(end[1])}"/>'
            )
        else:
            lines.append(f'<circle class="grid-point" cx="{_num(p[0])}" cy="{_num(p[1])}" r="{_num(r)}"/>')
    for cls, arr in (("vertex", bil.vertices), ("contact", bil.contacts)):
        lines.extend(f'<circle class="{cls}" cx="{_num(x)}" cy="{_num(y)}" r="{_num(r)}"/>' for x, y in arr)
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)
