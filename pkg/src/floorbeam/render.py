"""Deterministic SVG rendering of floorplans.

Output is plain text built in a fixed order with fixed number formatting,
so identical inputs produce identical bytes (golden-file friendly). The
y axis is flipped into screen coordinates; an optional RUDY heat overlay
and net flylines can be layered over the module rectangles.
"""

from __future__ import annotations

from .congestion import RudyGrid
from .errors import FloorbeamError
from .netlist import Circuit

_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
)


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_svg(
    circuit: Circuit,
    coords: dict[int, tuple[float, float]],
    scale: float = 8.0,
    show_nets: bool = False,
    rudy: RudyGrid | None = None,
    margin: float = 10.0,
) -> str:
    """Render placed modules (and optional overlays) as an SVG string."""
    if not coords:
        raise FloorbeamError("nothing to render: empty floorplan")
    for mid in coords:
        if not 0 <= mid < circuit.m:
            raise FloorbeamError(f"floorplan module {mid} missing from circuit")
    if not scale > 0:
        raise FloorbeamError(f"scale must be positive, got {scale}")

    ids = sorted(coords)
    x0 = min(coords[i][0] for i in ids)
    y0 = min(coords[i][1] for i in ids)
    x1 = max(coords[i][0] + circuit.modules[i].w for i in ids)
    y1 = max(coords[i][1] + circuit.modules[i].h for i in ids)
    width = (x1 - x0) * scale + 2 * margin
    height = (y1 - y0) * scale + 2 * margin

    def sx(x: float) -> float:
        return (x - x0) * scale + margin

    def sy(y: float) -> float:
        # SVG y grows downward.
        return (y1 - y) * scale + margin

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>',
    ]

    if rudy is not None:
        ex0, ey0, ex1, ey1 = rudy.extent
        cw = (ex1 - ex0) / rudy.G
        ch = (ey1 - ey0) / rudy.G
        peak = float(rudy.cells.max())
        if peak > 0:
            for iy in range(rudy.G):
                for ix in range(rudy.G):
                    v = float(rudy.cells[iy, ix])
                    if v <= 0:
                        continue
                    op = 0.6 * v / peak
                    cx = ex0 + ix * cw
                    cy = ey0 + iy * ch
                    parts.append(
                        f'<rect x="{_f(sx(cx))}" y="{_f(sy(cy + ch))}" '
                        f'width="{_f(cw * scale)}" height="{_f(ch * scale)}" '
                        f'fill="#d62728" fill-opacity="{op:.3f}"/>'
                    )

    for i in ids:
        mod = circuit.modules[i]
        x, y = coords[i]
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<rect class="module" x="{_f(sx(x))}" y="{_f(sy(y + mod.h))}" '
            f'width="{_f(mod.w * scale)}" height="{_f(mod.h * scale)}" '
            f'fill="{color}" fill-opacity="0.55" stroke="#222222" stroke-width="1"/>'
        )

    if show_nets:
        for net in circuit.nets:
            placed = [m for m in net.members if m in coords]
            if len(placed) < 2:
                continue
            pts = []
            for m in placed:
                mod = circuit.modules[m]
                cx, cy = coords[m][0] + 0.5 * mod.w, coords[m][1] + 0.5 * mod.h
                pts.append(f"{_f(sx(cx))},{_f(sy(cy))}")
            parts.append(
                f'<polyline points="{" ".join(pts)}" fill="none" '
                f'stroke="#333333" stroke-width="1" stroke-opacity="0.7"/>'
            )

    for i in ids:
        mod = circuit.modules[i]
        x, y = coords[i]
        cx = sx(x + 0.5 * mod.w)
        cy = sy(y + 0.5 * mod.h)
        size = max(8.0, 0.25 * scale * min(mod.w, mod.h))
        parts.append(
            f'<text x="{_f(cx)}" y="{_f(cy)}" font-size="{_f(size)}" '
            f'font-family="sans-serif" text-anchor="middle" '
            f'dominant-baseline="middle" fill="#111111">{i}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
