"""RUDY congestion estimation.

Each net with at least two placed pins defines a box (the pin bounding box)
carrying a uniform wire density d_n = WA_n / NA_n, with WA_n = HPWL_n * w_wire
and NA_n = max(box area, w_wire^2) to keep degenerate (collinear pin) boxes
finite. A G*G grid over the placement bounding box accumulates the density of
every net box containing the cell center; the scalar congestion figure is an
aggregate (max by default) over cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .errors import PlacementError
from .netlist import Net
from .placement import PlacementState

DEFAULT_W_WIRE = 0.5
DEFAULT_GRID = 32


@dataclass(frozen=True)
class RudyConfig:
    """Knobs for the congestion estimate: wire width, resolution, aggregate."""

    w_wire: float = DEFAULT_W_WIRE
    grid: int = DEFAULT_GRID
    agg: str = "max"  # or "mean"

    def __post_init__(self):
        if not self.w_wire > 0:
            raise ValueError(f"w_wire must be positive, got {self.w_wire}")
        if self.grid < 1:
            raise ValueError(f"grid must be >= 1, got {self.grid}")
        if self.agg not in ("max", "mean"):
            raise ValueError(f"agg must be 'max' or 'mean', got {self.agg!r}")


class NetBox(NamedTuple):
    x: float
    y: float
    w: float
    h: float
    wa: float
    na: float
    d: float


@dataclass(frozen=True)
class RudyGrid:
    cells: np.ndarray  # (G, G), cells[iy, ix], rows bottom-up
    extent: tuple[float, float, float, float]
    G: int


def net_box(s: PlacementState, n: Net, w_wire: float = DEFAULT_W_WIRE) -> NetBox:
    """Net bounding box and wire density for a net with >= 2 placed pins."""
    placed = [m for m in n.members if s.is_placed(m)]
    if len(placed) < 2:
        raise PlacementError(f"net {n.id} has fewer than 2 placed members")
    cx = [s.center(m)[0] for m in placed]
    cy = [s.center(m)[1] for m in placed]
    x, y = min(cx), min(cy)
    w, h = max(cx) - x, max(cy) - y
    wa = (w + h) * w_wire
    na = max(w * h, w_wire * w_wire)
    return NetBox(x=x, y=y, w=w, h=h, wa=wa, na=na, d=wa / na)


def indicator(nb: NetBox, x: float, y: float) -> int:
    """1 iff (x, y) lies in the closed net box."""
    return int(nb.x <= x <= nb.x + nb.w and nb.y <= y <= nb.y + nb.h)


def _qualifying(s: PlacementState, w_wire: float):
    """Bounds and densities of nets with >= 2 placed pins, as arrays."""
    idx = np.flatnonzero(s.net_count >= 2)
    if len(idx) == 0:
        return None
    nx0 = s.net_minx[idx]
    ny0 = s.net_miny[idx]
    nx1 = s.net_maxx[idx]
    ny1 = s.net_maxy[idx]
    span = s.net_hp[idx]
    wa = span * w_wire
    na = np.maximum((nx1 - nx0) * (ny1 - ny0), w_wire * w_wire)
    return nx0, ny0, nx1, ny1, wa / na


def rudy_grid(s: PlacementState, G: int = DEFAULT_GRID, w_wire: float = DEFAULT_W_WIRE) -> RudyGrid:
    """Density grid over the current placement bounding box."""
    if not s.placed:
        raise PlacementError("rudy_grid of an empty placement")
    if G < 1:
        raise ValueError(f"grid resolution must be >= 1, got {G}")
    grid = np.zeros((G, G))
    q = _qualifying(s, w_wire)
    if q is not None:
        K.rudy_fill(grid, s.bx0, s.by0, s.bx1, s.by1, *q)
    return RudyGrid(cells=grid, extent=(s.bx0, s.by0, s.bx1, s.by1), G=G)


def rudy_scalar(s: PlacementState, cfg: RudyConfig = RudyConfig()) -> float:
    """Scalar congestion figure: aggregate of the density grid.

    This is the value compared against congestion thresholds and reported in
    benchmarks. Returns 0 when no net has two placed pins.
    """
    if not s.placed:
        raise PlacementError("rudy_scalar of an empty placement")
    q = _qualifying(s, cfg.w_wire)
    if q is None:
        return 0.0
    grid = np.zeros((cfg.grid, cfg.grid))
    K.rudy_fill(grid, s.bx0, s.by0, s.bx1, s.by1, *q)
    return float(grid.max() if cfg.agg == "max" else grid.mean())


def export_rudy_csv(rg: RudyGrid, path) -> None:
    """Write the grid as CSV: G rows, bottom row first, full float precision."""
    with open(path, "w") as f:
        for iy in range(rg.G):
            f.write(",".join(repr(float(v)) for v in rg.cells[iy]))
            f.write("\n")
