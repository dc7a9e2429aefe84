"""Partial floorplan state with incremental dead-space and HPWL tracking.

PlacementState is an immutable value: place() returns a new state and never
mutates its input, so a search tree can hold thousands of sibling states
that share the underlying Circuit. Incremental metric updates are exact
against from-scratch recomputation to double-precision roundoff; tests pin
this at 1e-9 relative.

Definitions:
  DS_t   = 1 - (sum of placed areas) / (bounding-box area); 0 for one module.
  HPWL_t = sum over nets with >= 2 placed members of the half perimeter of
           the net's pin bounding box; pins sit at module centers.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .errors import PlacementError
from .netlist import Circuit, Module


class StepDelta(NamedTuple):
    d_ds: float
    d_hpwl: float  # raw length units, not normalized


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class PlacementState:
    """Immutable partial floorplan.

    Fields of note: `placed` is the placement order, `pxs/pys/pws/phs` are
    the placed-rectangle arrays consumed by the geometry kernels, and the
    `net_*` arrays carry per-net pin bounding boxes (+-inf sentinels while a
    net has no placed pins) plus each net's current HPWL contribution.
    """

    __slots__ = (
        "circuit", "placed", "xs", "ys", "pxs", "pys", "pws", "phs",
        "bx0", "by0", "bx1", "by1", "sum_area", "ds", "hpwl",
        "net_minx", "net_maxx", "net_miny", "net_maxy", "net_hp", "net_count",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            object.__setattr__(self, name, kw[name])

    def __setattr__(self, name, value):
        raise AttributeError("PlacementState is immutable")

    @classmethod
    def empty(cls, circuit: Circuit) -> "PlacementState":
        m = circuit.m
        n = len(circuit.nets)
        nan = np.full(m, np.nan)
        return cls(
            circuit=circuit,
            placed=(),
            xs=_frozen(nan.copy()),
            ys=_frozen(nan),
            pxs=_frozen(np.empty(0)),
            pys=_frozen(np.empty(0)),
            pws=_frozen(np.empty(0)),
            phs=_frozen(np.empty(0)),
            bx0=np.inf, by0=np.inf, bx1=-np.inf, by1=-np.inf,
            sum_area=0.0, ds=0.0, hpwl=0.0,
            net_minx=_frozen(np.full(n, np.inf)),
            net_maxx=_frozen(np.full(n, -np.inf)),
            net_miny=_frozen(np.full(n, np.inf)),
            net_maxy=_frozen(np.full(n, -np.inf)),
            net_hp=_frozen(np.zeros(n)),
            net_count=_frozen(np.zeros(n, dtype=np.int64)),
        )

    @property
    def coords(self) -> dict[int, tuple[float, float]]:
        return {i: (float(self.xs[i]), float(self.ys[i])) for i in self.placed}

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        if not self.placed:
            raise PlacementError("empty placement has no bounding box")
        return (self.bx0, self.by0, self.bx1, self.by1)

    def is_placed(self, mid: int) -> bool:
        return bool(np.isfinite(self.xs[mid]))

    def center(self, mid: int) -> tuple[float, float]:
        mod = self.circuit.modules[mid]
        return (float(self.xs[mid]) + 0.5 * mod.w, float(self.ys[mid]) + 0.5 * mod.h)

    def place(self, module: Module | int, x: float, y: float) -> tuple["PlacementState", StepDelta]:
        """Place a module at bottom-left (x, y); returns (new state, deltas).

        Raises PlacementError for unknown ids, double placement, or overlap
        with any placed module (open-interior test: abutment is legal).
        """
        c = self.circuit
        mid = module.id if isinstance(module, Module) else int(module)
        if not 0 <= mid < c.m:
            raise PlacementError(f"unknown module id {mid}")
        mod = c.modules[mid]
        if mid in set(self.placed):
            raise PlacementError(f"module {mid} is already placed")
        x = float(x)
        y = float(y)
        if K.overlap_any(x, y, mod.w, mod.h, self.pxs, self.pys, self.pws, self.phs):
            raise PlacementError(
                f"placing module {mid} at ({x}, {y}) overlaps an existing module"
            )

        xs = self.xs.copy()
        ys = self.ys.copy()
        xs[mid] = x
        ys[mid] = y
        bx0 = min(self.bx0, x)
        by0 = min(self.by0, y)
        bx1 = max(self.bx1, x + mod.w)
        by1 = max(self.by1, y + mod.h)
        sum_area = self.sum_area + mod.area
        ds = 1.0 - sum_area / ((bx1 - bx0) * (by1 - by0))
        d_ds = ds - self.ds

        touched = c.module_nets[mid]
        if len(touched):
            net_minx = self.net_minx.copy()
            net_maxx = self.net_maxx.copy()
            net_miny = self.net_miny.copy()
            net_maxy = self.net_maxy.copy()
            net_hp = self.net_hp.copy()
            net_count = self.net_count.copy()
            px = x + 0.5 * mod.w
            py = y + 0.5 * mod.h
            d_hpwl = 0.0
            for r in touched:
                a = min(net_minx[r], px)
                b = max(net_maxx[r], px)
                lo = min(net_miny[r], py)
                hi = max(net_maxy[r], py)
                net_minx[r] = a
                net_maxx[r] = b
                net_miny[r] = lo
                net_maxy[r] = hi
                net_count[r] += 1
                span = (b - a) + (hi - lo)
                d_hpwl += span - net_hp[r]
                net_hp[r] = span
            hpwl = self.hpwl + d_hpwl
            nets = (
                _frozen(net_minx), _frozen(net_maxx), _frozen(net_miny),
                _frozen(net_maxy), _frozen(net_hp), _frozen(net_count),
            )
        else:
            d_hpwl = 0.0
            hpwl = self.hpwl
            nets = (
                self.net_minx, self.net_maxx, self.net_miny,
                self.net_maxy, self.net_hp, self.net_count,
            )

        new = PlacementState(
            circuit=c,
            placed=self.placed + (mid,),
            xs=_frozen(xs),
            ys=_frozen(ys),
            pxs=_frozen(np.append(self.pxs, x)),
            pys=_frozen(np.append(self.pys, y)),
            pws=_frozen(np.append(self.pws, mod.w)),
            phs=_frozen(np.append(self.phs, mod.h)),
            bx0=bx0, by0=by0, bx1=bx1, by1=by1,
            sum_area=sum_area, ds=ds, hpwl=hpwl,
            net_minx=nets[0], net_maxx=nets[1], net_miny=nets[2],
            net_maxy=nets[3], net_hp=nets[4], net_count=nets[5],
        )
        return new, StepDelta(d_ds=d_ds, d_hpwl=d_hpwl)

    @classmethod
    def from_coords(cls, circuit: Circuit, coords: dict[int, tuple[float, float]]) -> "PlacementState":
        """Build a state by replaying place() over the given coordinates.

        Modules are placed in ascending id order; overlaps raise.
        """
        s = cls.empty(circuit)
        for mid in sorted(coords):
            x, y = coords[mid]
            s, _ = s.place(mid, x, y)
        return s


def place(s: PlacementState, module: Module | int, x: float, y: float):
    return s.place(module, x, y)


def dead_space(s: PlacementState) -> float:
    if not s.placed:
        raise PlacementError("dead_space of an empty placement")
    return s.ds


def hpwl(s: PlacementState) -> float:
    return s.hpwl


def aspect_ratio(s: PlacementState) -> float:
    if not s.placed:
        raise PlacementError("aspect_ratio of an empty placement")
    return (s.bx1 - s.bx0) / (s.by1 - s.by0)
