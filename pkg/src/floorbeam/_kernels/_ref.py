"""Reference kernels (pure numpy).

These are the hot inner-loop primitives of the search and annealing code.
`_accel` implements the same signatures in Cython; the two must agree to
floating-point roundoff (test_kernels fuzzes both). All float arrays are
C-contiguous float64, index arrays int64.

Geometry convention: rectangles are (x, y, w, h) with bottom-left origin.
Overlap is open-interior: shared edges are legal.
"""

from __future__ import annotations

import numpy as np


def overlap_any(x, y, w, h, pxs, pys, pws, phs) -> bool:
    """True if rect (x,y,w,h) strictly overlaps any of the placed rects."""
    if len(pxs) == 0:
        return False
    ox = (x < pxs + pws) & (pxs < x + w)
    oy = (y < pys + phs) & (pys < y + h)
    return bool(np.any(ox & oy))


def legal_mask(cxs, cys, w, h, pxs, pys, pws, phs):
    """Per-candidate legality of placing a w*h rect at (cxs[k], cys[k])."""
    if len(pxs) == 0:
        return np.ones(len(cxs), dtype=np.uint8)
    ox = (cxs[:, None] < (pxs + pws)[None, :]) & (pxs[None, :] < (cxs + w)[:, None])
    oy = (cys[:, None] < (pys + phs)[None, :]) & (pys[None, :] < (cys + h)[:, None])
    return (~np.any(ox & oy, axis=1)).astype(np.uint8)


def corner_candidates(pxs, pys, pws, phs, w, h):
    """Corner-flush candidate positions for a new w*h module.

    For every placed rect, the 8 positions placing the new module flush
    against its four sides, aligned to either end of each side. Output is
    deduplicated, sorted by (x, y), and filtered to overlap-free positions.
    """
    xr = pxs + pws
    yt = pys + phs
    xl = pxs - w
    yb = pys - h
    xrw = xr - w
    yth = yt - h
    cxs = np.concatenate([xr, xr, xl, xl, pxs, xrw, pxs, xrw])
    cys = np.concatenate([pys, yth, pys, yth, yt, yt, yb, yb])
    order = np.lexsort((cys, cxs))
    cxs = cxs[order]
    cys = cys[order]
    if len(cxs) > 1:
        keep = np.empty(len(cxs), dtype=bool)
        keep[0] = True
        keep[1:] = (cxs[1:] != cxs[:-1]) | (cys[1:] != cys[:-1])
        cxs = cxs[keep]
        cys = cys[keep]
    ok = legal_mask(cxs, cys, w, h, pxs, pys, pws, phs).astype(bool)
    return np.ascontiguousarray(cxs[ok]), np.ascontiguousarray(cys[ok])


def score_deltas(
    cxs, cys, w, h, area, sum_area, bx0, by0, bx1, by1, ds_old,
    n_minx, n_maxx, n_miny, n_maxy, n_oldhp,
):
    """DS and raw HPWL deltas for placing a w*h module at each candidate.

    The n_* arrays describe only the nets touching the module being placed:
    current pin bounding boxes (+-inf sentinels when the net has no placed
    pins) and the net's current HPWL contribution. Returns (d_ds, d_hpwl).
    """
    nbx0 = np.minimum(bx0, cxs)
    nby0 = np.minimum(by0, cys)
    nbx1 = np.maximum(bx1, cxs + w)
    nby1 = np.maximum(by1, cys + h)
    tot = (nbx1 - nbx0) * (nby1 - nby0)
    d_ds = (1.0 - (sum_area + area) / tot) - ds_old
    if len(n_minx) == 0:
        return d_ds, np.zeros(len(cxs))
    px = (cxs + 0.5 * w)[:, None]
    py = (cys + 0.5 * h)[:, None]
    span = (
        np.maximum(n_maxx[None, :], px)
        - np.minimum(n_minx[None, :], px)
        + np.maximum(n_maxy[None, :], py)
        - np.minimum(n_miny[None, :], py)
    )
    d_hpwl = (span - n_oldhp[None, :]).sum(axis=1)
    return d_ds, d_hpwl


def rudy_fill(grid, ex0, ey0, ex1, ey1, nx0, ny0, nx1, ny1, dens) -> None:
    """Accumulate per-net wire density into a G*G grid over the extent.

    grid[iy, ix] gains dens[r] when the cell-center point lies inside net
    r's closed bounding box. Rows run bottom-up (iy indexes y).
    """
    G = grid.shape[0]
    cw = (ex1 - ex0) / G
    ch = (ey1 - ey0) / G
    cx = ex0 + (np.arange(G) + 0.5) * cw
    cy = ey0 + (np.arange(G) + 0.5) * ch
    for r in range(len(nx0)):
        mx = (cx >= nx0[r]) & (cx <= nx1[r])
        my = (cy >= ny0[r]) & (cy <= ny1[r])
        grid += dens[r] * (my[:, None] & mx[None, :])


def hpwl_total(cx, cy, net_ptr, net_members) -> float:
    """Total half-perimeter wirelength over all nets, all pins placed."""
    if len(net_ptr) <= 1 or len(net_members) == 0:
        return 0.0
    px = cx[net_members]
    py = cy[net_members]
    starts = net_ptr[:-1]
    sx = np.minimum.reduceat(px, starts)
    lx = np.maximum.reduceat(px, starts)
    sy = np.minimum.reduceat(py, starts)
    ly = np.maximum.reduceat(py, starts)
    return float(np.sum(lx - sx) + np.sum(ly - sy))


def seqpair_positions(gp, gm, ws, hs):
    """Decode a sequence pair into bottom-left coordinates.

    Pair semantics used throughout this package: module a earlier than b in
    both permutations puts a left of b; earlier in gamma_plus but later in
    gamma_minus puts a below b. Longest-path evaluation, O(m^2).
    """
    m = len(gp)
    pos_minus = [0] * m
    gml = [int(v) for v in gm]
    for idx, mod in enumerate(gml):
        pos_minus[mod] = idx
    wl = [float(v) for v in ws]
    hl = [float(v) for v in hs]
    gpl = [int(v) for v in gp]
    xs = [0.0] * m
    ys = [0.0] * m
    for bi in range(m):
        b = gpl[bi]
        pb = pos_minus[b]
        xb = xs[b]
        yb = ys[b]
        for ai in range(bi):
            a = gpl[ai]
            if pos_minus[a] < pb:
                va = xs[a] + wl[a]
                if va > xb:
                    xb = va
            else:
                va = ys[a] + hl[a]
                if va > yb:
                    yb = va
        xs[b] = xb
        ys[b] = yb
    return np.array(xs), np.array(ys)


def sa_eval(gp, gm, ws, hs, net_ptr, net_members):
    """Decode a sequence pair and evaluate bbox + HPWL in one pass.

    Returns (xs, ys, bbox_w, bbox_h, hpwl). This is the annealer's inner
    loop; the Cython version avoids all intermediate allocations.
    """
    xs, ys = seqpair_positions(gp, gm, ws, hs)
    right = xs + ws
    top = ys + hs
    bw = float(right.max() - xs.min())
    bh = float(top.max() - ys.min())
    hp = hpwl_total(xs + 0.5 * ws, ys + 0.5 * hs, net_ptr, net_members)
    return xs, ys, bw, bh, hp
