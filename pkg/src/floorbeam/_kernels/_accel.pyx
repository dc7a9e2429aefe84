# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Must agree with _ref (the numpy reference) to float
roundoff; test_kernels fuzzes both backends against each other. Keep the
arithmetic expressions in the same order as _ref so results stay aligned."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def overlap_any(double x, double y, double w, double h,
                const double[::1] pxs, const double[::1] pys, const double[::1] pws, const double[::1] phs):
    cdef Py_ssize_t i, n = pxs.shape[0]
    for i in range(n):
        if x < pxs[i] + pws[i] and pxs[i] < x + w \
                and y < pys[i] + phs[i] and pys[i] < y + h:
            return True
    return False


def legal_mask(const double[::1] cxs, const double[::1] cys, double w, double h,
               const double[::1] pxs, const double[::1] pys, const double[::1] pws, const double[::1] phs):
    cdef Py_ssize_t k, i, K = cxs.shape[0], P = pxs.shape[0]
    out = np.ones(K, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef double cx, cy
    for k in range(K):
        cx = cxs[k]
        cy = cys[k]
        for i in range(P):
            if cx < pxs[i] + pws[i] and pxs[i] < cx + w \
                    and cy < pys[i] + phs[i] and pys[i] < cy + h:
                o[k] = 0
                break
    return out


def corner_candidates(const double[::1] pxs, const double[::1] pys,
                      const double[::1] pws, const double[::1] phs,
                      double w, double h):
    cdef Py_ssize_t P = pxs.shape[0]
    cdef Py_ssize_t n = 8 * P
    cdef cnp.ndarray bx = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray by = np.empty(n, dtype=np.float64)
    cdef double[::1] gx = bx
    cdef double[::1] gy = by
    cdef Py_ssize_t i, j, k
    cdef double xr, yt
    for i in range(P):
        xr = pxs[i] + pws[i]
        yt = pys[i] + phs[i]
        j = 8 * i
        gx[j] = xr;          gy[j] = pys[i]
        gx[j + 1] = xr;      gy[j + 1] = yt - h
        gx[j + 2] = pxs[i] - w;  gy[j + 2] = pys[i]
        gx[j + 3] = pxs[i] - w;  gy[j + 3] = yt - h
        gx[j + 4] = pxs[i];  gy[j + 4] = yt
        gx[j + 5] = xr - w;  gy[j + 5] = yt
        gx[j + 6] = pxs[i];  gy[j + 6] = pys[i] - h
        gx[j + 7] = xr - w;  gy[j + 7] = pys[i] - h
    # insertion sort by (x, y); n is small (8 per placed module)
    cdef double tx, ty
    for i in range(1, n):
        tx = gx[i]
        ty = gy[i]
        j = i - 1
        while j >= 0 and (gx[j] > tx or (gx[j] == tx and gy[j] > ty)):
            gx[j + 1] = gx[j]
            gy[j + 1] = gy[j]
            j -= 1
        gx[j + 1] = tx
        gy[j + 1] = ty
    # dedup consecutive + legality filter in one pass
    cdef cnp.ndarray ox = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray oy = np.empty(n, dtype=np.float64)
    cdef double[::1] vx = ox
    cdef double[::1] vy = oy
    cdef Py_ssize_t kept = 0
    cdef bint legal
    cdef double cx, cy
    for i in range(n):
        if i > 0 and gx[i] == gx[i - 1] and gy[i] == gy[i - 1]:
            continue
        cx = gx[i]
        cy = gy[i]
        legal = True
        for k in range(P):
            if cx < pxs[k] + pws[k] and pxs[k] < cx + w \
                    and cy < pys[k] + phs[k] and pys[k] < cy + h:
                legal = False
                break
        if legal:
            vx[kept] = cx
            vy[kept] = cy
            kept += 1
    return ox[:kept].copy(), oy[:kept].copy()


def score_deltas(const double[::1] cxs, const double[::1] cys, double w, double h,
                 double area, double sum_area,
                 double bx0, double by0, double bx1, double by1, double ds_old,
                 const double[::1] n_minx, const double[::1] n_maxx,
                 const double[::1] n_miny, const double[::1] n_maxy, const double[::1] n_oldhp):
    cdef Py_ssize_t K = cxs.shape[0], R = n_minx.shape[0]
    cdef cnp.ndarray d_ds_arr = np.empty(K, dtype=np.float64)
    cdef cnp.ndarray d_hp_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] d_ds = d_ds_arr
    cdef double[::1] d_hp = d_hp_arr
    cdef Py_ssize_t k, r
    cdef double cx, cy, nbx0, nby0, nbx1, nby1, tot, px, py, acc, a, b, lo, hi
    for k in range(K):
        cx = cxs[k]
        cy = cys[k]
        nbx0 = bx0 if bx0 < cx else cx
        nby0 = by0 if by0 < cy else cy
        nbx1 = bx1 if bx1 > cx + w else cx + w
        nby1 = by1 if by1 > cy + h else cy + h
        tot = (nbx1 - nbx0) * (nby1 - nby0)
        d_ds[k] = (1.0 - (sum_area + area) / tot) - ds_old
        if R > 0:
            px = cx + 0.5 * w
            py = cy + 0.5 * h
            acc = 0.0
            for r in range(R):
                a = n_minx[r] if n_minx[r] < px else px
                b = n_maxx[r] if n_maxx[r] > px else px
                lo = n_miny[r] if n_miny[r] < py else py
                hi = n_maxy[r] if n_maxy[r] > py else py
                acc += (b - a) + (hi - lo) - n_oldhp[r]
            d_hp[k] = acc
    return d_ds_arr, d_hp_arr


def rudy_fill(double[:, ::1] grid, double ex0, double ey0, double ex1, double ey1,
              const double[::1] nx0, const double[::1] ny0, const double[::1] nx1, const double[::1] ny1,
              const double[::1] dens):
    cdef Py_ssize_t G = grid.shape[0], R = nx0.shape[0]
    cdef double cw = (ex1 - ex0) / G
    cdef double ch = (ey1 - ey0) / G
    cdef Py_ssize_t r, ix, iy
    cdef double cx, cy, d
    for r in range(R):
        d = dens[r]
        for iy in range(G):
            cy = ey0 + (iy + 0.5) * ch
            if cy < ny0[r] or cy > ny1[r]:
                continue
            for ix in range(G):
                cx = ex0 + (ix + 0.5) * cw
                if nx0[r] <= cx <= nx1[r]:
                    grid[iy, ix] += d


def hpwl_total(const double[::1] cx, const double[::1] cy,
               const cnp.int64_t[::1] net_ptr, const cnp.int64_t[::1] net_members):
    cdef Py_ssize_t n_nets = net_ptr.shape[0] - 1
    if n_nets <= 0 or net_members.shape[0] == 0:
        return 0.0
    cdef Py_ssize_t r, j
    cdef double sx, lx, sy, ly, v, total_x = 0.0, total_y = 0.0
    cdef cnp.int64_t start, stop
    for r in range(n_nets):
        start = net_ptr[r]
        stop = net_ptr[r + 1]
        sx = lx = cx[net_members[start]]
        sy = ly = cy[net_members[start]]
        for j in range(start + 1, stop):
            v = cx[net_members[j]]
            if v < sx: sx = v
            if v > lx: lx = v
            v = cy[net_members[j]]
            if v < sy: sy = v
            if v > ly: ly = v
        total_x += lx - sx
        total_y += ly - sy
    return total_x + total_y


def seqpair_positions(const cnp.int64_t[::1] gp, const cnp.int64_t[::1] gm,
                      const double[::1] ws, const double[::1] hs):
    cdef Py_ssize_t m = gp.shape[0]
    cdef cnp.ndarray xs_arr = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray ys_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] xs = xs_arr
    cdef double[::1] ys = ys_arr
    cdef cnp.ndarray pm_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] pos_minus = pm_arr
    cdef Py_ssize_t i, bi, ai
    cdef cnp.int64_t a, b
    cdef double va
    for i in range(m):
        pos_minus[gm[i]] = i
    for bi in range(m):
        b = gp[bi]
        for ai in range(bi):
            a = gp[ai]
            if pos_minus[a] < pos_minus[b]:
                va = xs[a] + ws[a]
                if va > xs[b]:
                    xs[b] = va
            else:
                va = ys[a] + hs[a]
                if va > ys[b]:
                    ys[b] = va
    return xs_arr, ys_arr


def sa_eval(const cnp.int64_t[::1] gp, const cnp.int64_t[::1] gm,
            const double[::1] ws, const double[::1] hs,
            const cnp.int64_t[::1] net_ptr, const cnp.int64_t[::1] net_members):
    cdef Py_ssize_t m = gp.shape[0]
    xs_arr, ys_arr = seqpair_positions(gp, gm, ws, hs)
    cdef double[::1] xs = xs_arr
    cdef double[::1] ys = ys_arr
    cdef Py_ssize_t i
    cdef double right_max = xs[0] + ws[0], x_min = xs[0]
    cdef double top_max = ys[0] + hs[0], y_min = ys[0]
    cdef double v
    for i in range(1, m):
        v = xs[i] + ws[i]
        if v > right_max: right_max = v
        if xs[i] < x_min: x_min = xs[i]
        v = ys[i] + hs[i]
        if v > top_max: top_max = v
        if ys[i] < y_min: y_min = ys[i]
    cdef Py_ssize_t n_nets = net_ptr.shape[0] - 1
    cdef double hp = 0.0
    cdef double sx, lx, sy, ly, c
    cdef Py_ssize_t r, j
    cdef cnp.int64_t start, stop, mem
    for r in range(n_nets):
        start = net_ptr[r]
        stop = net_ptr[r + 1]
        mem = net_members[start]
        sx = lx = xs[mem] + 0.5 * ws[mem]
        sy = ly = ys[mem] + 0.5 * hs[mem]
        for j in range(start + 1, stop):
            mem = net_members[j]
            c = xs[mem] + 0.5 * ws[mem]
            if c < sx: sx = c
            if c > lx: lx = c
            c = ys[mem] + 0.5 * hs[mem]
            if c < sy: sy = c
            if c > ly: ly = c
        hp += (lx - sx) + (ly - sy)
    return xs_arr, ys_arr, right_max - x_min, top_max - y_min, hp
