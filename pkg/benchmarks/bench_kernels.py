"""Compare the numpy reference kernels against the compiled backend.

Times each kernel on representative inputs, then swaps the backend
underneath the full search and annealer and times those end to end.
Also cross-checks that both backends produce the same results.

Usage: python3 benchmarks/bench_kernels.py [--number N] [--repeat R]
"""

import argparse
import dataclasses
import time

import numpy as np

import floorbeam._kernels as K
from floorbeam import (
    RewardConfig,
    SaParams,
    SearchParams,
    anneal,
    candidates,
    gen_circuit,
    reset,
    search,
    step,
)
from floorbeam._kernels import _ref

try:
    from floorbeam._kernels import _accel
except ImportError:
    _accel = None

_NAMES = (
    "overlap_any", "legal_mask", "corner_candidates", "score_deltas",
    "rudy_fill", "hpwl_total", "seqpair_positions", "sa_eval",
)


def _use(impl):
    for name in _NAMES:
        setattr(K, name, getattr(impl, name))


def _partial_state(c, n_place):
    """Place the first n_place modules of c with a fixed rollout."""
    cfg = RewardConfig()
    rng = np.random.default_rng(0)
    ep = reset(c)
    for _ in range(n_place):
        acts = candidates(ep.state, ep.remaining[0])
        ep, _, _ = step(ep, acts[rng.integers(len(acts))], cfg)
    return ep.state, ep.remaining[0]


def _kernel_cases():
    """(name, args_builder) pairs sized like a mid-search expansion."""
    c = gen_circuit(seed=0, m=12, net_density=0.8)
    s, nxt = _partial_state(c, 8)
    placed = list(s.placed)
    pxs = np.ascontiguousarray(s.xs[placed])
    pys = np.ascontiguousarray(s.ys[placed])
    pws = np.ascontiguousarray(c.ws[placed])
    phs = np.ascontiguousarray(c.hs[placed])
    w, h = float(c.ws[nxt]), float(c.hs[nxt])
    cxs, cys = _ref.corner_candidates(pxs, pys, pws, phs, w, h)

    rng = np.random.default_rng(1)
    n_nets = 8
    n_minx = rng.uniform(0, 5, n_nets)
    n_miny = rng.uniform(0, 5, n_nets)
    n_maxx = n_minx + rng.uniform(0, 5, n_nets)
    n_maxy = n_miny + rng.uniform(0, 5, n_nets)
    n_oldhp = (n_maxx - n_minx) + (n_maxy - n_miny)

    grid = np.zeros((32, 32))
    bx0 = rng.uniform(0, 4, 10)
    by0 = rng.uniform(0, 4, 10)
    bx1 = bx0 + rng.uniform(1, 6, 10)
    by1 = by0 + rng.uniform(1, 6, 10)
    dens = rng.uniform(0.1, 1.0, 10)

    cx = np.ascontiguousarray(c.ws * 0.5)
    cy = np.ascontiguousarray(c.hs * 0.5)
    gp = np.arange(12, dtype=np.int64)
    gm = np.asarray(rng.permutation(12), dtype=np.int64)

    return [
        ("overlap_any", lambda f: f(1.0, 1.0, w, h, pxs, pys, pws, phs)),
        ("legal_mask", lambda f: f(cxs, cys, w, h, pxs, pys, pws, phs)),
        ("corner_candidates", lambda f: f(pxs, pys, pws, phs, w, h)),
        ("score_deltas", lambda f: f(
            cxs, cys, w, h, w * h, float(sum(pws * phs)),
            float(pxs.min()), float(pys.min()),
            float((pxs + pws).max()), float((pys + phs).max()), 0.4,
            n_minx, n_maxx, n_miny, n_maxy, n_oldhp,
        )),
        ("rudy_fill", lambda f: f(grid, 0.0, 0.0, 10.0, 10.0, bx0, by0, bx1, by1, dens)),
        ("hpwl_total", lambda f: f(cx, cy, c.net_ptr, c.net_members)),
        ("seqpair_positions", lambda f: f(gp, gm, c.ws, c.hs)),
        ("sa_eval", lambda f: f(gp, gm, c.ws, c.hs, c.net_ptr, c.net_members)),
    ]


def _best_us(fn, number, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, time.perf_counter() - t0)
    return best / number * 1e6


def _macro(runs):
    c = gen_circuit(seed=3, m=10, net_density=0.8)
    cfg = RewardConfig()
    out = {}
    t0 = time.perf_counter()
    for s in range(runs):
        state, _ = search(c, SearchParams(q=5, epsilon=0.7, beta=10, seed=s), cfg)
    out["search m=10"] = (time.perf_counter() - t0) / runs
    probe = dataclasses.replace(SearchParams(q=5, epsilon=0.7, beta=10, seed=0))
    state, _ = search(c, probe, cfg)
    fingerprint = (state.ds, state.hpwl)
    t0 = time.perf_counter()
    for s in range(max(1, runs // 2)):
        anneal(c, SaParams(seed=s), cfg)
    out["anneal m=10"] = (time.perf_counter() - t0) / max(1, runs // 2)
    return out, fingerprint


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--number", type=int, default=2000, help="calls per timing batch")
    ap.add_argument("--repeat", type=int, default=5, help="batches (best is kept)")
    ap.add_argument("--macro-runs", type=int, default=6, help="full searches per backend")
    args = ap.parse_args()

    if _accel is None:
        print("compiled backend not built; only the numpy reference is timed")
    backends = [("py", _ref)] + ([("cy", _accel)] if _accel else [])

    print(f"{'kernel':<20}" + "".join(f"{name + ' us':>12}" for name, _ in backends)
          + ("{:>10}".format("speedup") if _accel else ""))
    for name, build in _kernel_cases():
        times = []
        for _, impl in backends:
            times.append(_best_us(lambda: build(getattr(impl, name)), args.number, args.repeat))
        row = f"{name:<20}" + "".join(f"{t:>12.2f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    print()
    prints = {}
    for bname, impl in backends:
        _use(impl)
        try:
            macro, fingerprint = _macro(args.macro_runs)
            prints[bname] = fingerprint
            for label, sec in macro.items():
                print(f"{label:<20}{bname:>4}{sec * 1e3:>12.2f} ms/run")
        finally:
            _use(_accel or _ref)

    if len(prints) == 2:
        same = all(
            abs(a - b) <= 1e-12 * max(1.0, abs(b))
            for a, b in zip(prints["py"], prints["cy"])
        )
        print(f"backend agreement on search output: {'ok' if same else 'MISMATCH'}")


if __name__ == "__main__":
    main()
