"""End-to-end acceptance gate.

Nine checks covering geometry invariants, search optimality on small
trees, the search-vs-single-rollout comparison, congestion-aware
resampling, beam-width behavior, statistics, reward arithmetic, the
annealing baseline, and alignment constraints. Every test prints one
"acceptance criterion N: PASS/FAIL" line via conftest.record_criterion,
then asserts, so a full run ends with a readable scoreboard.
"""

import dataclasses
import itertools
import math
import time

import numpy as np

from floorbeam import (
    AlgoSpec,
    RewardConfig,
    SaParams,
    SearchParams,
    SeqPair,
    SoftmaxPolicy,
    anneal,
    bootstrap_ci,
    candidates,
    decode,
    gen_circuit,
    iqm,
    iqr,
    reset,
    run_suite,
    sample,
    search,
    step,
    terminal_reward,
)
from floorbeam.placement import PlacementState

from conftest import make_circuit, record_criterion


def brute_overlap_free(state):
    items = [
        (state.xs[i], state.ys[i], state.circuit.modules[i].w, state.circuit.modules[i].h)
        for i in state.placed
    ]
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            x1, y1, w1, h1 = items[a]
            x2, y2, w2, h2 = items[b]
            if x1 < x2 + w2 and x2 < x1 + w1 and y1 < y2 + h2 and y2 < y1 + h1:
                return False
    return True


def brute_ds(state):
    mods = [state.circuit.modules[i] for i in state.placed]
    xs = [state.xs[m.id] for m in mods]
    ys = [state.ys[m.id] for m in mods]
    x1 = max(x + m.w for x, m in zip(xs, mods))
    y1 = max(y + m.h for y, m in zip(ys, mods))
    return 1.0 - sum(m.area for m in mods) / ((x1 - min(xs)) * (y1 - min(ys)))


def brute_hpwl(state):
    total = 0.0
    placed = set(state.placed)
    for net in state.circuit.nets:
        pins = [
            (state.xs[i] + state.circuit.modules[i].w / 2,
             state.ys[i] + state.circuit.modules[i].h / 2)
            for i in net.members if i in placed
        ]
        if len(pins) < 2:
            continue
        px = [p[0] for p in pins]
        py = [p[1] for p in pins]
        total += max(px) - min(px) + max(py) - min(py)
    return total


def _close(a, b, rel):
    return abs(a - b) <= rel * max(1.0, abs(b))


def leaf_value(state, params, cfg, hpwl_min):
    return (
        -params.alpha * cfg.omega1 / (1.0 - state.ds)
        - params.delta * cfg.omega2 * state.hpwl / hpwl_min
    )


def test_criterion_1_geometry_invariants():
    t0 = time.perf_counter()
    cfg = RewardConfig()
    rng = np.random.default_rng(0)
    bad = 0
    for i in range(1000):
        c = gen_circuit(seed=i, m=3 + i % 18, net_density=0.8)
        ep = reset(c)
        while not ep.done:
            acts = candidates(ep.state, ep.remaining[0])
            ep, _, _ = step(ep, acts[rng.integers(len(acts))], cfg)
            s = ep.state
            if not (
                brute_overlap_free(s)
                and _close(s.ds, brute_ds(s), 1e-9)
                and _close(s.hpwl, brute_hpwl(s), 1e-9)
            ):
                bad += 1
        assert not ep.violated
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 60
    record_criterion(1, ok, f"1000 episodes, {bad} bad states, {elapsed:.1f}s")
    assert ok


def test_criterion_2_exhaustive_oracle():
    cfg = RewardConfig()
    pol = SoftmaxPolicy()
    exact = 0
    for i in range(20):
        c = gen_circuit(seed=400 + i, m=3, net_density=1.0)
        params = SearchParams(q=4, epsilon=0.0, beta=10**6, level_cap=10**6, seed=i)
        state, _ = search(c, params, cfg, pol)
        got = leaf_value(state, params, cfg, c.hpwl_min)

        best = [-math.inf]

        def rec(ep, path):
            scored = pol.distribution(ep.state, ep.remaining[0])
            picks = sample(scored, params.q, np.random.default_rng((params.seed, 101) + path))
            for slot, sa in enumerate(picks):
                ep2, _, _ = step(ep, sa.action, cfg)
                if ep2.violated:
                    continue
                if not ep2.remaining:
                    v = leaf_value(ep2.state, params, cfg, ep2.hpwl_min)
                    best[0] = max(best[0], v)
                else:
                    rec(ep2, path + (slot,))

        rec(reset(c), ())
        exact += got == best[0]
    ok = exact == 20
    record_criterion(2, ok, f"{exact}/20 exact matches")
    assert ok


def test_criterion_3_search_beats_single_rollout():
    t0 = time.perf_counter()
    circuits = [
        (f"i{i:02d}", gen_circuit(seed=100 + i, m=6 + i % 9, net_density=0.8))
        for i in range(30)
    ]
    algos = [
        AlgoSpec(name="greedy"),
        AlgoSpec(name="bsrl", search=SearchParams(q=5, epsilon=0.7, beta=10)),
    ]
    res = run_suite(circuits, algos, repeats=100, base_seed=0)
    r_wins = ds_wins = hp_wins = 0
    for label, _ in circuits:
        g = {m: res.summaries[(label, "greedy", m)].iqm for m in ("reward", "ds", "hpwl")}
        b = {m: res.summaries[(label, "bsrl", m)].iqm for m in ("reward", "ds", "hpwl")}
        r_wins += b["reward"] > g["reward"]
        ds_wins += b["ds"] < g["ds"]
        hp_wins += b["hpwl"] < g["hpwl"]
    elapsed = time.perf_counter() - t0
    ok = (
        res.n_failures == 0
        and r_wins >= 27 and ds_wins >= 21 and hp_wins >= 21
        and elapsed < 1800
    )
    record_criterion(
        3, ok, f"R {r_wins}/30, DS {ds_wins}/30, HPWL {hp_wins}/30, {elapsed:.0f}s"
    )
    assert ok


def test_criterion_4_congestion_resampling():
    cfg = RewardConfig()
    base = SearchParams(q=5, epsilon=0.7, beta=10)
    rudy_wins = 0
    degradations = []
    for i in range(10):
        c = gen_circuit(seed=200 + i, m=8, net_density=0.8)
        free_rudy, free_ds = [], []
        for s in range(40):
            _, rec = search(c, dataclasses.replace(base, seed=s), cfg)
            free_rudy.append(rec.rudy)
            free_ds.append(rec.ds)
        tau = 0.1 * iqm(free_rudy)
        con_rudy, con_ds = [], []
        for s in range(40):
            _, rec = search(
                c, dataclasses.replace(base, seed=s, congestion_threshold=tau), cfg
            )
            con_rudy.append(rec.rudy)
            con_ds.append(rec.ds)
        rudy_wins += iqm(con_rudy) < iqm(free_rudy)
        degradations.append((iqm(con_ds) - iqm(free_ds)) / iqm(free_ds))
    mean_deg = sum(degradations) / len(degradations)
    ok = rudy_wins >= 9 and mean_deg < 0.5
    record_criterion(
        4, ok, f"rudy lower on {rudy_wins}/10, mean DS degradation {100 * mean_deg:+.1f}%"
    )
    assert ok


def test_criterion_5_beam_width_monotonicity():
    # Checks that the best leaf value never decreases as the beam widens
    # under forced per-level pruning. A wider beam explores a superset of
    # candidate nodes at each level but not a superset of finished leaves:
    # its extra survivors can displace exactly the nodes whose subtrees the
    # narrow beam went on to win with, because per-step node values do not
    # predict leaf quality. The property therefore fails on some instances
    # by design of the value function; the unpruned tree still dominates
    # every pruned run (covered by the search unit tests).
    cfg = RewardConfig()
    monotone = 0
    for i in range(20):
        c = gen_circuit(seed=300 + i, m=8, net_density=0.8)
        vals = []
        for beta in (1, 5, 10, 50):
            params = SearchParams(q=5, epsilon=1.0, beta=beta, seed=i)
            state, _ = search(c, params, cfg)
            vals.append(leaf_value(state, params, cfg, c.hpwl_min))
        monotone += all(vals[j] <= vals[j + 1] for j in range(3))
    ok = monotone == 20
    record_criterion(5, ok, f"monotone on {monotone}/20 instances")
    assert ok


def test_criterion_6_statistics_and_reproducibility():
    ok = iqm([1, 2, 3, 4, 5, 6, 7, 8]) == 4.5
    ok = ok and iqr([3.0] * 6) == 0.0
    rng = np.random.default_rng(0)
    for trial in range(100):
        xs = rng.normal(size=30)
        lo, hi = bootstrap_ci(xs, seed=trial)
        ok = ok and lo <= iqm(xs) <= hi

    def tick_clock():
        counter = itertools.count()
        return lambda: next(counter) * 0.001

    circuits = [gen_circuit(seed=s, m=3, net_density=1.0) for s in (1, 2)]
    algos = [AlgoSpec(name="greedy"), AlgoSpec(name="bsrl", search=SearchParams(q=2))]
    a = run_suite(circuits, algos, repeats=3, clock=tick_clock()).to_jsonl()
    b = run_suite(circuits, algos, repeats=3, clock=tick_clock()).to_jsonl()
    ok = ok and a.encode() == b.encode()
    record_criterion(6, ok)
    assert ok


def test_criterion_7_reward_arithmetic():
    cfg = RewardConfig()
    c = make_circuit([(1, 1), (1, 1)], nets=[(0, 1)])
    diag = PlacementState.from_coords(c, {0: (0.0, 0.0), 1: (1.0, 1.0)})
    row = PlacementState.from_coords(c, {0: (0.0, 0.0), 1: (1.0, 0.0)})
    ok = abs(terminal_reward(diag, cfg, 1.0) - (-12.0)) <= 1e-12
    ok = ok and abs(terminal_reward(row, cfg, 1.0) - (-6.0)) <= 1e-12
    # intermediate rewards telescope to -(DS + normalized HPWL) at the end
    for i in range(5):
        c = gen_circuit(seed=700 + i, m=6, net_density=1.0)
        state, rec = search(c, SearchParams(q=1, seed=i), cfg)
        telescoped = rec.reward - terminal_reward(state, cfg, c.hpwl_min)
        want = -(state.ds + state.hpwl / c.hpwl_min)
        ok = ok and _close(telescoped, want, 1e-9)
    record_criterion(7, ok)
    assert ok


def test_criterion_8_annealing_baseline():
    squares = make_circuit([(2, 2)] * 4, nets=[(0, 1), (2, 3)])
    zero_ds = sum(
        anneal(squares, SaParams(seed=s))[1].ds <= 1e-9 for s in range(100)
    )
    c = gen_circuit(seed=8, m=8, net_density=0.8)
    rng = np.random.default_rng(1)
    clean = 0
    for _ in range(10_000):
        gp = tuple(int(v) for v in rng.permutation(8))
        gm = tuple(int(v) for v in rng.permutation(8))
        clean += brute_overlap_free(decode(SeqPair(gp, gm), c))
    ok = zero_ds >= 95 and clean == 10_000
    record_criterion(
        8, ok, f"zero dead space on {zero_ds}/100 seeds, {clean}/10000 decodes clean"
    )
    assert ok


def test_criterion_9_alignment_constraints():
    cfg = RewardConfig()
    aligned = total = 0
    for i in range(5):
        c = gen_circuit(seed=500 + i, m=8, net_density=0.8, n_alignments=2)
        for s in range(10):
            state, _ = search(c, SearchParams(q=5, epsilon=0.7, beta=10, seed=s), cfg)
            total += 1
            diffs = []
            for con in c.alignments:
                ca = (state.xs[con.a] + c.modules[con.a].w / 2,
                      state.ys[con.a] + c.modules[con.a].h / 2)
                cb = (state.xs[con.b] + c.modules[con.b].w / 2,
                      state.ys[con.b] + c.modules[con.b].h / 2)
                diffs.append(abs(ca[0] - cb[0]) if con.axis.value == "v" else abs(ca[1] - cb[1]))
            aligned += all(d <= 1e-9 for d in diffs)
    ok = aligned == total
    record_criterion(9, ok, f"{aligned}/{total} runs satisfy all alignments")
    assert ok
