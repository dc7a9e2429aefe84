import json
import math

import numpy as np
import pytest

from floorbeam import (
    Action,
    RewardConfig,
    ScoredAction,
    SearchError,
    SearchNode,
    SearchParams,
    SoftmaxPolicy,
    gen_circuit,
    prune_level,
    resample_for_congestion,
    reset,
    sample,
    search,
    step,
)
from floorbeam.search import EvaluatedAction

from conftest import make_circuit


def leaf_value(state, params, cfg, hpwl_min):
    """The leaf objective recomputed outside the search module."""
    return (
        -params.alpha * cfg.omega1 / (1.0 - state.ds)
        - params.delta * cfg.omega2 * state.hpwl / hpwl_min
    )


def enumerate_best_leaf(c, params, cfg, policy):
    """Exhaustive recursion over the identical seeded action tree.

    Mirrors the per-node rng contract (seed, 101, *path) and the sampling
    primitive, but owns its own recursion, leaf formula, and argmax.
    """
    best = [-math.inf]

    def rec(ep, path):
        scored = policy.distribution(ep.state, ep.remaining[0])
        rng = np.random.default_rng((params.seed, 101) + path)
        picks = sample(scored, params.q, rng)
        for slot, sa in enumerate(picks):
            ep2, _, _ = step(ep, sa.action, cfg)
            if ep2.violated:
                continue
            if not ep2.remaining:
                v = leaf_value(ep2.state, params, cfg, ep2.hpwl_min)
                if v > best[0]:
                    best[0] = v
            else:
                rec(ep2, path + (slot,))

    rec(reset(c), ())
    return best[0]


def test_single_module_circuit():
    c = make_circuit([(3, 2)])
    state, rec = search(c, SearchParams(seed=0), RewardConfig())
    assert state.placed == (0,)
    assert (state.xs[0], state.ys[0]) == (0.0, 0.0)
    assert rec.ds == 0.0


def test_q1_equals_independent_greedy_rollout():
    cfg = RewardConfig()
    pol = SoftmaxPolicy()
    for seed in (0, 1, 2):
        c = gen_circuit(seed=10 + seed, m=7, net_density=0.8)
        params = SearchParams(q=1, beta=1, seed=seed)
        state, rec = search(c, params, cfg, pol)
        assert rec.algo == "greedy"

        ep = reset(c)
        depth = 0
        while not ep.done:
            scored = pol.distribution(ep.state, ep.remaining[0])
            rng = np.random.default_rng((seed, 101) + (0,) * depth)
            pick = sample(scored, 1, rng)[0]
            ep, _, _ = step(ep, pick.action, cfg)
            depth += 1
        assert np.array_equal(state.xs, ep.state.xs)
        assert np.array_equal(state.ys, ep.state.ys)


def test_search_deterministic():
    c = gen_circuit(seed=5, m=8, net_density=0.8)
    params = SearchParams(seed=3)
    cfg = RewardConfig()
    ticks = iter(range(1000))
    clock = lambda: next(ticks) * 0.001
    s1, r1 = search(c, params, cfg, clock=clock)
    s2, r2 = search(c, params, cfg, clock=clock)
    assert np.array_equal(s1.xs, s2.xs) and np.array_equal(s1.ys, s2.ys)
    assert r1.reward == r2.reward and r1.ds == r2.ds and r1.hpwl == r2.hpwl


def test_exhaustive_oracle_small_instances():
    cfg = RewardConfig()
    pol = SoftmaxPolicy()
    for seed in range(3):
        c = gen_circuit(seed=20 + seed, m=3, net_density=1.0)
        params = SearchParams(
            q=2, epsilon=0.0, beta=10**6, level_cap=10**6, seed=seed
        )
        state, rec = search(c, params, cfg, pol)
        got = leaf_value(state, params, cfg, c.hpwl_min)
        want = enumerate_best_leaf(c, params, cfg, pol)
        assert got == want


def test_unpruned_tree_dominates_pruned_runs():
    # A beam wide enough to never drop anything explores a superset of the
    # leaves any pruned run sees, so its best leaf value is an upper bound.
    cfg = RewardConfig()
    for seed in range(3):
        c = gen_circuit(seed=30 + seed, m=5, net_density=0.8)
        full_params = SearchParams(
            q=3, epsilon=1.0, beta=10**6, level_cap=10**6, seed=seed,
        )
        full_state, _ = search(c, full_params, cfg)
        full_v = leaf_value(full_state, full_params, cfg, c.hpwl_min)
        for beta in (1, 3):
            params = SearchParams(q=3, epsilon=1.0, beta=beta, seed=seed)
            state, _ = search(c, params, cfg)
            assert leaf_value(state, params, cfg, c.hpwl_min) <= full_v + 1e-12


def _mk_node(v, index):
    return SearchNode(
        episode=None, v=v, parent=None, depth=1, index=index,
        path=(index,), is_leaf=False,
    )


def test_prune_level_epsilon_zero_keeps_all():
    nodes = [_mk_node(v, i) for i, v in enumerate([0.3, -0.1, 0.9])]
    out = prune_level(nodes, SearchParams(epsilon=0.0, beta=1), np.random.default_rng(0))
    assert [n.index for n in out] == [2, 0, 1]  # reordered, nothing dropped


def test_prune_level_epsilon_one_keeps_beam():
    nodes = [_mk_node(v, i) for i, v in enumerate([0.3, -0.1, 0.9, 0.5])]
    out = prune_level(nodes, SearchParams(epsilon=1.0, beta=2), np.random.default_rng(0))
    assert [n.index for n in out] == [2, 3]


def test_prune_level_wide_beam_is_identity_set():
    nodes = [_mk_node(v, i) for i, v in enumerate([0.3, -0.1, 0.9])]
    out = prune_level(nodes, SearchParams(epsilon=1.0, beta=50), np.random.default_rng(0))
    assert {n.index for n in out} == {0, 1, 2}


def test_prune_level_ties_break_by_creation_index():
    nodes = [_mk_node(0.5, i) for i in range(4)]
    out = prune_level(nodes, SearchParams(epsilon=1.0, beta=2), np.random.default_rng(0))
    assert [n.index for n in out] == [0, 1]


def test_prune_level_forced_above_cap():
    nodes = [_mk_node(float(i), i) for i in range(1200)]
    params = SearchParams(epsilon=0.0, beta=10, level_cap=1000)
    out = prune_level(nodes, params, np.random.default_rng(0))
    assert len(out) == 10
    assert [n.index for n in out] == list(range(1199, 1189, -1))


def _ev(order, rudy, prob):
    sa = ScoredAction(Action(0, float(order), 0.0), prob, 0.0)
    return EvaluatedAction(scored=sa, episode=None, rudy=rudy, order=order)


def test_resample_all_under_threshold_keeps_originals():
    originals = [_ev(i, 0.1 * i, 0.2) for i in range(5)]
    sel, fallback = resample_for_congestion(originals, [], 5, threshold=1.0)
    assert sel == originals
    assert not fallback


def test_resample_none_under_threshold_lowest_rudy():
    originals = [_ev(0, 5.0, 0.5), _ev(1, 6.0, 0.5)]
    resampled = [_ev(2, 7.0, 0.9), _ev(3, 4.0, 0.1)]
    sel, fallback = resample_for_congestion(originals, resampled, 2, threshold=1.0)
    assert [e.order for e in sel] == [3, 0]
    assert fallback


def test_resample_kept_plus_top_prob():
    originals = [
        _ev(0, 0.5, 0.3), _ev(1, 9.0, 0.3), _ev(2, 9.0, 0.3),
        _ev(3, 9.0, 0.3), _ev(4, 0.6, 0.3),
    ]
    resampled = [_ev(5, 0.2, 0.2), _ev(6, 0.3, 0.5), _ev(7, 0.1, 0.4)]
    sel, fallback = resample_for_congestion(originals, resampled, 5, threshold=1.0)
    assert [e.order for e in sel] == [0, 4, 6, 7, 5]
    assert not fallback


class _OriginPolicy:
    """Always proposes (0, 0): legal once, then an overlap every time."""

    def distribution(self, s, module):
        return [ScoredAction(Action(module, 0.0, 0.0), 1.0, 0.0)]


def test_all_violating_rollouts_raise_search_error():
    c = make_circuit([(2, 2), (2, 2)])
    with pytest.raises(SearchError):
        search(c, SearchParams(q=3, seed=0), RewardConfig(), _OriginPolicy())


def test_finite_loose_threshold_matches_infinite():
    c = gen_circuit(seed=40, m=6, net_density=0.9)
    cfg = RewardConfig()
    s_inf, r_inf = search(c, SearchParams(seed=1), cfg)
    s_fin, r_fin = search(
        c, SearchParams(seed=1, congestion_threshold=1e9), cfg
    )
    assert np.array_equal(s_inf.xs, s_fin.xs)
    assert np.array_equal(s_inf.ys, s_fin.ys)
    assert r_fin.congestion_fallbacks == 0


def test_tight_threshold_reduces_congestion():
    c = gen_circuit(seed=41, m=8, net_density=1.0)
    cfg = RewardConfig()
    _, base = search(c, SearchParams(seed=2), cfg)
    _, tight = search(
        c, SearchParams(seed=2, congestion_threshold=0.1 * base.rudy), cfg
    )
    assert tight.rudy <= base.rudy


def test_impossible_threshold_counts_fallbacks():
    c = gen_circuit(seed=42, m=6, net_density=1.0)
    _, rec = search(
        c, SearchParams(seed=0, congestion_threshold=1e-9), RewardConfig()
    )
    assert rec.congestion_fallbacks > 0


def test_record_fields_and_params_round_trip():
    from floorbeam import record_from_json, record_to_json

    c = gen_circuit(seed=43, m=5, net_density=0.8)
    _, rec = search(c, SearchParams(seed=7), RewardConfig())
    assert rec.algo == "bsrl"
    assert rec.seed == 7
    assert 0.0 <= rec.ds < 100.0
    assert rec.rudy >= 0.0
    line = record_to_json(rec)
    parsed = json.loads(line)  # must be strict JSON, no Infinity literals
    assert parsed["params"]["search"]["congestion_threshold"] == "inf"
    back = record_from_json(line)
    assert back == rec


def test_search_params_validation():
    for bad in (
        dict(q=0), dict(epsilon=-0.1), dict(epsilon=1.1), dict(beta=0),
        dict(level_cap=0), dict(alpha=-1), dict(congestion_threshold=0.0),
        dict(resample_frac=1.5), dict(seed=-1),
    ):
        with pytest.raises(ValueError):
            SearchParams(**bad)
