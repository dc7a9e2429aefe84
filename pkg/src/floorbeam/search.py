"""Beam-search tree over the sequential-placement MDP.

The tree is built level by level. Each surviving node samples q actions
from the policy; every sampled action is stepped through the environment
and, when a congestion threshold is set, the successor's RUDY scalar is
evaluated. If any sampled successor exceeds the threshold, a resampling
procedure replaces congested picks (see resample_for_congestion). After a
level is created it is pruned: one Bernoulli(epsilon) draw decides whether
only the beta highest-value nodes survive; a level wider than level_cap is
always pruned. The best complete leaf is returned.

Node values:
  internal  v = -alpha * dDS_t - delta * dHPWL_t   (this step's deltas)
  leaf      v = -alpha * w1 / (1 - DS_T) - delta * w2 * HPWL_T / HPWL_min

Determinism: every node owns an rng stream keyed by (seed, its path of
child slots from the root), and each level's prune draw is keyed by
(seed, level index). Identical (circuit, params, config) therefore yield
identical trees regardless of beam width at other levels or worker count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict
from typing import NamedTuple

import numpy as np

from .congestion import RudyConfig, rudy_scalar
from .env import Episode, RewardConfig, episode_return, reset, step
from .errors import SearchError
from .netlist import Circuit
from .placement import PlacementState
from .policy import Policy, ScoredAction, SoftmaxPolicy, sample
from .stats import RunRecord

_NODE_STREAM = 101
_PRUNE_STREAM = 202


@dataclass(frozen=True)
class SearchParams:
    q: int = 5
    epsilon: float = 0.7
    beta: int = 10
    level_cap: int = 1000
    alpha: float = 1.0
    delta: float = 1.0
    congestion_threshold: float = math.inf
    resample_frac: float = 0.6
    seed: int = 0
    rudy: RudyConfig = field(default_factory=RudyConfig)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.level_cap < 1:
            raise ValueError(f"level_cap must be >= 1, got {self.level_cap}")
        if self.alpha < 0 or self.delta < 0:
            raise ValueError("alpha and delta must be non-negative")
        if not self.congestion_threshold > 0:
            raise ValueError(
                f"congestion_threshold must be positive, got {self.congestion_threshold}"
            )
        if not 0 <= self.resample_frac <= 1:
            raise ValueError(f"resample_frac must be in [0, 1], got {self.resample_frac}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


class SearchNode:
    """One tree node: an episode plus its value and bookkeeping."""

    __slots__ = ("episode", "v", "parent", "depth", "index", "path", "is_leaf")

    def __init__(self, episode, v, parent, depth, index, path, is_leaf):
        self.episode = episode
        self.v = v
        self.parent = parent
        self.depth = depth
        self.index = index        # global creation order, breaks value ties
        self.path = path          # child-slot indices from the root, keys the rng
        self.is_leaf = is_leaf

    def __repr__(self):
        return f"SearchNode(depth={self.depth}, v={self.v:.4g}, path={self.path})"


class EvaluatedAction(NamedTuple):
    """A sampled action with its stepped successor and congestion figure."""

    scored: ScoredAction
    episode: Episode
    rudy: float
    order: int  # 0..q-1 originals, then resamples; final determinism tie-break


class _Ctx:
    __slots__ = ("circuit", "params", "cfg", "policy", "counter", "fallbacks")

    def __init__(self, circuit, params, cfg, policy):
        self.circuit = circuit
        self.params = params
        self.cfg = cfg
        self.policy = policy
        self.counter = 1  # 0 is the root
        self.fallbacks = 0


def _node_rng(seed: int, path: tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng((seed, _NODE_STREAM) + path)


def _prune_rng(seed: int, level_index: int) -> np.random.Generator:
    return np.random.default_rng((seed, _PRUNE_STREAM, level_index))


def _leaf_value(state: PlacementState, params: SearchParams, cfg: RewardConfig,
                hpwl_min: float) -> float:
    return (
        -params.alpha * cfg.omega1 / (1.0 - state.ds)
        - params.delta * cfg.omega2 * state.hpwl / hpwl_min
    )


def _internal_value(parent: PlacementState, child: PlacementState,
                    params: SearchParams, cfg: RewardConfig, hpwl_min: float) -> float:
    d_ds = child.ds - parent.ds
    d_hpwl = child.hpwl - parent.hpwl
    if cfg.normalize_hpwl_delta:
        d_hpwl /= hpwl_min
    return -params.alpha * d_ds - params.delta * d_hpwl


def resample_for_congestion(
    originals: list[EvaluatedAction],
    resampled: list[EvaluatedAction],
    q: int,
    threshold: float,
) -> tuple[list[EvaluatedAction], bool]:
    """Select up to q children after congestion resampling.

    Keeps the original under-threshold actions, fills remaining slots with
    the under-threshold resamples of highest policy probability, and if
    still short falls back to the lowest-RUDY actions among everything
    examined. Returns (selection, fallback_fired).
    """
    kept = [e for e in originals if e.rudy <= threshold]
    need = q - len(kept)
    ok_res = sorted(
        (e for e in resampled if e.rudy <= threshold),
        key=lambda e: (-e.scored.prob, e.order),
    )
    final = kept + ok_res[:need]
    fallback = False
    if len(final) < q:
        chosen = {e.order for e in final}
        rest = sorted(
            (e for e in originals + resampled if e.order not in chosen),
            key=lambda e: (e.rudy, e.order),
        )
        fill = rest[: q - len(final)]
        if fill:
            fallback = True
        final += fill
    return final, fallback


def expand_node(node: SearchNode, ctx: _Ctx) -> list[SearchNode]:
    """Create up to q children of a non-leaf node."""
    params = ctx.params
    cfg = ctx.cfg
    ep = node.episode
    module = ep.remaining[0]
    scored = ctx.policy.distribution(ep.state, module)
    rng = _node_rng(params.seed, node.path)
    picks = sample(scored, params.q, rng)
    check_rudy = math.isfinite(params.congestion_threshold)

    def evaluate(sa: ScoredAction, order: int) -> EvaluatedAction:
        ep2, _, _ = step(ep, sa.action, cfg)
        if ep2.violated or not check_rudy:
            r = math.inf if ep2.violated else 0.0
        else:
            r = rudy_scalar(ep2.state, params.rudy)
        return EvaluatedAction(scored=sa, episode=ep2, rudy=r, order=order)

    evals = [evaluate(sa, i) for i, sa in enumerate(picks)]
    live = [e for e in evals if not e.episode.violated]
    if check_rudy and any(e.rudy > params.congestion_threshold for e in live):
        picked = {id(sa) for sa in picks}
        pool = [sa for sa in scored if id(sa) not in picked]
        n_res = math.ceil(params.resample_frac * params.q)
        extras = sample(pool, n_res, rng) if pool else []
        res_evals = [
            e for e in (evaluate(sa, params.q + i) for i, sa in enumerate(extras))
            if not e.episode.violated
        ]
        selection, fallback = resample_for_congestion(
            live, res_evals, params.q, params.congestion_threshold
        )
        if fallback:
            ctx.fallbacks += 1
        if not selection:  # everything violated; keep the sentinels
            selection = evals
    else:
        selection = evals

    m = ctx.circuit.m
    children = []
    for slot, e in enumerate(selection):
        ep2 = e.episode
        if ep2.violated:
            v = -math.inf
            leaf = True
        elif ep2.t == m:
            v = _leaf_value(ep2.state, params, cfg, ep2.hpwl_min)
            leaf = True
        else:
            v = _internal_value(ep.state, ep2.state, params, cfg, ep2.hpwl_min)
            leaf = False
        children.append(
            SearchNode(
                episode=ep2, v=v, parent=node, depth=node.depth + 1,
                index=ctx.counter, path=node.path + (slot,), is_leaf=leaf,
            )
        )
        ctx.counter += 1
    return children


def prune_level(level: list[SearchNode], params: SearchParams,
                rng: np.random.Generator) -> list[SearchNode]:
    """Beam-prune one level; returns survivors in descending value order.

    One Bernoulli(epsilon) draw decides whether the beam applies; a level
    wider than level_cap is always pruned. Ties break toward earlier
    creation.
    """
    if not level:
        raise SearchError("prune_level on an empty level")
    ordered = sorted(level, key=lambda n: (-n.v, n.index))
    forced = len(level) > params.level_cap
    if forced or rng.random() < params.epsilon:
        return ordered[: params.beta]
    return ordered


def params_dict(params: SearchParams, cfg: RewardConfig, policy=None) -> dict:
    out = {"search": asdict(params), "reward": asdict(cfg)}
    if policy is not None and hasattr(policy, "temperature"):
        out["policy"] = {"temperature": policy.temperature}
    return out


def search(
    c: Circuit,
    params: SearchParams | None = None,
    cfg: RewardConfig | None = None,
    policy: Policy | None = None,
    label: str | None = None,
    algo: str | None = None,
    clock=time.perf_counter,
) -> tuple[PlacementState, RunRecord]:
    """Run the beam search and return the best leaf's placement + metrics.

    Deterministic in params.seed. Raises SearchError when every rollout
    violated a constraint (no complete leaf exists).
    """
    params = params or SearchParams()
    cfg = cfg or RewardConfig()
    policy = policy or SoftmaxPolicy()
    t0 = clock()
    ctx = _Ctx(c, params, cfg, policy)
    root = SearchNode(
        episode=reset(c), v=0.0, parent=None, depth=0, index=0, path=(), is_leaf=c.m == 0,
    )
    level = [root]
    leaves: list[SearchNode] = []
    for depth in range(c.m):
        children: list[SearchNode] = []
        for node in level:
            children.extend(expand_node(node, ctx))
        if not children:
            break
        kept = prune_level(children, params, _prune_rng(params.seed, depth + 1))
        level = []
        for n in kept:
            if n.is_leaf:
                if n.v > -math.inf:
                    leaves.append(n)
            else:
                level.append(n)
        if not level:
            break
    if not leaves:
        raise SearchError("search infeasible: every rollout violated constraints")
    best = max(leaves, key=lambda n: (n.v, -n.index))
    state = best.episode.state
    runtime = clock() - t0
    record = RunRecord(
        algo=algo or ("greedy" if params.q == 1 else "bsrl"),
        circuit=label or f"m{c.m}",
        runtime_s=runtime,
        ds=state.ds * 100.0,
        hpwl=state.hpwl,
        rudy=rudy_scalar(state, params.rudy),
        reward=episode_return(best.episode.rewards, cfg.gamma),
        seed=params.seed,
        congestion_fallbacks=ctx.fallbacks,
        params=params_dict(params, cfg, policy),
    )
    return state, record
