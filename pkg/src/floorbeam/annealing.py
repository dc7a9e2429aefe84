"""Simulated-annealing baseline over the sequence-pair representation.

A sequence pair is two permutations of the module ids. The decode
convention used here: module a earlier than b in both permutations sits
left of b; a earlier in gamma_plus but later in gamma_minus sits below b.
Longest-path decoding is overlap-free for every permutation pair.

The annealer minimizes cost = -terminal_reward(decoded placement) plus
|penalty| per violated alignment constraint, with Metropolis acceptance
and a geometric cooling schedule. Moves (chosen uniformly): swap two
positions in gamma_plus, swap two modules in both permutations, adjacent
transposition in one permutation.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field, asdict
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .congestion import RudyConfig, rudy_scalar
from .env import RewardConfig, terminal_reward
from .errors import FloorbeamError
from .netlist import Axis, Circuit
from .placement import PlacementState
from .policy import ALIGN_TOL
from .stats import RunRecord


class SeqPair(NamedTuple):
    gamma_plus: tuple[int, ...]
    gamma_minus: tuple[int, ...]


@dataclass(frozen=True)
class SaParams:
    t0: float = 100.0
    cooling: float = 0.95
    iters_per_temp: int | None = None  # None -> 50 * m
    t_min: float = 0.01
    seed: int = 0
    rudy: RudyConfig = field(default_factory=RudyConfig)

    def __post_init__(self):
        if not self.t_min > 0:
            raise ValueError(f"t_min must be positive, got {self.t_min}")
        if not self.t0 >= self.t_min:
            raise ValueError(f"t0 must be >= t_min, got t0={self.t0}, t_min={self.t_min}")
        if not 0 < self.cooling < 1:
            raise ValueError(f"cooling must be in (0, 1), got {self.cooling}")
        if self.iters_per_temp is not None and self.iters_per_temp < 1:
            raise ValueError(f"iters_per_temp must be >= 1, got {self.iters_per_temp}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


def _check_perm(name: str, perm, m: int):
    if sorted(perm) != list(range(m)):
        raise FloorbeamError(f"{name} is not a permutation of 0..{m - 1}: {perm}")


def decode(sp: SeqPair, c: Circuit) -> PlacementState:
    """Decode a sequence pair into an overlap-free placement."""
    m = c.m
    _check_perm("gamma_plus", sp.gamma_plus, m)
    _check_perm("gamma_minus", sp.gamma_minus, m)
    xs, ys = K.seqpair_positions(
        np.asarray(sp.gamma_plus, dtype=np.int64),
        np.asarray(sp.gamma_minus, dtype=np.int64),
        c.ws, c.hs,
    )
    return PlacementState.from_coords(
        c, {i: (float(xs[i]), float(ys[i])) for i in range(m)}
    )


def _alignment_tuples(c: Circuit) -> list[tuple[int, int, bool]]:
    return [(con.a, con.b, con.axis is Axis.VERTICAL) for con in c.alignments]


def _eval(gp, gm, c: Circuit, cfg: RewardConfig, hpwl_min: float,
          aligns, total_area: float, target_ar: float | None):
    """Cost of a sequence pair without building a PlacementState."""
    xs, ys, bw, bh, hp = K.sa_eval(
        np.asarray(gp, dtype=np.int64), np.asarray(gm, dtype=np.int64),
        c.ws, c.hs, c.net_ptr, c.net_members,
    )
    ds = 1.0 - total_area / (bw * bh)
    cost = cfg.omega1 / (1.0 - ds) + cfg.omega2 * hp / hpwl_min
    if target_ar is not None:
        cost += cfg.omega3 * abs(target_ar - bw / bh)
    violations = 0
    for a, b, vertical in aligns:
        if vertical:
            if abs((xs[a] + 0.5 * c.ws[a]) - (xs[b] + 0.5 * c.ws[b])) > ALIGN_TOL:
                violations += 1
        elif abs((ys[a] + 0.5 * c.hs[a]) - (ys[b] + 0.5 * c.hs[b])) > ALIGN_TOL:
            violations += 1
    cost += abs(cfg.penalty) * violations
    return cost, violations


def anneal(
    c: Circuit,
    params: SaParams | None = None,
    cfg: RewardConfig | None = None,
    label: str | None = None,
    clock=time.perf_counter,
) -> tuple[PlacementState, RunRecord]:
    """Anneal a sequence pair; returns the best-seen decoded placement.

    Deterministic per params.seed. The reported reward matches the search
    side's undiscounted episode score: telescoped intermediate terms plus
    the terminal reward, with the penalty added per violated alignment.
    """
    params = params or SaParams()
    cfg = cfg or RewardConfig()
    t_start = clock()
    m = c.m
    rng = random.Random(params.seed)
    hpwl_min = c.hpwl_min
    aligns = _alignment_tuples(c)
    total_area = float(c.areas.sum())
    target_ar = cfg.target_ar if cfg.target_ar is not None else c.target_ar
    iters = params.iters_per_temp if params.iters_per_temp is not None else 50 * m

    gp = list(range(m))
    gm = list(range(m))
    cost, _ = _eval(gp, gm, c, cfg, hpwl_min, aligns, total_area, target_ar)
    best_gp, best_gm, best_cost = gp[:], gm[:], cost

    T = params.t0
    while T > params.t_min and m >= 2:
        for _ in range(iters):
            ngp, ngm = gp[:], gm[:]
            kind = rng.randrange(3)
            if kind == 0:
                i = rng.randrange(m)
                j = rng.randrange(m - 1)
                if j >= i:
                    j += 1
                ngp[i], ngp[j] = ngp[j], ngp[i]
            elif kind == 1:
                i = rng.randrange(m)
                j = rng.randrange(m - 1)
                if j >= i:
                    j += 1
                a, b = ngp[i], ngp[j]
                ngp[i], ngp[j] = b, a
                ia, ib = ngm.index(a), ngm.index(b)
                ngm[ia], ngm[ib] = b, a
            else:
                which = ngp if rng.randrange(2) == 0 else ngm
                j = rng.randrange(m - 1)
                which[j], which[j + 1] = which[j + 1], which[j]
            new_cost, _ = _eval(ngp, ngm, c, cfg, hpwl_min, aligns, total_area, target_ar)
            d = new_cost - cost
            if d <= 0 or rng.random() < math.exp(-d / T):
                gp, gm, cost = ngp, ngm, new_cost
                if cost < best_cost:
                    best_gp, best_gm, best_cost = gp[:], gm[:], cost
        T *= params.cooling

    state = decode(SeqPair(tuple(best_gp), tuple(best_gm)), c)
    _, violations = _eval(best_gp, best_gm, c, cfg, hpwl_min, aligns, total_area, target_ar)
    hbar = state.hpwl / hpwl_min if cfg.normalize_hpwl_delta else state.hpwl
    reward = (
        -(state.ds + hbar)
        + terminal_reward(state, cfg, hpwl_min)
        + cfg.penalty * violations
    )
    record = RunRecord(
        algo="sa",
        circuit=label or f"m{m}",
        runtime_s=clock() - t_start,
        ds=state.ds * 100.0,
        hpwl=state.hpwl,
        rudy=rudy_scalar(state, params.rudy),
        reward=reward,
        seed=params.seed,
        congestion_fallbacks=0,
        params={"sa": asdict(params), "reward": asdict(cfg)},
    )
    return state, record
