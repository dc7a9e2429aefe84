"""Placement policy: candidate generation and a softmax-scored default.

The search layer depends only on the Policy protocol (a distribution over
legal actions for the next module), so a learned policy can replace the
heuristic one. The default scores each candidate by the negated one-step
cost -(dDS + dHPWL / HPWL_min) and applies a softmax.

Candidate set: for an empty state the single action (0, 0); otherwise all
corner-flush positions against placed modules, overlap-filtered. Alignment
constraints to an already-placed partner restrict candidates to positions
sharing the partner's center on the constrained axis; if that empties the
set, aligned positions are injected by sliding along the alignment axis
past the blocking modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Protocol

import numpy as np

from . import _kernels as K
from .netlist import Axis, Module
from .placement import PlacementState

ALIGN_TOL = 1e-9


class Action(NamedTuple):
    module: int
    x: float
    y: float


class ScoredAction(NamedTuple):
    action: Action
    prob: float
    score: float


class Policy(Protocol):
    def distribution(self, s: PlacementState, module: int) -> list["ScoredAction"]:
        ...


def _as_id(module: Module | int) -> int:
    return module.id if isinstance(module, Module) else int(module)


def _aligned_injection(s: PlacementState, mid: int, w: float, h: float,
                       binding: list[tuple[int, Axis]]) -> list[tuple[float, float]]:
    """Positions satisfying the first binding constraint, slid until legal.

    Vertical alignment fixes x to center the module on the partner's center
    x and slides along y (outward past any module overlapping the x-strip);
    horizontal is symmetric. Preference order: satisfy all binding
    constraints if possible, else just the first.
    """
    partner, axis = binding[0]
    pcx, pcy = s.center(partner)
    out: list[tuple[float, float]] = []
    if axis is Axis.VERTICAL:
        x = pcx - 0.5 * w
        ov = (s.pxs < x + w) & (x < s.pxs + s.pws)
        if np.any(ov):
            out.append((x, float(np.max(s.pys[ov] + s.phs[ov]))))
            out.append((x, float(np.min(s.pys[ov]) - h)))
        else:
            out.append((x, float(s.ys[partner])))
    else:
        y = pcy - 0.5 * h
        ov = (s.pys < y + h) & (y < s.pys + s.phs)
        if np.any(ov):
            out.append((float(np.max(s.pxs[ov] + s.pws[ov])), y))
            out.append((float(np.min(s.pxs[ov]) - w), y))
        else:
            out.append((float(s.xs[partner]), y))
    out = sorted(set(out))
    legal = [
        p for p in out
        if not K.overlap_any(p[0], p[1], w, h, s.pxs, s.pys, s.pws, s.phs)
    ]
    if len(binding) > 1 and legal:
        best = [p for p in legal if _satisfies_all(s, p, w, h, binding)]
        if best:
            return best
    return legal


def _satisfies_all(s, pos, w, h, binding) -> bool:
    for partner, axis in binding:
        pcx, pcy = s.center(partner)
        if axis is Axis.VERTICAL:
            if abs(pos[0] + 0.5 * w - pcx) > ALIGN_TOL:
                return False
        elif abs(pos[1] + 0.5 * h - pcy) > ALIGN_TOL:
            return False
    return True


def candidates(s: PlacementState, module: Module | int) -> list[Action]:
    """Finite, deterministic, overlap-free candidate actions for a module.

    Never empty: a position flush right of the bounding box exists when
    everything else is filtered away.
    """
    c = s.circuit
    mid = _as_id(module)
    mod = c.modules[mid]
    if not s.placed:
        return [Action(mid, 0.0, 0.0)]
    cxs, cys = K.corner_candidates(s.pxs, s.pys, s.pws, s.phs, mod.w, mod.h)
    binding = [(p, ax) for (p, ax) in c.align_partners[mid] if s.is_placed(p)]
    if binding:
        for partner, axis in binding:
            pcx, pcy = s.center(partner)
            if axis is Axis.VERTICAL:
                keep = np.abs(cxs + 0.5 * mod.w - pcx) <= ALIGN_TOL
            else:
                keep = np.abs(cys + 0.5 * mod.h - pcy) <= ALIGN_TOL
            cxs = cxs[keep]
            cys = cys[keep]
        if len(cxs) == 0:
            inj = _aligned_injection(s, mid, mod.w, mod.h, binding)
            return [Action(mid, x, y) for x, y in inj] or [Action(mid, s.bx1, s.by0)]
    acts = [Action(mid, float(x), float(y)) for x, y in zip(cxs, cys)]
    if not acts:
        # Flush right of the bounding box: cannot overlap anything.
        acts = [Action(mid, float(s.bx1), float(s.by0))]
    return acts


def score_and_distribute(
    s: PlacementState, acts: list[Action], temperature: float = 0.3
) -> list[ScoredAction]:
    """Score candidates by negated one-step cost and softmax into probs."""
    if not acts:
        raise ValueError("score_and_distribute needs a non-empty action list")
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    c = s.circuit
    mid = acts[0].module
    mod = c.modules[mid]
    cxs = np.fromiter((a.x for a in acts), np.float64, len(acts))
    cys = np.fromiter((a.y for a in acts), np.float64, len(acts))
    idx = c.module_nets[mid]
    d_ds, d_hpwl = K.score_deltas(
        cxs, cys, mod.w, mod.h, mod.area, s.sum_area,
        s.bx0, s.by0, s.bx1, s.by1, s.ds,
        s.net_minx[idx], s.net_maxx[idx], s.net_miny[idx], s.net_maxy[idx],
        s.net_hp[idx],
    )
    scores = -(d_ds + d_hpwl / c.hpwl_min)
    z = scores / temperature
    z = z - z.max()
    p = np.exp(z)
    p = p / p.sum()
    return [
        ScoredAction(action=a, prob=float(p[i]), score=float(scores[i]))
        for i, a in enumerate(acts)
    ]


def sample(scored: list[ScoredAction], k: int, rng: np.random.Generator) -> list[ScoredAction]:
    """k distinct actions, sampled without replacement proportionally to prob.

    Uses exponential-race keys (log p + Gumbel noise, top-k by key), which
    draws the same distribution as sequential renormalized sampling. Returns
    the whole list in original order when k >= len(scored).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(scored)
    if k >= n:
        return list(scored)
    p = np.fromiter((sa.prob for sa in scored), np.float64, n)
    u = rng.random(n)
    with np.errstate(divide="ignore"):
        keys = np.log(p) - np.log(-np.log(u))
    order = np.argsort(-keys, kind="stable")
    return [scored[i] for i in order[:k]]


@dataclass(frozen=True)
class SoftmaxPolicy:
    """Default heuristic policy: greedy-delta scores under a softmax."""

    temperature: float = 0.3

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")

    def distribution(self, s: PlacementState, module: int) -> list[ScoredAction]:
        return score_and_distribute(s, candidates(s, module), self.temperature)
