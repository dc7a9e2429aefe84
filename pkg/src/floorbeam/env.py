"""Sequential-placement MDP: rewards, episode stepping, terminal scoring.

Reward structure:
  intermediate  r_t = -(dDS_t + dHPWL_t / HPWL_min)
  terminal      r_T adds -w1/(1 - DS_T) - w2*HPWL_T/HPWL_min - w3*|Ar* - Ar|
  violation     the episode ends immediately with r = penalty (-50)

The HPWL delta normalization keeps the two intermediate terms commensurate
(DS is dimensionless, HPWL is a length); set normalize_hpwl_delta=False for
the raw-delta variant. The terminal HPWL term is always normalized. The
aspect-ratio term uses the absolute deviation and only applies when a
target is configured.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import FloorbeamError, PlacementError
from .netlist import Axis, Circuit, hpwl_min_estimate, placement_order
from .placement import PlacementState
from .policy import ALIGN_TOL, Action

__all__ = [
    "RewardConfig", "Episode", "reset", "step", "terminal_reward",
    "episode_return", "hpwl_min_estimate",
]


@dataclass(frozen=True)
class RewardConfig:
    omega1: float = 1.0
    omega2: float = 5.0
    omega3: float = 5.0
    gamma: float = 1.0
    penalty: float = -50.0
    target_ar: float | None = None
    normalize_hpwl_delta: bool = True

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.target_ar is not None and not self.target_ar > 0:
            raise ValueError(f"target_ar must be positive, got {self.target_ar}")


class Episode(NamedTuple):
    state: PlacementState
    t: int
    remaining: tuple[int, ...]
    rewards: tuple[float, ...]
    hpwl_min: float
    violated: bool

    @property
    def done(self) -> bool:
        return self.violated or not self.remaining


def reset(c: Circuit, order: list[int] | None = None) -> Episode:
    """Fresh episode over the circuit's placement sequence."""
    if order is None:
        order = placement_order(c)
    return Episode(
        state=PlacementState.empty(c),
        t=0,
        remaining=tuple(order),
        rewards=(),
        hpwl_min=c.hpwl_min,
        violated=False,
    )


def _resolved_target_ar(c: Circuit, cfg: RewardConfig) -> float | None:
    return cfg.target_ar if cfg.target_ar is not None else c.target_ar


def terminal_reward(s: PlacementState, cfg: RewardConfig, hpwl_min: float) -> float:
    """End-of-episode reward for a complete placement."""
    if len(s.placed) != s.circuit.m:
        raise FloorbeamError(
            f"terminal_reward needs all modules placed ({len(s.placed)}/{s.circuit.m})"
        )
    r = -cfg.omega1 / (1.0 - s.ds) - cfg.omega2 * (s.hpwl / hpwl_min)
    target = _resolved_target_ar(s.circuit, cfg)
    if target is not None:
        ar = (s.bx1 - s.bx0) / (s.by1 - s.by0)
        r -= cfg.omega3 * abs(target - ar)
    return r


def _alignment_violated(s: PlacementState, mid: int) -> bool:
    for partner, axis in s.circuit.align_partners[mid]:
        if s.is_placed(partner):
            ca = s.center(mid)
            cb = s.center(partner)
            if axis is Axis.VERTICAL:
                if abs(ca[0] - cb[0]) > ALIGN_TOL:
                    return True
            elif abs(ca[1] - cb[1]) > ALIGN_TOL:
                return True
    return False


def step(e: Episode, a: Action, cfg: RewardConfig) -> tuple[Episode, float, bool]:
    """Apply one placement action; returns (episode, reward, terminal).

    An overlapping or alignment-violating action ends the episode with the
    penalty reward and leaves the pre-action state in place.
    """
    if e.done:
        raise FloorbeamError("episode is already finished")
    if a.module != e.remaining[0]:
        raise FloorbeamError(
            f"action places module {a.module} but module {e.remaining[0]} is next"
        )
    try:
        s2, delta = e.state.place(a.module, a.x, a.y)
    except PlacementError:
        s2 = None
    if s2 is None or _alignment_violated(s2, a.module):
        ep2 = Episode(
            state=e.state, t=e.t, remaining=e.remaining,
            rewards=e.rewards + (cfg.penalty,), hpwl_min=e.hpwl_min, violated=True,
        )
        return ep2, cfg.penalty, True
    d_hpwl = delta.d_hpwl / e.hpwl_min if cfg.normalize_hpwl_delta else delta.d_hpwl
    r = -(delta.d_ds + d_hpwl)
    remaining = e.remaining[1:]
    terminal = not remaining
    if terminal:
        r += terminal_reward(s2, cfg, e.hpwl_min)
    ep2 = Episode(
        state=s2, t=e.t + 1, remaining=remaining,
        rewards=e.rewards + (r,), hpwl_min=e.hpwl_min, violated=False,
    )
    return ep2, r, terminal


def episode_return(rewards, gamma: float = 1.0) -> float:
    """Discounted sum of rewards from the episode start."""
    total = 0.0
    scale = 1.0
    for r in rewards:
        total += scale * r
        scale *= gamma
    return total
