"""Run records and robust statistics: IQM, IQR, bootstrap CIs.

RunRecord is the one-row-per-run result format shared by all algorithms and
serialized as JSON lines. Infinite parameter values (e.g. an unset
congestion threshold) serialize as the string "inf" so the lines stay
strict JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FloorbeamError


@dataclass(frozen=True)
class RunRecord:
    algo: str
    circuit: str
    runtime_s: float
    ds: float | None         # percent
    hpwl: float | None       # length units
    rudy: float | None
    reward: float | None     # episode return R
    seed: int
    congestion_fallbacks: int = 0
    params: dict = field(default_factory=dict)
    error: str | None = None


@dataclass(frozen=True)
class StatSummary:
    iqm: float
    iqr: float
    ci_lo: float
    ci_hi: float
    n: int


def _jsonable(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _unjsonable(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    if v == "nan":
        return math.nan
    if isinstance(v, dict):
        return {k: _unjsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_unjsonable(x) for x in v]
    return v


def record_to_json(rec: RunRecord) -> str:
    out = {
        "algo": rec.algo,
        "circuit": rec.circuit,
        "runtime_s": rec.runtime_s,
        "ds": rec.ds,
        "hpwl": rec.hpwl,
        "rudy": rec.rudy,
        "reward": rec.reward,
        "seed": rec.seed,
        "congestion_fallbacks": rec.congestion_fallbacks,
        "params": _jsonable(rec.params),
        "error": rec.error,
    }
    return json.dumps(out, separators=(",", ":"))


def record_from_json(line: str) -> RunRecord:
    raw = json.loads(line)
    return RunRecord(
        algo=raw["algo"],
        circuit=raw["circuit"],
        runtime_s=raw["runtime_s"],
        ds=raw["ds"],
        hpwl=raw["hpwl"],
        rudy=raw["rudy"],
        reward=raw["reward"],
        seed=raw["seed"],
        congestion_fallbacks=raw.get("congestion_fallbacks", 0),
        params=_unjsonable(raw.get("params", {})),
        error=raw.get("error"),
    )


def iqm(xs) -> float:
    """Inter-quartile mean: drop the lowest and highest quartile by count.

    Keeps sorted ranks [ceil(n/4), n - ceil(n/4)); plain mean for n < 4.
    """
    xs = np.asarray(xs, dtype=np.float64)
    n = len(xs)
    if n == 0:
        raise FloorbeamError("iqm of an empty sample")
    if n < 4:
        return float(xs.mean())
    lo = math.ceil(n / 4)
    return float(np.sort(xs)[lo : n - lo].mean())


def iqr(xs) -> float:
    """Inter-quartile range Q3 - Q1 with linear-interpolation quantiles."""
    xs = np.asarray(xs, dtype=np.float64)
    if len(xs) == 0:
        raise FloorbeamError("iqr of an empty sample")
    q1, q3 = np.quantile(xs, [0.25, 0.75])
    return float(q3 - q1)


def bootstrap_ci(
    xs,
    stat: Callable = iqm,
    B: int = 10_000,
    alpha: float = 1e-5,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval [alpha/2, 1-alpha/2] of a statistic."""
    xs = np.asarray(xs, dtype=np.float64)
    n = len(xs)
    if n < 2:
        raise FloorbeamError(f"bootstrap_ci needs at least 2 samples, got {n}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(B, n))
    draws = xs[idx]
    if stat is iqm:
        # Vectorized IQM over rows.
        if n < 4:
            reps = draws.mean(axis=1)
        else:
            lo = math.ceil(n / 4)
            reps = np.sort(draws, axis=1)[:, lo : n - lo].mean(axis=1)
    else:
        reps = np.array([stat(row) for row in draws])
    lo_q, hi_q = np.quantile(reps, [alpha / 2, 1 - alpha / 2])
    return float(lo_q), float(hi_q)


def summarize(xs, ci_seed: int = 0, B: int = 10_000, alpha: float = 1e-5) -> StatSummary:
    """IQM/IQR plus a bootstrap CI of the IQM (when n allows)."""
    xs = list(xs)
    point = iqm(xs)
    spread = iqr(xs)
    if len(xs) >= 2:
        lo, hi = bootstrap_ci(xs, iqm, B=B, alpha=alpha, seed=ci_seed)
    else:
        lo = hi = point
    return StatSummary(iqm=point, iqr=spread, ci_lo=lo, ci_hi=hi, n=len(xs))
