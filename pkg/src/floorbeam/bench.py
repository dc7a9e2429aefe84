"""Benchmark harness: repeated seeded runs, IQM/IQR/CI summaries, report.

Protocol: every (circuit, algorithm) cell is run `repeats` times; the run
seed depends only on (base_seed, circuit index, repeat), so all algorithms
see the same seed sequence and comparisons are paired. Metrics are
aggregated with the inter-quartile mean and range plus a percentile
bootstrap CI of the IQM, and reported against the first algorithm as the
baseline column.

Improvement conventions (matching how such tables are usually read):
DS improvements are absolute percentage-point differences; runtime, HPWL,
RUDY, and reward improvements are relative to the baseline value. Positive
numbers always mean the candidate improved on the baseline.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

from .annealing import SaParams, anneal
from .env import RewardConfig
from .errors import FloorbeamError
from .netlist import Circuit
from .search import SearchParams, search
from .stats import RunRecord, StatSummary, record_to_json, summarize

METRICS = ("runtime_s", "ds", "hpwl", "rudy", "reward")
_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class AlgoSpec:
    """One benchmark column: an algorithm token plus its parameters.

    name is one of bsrl | greedy | sa; greedy is the arity-1 search. The
    label defaults to the name and must be unique within a suite.
    """

    name: str
    label: str | None = None
    search: SearchParams | None = None
    sa: SaParams | None = None

    def __post_init__(self):
        if self.name not in ("bsrl", "greedy", "sa"):
            raise ValueError(f"unknown algorithm {self.name!r}")

    @property
    def column(self) -> str:
        return self.label or self.name

    def run(self, circuit: Circuit, seed: int, cfg: RewardConfig, label: str, clock):
        if self.name == "sa":
            params = dataclasses.replace(self.sa or SaParams(), seed=seed)
            return anneal(circuit, params, cfg, label=label, clock=clock)
        base = self.search or SearchParams()
        if self.name == "greedy":
            base = dataclasses.replace(base, q=1)
        params = dataclasses.replace(base, seed=seed)
        return search(circuit, params, cfg, label=label, algo=self.column, clock=clock)


@dataclass
class SuiteResult:
    records: list[RunRecord]
    summaries: dict[tuple[str, str, str], StatSummary]  # (circuit, algo, metric)
    table: str
    n_failures: int

    def to_jsonl(self) -> str:
        return "".join(record_to_json(r) + "\n" for r in self.records)


def improvement(metric: str, baseline_iqm: float, candidate_iqm: float) -> float | None:
    """Improvement of candidate over baseline, per-metric convention.

    ds: absolute percentage points (baseline - candidate).
    others: relative fraction (baseline - candidate) / baseline; positive is
    better for cost-like metrics and for the (negative) reward scale alike.
    """
    if metric == "ds":
        return baseline_iqm - candidate_iqm
    if baseline_iqm == 0:
        return None
    return (baseline_iqm - candidate_iqm) / baseline_iqm


def run_suite(
    circuits,
    algos,
    repeats: int = 100,
    base_seed: int = 0,
    cfg: RewardConfig | None = None,
    jsonl_path=None,
    clock=time.perf_counter,
) -> SuiteResult:
    """Run the full (circuit x algorithm x repeat) grid and summarize.

    circuits: iterable of (label, Circuit) pairs or bare Circuits (labeled
    c0, c1, ...). algos: AlgoSpec list or name tokens; the first entry is
    the baseline column. Per-run failures are recorded (error field set)
    and excluded from summaries rather than aborting the suite.
    """
    cfg = cfg or RewardConfig()
    circuits = [
        pair if isinstance(pair, tuple) else (f"c{i}", pair)
        for i, pair in enumerate(circuits)
    ]
    algos = [a if isinstance(a, AlgoSpec) else AlgoSpec(name=a) for a in algos]
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    columns = [a.column for a in algos]
    if len(set(columns)) != len(columns):
        raise ValueError(f"algo labels must be unique, got {columns}")

    records: list[RunRecord] = []
    n_failures = 0
    for ci, (label, circuit) in enumerate(circuits):
        for spec in algos:
            for rep in range(repeats):
                seed = base_seed + _SEED_STRIDE * ci + rep
                t0 = clock()
                try:
                    _, rec = spec.run(circuit, seed, cfg, label, clock)
                except FloorbeamError as exc:
                    rec = RunRecord(
                        algo=spec.column, circuit=label, runtime_s=clock() - t0,
                        ds=None, hpwl=None, rudy=None, reward=None,
                        seed=seed, error=str(exc),
                    )
                    n_failures += 1
                records.append(rec)

    summaries: dict[tuple[str, str, str], StatSummary] = {}
    for ci, (label, _) in enumerate(circuits):
        for ai, spec in enumerate(algos):
            ok = [
                r for r in records
                if r.circuit == label and r.algo == spec.column and r.error is None
            ]
            for mi, metric in enumerate(METRICS):
                xs = [getattr(r, metric) for r in ok]
                if xs:
                    ci_seed = base_seed + 7_777 + 1000 * ci + 100 * ai + mi
                    summaries[(label, spec.column, metric)] = summarize(xs, ci_seed)

    table = _format_table(circuits, columns, summaries, repeats, n_failures)
    result = SuiteResult(
        records=records, summaries=summaries, table=table, n_failures=n_failures,
    )
    if jsonl_path is not None:
        with open(jsonl_path, "w") as f:
            f.write(result.to_jsonl())
    return result


def _cell(summ: StatSummary | None, base: StatSummary | None, metric: str,
          is_baseline: bool) -> str:
    if summ is None:
        return "failed"
    text = f"{summ.iqm:.2f} ± {summ.iqr:.2f}"
    if not is_baseline and base is not None:
        imp = improvement(metric, base.iqm, summ.iqm)
        if imp is None:
            text += " (--)"
        elif metric == "ds":
            text += f" ({imp:+.2f}pp)"
        else:
            text += f" ({100 * imp:+.2f}%)"
    return text


def _format_table(circuits, columns, summaries, repeats, n_failures) -> str:
    lines = []
    lines.append(
        f"benchmark: {len(circuits)} circuits x {len(columns)} algorithms x "
        f"{repeats} repeats (IQM ± IQR; improvement vs {columns[0]}: "
        f"ds in percentage points, others relative)"
    )
    if n_failures:
        lines.append(f"failed runs: {n_failures}")
    for label, circuit in circuits:
        lines.append("")
        lines.append(f"circuit {label} (m={circuit.m}, nets={len(circuit.nets)})")
        rows = [["metric"] + list(columns)]
        for metric in METRICS:
            base = summaries.get((label, columns[0], metric))
            row = [metric]
            for col in columns:
                summ = summaries.get((label, col, metric))
                row.append(_cell(summ, base, metric, col == columns[0]))
            rows.append(row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
