import math

import numpy as np
import pytest

from floorbeam import (
    FloorbeamError,
    RunRecord,
    StatSummary,
    bootstrap_ci,
    iqm,
    iqr,
    record_from_json,
    record_to_json,
    summarize,
)


def oracle_iqm(xs):
    xs = sorted(xs)
    n = len(xs)
    if n < 4:
        return sum(xs) / n
    k = math.ceil(n / 4)
    kept = xs[k : n - k]
    return sum(kept) / len(kept)


def test_iqm_hand_values():
    assert iqm([1, 2, 3, 4, 5, 6, 7, 8]) == 4.5
    assert iqm([5, 1, 3]) == 3.0
    assert iqm([7.0]) == 7.0


def test_iqm_order_and_shift_invariance():
    rng = np.random.default_rng(0)
    xs = rng.normal(size=25)
    assert iqm(rng.permutation(xs)) == pytest.approx(iqm(xs), abs=1e-12)
    assert iqm(xs + 10.0) == pytest.approx(iqm(xs) + 10.0, abs=1e-9)


def test_iqm_matches_oracle_across_sizes():
    rng = np.random.default_rng(1)
    for n in range(1, 41):
        xs = rng.normal(size=n).tolist()
        assert iqm(xs) == pytest.approx(oracle_iqm(xs), abs=1e-12)


def test_iqm_empty_raises():
    with pytest.raises(FloorbeamError):
        iqm([])


def test_iqr_hand_values():
    # linear-interpolation quartiles of 1..8 are 2.75 and 6.25
    assert iqr([1, 2, 3, 4, 5, 6, 7, 8]) == pytest.approx(3.5, abs=1e-12)
    assert iqr([4.0, 4.0, 4.0, 4.0]) == 0.0
    with pytest.raises(FloorbeamError):
        iqr([])


def test_bootstrap_degenerate_sample():
    lo, hi = bootstrap_ci([3.0] * 10)
    assert lo == 3.0 and hi == 3.0


def test_bootstrap_contains_point_estimate():
    rng = np.random.default_rng(2)
    for trial in range(20):
        xs = rng.normal(size=30)
        lo, hi = bootstrap_ci(xs, B=2_000, seed=trial)
        assert lo <= iqm(xs) <= hi


def test_bootstrap_width_shrinks_with_n():
    rng = np.random.default_rng(3)
    lo1, hi1 = bootstrap_ci(rng.normal(size=100), B=4_000, seed=0)
    lo2, hi2 = bootstrap_ci(rng.normal(size=400), B=4_000, seed=0)
    assert hi2 - lo2 < hi1 - lo1


def test_bootstrap_deterministic_per_seed():
    xs = np.random.default_rng(4).normal(size=50)
    assert bootstrap_ci(xs, seed=9) == bootstrap_ci(xs, seed=9)
    assert bootstrap_ci(xs, B=2_000, seed=9) != bootstrap_ci(xs, B=2_000, seed=10)


def test_bootstrap_needs_two_samples():
    with pytest.raises(FloorbeamError):
        bootstrap_ci([1.0])


def test_bootstrap_custom_stat_matches_manual_replication():
    xs = np.random.default_rng(5).normal(size=12)
    got = bootstrap_ci(xs, stat=np.median, B=200, alpha=0.1, seed=6)
    rng = np.random.default_rng(6)
    idx = rng.integers(0, len(xs), size=(200, len(xs)))
    reps = np.array([np.median(xs[row]) for row in idx])
    want = np.quantile(reps, [0.05, 0.95])
    assert got == (float(want[0]), float(want[1]))


def test_record_json_round_trip_with_infinities():
    rec = RunRecord(
        algo="bsrl", circuit="c0", runtime_s=0.5, ds=12.5, hpwl=30.0,
        rudy=0.8, reward=-4.0, seed=3,
        params={"search": {"congestion_threshold": math.inf, "q": 5},
                "limits": [-math.inf, 2.0]},
    )
    line = record_to_json(rec)
    assert '"congestion_threshold":"inf"' in line
    assert '"-inf"' in line
    assert record_from_json(line) == rec


def test_record_json_nan_param():
    rec = RunRecord(
        algo="sa", circuit="c1", runtime_s=1.0, ds=None, hpwl=None,
        rudy=None, reward=None, seed=0, params={"x": math.nan},
        error="placement failed",
    )
    back = record_from_json(record_to_json(rec))
    assert math.isnan(back.params["x"])
    assert back.error == "placement failed"
    assert back.ds is None and back.reward is None


def test_summarize_fields():
    xs = np.random.default_rng(7).normal(size=30)
    s = summarize(xs, ci_seed=11, B=2_000)
    assert isinstance(s, StatSummary)
    assert s.n == 30
    assert s.iqm == iqm(xs)
    assert s.iqr == iqr(xs)
    assert (s.ci_lo, s.ci_hi) == bootstrap_ci(xs, B=2_000, seed=11)
    one = summarize([2.0])
    assert (one.ci_lo, one.ci_hi, one.n) == (2.0, 2.0, 1)
