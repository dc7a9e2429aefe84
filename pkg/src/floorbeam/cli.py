"""Command-line front end: gen | run | bench | render.

Flag precedence is CLI flag > config file (--config, JSON object keyed by
flag names with underscores) > built-in default. Parameter validation
happens before any computation and error messages name the offending
setting. Exit codes: 0 success, 1 runtime failure (IO, infeasible search),
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .annealing import SaParams, anneal
from .bench import AlgoSpec, run_suite
from .congestion import RudyConfig, rudy_grid, export_rudy_csv
from .env import RewardConfig
from .errors import FloorbeamError
from .netlist import gen_circuit, load_circuit, save_circuit
from .placement import PlacementState
from .policy import SoftmaxPolicy
from .render import render_svg
from .search import SearchParams, search
from .stats import record_to_json

_SEARCH_KEYS = (
    "q", "epsilon", "beta", "level_cap", "alpha", "delta",
    "congestion_threshold", "resample_frac", "seed",
)
_REWARD_KEYS = ("omega1", "omega2", "omega3", "gamma", "penalty", "target_ar")
_SA_KEYS = ("t0", "cooling", "iters_per_temp", "t_min")
_RUDY_KEYS = ("w_wire", "rudy_grid", "rudy_agg")
_OTHER_KEYS = ("algo", "policy", "temperature", "raw_hpwl_delta", "repeats", "base_seed", "algos")


def _add_search_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("search")
    g.add_argument("--q", type=int, help="tree arity (actions sampled per node)")
    g.add_argument("--epsilon", type=float, help="per-level pruning probability")
    g.add_argument("--beta", type=int, help="beam width")
    g.add_argument("--level-cap", type=int, dest="level_cap", help="max level width before forced pruning")
    g.add_argument("--alpha", type=float, help="node-value weight on the DS term")
    g.add_argument("--delta", type=float, help="node-value weight on the HPWL term")
    g.add_argument("--congestion-threshold", type=float, dest="congestion_threshold",
                   help="RUDY threshold triggering resampling (inf disables)")
    g.add_argument("--resample-frac", type=float, dest="resample_frac",
                   help="fraction of q resampled on congestion")
    g.add_argument("--seed", type=int, help="search rng seed")


def _add_reward_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("reward")
    g.add_argument("--omega1", type=float, help="terminal dead-space weight")
    g.add_argument("--omega2", type=float, help="terminal HPWL weight")
    g.add_argument("--omega3", type=float, help="terminal aspect-ratio weight")
    g.add_argument("--gamma", type=float, help="reward discount")
    g.add_argument("--penalty", type=float, help="constraint-violation reward")
    g.add_argument("--target-ar", type=float, dest="target_ar", help="target aspect ratio")
    g.add_argument("--raw-hpwl-delta", action="store_true", default=None, dest="raw_hpwl_delta",
                   help="do not normalize intermediate HPWL deltas")


def _add_policy_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("policy")
    g.add_argument("--policy", choices=["greedy-softmax"], help="policy implementation")
    g.add_argument("--temperature", type=float, help="softmax temperature")


def _add_sa_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("annealing")
    g.add_argument("--t0", type=float, help="initial temperature")
    g.add_argument("--cooling", type=float, help="multiplicative cooling factor")
    g.add_argument("--iters-per-temp", type=int, dest="iters_per_temp", help="moves per temperature")
    g.add_argument("--t-min", type=float, dest="t_min", help="stop temperature")


def _add_rudy_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("congestion")
    g.add_argument("--w-wire", type=float, dest="w_wire", help="wire width for RUDY density")
    g.add_argument("--rudy-grid", type=int, dest="rudy_grid", help="RUDY grid resolution")
    g.add_argument("--rudy-agg", choices=["max", "mean"], dest="rudy_agg", help="RUDY scalar aggregate")


def _load_config(path, allowed: set[str]) -> dict:
    with open(path) as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    for key in raw:
        if key not in allowed:
            raise ValueError(f"config file {path}: unknown key {key!r}")
    return raw


def _pick(args, config: dict, name: str):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return config.get(name)


def _kwargs(args, config, names) -> dict:
    out = {}
    for name in names:
        v = _pick(args, config, name)
        if v is not None:
            out[name] = v
    return out


def _rudy_config(args, config) -> RudyConfig:
    kw = {}
    v = _pick(args, config, "w_wire")
    if v is not None:
        kw["w_wire"] = v
    v = _pick(args, config, "rudy_grid")
    if v is not None:
        kw["grid"] = v
    v = _pick(args, config, "rudy_agg")
    if v is not None:
        kw["agg"] = v
    return RudyConfig(**kw)


def _search_params(args, config) -> SearchParams:
    return SearchParams(**_kwargs(args, config, _SEARCH_KEYS), rudy=_rudy_config(args, config))


def _sa_params(args, config) -> SaParams:
    kw = _kwargs(args, config, _SA_KEYS)
    seed = _pick(args, config, "seed")
    if seed is not None:
        kw["seed"] = seed
    return SaParams(**kw, rudy=_rudy_config(args, config))


def _reward_config(args, config) -> RewardConfig:
    kw = _kwargs(args, config, _REWARD_KEYS)
    if _pick(args, config, "raw_hpwl_delta"):
        kw["normalize_hpwl_delta"] = False
    return RewardConfig(**kw)


def _policy(args, config) -> SoftmaxPolicy:
    t = _pick(args, config, "temperature")
    return SoftmaxPolicy(temperature=t) if t is not None else SoftmaxPolicy()


def _config_for(args, allowed: set[str]) -> dict:
    path = getattr(args, "config", None)
    return _load_config(path, allowed) if path else {}


def cmd_gen(args) -> int:
    c = gen_circuit(
        seed=args.seed, m=args.modules, net_density=args.net_density,
        n_alignments=args.alignments, target_ar=args.target_ar,
    )
    save_circuit(c, args.out)
    print(f"wrote {args.out}: m={c.m}, nets={len(c.nets)}, alignments={len(c.alignments)}")
    return 0


def _write_floorplan(state: PlacementState, path):
    out = {str(i): {"x": xy[0], "y": xy[1]} for i, xy in sorted(state.coords.items())}
    with open(path, "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


def _load_floorplan(path) -> dict[int, tuple[float, float]]:
    with open(path) as f:
        raw = json.load(f)
    try:
        return {int(k): (float(v["x"]), float(v["y"])) for k, v in raw.items()}
    except (TypeError, KeyError, ValueError) as exc:
        raise FloorbeamError(f"{path}: malformed floorplan JSON: {exc}") from exc


def cmd_run(args) -> int:
    allowed = set(_SEARCH_KEYS + _REWARD_KEYS + _SA_KEYS + _RUDY_KEYS + _OTHER_KEYS)
    config = _config_for(args, allowed)
    algo = _pick(args, config, "algo") or "bsrl"
    if algo not in ("bsrl", "greedy", "sa"):
        raise ValueError(f"--algo must be bsrl, greedy, or sa, got {algo!r}")
    cfg = _reward_config(args, config)
    circuit = load_circuit(args.circuit)
    label = Path(args.circuit).stem
    if algo == "sa":
        state, rec = anneal(circuit, _sa_params(args, config), cfg, label=label)
    else:
        params = _search_params(args, config)
        if algo == "greedy":
            params = dataclasses.replace(params, q=1)
        state, rec = search(
            circuit, params, cfg, policy=_policy(args, config), label=label, algo=algo,
        )
    _write_floorplan(state, args.out)
    line = record_to_json(rec)
    if args.record:
        with open(args.record, "a") as f:
            f.write(line + "\n")
    else:
        print(line)
    if args.svg:
        overlay = rudy_grid(state, _rudy_config(args, config).grid,
                            _rudy_config(args, config).w_wire) if args.rudy_overlay else None
        Path(args.svg).write_text(
            render_svg(circuit, state.coords, scale=args.scale,
                       show_nets=args.show_nets, rudy=overlay)
        )
    if args.rudy_csv:
        rc = _rudy_config(args, config)
        export_rudy_csv(rudy_grid(state, rc.grid, rc.w_wire), args.rudy_csv)
    print(
        f"{algo}: ds={rec.ds:.2f}% hpwl={rec.hpwl:.2f} rudy={rec.rudy:.3f} "
        f"R={rec.reward:.3f} runtime={rec.runtime_s:.2f}s -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _parse_algos(spec: str, search_base: SearchParams, sa_base: SaParams) -> list[AlgoSpec]:
    out = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        name, _, thresh = token.partition("@")
        if name not in ("bsrl", "greedy", "sa"):
            raise ValueError(f"--algos: unknown algorithm {name!r} in {token!r}")
        if thresh:
            if name == "sa":
                raise ValueError("--algos: sa takes no congestion threshold")
            params = dataclasses.replace(search_base, congestion_threshold=float(thresh))
            out.append(AlgoSpec(name=name, label=token, search=params))
        elif name == "sa":
            out.append(AlgoSpec(name=name, sa=sa_base))
        else:
            out.append(AlgoSpec(name=name, search=search_base))
    if not out:
        raise ValueError("--algos lists no algorithms")
    return out


def cmd_bench(args) -> int:
    allowed = set(_SEARCH_KEYS + _REWARD_KEYS + _SA_KEYS + _RUDY_KEYS + _OTHER_KEYS)
    config = _config_for(args, allowed)
    cfg = _reward_config(args, config)
    algos = _parse_algos(
        _pick(args, config, "algos") or "greedy,bsrl,sa",
        _search_params(args, config), _sa_params(args, config),
    )
    repeats = _pick(args, config, "repeats") or 100
    base_seed = _pick(args, config, "base_seed") or 0
    circuits = [(Path(p).stem, load_circuit(p)) for p in args.circuits]
    result = run_suite(
        circuits, algos, repeats=repeats, base_seed=base_seed, cfg=cfg,
        jsonl_path=args.out_jsonl,
    )
    if args.out_table:
        Path(args.out_table).write_text(result.table)
    print(result.table, end="")
    return 0


def cmd_render(args) -> int:
    circuit = load_circuit(args.circuit)
    coords = _load_floorplan(args.floorplan)
    state = PlacementState.from_coords(circuit, coords)
    overlay = None
    rc_grid = args.rudy_grid if args.rudy_grid is not None else 32
    rc_wire = args.w_wire if args.w_wire is not None else 0.5
    if args.rudy_overlay or args.rudy_csv:
        grid = rudy_grid(state, rc_grid, rc_wire)
        if args.rudy_overlay:
            overlay = grid
        if args.rudy_csv:
            export_rudy_csv(grid, args.rudy_csv)
    Path(args.out).write_text(
        render_svg(circuit, coords, scale=args.scale, show_nets=args.show_nets,
                   rudy=overlay)
    )
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floorbeam",
        description="Beam-search floorplanning for analog IC block placement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic circuit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-m", "--modules", type=int, required=True)
    p.add_argument("--net-density", type=float, default=0.8, dest="net_density")
    p.add_argument("--alignments", type=int, default=0)
    p.add_argument("--target-ar", type=float, default=None, dest="target_ar")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="floorplan one circuit")
    p.add_argument("circuit")
    p.add_argument("--algo", choices=["bsrl", "greedy", "sa"], default=None)
    p.add_argument("--config", default=None, help="JSON config file (flag precedence: CLI > config > default)")
    _add_search_flags(p)
    _add_reward_flags(p)
    _add_policy_flags(p)
    _add_sa_flags(p)
    _add_rudy_flags(p)
    p.add_argument("--out", default="floorplan.json", help="floorplan JSON output path")
    p.add_argument("--record", default=None, help="append the RunRecord JSON line here")
    p.add_argument("--svg", default=None, help="also render the floorplan to SVG")
    p.add_argument("--scale", type=float, default=8.0)
    p.add_argument("--show-nets", action="store_true", dest="show_nets")
    p.add_argument("--rudy-overlay", action="store_true", dest="rudy_overlay")
    p.add_argument("--rudy-csv", default=None, dest="rudy_csv", help="export the final RUDY grid as CSV")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="run the benchmark protocol")
    p.add_argument("circuits", nargs="+")
    p.add_argument("--algos", default=None,
                   help="comma list of bsrl|greedy|sa, optionally name@threshold (default greedy,bsrl,sa)")
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None, dest="base_seed")
    p.add_argument("--config", default=None)
    _add_search_flags(p)
    _add_reward_flags(p)
    _add_policy_flags(p)
    _add_sa_flags(p)
    _add_rudy_flags(p)
    p.add_argument("--out-jsonl", default=None, dest="out_jsonl")
    p.add_argument("--out-table", default=None, dest="out_table")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="render a floorplan JSON to SVG")
    p.add_argument("circuit")
    p.add_argument("floorplan")
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=float, default=8.0)
    p.add_argument("--show-nets", action="store_true", dest="show_nets")
    p.add_argument("--rudy-overlay", action="store_true", dest="rudy_overlay")
    p.add_argument("--rudy-grid", type=int, default=None, dest="rudy_grid")
    p.add_argument("--w-wire", type=float, default=None, dest="w_wire")
    p.add_argument("--rudy-csv", default=None, dest="rudy_csv")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (FloorbeamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
