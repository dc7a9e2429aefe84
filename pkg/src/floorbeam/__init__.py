"""Beam-search floorplanning for analog IC block placement.

Public surface: circuit modeling (netlist), placement state geometry,
RUDY congestion estimation, the beam-search engine, the simulated
annealing baseline, the benchmark harness, and SVG rendering.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .annealing import SaParams, SeqPair, anneal, decode
from .bench import AlgoSpec, SuiteResult, improvement, run_suite
from .congestion import (
    NetBox, RudyConfig, RudyGrid, export_rudy_csv, indicator, net_box,
    rudy_grid, rudy_scalar,
)
from .env import (
    Episode, RewardConfig, episode_return, hpwl_min_estimate, reset, step,
    terminal_reward,
)
from .errors import CircuitError, FloorbeamError, PlacementError, SearchError
from .netlist import (
    AlignmentConstraint, Axis, Circuit, Module, Net, circuit_from_dict,
    circuit_to_dict, gen_circuit,
    load_circuit, placement_order, save_circuit, validate_circuit,
)
from .placement import (
    PlacementState, StepDelta, aspect_ratio, dead_space, hpwl, place,
)
from .policy import (
    Action, Policy, ScoredAction, SoftmaxPolicy, candidates, sample,
    score_and_distribute,
)
from .render import render_svg
from .search import (
    SearchNode, SearchParams, expand_node, prune_level,
    resample_for_congestion, search,
)
from .stats import (
    RunRecord, StatSummary, bootstrap_ci, iqm, iqr, record_from_json,
    record_to_json, summarize,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "__version__",
    "AlignmentConstraint", "Axis", "Circuit", "Module", "Net",
    "circuit_from_dict", "circuit_to_dict",
    "gen_circuit", "load_circuit", "save_circuit", "placement_order",
    "validate_circuit",
    "PlacementState", "StepDelta", "place", "dead_space", "hpwl", "aspect_ratio",
    "NetBox", "RudyConfig", "RudyGrid", "net_box", "indicator", "rudy_grid",
    "rudy_scalar", "export_rudy_csv",
    "Action", "ScoredAction", "Policy", "SoftmaxPolicy", "candidates",
    "score_and_distribute", "sample",
    "RewardConfig", "Episode", "reset", "step", "terminal_reward",
    "episode_return", "hpwl_min_estimate",
    "SearchParams", "SearchNode", "search", "expand_node", "prune_level",
    "resample_for_congestion",
    "SeqPair", "SaParams", "decode", "anneal",
    "RunRecord", "StatSummary", "iqm", "iqr", "bootstrap_ci", "summarize",
    "record_to_json", "record_from_json",
    "AlgoSpec", "SuiteResult", "run_suite", "improvement",
    "render_svg",
    "FloorbeamError", "CircuitError", "PlacementError", "SearchError",
]
