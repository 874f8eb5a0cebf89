"""Bounded-suboptimal focal search with lazily batched heuristic evaluation.

The package ships three algorithms over a sand-trap grid world (plain focal
search, a non-blocking batched variant, and the blocking batched baseline),
a simulated batch neural heuristic, an exact-cost oracle, and a benchmark
harness that sweeps algorithm x noise level x batch size and verifies the
suboptimality guarantee on every run.
"""

from .backend import backend_name, compiled_available
from .domain import (
    GridState,
    ProblemInstance,
    SandMap,
    at_goal,
    generate_instance,
    generate_map,
    load_map,
    save_map,
    successors,
    transition_cost,
)
from .heuristics import BatchEvaluator, HeuristicCache, HeuristicSource, MlpTimingModel, manhattan
from .oracle import cost_to_go_table, dijkstra_optimal
from .search import (
    ALGORITHMS,
    SearchMetrics,
    SearchOutcome,
    SearchParams,
    SearchStatus,
    blocking_kfocal_search,
    focal_search,
    nbba_search,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BatchEvaluator",
    "GridState",
    "HeuristicCache",
    "HeuristicSource",
    "MlpTimingModel",
    "ProblemInstance",
    "SandMap",
    "SearchMetrics",
    "SearchOutcome",
    "SearchParams",
    "SearchStatus",
    "at_goal",
    "backend_name",
    "blocking_kfocal_search",
    "compiled_available",
    "cost_to_go_table",
    "dijkstra_optimal",
    "focal_search",
    "generate_instance",
    "generate_map",
    "load_map",
    "manhattan",
    "nbba_search",
    "run",
    "save_map",
    "successors",
    "transition_cost",
    "__version__",
]
