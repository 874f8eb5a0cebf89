"""Public search interface over the engine backends.

Three algorithms share one engine:

* ``focal``    - plain focal search on the fast heuristic; no batching.
* ``nbba``     - non-blocking batched search: successors enter OPEN and
  FOCAL immediately keyed by the fast heuristic, batch-evaluated values
  land in a cache overlay, and stale FOCAL keys are fixed lazily at pop.
* ``blocking`` - the blocking baseline: successors enter OPEN immediately
  but are withheld from FOCAL until their batch is evaluated.

All three guarantee solution cost <= w_so * optimal because OPEN is always
keyed by the admissible fast heuristic and FOCAL only ever admits nodes
within w_so of the OPEN minimum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _core_py, backend
from .domain import GridState, ProblemInstance
from .heuristics import BatchEvaluator, HeuristicSource

ALGORITHMS = ("focal", "nbba", "blocking")
_ALGO_IDS = {"focal": _core_py.ALGO_FOCAL, "nbba": _core_py.ALGO_NBBA, "blocking": _core_py.ALGO_BLOCKING}


class SearchStatus(enum.Enum):
    SOLUTION_FOUND = "solved"
    EXPANSION_LIMIT = "expansion_limit"
    EXHAUSTED = "exhausted"


_STATUS_BY_CODE = {
    _core_py.STATUS_SOLVED: SearchStatus.SOLUTION_FOUND,
    _core_py.STATUS_EXPANSION_LIMIT: SearchStatus.EXPANSION_LIMIT,
    _core_py.STATUS_EXHAUSTED: SearchStatus.EXHAUSTED,
}


@dataclass(frozen=True)
class SearchParams:
    w_so: float = 2.5
    w_h: float = 2.5
    batch_size: int = 1
    max_expansions: int = 1_000_000

    def __post_init__(self) -> None:
        if self.w_so < 1.0 or self.w_h < 1.0:
            raise ValueError("w_so and w_h must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_expansions < 1:
            raise ValueError("max_expansions must be >= 1")


@dataclass(frozen=True)
class EventLog:
    """Per-expansion trace: parallel arrays over expansion index."""

    state: np.ndarray
    g: np.ndarray
    f_min: np.ndarray
    waitlist_size: np.ndarray

    def __len__(self) -> int:
        return len(self.state)


@dataclass(frozen=True)
class SearchMetrics:
    expansions: int
    generations: int
    lazy_reinsertions: int
    flushes: int
    forced_flushes: int
    flushed_states: int
    flush_sizes: tuple[int, ...]
    flush_forced: tuple[bool, ...]
    inference_time: float
    waitlist_residue: int
    overlay_size: int
    events: EventLog | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SearchOutcome:
    status: SearchStatus
    path: tuple[GridState, ...] | None
    cost: int | None
    metrics: SearchMetrics

    @property
    def solved(self) -> bool:
        return self.status is SearchStatus.SOLUTION_FOUND


def run(
    algorithm: str,
    instance: ProblemInstance,
    fast: HeuristicSource,
    params: SearchParams,
    evaluator: BatchEvaluator | None = None,
    collect_events: bool = False,
    backend_name: str | None = None,
) -> SearchOutcome:
    """Execute one search run and decode the outcome.

    ``fast`` must be admissible for the instance (noisy Manhattan always
    is).  ``evaluator`` is required for the batched algorithms and must
    target the same goal.
    """
    if algorithm not in _ALGO_IDS:
        raise ValueError(f"unknown algorithm {algorithm!r} (expected one of {ALGORITHMS})")
    if algorithm != "focal" and evaluator is None:
        raise ValueError(f"{algorithm} requires a batch evaluator")
    if fast.goal != instance.goal:
        raise ValueError("fast heuristic goal differs from the instance goal")
    m = instance.map
    raw = backend.kernel(backend_name).run_search(
        _ALGO_IDS[algorithm],
        m.width,
        m.height,
        m.bits,
        m.state_index(instance.start),
        instance.goal[0],
        instance.goal[1],
        params.w_so,
        params.w_h,
        params.batch_size,
        params.max_expansions,
        fast.k,
        fast.noise_seed,
        evaluator,
        collect_events,
    )
    events = None
    if raw["events"] is not None:
        events = EventLog(**raw["events"])
    metrics = SearchMetrics(
        expansions=raw["expansions"],
        generations=raw["generations"],
        lazy_reinsertions=raw["lazy_reinsertions"],
        flushes=raw["flushes"],
        forced_flushes=raw["forced_flushes"],
        flushed_states=raw["flushed_states"],
        flush_sizes=tuple(raw["flush_sizes"]),
        flush_forced=tuple(bool(b) for b in raw["flush_forced"]),
        inference_time=raw["inference_time"],
        waitlist_residue=raw["waitlist_residue"],
        overlay_size=raw["overlay_size"],
        events=events,
    )
    path = None
    if raw["path"] is not None:
        path = tuple(m.decode_state(sid) for sid in raw["path"])
    return SearchOutcome(
        status=_STATUS_BY_CODE[raw["status"]],
        path=path,
        cost=raw["cost"],
        metrics=metrics,
    )


def focal_search(
    instance: ProblemInstance,
    fast: HeuristicSource,
    params: SearchParams,
    **kwargs,
) -> SearchOutcome:
    return run("focal", instance, fast, params, **kwargs)


def nbba_search(
    instance: ProblemInstance,
    fast: HeuristicSource,
    evaluator: BatchEvaluator,
    params: SearchParams,
    **kwargs,
) -> SearchOutcome:
    return run("nbba", instance, fast, params, evaluator=evaluator, **kwargs)


def blocking_kfocal_search(
    instance: ProblemInstance,
    fast: HeuristicSource,
    evaluator: BatchEvaluator,
    params: SearchParams,
    **kwargs,
) -> SearchOutcome:
    return run("blocking", instance, fast, params, evaluator=evaluator, **kwargs)


def path_cost(path: Sequence[GridState], transition_cost: Callable[[GridState, GridState], int]) -> int:
    """Sum of transition costs along a path (test oracle convenience)."""
    return sum(transition_cost(a, b) for a, b in zip(path, path[1:]))
