"""Experiment harness: instance suites, the (algorithm x k x B) sweep, and
bound verification against the exact oracle.

Seed derivation (all via the splitmix64 stream, documented so any
implementation can reproduce the suite):

    map_seed(i)        = stream(master_seed, 2*i)
    instance_seed(i)   = stream(master_seed, 2*i + 1)
    fast_noise_seed(i) = stream(instance_seed(i), 1)
    nn_noise_seed(i)   = stream(instance_seed(i), 2)
    mlp_weight_seed    = stream(master_seed, 2**32)

Within one instance every algorithm and batch size shares the same fast
heuristic stream, so sweep cells are directly comparable.
"""

from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import rng
from .domain import ProblemInstance, generate_instance, generate_map
from .heuristics import BatchEvaluator, HeuristicSource, MlpTimingModel
from .oracle import dijkstra_optimal
from .results import NO_BATCH, BoundViolation, RunRecord, aggregate, write_results
from .search import SearchParams, SearchStatus, run

DEFAULT_MASTER_SEED = 20260809  # arbitrary date-stamp constant, fixed for reproducibility
MLP_SEED_INDEX = 1 << 32


@dataclass(frozen=True)
class ExperimentConfig:
    map_width: int = 512
    map_height: int = 512
    sand_density: float = 0.05
    master_seed: int = DEFAULT_MASTER_SEED
    num_instances: int = 30
    w_so: float = 2.5
    w_h: float = 2.5
    batch_sizes: tuple[int, ...] = (1, 5, 25, 125, 625)
    k_fast_levels: tuple[float, ...] = (0.005, 0.05, 0.5)
    k_nn: float = 0.01
    algorithms: tuple[str, ...] = ("nbba", "blocking", "focal")
    max_expansions: int = 1_000_000
    min_separation: int | None = None  # None: max(width, height) // 2
    output_path: str = "results"
    nn_latency_offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.batch_sizes or not self.k_fast_levels or not self.algorithms:
            raise ValueError("batch_sizes, k_fast_levels, and algorithms must be non-empty")
        unknown = set(self.algorithms) - {"nbba", "blocking", "focal"}
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.num_instances < 1:
            raise ValueError("num_instances must be >= 1")

    @property
    def separation(self) -> int:
        if self.min_separation is not None:
            return self.min_separation
        return max(self.map_width, self.map_height) // 2

    def runs_per_instance(self) -> int:
        batched = sum(1 for a in self.algorithms if a != "focal")
        focal = 1 if "focal" in self.algorithms else 0
        return len(self.k_fast_levels) * (batched * len(self.batch_sizes) + focal)

    def total_runs(self) -> int:
        return self.num_instances * self.runs_per_instance()

    def to_json(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["batch_sizes"] = list(self.batch_sizes)
        doc["k_fast_levels"] = list(self.k_fast_levels)
        doc["algorithms"] = list(self.algorithms)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        kept = {k: v for k, v in doc.items() if k in fields}
        for name in ("batch_sizes", "k_fast_levels", "algorithms"):
            if name in kept:
                kept[name] = tuple(kept[name])
        return cls(**kept)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class InstanceSeeds:
    instance_id: int
    map_seed: int
    instance_seed: int
    fast_noise_seed: int
    nn_noise_seed: int


def derive_seeds(master_seed: int, instance_id: int) -> InstanceSeeds:
    instance_seed = rng.stream(master_seed, 2 * instance_id + 1)
    return InstanceSeeds(
        instance_id=instance_id,
        map_seed=rng.stream(master_seed, 2 * instance_id),
        instance_seed=instance_seed,
        fast_noise_seed=rng.stream(instance_seed, 1),
        nn_noise_seed=rng.stream(instance_seed, 2),
    )


def mlp_weight_seed(master_seed: int) -> int:
    return rng.stream(master_seed, MLP_SEED_INDEX)


def build_instance(config: ExperimentConfig, instance_id: int) -> tuple[ProblemInstance, InstanceSeeds]:
    seeds = derive_seeds(config.master_seed, instance_id)
    grid = generate_map(config.map_width, config.map_height, config.sand_density, seeds.map_seed)
    inst = generate_instance(grid, seeds.instance_seed, config.separation)
    return inst, seeds


def resolved_config_doc(config: ExperimentConfig) -> dict:
    """config.json payload: the config plus every derived seed."""
    doc = config.to_json()
    doc["min_separation"] = config.separation
    doc["mlp_weight_seed"] = mlp_weight_seed(config.master_seed)
    doc["instances"] = [dataclasses.asdict(derive_seeds(config.master_seed, i)) for i in range(config.num_instances)]
    return doc


class AccountingError(RuntimeError):
    """A run broke the batch-flush accounting invariants."""


def _check_flush_accounting(algorithm: str, batch_size: int, metrics) -> None:
    if algorithm == "focal":
        return
    sizes = metrics.flush_sizes
    forced = metrics.flush_forced
    if metrics.waitlist_residue >= batch_size:
        raise AccountingError(f"{algorithm} terminated with a full batch unflushed")
    if algorithm == "nbba":
        if metrics.forced_flushes:
            raise AccountingError("nbba forced a flush")
        if any(s < batch_size for s in sizes):
            raise AccountingError(f"nbba flush below batch size: {sizes}")
    else:
        bad = [s for s, f in zip(sizes, forced) if not f and s < batch_size]
        if bad:
            raise AccountingError(f"blocking unforced flush below batch size: {bad}")


def execute_instance(config: ExperimentConfig, instance_id: int) -> list[RunRecord]:
    """All sweep cells for one instance; the oracle runs once and is shared."""
    inst, seeds = build_instance(config, instance_id)
    optimal = dijkstra_optimal(inst)
    weight_seed = mlp_weight_seed(config.master_seed)
    records = []
    for algorithm in config.algorithms:
        batches: Sequence[int] = (NO_BATCH,) if algorithm == "focal" else config.batch_sizes
        for k_fast in config.k_fast_levels:
            fast = HeuristicSource(goal=inst.goal, k=k_fast, noise_seed=seeds.fast_noise_seed)
            for batch_size in batches:
                evaluator = None
                if algorithm != "focal":
                    evaluator = BatchEvaluator(
                        source=HeuristicSource(goal=inst.goal, k=config.k_nn, noise_seed=seeds.nn_noise_seed),
                        model=MlpTimingModel(weight_seed),
                        width=inst.map.width,
                        latency_offset=config.nn_latency_offset,
                    )
                params = SearchParams(
                    w_so=config.w_so,
                    w_h=config.w_h,
                    batch_size=max(batch_size, 1),
                    max_expansions=config.max_expansions,
                )
                t0 = time.perf_counter()
                outcome = run(algorithm, inst, fast, params, evaluator=evaluator)
                wall = time.perf_counter() - t0
                _check_flush_accounting(algorithm, batch_size, outcome.metrics)
                solved = outcome.status is SearchStatus.SOLUTION_FOUND
                record = RunRecord(
                    algorithm=algorithm,
                    k_fast=k_fast,
                    batch_size=batch_size,
                    instance_id=instance_id,
                    expansions=outcome.metrics.expansions,
                    lazy_reinsertions=outcome.metrics.lazy_reinsertions,
                    generations=outcome.metrics.generations,
                    flushes=outcome.metrics.flushes,
                    flushed_states=outcome.metrics.flushed_states,
                    inference_time=outcome.metrics.inference_time,
                    wall_time=wall,
                    status=outcome.status.value,
                    cost=outcome.cost if solved else None,
                    optimal_cost=optimal,
                    suboptimality_ratio=(outcome.cost / optimal) if solved else None,
                )
                if solved and outcome.cost > config.w_so * optimal:
                    raise BoundViolation(
                        f"bound violated: {algorithm} k={k_fast} B={batch_size} "
                        f"instance={instance_id}: cost {outcome.cost} > "
                        f"{config.w_so} * optimal {optimal}",
                        diagnostics={
                            "record": dataclasses.asdict(record),
                            "instance": {
                                "map_seed": seeds.map_seed,
                                "instance_seed": seeds.instance_seed,
                                "width": config.map_width,
                                "height": config.map_height,
                                "density": config.sand_density,
                                "start": dataclasses.asdict(inst.start),
                                "goal": list(inst.goal),
                            },
                        },
                    )
                records.append(record)
    return records


def run_experiment(
    config: ExperimentConfig,
    workers: int = 1,
    on_progress: Callable[[int, int], None] | None = None,
) -> list[RunRecord]:
    """Execute the full sweep.  Instances run independently (optionally on a
    process pool); record order is instance-major and deterministic
    regardless of worker count."""
    per_instance: list[list[RunRecord]] = [[] for _ in range(config.num_instances)]
    done = 0
    if workers <= 1:
        for i in range(config.num_instances):
            per_instance[i] = execute_instance(config, i)
            done += 1
            if on_progress:
                on_progress(done, config.num_instances)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(execute_instance, config, i): i for i in range(config.num_instances)}
            for future, i in futures.items():
                per_instance[i] = future.result()
                done += 1
                if on_progress:
                    on_progress(done, config.num_instances)
    return [r for block in per_instance for r in block]


def run_and_write(config: ExperimentConfig, workers: int = 1,
                  on_progress: Callable[[int, int], None] | None = None) -> list[RunRecord]:
    records = run_experiment(config, workers=workers, on_progress=on_progress)
    write_results(records, aggregate(records), config.output_path, resolved_config_doc(config))
    return records
