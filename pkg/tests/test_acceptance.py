"""Acceptance criteria, one test per criterion, at stated tolerances.

The sweep criteria run against one full default-config execution (990 runs,
512x512, 30 instances, one worker so wall-clock ratios stay clean).  Each
test prints an ACCEPTANCE pass/fail line; run with
`pytest -s tests/test_acceptance.py` to see them all.

One criterion does not transfer to desk scale and is expected to fail
honestly rather than be weakened (see README "Scale limits"): the focal
k=0.5 weak-heuristic cap rate, which needs maps around 2048^2 before the
1M expansion cap bites.
"""

from __future__ import annotations

import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import batchfocal as bf
from batchfocal import rng
from batchfocal.oracle import cost_to_go_table
from batchfocal.results import read_aggregates, read_runs
from batchfocal.search import SearchParams

W_SO = 2.5
K_LEVELS = (0.005, 0.05, 0.5)
BATCHED = ("nbba", "blocking")


def _announce(name: str, ok: bool) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion failed: {name}"


def _cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "batchfocal.cli", *args],
        capture_output=True, text=True, timeout=3600,
    )


@pytest.fixture(scope="module")
def default_sweep(tmp_path_factory):
    """One full default-config sweep via the CLI; shared by every sweep test."""
    out = tmp_path_factory.mktemp("sweep") / "results"
    proc = _cli("run", "--out", str(out), "--workers", "1", "--quiet")
    assert proc.returncode == 0, proc.stderr[-2000:]
    runs = read_runs(out / "runs.csv")
    aggs = {(a.algorithm, a.k_fast, a.batch_size): a for a in read_aggregates(out / "aggregates.csv")}
    assert len(runs) == 990
    return out, runs, aggs


def test_bound_guarantee(default_sweep):
    """Every solved run of the full sweep: cost <= 2.5 * optimal, exactly."""
    _, runs, _ = default_sweep
    violations = [r for r in runs if r.solved and r.cost > W_SO * r.optimal_cost]
    _announce("bound-guarantee (990 runs)", not violations)


def test_small_scale_oracle_equivalence():
    """50 seeded 8x8 instances, w_so = w_h = 1, noiseless Manhattan: focal
    search returns exactly the Dijkstra-optimal cost."""
    ok = True
    for seed in range(50):
        m = bf.generate_map(8, 8, 0.05, seed=rng.stream(777, 2 * seed))
        inst = bf.generate_instance(m, rng.stream(777, 2 * seed + 1), min_separation=4)
        fast = bf.HeuristicSource(goal=inst.goal, k=0.0, noise_seed=0)
        out = bf.focal_search(inst, fast, SearchParams(w_so=1.0, w_h=1.0, max_expansions=100_000))
        if out.cost != bf.dijkstra_optimal(inst):
            ok = False
            break
    _announce("oracle-equivalence (50 x 8x8, w=1)", ok)


def test_degenerate_batch_equivalence():
    """nbba with B = 10^9 never flushes, so its expansion log must match
    focal search byte for byte on 10 seeded 32x32 instances."""
    ok = True
    for seed in range(10):
        m = bf.generate_map(32, 32, 0.05, seed=rng.stream(888, 2 * seed))
        inst = bf.generate_instance(m, rng.stream(888, 2 * seed + 1), min_separation=16)
        fast = bf.HeuristicSource(goal=inst.goal, k=0.05, noise_seed=rng.stream(888, 100 + seed))
        nn = bf.HeuristicSource(goal=inst.goal, k=0.01, noise_seed=rng.stream(888, 200 + seed))
        evaluator = bf.BatchEvaluator(nn, bf.MlpTimingModel(1), width=m.width)
        params = SearchParams(batch_size=10**9, max_expansions=500_000)
        a = bf.focal_search(inst, fast, params, collect_events=True)
        b = bf.nbba_search(inst, fast, evaluator, params, collect_events=True)
        same = (
            a.cost == b.cost
            and a.path == b.path
            and np.array_equal(a.metrics.events.state, b.metrics.events.state)
            and np.array_equal(a.metrics.events.g, b.metrics.events.g)
            and np.array_equal(a.metrics.events.f_min, b.metrics.events.f_min, equal_nan=True)
        )
        if not same or b.metrics.flushes:
            ok = False
            break
    _announce("degenerate-batch-equivalence (10 x 32x32)", ok)


@pytest.mark.parametrize("algorithm", BATCHED)
@pytest.mark.parametrize("k_fast", K_LEVELS)
def test_fig1_expansion_trend(default_sweep, algorithm, k_fast):
    """Mean expansions at B=625 exceed mean expansions at B=1."""
    _, _, aggs = default_sweep
    lo = aggs[(algorithm, k_fast, 1)].mean_expansions
    hi = aggs[(algorithm, k_fast, 625)].mean_expansions
    _announce(f"fig1-expansion-trend ({algorithm}, k={k_fast}): {lo:.0f} -> {hi:.0f}", hi > lo)


@pytest.mark.parametrize("batch_size", (125, 625))
def test_fig1_nonblocking_beats_blocking(default_sweep, batch_size):
    """At k_fast = 0.005 the non-blocking variant expands less on average."""
    _, _, aggs = default_sweep
    nb = aggs[("nbba", 0.005, batch_size)].mean_expansions
    bl = aggs[("blocking", 0.005, batch_size)].mean_expansions
    _announce(f"fig1-comparison (B={batch_size}): nbba {nb:.0f} < blocking {bl:.0f}", nb < bl)


@pytest.mark.parametrize("algorithm", BATCHED)
@pytest.mark.parametrize("k_fast", K_LEVELS)
def test_fig2_inference_ratio_trend(default_sweep, algorithm, k_fast):
    """Mean inference_time / wall_time is lower at B=625 than at B=5."""
    _, _, aggs = default_sweep
    r5 = aggs[(algorithm, k_fast, 5)].mean_inference_ratio
    r625 = aggs[(algorithm, k_fast, 625)].mean_inference_ratio
    _announce(f"fig2-ratio-trend ({algorithm}, k={k_fast}): {r5:.3f} -> {r625:.3f}", r625 < r5)


def test_weak_heuristic_failure_mode(default_sweep):
    """focal at k=0.5 hits the expansion cap on more than half the suite."""
    _, runs, _ = default_sweep
    focal = [r for r in runs if r.algorithm == "focal" and r.k_fast == 0.5]
    capped = sum(1 for r in focal if r.status == "expansion_limit")
    _announce(f"weak-heuristic-failure (focal k=0.5 capped {capped}/{len(focal)})",
              capped > len(focal) / 2)


def test_strong_heuristic_solves_all(default_sweep):
    """focal at k=0.005 solves every instance."""
    _, runs, _ = default_sweep
    focal = [r for r in runs if r.algorithm == "focal" and r.k_fast == 0.005]
    solved = sum(1 for r in focal if r.solved)
    _announce(f"strong-heuristic-solves-all ({solved}/{len(focal)})", solved == len(focal))


def test_determinism_of_cli_runs(tmp_path):
    """Two executions of `run` with one config produce identical runs.csv
    outside the two timing columns."""
    args = ["--map-size", "128", "--instances", "5", "--batch-sizes", "1,25",
            "--min-separation", "64", "--quiet"]
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        proc = _cli("run", *args, "--out", str(out))
        assert proc.returncode == 0, proc.stderr[-2000:]
        outs.append(out)

    def stripped(path: Path):
        with open(path / "runs.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        drop = [rows[0].index(c) for c in ("inference_time", "wall_time")]
        return [[c for i, c in enumerate(r) if i not in drop] for r in rows]

    _announce("determinism (CLI run twice)", stripped(outs[0]) == stripped(outs[1]))


def test_heuristic_admissibility_chain():
    """10^4 random states over 20 small maps: noisy <= manhattan <= exact
    cost-to-go, at every noise level."""
    rs = np.random.default_rng(20260809)
    ok = True
    for map_idx in range(20):
        m = bf.generate_map(16, 16, 0.1, seed=rng.stream(999, map_idx))
        gx, gy = int(rs.integers(0, 16)), int(rs.integers(0, 16))
        table = cost_to_go_table(m, (gx, gy))
        sids = rs.integers(0, m.num_states, 500)
        for k in (*K_LEVELS, 0.01):
            src = bf.HeuristicSource(goal=(gx, gy), k=k, noise_seed=rng.stream(999, 1000 + map_idx))
            vals = src.values_for_ids(sids.astype(np.int64), m.width)
            for sid, v in zip(sids, vals):
                s = m.decode_state(int(sid))
                hm = bf.manhattan(s, (gx, gy))
                if not (v <= hm <= float(table[int(sid)])):
                    ok = False
        if not ok:
            break
    _announce("heuristic-admissibility (10^4 states, 20 maps, all k)", ok)


def test_plot_pipeline_matches_aggregates(default_sweep):
    """Secondary component: `plot --fig all` on the sweep output writes three
    images whose embedded series match aggregates.csv exactly.  Runs when
    the frontend has been built (frontend/dist/cli.js)."""
    import json
    import re

    frontend_cli = Path(__file__).resolve().parent.parent / "frontend" / "dist" / "cli.js"
    if not frontend_cli.exists():
        pytest.skip("frontend not built; run `npm install && npm run build` in frontend/")
    out_dir, runs, aggs = default_sweep
    fig_dir = out_dir.parent / "figures"
    proc = subprocess.run(
        ["node", str(frontend_cli), "--in", str(out_dir), "--fig", "all", "--out", str(fig_dir)],
        capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    metric_by_figure = {
        "expansions": lambda a: (a.mean_expansions, a.std_expansions),
        "ratio": lambda a: (a.mean_inference_ratio, a.std_inference_ratio),
        "runtime": lambda a: (a.mean_wall_time, a.std_wall_time),
    }
    ok = True
    for figure_id, metric in metric_by_figure.items():
        svg = (fig_dir / f"{figure_id}.svg").read_text(encoding="utf-8")
        data = json.loads(re.search(r"<!\[CDATA\[(.*?)\]\]>", svg, re.S).group(1))
        for series in data["series"]:
            for point in series["points"]:
                agg = aggs[(series["algorithm"], series["kFast"], point["batchSize"])]
                if (point["mean"], point["std"]) != metric(agg):
                    ok = False
        for base in data["baseline"]:
            agg = aggs[(base["algorithm"], base["kFast"], 0)]
            if (base["mean"], base["std"]) != (agg.mean_expansions, agg.std_expansions):
                ok = False
    _announce("plot-pipeline (three figures match aggregates.csv exactly)", ok)


def test_batch_accounting(default_sweep):
    """nbba never forces a flush and every flush carries >= B states;
    blocking's unforced flushes carry >= B; terminal waitlists stay below B.
    The harness enforces this on every sweep run (a violation aborts the
    sweep), so the full-sweep fixture having completed covers all 990 runs;
    direct engine runs re-check the flush-level details here."""
    ok = True
    for seed in range(6):
        m = bf.generate_map(96, 96, 0.05, seed=rng.stream(555, 2 * seed))
        inst = bf.generate_instance(m, rng.stream(555, 2 * seed + 1), min_separation=48)
        fast = bf.HeuristicSource(goal=inst.goal, k=0.05, noise_seed=rng.stream(555, 100 + seed))
        for B in (5, 125):
            for algo in BATCHED:
                nn = bf.HeuristicSource(goal=inst.goal, k=0.01, noise_seed=rng.stream(555, 200 + seed))
                evaluator = bf.BatchEvaluator(nn, bf.MlpTimingModel(1), width=m.width)
                out = bf.run(algo, inst, fast, SearchParams(batch_size=B, max_expansions=1_000_000),
                             evaluator=evaluator)
                mt = out.metrics
                if mt.waitlist_residue >= B:
                    ok = False
                if algo == "nbba":
                    ok = ok and mt.forced_flushes == 0 and all(s >= B for s in mt.flush_sizes)
                else:
                    ok = ok and all(s >= B for s, f in zip(mt.flush_sizes, mt.flush_forced) if not f)
    _announce("batch-accounting (direct engine runs + harness-enforced sweep)", ok)
