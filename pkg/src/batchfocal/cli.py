"""Command line interface.

    batchfocal gen [--out config.json]          emit a default config skeleton
    batchfocal run [CONFIG] [overrides...]      execute an experiment sweep
    batchfocal verify --in DIR                  re-check invariants on results

Exit codes: 0 success, 2 suboptimality-bound violation, 1 anything else.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .harness import ExperimentConfig, run_and_write
from .results import BoundViolation, aggregate, check_records, read_aggregates, read_runs

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BOUND_VIOLATION = 2


def _parse_map_size(text: str) -> tuple[int, int]:
    if "x" in text:
        w, h = text.lower().split("x", 1)
        return int(w), int(h)
    n = int(text)
    return n, n


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v)


def _csv_names(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batchfocal", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a config.json skeleton with the defaults")
    gen.add_argument("--out", default="-", help="output file, '-' for stdout")

    runp = sub.add_parser("run", help="execute an experiment from a config file")
    runp.add_argument("config", nargs="?", help="config.json path (defaults used when omitted)")
    runp.add_argument("--map-size", help="map size as N or WxH")
    runp.add_argument("--sand-density", type=float)
    runp.add_argument("--seed", type=int, help="master seed")
    runp.add_argument("--instances", type=int)
    runp.add_argument("--w-so", type=float)
    runp.add_argument("--w-h", type=float)
    runp.add_argument("--batch-sizes", type=_csv_ints, metavar="B1,B2,...")
    runp.add_argument("--k-fast", type=_csv_floats, metavar="K1,K2,...")
    runp.add_argument("--k-nn", type=float)
    runp.add_argument("--algorithms", type=_csv_names, metavar="A1,A2,...")
    runp.add_argument("--max-expansions", type=int)
    runp.add_argument("--min-separation", type=int)
    runp.add_argument("--out", help="output directory")
    runp.add_argument("--workers", type=int, default=1)
    runp.add_argument("--quiet", action="store_true")

    ver = sub.add_parser("verify", help="run the invariant suite on existing results")
    ver.add_argument("--in", dest="results_dir", required=True, help="results directory")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides: dict = {}
    if args.map_size:
        overrides["map_width"], overrides["map_height"] = _parse_map_size(args.map_size)
    simple = {
        "sand_density": args.sand_density,
        "master_seed": args.seed,
        "num_instances": args.instances,
        "w_so": args.w_so,
        "w_h": args.w_h,
        "batch_sizes": args.batch_sizes,
        "k_fast_levels": args.k_fast,
        "k_nn": args.k_nn,
        "algorithms": args.algorithms,
        "max_expansions": args.max_expansions,
        "min_separation": args.min_separation,
        "output_path": args.out,
    }
    overrides.update({k: v for k, v in simple.items() if v is not None})
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _cmd_gen(args: argparse.Namespace) -> int:
    doc = json.dumps(ExperimentConfig().to_json(), indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(doc)
    else:
        Path(args.out).write_text(doc, encoding="utf-8")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)

    def progress(done: int, total: int) -> None:
        print(f"instances {done}/{total}", file=sys.stderr, flush=True)

    try:
        records = run_and_write(config, workers=args.workers,
                                on_progress=None if args.quiet else progress)
    except BoundViolation as e:
        _dump_violation(e, config)
        return EXIT_BOUND_VIOLATION
    if not args.quiet:
        solved = sum(1 for r in records if r.solved)
        print(f"{len(records)} runs ({solved} solved) -> {config.output_path}", file=sys.stderr)
    return EXIT_OK


def _dump_violation(e: BoundViolation, config: ExperimentConfig) -> None:
    print(f"BOUND VIOLATION: {e}", file=sys.stderr)
    out = Path(config.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        dump = out / "bound_violation.json"
        dump.write_text(json.dumps(e.diagnostics, indent=2) + "\n", encoding="utf-8")
        print(f"diagnostics written to {dump}", file=sys.stderr)
    except OSError as io_err:
        print(f"could not write diagnostics: {io_err}", file=sys.stderr)


def _cmd_verify(args: argparse.Namespace) -> int:
    root = Path(args.results_dir)
    config = ExperimentConfig.load(root / "config.json")
    records = read_runs(root / "runs.csv")
    expected = config.total_runs()
    problems = []
    if len(records) != expected:
        problems.append(f"expected {expected} runs, found {len(records)}")
    try:
        problems.extend(check_records(records, config.w_so, config.max_expansions))
    except BoundViolation as e:
        print(f"BOUND VIOLATION: {e}", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    stored = read_aggregates(root / "aggregates.csv")
    recomputed = aggregate(records)
    if stored != recomputed:
        problems.append("aggregates.csv does not match aggregates recomputed from runs.csv")
    if problems:
        for p in problems:
            print(f"PROBLEM: {p}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{len(records)} runs verified: bound, accounting, and aggregate checks passed")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_verify(args)
    except BoundViolation as e:
        print(f"BOUND VIOLATION: {e}", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
