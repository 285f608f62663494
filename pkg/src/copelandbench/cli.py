"""Benchmark command line: run solvers, compute bounds, generate and check instances.

Subcommands:
  run       Monte Carlo repetitions of a solver on generated or stored instances
  bounds    evaluate all sample-complexity bounds for one instance file
  gen       draw an instance and store it as JSON
  validate  structural and numerical checks for an instance file

Per-run CSV goes to --out when given, otherwise to stdout (the human summary
then moves to stderr so stdout stays machine-readable).  Identical configs
produce byte-identical CSV regardless of the worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import bounds as bounds_mod
from . import envgen, solvers
from .instance import (
    PreferenceInstance,
    check_transitivity,
    copeland_profile,
    min_gap,
    validate,
)

CSV_COLUMNS = [
    "algorithm",
    "class",
    "n",
    "delta",
    "rep",
    "seed",
    "samples",
    "rounds",
    "returned_arm",
    "correct",
    "budget_exceeded",
]

GENERATED_CLASSES = ("p1", "p2", "p1cw", "p2cw", "transitive", "worstcase")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class SummaryRow:
    """Aggregates over completed repetitions (budget-exceeded runs excluded)."""

    mean_samples: float
    std_samples: float
    error_rate: float
    mean_rounds: float
    reps: int
    budget_exceeded: int

    def to_json_dict(self) -> dict:
        return {
            "mean_samples": self.mean_samples,
            "std_samples": self.std_samples,
            "error_rate": self.error_rate,
            "mean_rounds": self.mean_rounds,
            "reps": self.reps,
            "budget_exceeded": self.budget_exceeded,
        }


def _build_instance(args, rep_seed: int) -> PreferenceInstance:
    cls = args.instance_class
    if cls in ("p1", "p2", "p1cw", "p2cw"):
        return envgen.gen_class(cls, args.n, rep_seed)
    if cls == "transitive":
        return envgen.gen_transitive(
            args.n,
            gap_range=(args.gap_min, args.gap_max),
            indiff_fraction=args.indiff_fraction,
            seed=rep_seed,
        )
    if cls == "worstcase":
        return bounds_mod.worst_case_instance(
            args.n, args.delta_gap, args.f_n, args.with_indiff
        )
    raise ConfigError(f"unknown class {cls!r}")


def _require_n(args) -> None:
    if args.n is None:
        raise ConfigError("--n is required when generating instances by class")
    if args.n < 2:
        raise ConfigError(f"--n must be at least 2, got {args.n}")


def _one_rep(args, inst: Optional[PreferenceInstance], rep: int) -> dict:
    rep_seed = args.seed + rep
    if inst is None:
        inst = _build_instance(args, rep_seed)
    profile = copeland_profile(inst)
    oracle = envgen.SeededOracle(inst, rep_seed)
    solver = solvers.pocowista if args.algorithm == "pocowista" else solvers.tra_pocowista
    budget = args.budget if args.budget and args.budget > 0 else None
    row = {
        "algorithm": args.algorithm,
        "class": args.instance_class or "file",
        "n": inst.n,
        "delta": args.delta,
        "rep": rep,
        "seed": rep_seed,
    }
    try:
        trace = solver(inst.n, oracle, args.delta, budget=budget)
    except solvers.BudgetExceeded as exc:
        partial = exc.partial_trace
        row.update(
            samples=partial.total_samples,
            rounds=partial.rounds,
            returned_arm="",
            correct="",
            budget_exceeded=1,
        )
        return row
    row.update(
        samples=trace.total_samples,
        rounds=trace.rounds,
        returned_arm=trace.returned_arm,
        correct=int(trace.returned_arm in profile.copeland_set),
        budget_exceeded=0,
    )
    return row


def _summarize(rows: list[dict]) -> SummaryRow:
    done = [r for r in rows if not r["budget_exceeded"]]
    if done:
        samples = [r["samples"] for r in done]
        mean = statistics.fmean(samples)
        std = statistics.stdev(samples) if len(samples) > 1 else 0.0
        err = 1.0 - statistics.fmean([r["correct"] for r in done])
        rounds = statistics.fmean([r["rounds"] for r in done])
    else:
        mean = std = err = rounds = float("nan")
    return SummaryRow(
        mean_samples=mean,
        std_samples=std,
        error_rate=err,
        mean_rounds=rounds,
        reps=len(rows),
        budget_exceeded=len(rows) - len(done),
    )


def _jobs(args) -> int:
    env = os.environ.get("COPELANDBENCH_JOBS", "")
    if args.jobs is not None:
        return max(1, args.jobs)
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def run_experiment(args) -> tuple[list[dict], SummaryRow]:
    """All repetitions of one config; rows come back ordered by rep."""
    if not 0.0 < args.delta < 1.0:
        raise ConfigError(f"--delta must be in (0, 1), got {args.delta}")
    if args.reps < 1:
        raise ConfigError(f"--reps must be at least 1, got {args.reps}")
    fixed = None
    if args.instance is not None:
        fixed = envgen.load_instance(args.instance)
    else:
        _require_n(args)
    jobs = _jobs(args)
    if jobs == 1 or args.reps == 1:
        rows = [_one_rep(args, fixed, r) for r in range(args.reps)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda r: _one_rep(args, fixed, r), range(args.reps)))
    rows.sort(key=lambda r: r["rep"])
    return rows, _summarize(rows)


def _write_csv(rows: list[dict], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def _print_summary(args, summary: SummaryRow, fh) -> None:
    cls = args.instance_class or f"file:{args.instance}"
    print(
        f"algorithm={args.algorithm} class={cls} n={args.n} "
        f"delta={args.delta} reps={summary.reps}",
        file=fh,
    )
    print(f"mean_samples={summary.mean_samples!r}", file=fh)
    print(f"std_samples={summary.std_samples!r}", file=fh)
    print(f"error_rate={summary.error_rate!r}", file=fh)
    print(f"mean_rounds={summary.mean_rounds!r}", file=fh)
    print(f"budget_exceeded={summary.budget_exceeded}", file=fh)


def cmd_run(args) -> int:
    rows, summary = run_experiment(args)
    if args.n is None and rows:
        args.n = rows[0]["n"]
    if args.format == "csv":
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                _write_csv(rows, fh)
            _print_summary(args, summary, sys.stdout)
        else:
            _write_csv(rows, sys.stdout)
            _print_summary(args, summary, sys.stderr)
    else:
        payload = json.dumps(
            {"summary": summary.to_json_dict(), "runs": rows}, indent=1
        )
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
            _print_summary(args, summary, sys.stdout)
        else:
            print(payload)
            _print_summary(args, summary, sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    if not 0.0 < args.delta < 1.0:
        raise ConfigError(f"--delta must be in (0, 1), got {args.delta}")
    inst = envgen.load_instance(args.instance)
    report = bounds_mod.bound_report(inst, args.delta)
    if args.format == "json":
        payload = json.dumps(report.to_json_dict(), indent=1)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
        else:
            print(payload)
        return 0
    print(f"n={report.n} delta={report.delta!r}")
    for name in ("lower_simple", "lower_detailed", "lower_natural", "upper_pocowista"):
        value = getattr(report, name)
        if value is None:
            print(f"{name:<16} not applicable: {report.reasons[name]}")
        else:
            print(f"{name:<16} {value!r}")
    if report.per_arm_terms:
        print("per-arm terms (lower_detailed):")
        for arm, term in sorted(report.per_arm_terms.items()):
            print(f"  arm {arm}: {term!r}")
    for flag in report.flags:
        print(f"note: {flag}")
    return 0


def cmd_gen(args) -> int:
    _require_n(args)
    inst = _build_instance(args, args.seed)
    envgen.save_instance(inst, args.out)
    profile = copeland_profile(inst)
    scores = ", ".join(f"{a}:{profile.score(a)}" for a in inst.arms())
    print(f"wrote {args.out}")
    print(f"n={inst.n} copeland_set={sorted(profile.copeland_set)} scores=[{scores}]")
    if args.instance_class == "transitive":
        print(f"transitive={check_transitivity(inst).transitive}")
    return 0


def cmd_validate(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    inst = PreferenceInstance.from_json_dict(data)
    report = validate(inst)
    for msg in report.fatal:
        print(f"fatal: {msg}")
    for msg in report.warnings:
        print(f"warning: {msg}")
    if not report.ok:
        return 1
    trans = check_transitivity(inst)
    print(f"n={inst.n} pairs={len(inst.triples)}")
    print(f"min_gap={min_gap(inst)!r}")
    print(f"transitive={trans.transitive}")
    if not trans.transitive:
        print(f"witness={trans.witness}")
    return 0


def _add_generator_flags(sub) -> None:
    sub.add_argument("--indiff-fraction", type=float, default=0.0,
                     help="transitive class: probability of joining the previous block")
    sub.add_argument("--gap-min", type=float, default=0.1,
                     help="transitive class: smallest mode margin")
    sub.add_argument("--gap-max", type=float, default=0.4,
                     help="transitive class: largest mode margin")
    sub.add_argument("--delta-gap", type=float, default=0.1,
                     help="worstcase class: margin parameter in (0, 1/6)")
    sub.add_argument("--f-n", type=int, default=1,
                     help="worstcase class: winner-score excess over n/2")
    sub.add_argument("--with-indiff", action="store_true",
                     help="worstcase class: use the variant with congruence mass")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copelandbench",
        description="Copeland-winner identification benchmark for ternary duel feedback",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Monte Carlo solver repetitions")
    run_p.add_argument("--algorithm", choices=("pocowista", "tra"), required=True)
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--class", dest="instance_class", choices=GENERATED_CLASSES,
                     help="fresh instance per repetition from this class")
    src.add_argument("--instance", help="fixed instance JSON file")
    run_p.add_argument("--n", type=int)
    run_p.add_argument("--delta", type=float, required=True)
    run_p.add_argument("--reps", type=int, default=100)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--budget", type=int, default=10_000_000,
                       help="per-duel sample budget; 0 disables")
    run_p.add_argument("--out")
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.add_argument("--jobs", type=int, default=None,
                       help="worker threads (default: COPELANDBENCH_JOBS or cpu count, max 8)")
    _add_generator_flags(run_p)
    run_p.set_defaults(func=cmd_run)

    bounds_p = sub.add_parser("bounds", help="bound calculators for an instance file")
    bounds_p.add_argument("--instance", required=True)
    bounds_p.add_argument("--delta", type=float, required=True)
    bounds_p.add_argument("--out")
    bounds_p.add_argument("--format", choices=("table", "json"), default="table")
    bounds_p.set_defaults(func=cmd_bounds)

    gen_p = sub.add_parser("gen", help="generate an instance file")
    gen_p.add_argument("--class", dest="instance_class", choices=GENERATED_CLASSES,
                       required=True)
    gen_p.add_argument("--n", type=int)
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--out", required=True)
    _add_generator_flags(gen_p)
    gen_p.set_defaults(func=cmd_gen)

    val_p = sub.add_parser("validate", help="check an instance file")
    val_p.add_argument("--instance", required=True)
    val_p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, envgen.RejectionBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything unexpected is a runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
