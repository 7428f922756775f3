"""Command-line front end.

    welfare-matching gen --n 5 --seed 1 --out market.json
    welfare-matching solve --instance market.json --objective utilitarian
    welfare-matching enumerate --instance market.json
    welfare-matching gaps --instance market.json
    welfare-matching sample-complexity --instance market.json --alpha 0.05 --objective maximin
    welfare-matching simulate --n 5 --seed 3 --algo maximin-etc --horizon 65536 --replications 200 --out runs/

Exit status: 0 on success, 2 on bad usage, 3 on unreadable or malformed
files, 4 on invalid markets, 1 on any other failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .core import UtilityProfile, Matching, maximin_welfare, preference_gaps, utilitarian_welfare
from .da import Side, deferred_acceptance
from .errors import MatchingError, ParseError, ProfileError
from .io import (
    ALGORITHMS,
    ExperimentConfig,
    read_instance,
    write_instance,
    write_replications_csv,
    write_summary_csv,
    write_trace_csv,
)
from .maximin import maximin_optimal
from .opt import utilitarian_optimal
from .oracle import Objective, enumerate_stable_matchings

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVALID = 4

SOLVERS = {
    "agent-opt": lambda p: deferred_acceptance(p, Side.AGENTS),
    "arm-opt": lambda p: deferred_acceptance(p, Side.ARMS),
    "utilitarian": utilitarian_optimal,
    "maximin": maximin_optimal,
}


def _num(x: float) -> str:
    """Short display form that hides float dust: 0.10000000000000009 -> 0.1."""
    if x is None:
        return "n/a"
    if math.isinf(x):
        return "inf"
    return repr(float(f"{x:.12g}"))


def _print_matching(profile: UtilityProfile, m: Matching, out) -> None:
    for line in m.format_lines():
        print(line, file=out)
    print(f"permutation: {' '.join(map(str, m.pairs))}", file=out)
    print(f"utilitarian welfare: {_num(utilitarian_welfare(profile, m))}", file=out)
    print(f"maximin welfare: {_num(maximin_welfare(profile, m))}", file=out)


def cmd_gen(args, out) -> int:
    from .bandit.instances import random_instance

    write_instance(random_instance(args.n, args.seed), args.out)
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def cmd_solve(args, out) -> int:
    profile = read_instance(args.instance)
    _print_matching(profile, SOLVERS[args.objective](profile), out)
    return EXIT_OK


def cmd_enumerate(args, out) -> int:
    profile = read_instance(args.instance)
    stable = enumerate_stable_matchings(profile, oracle_cap=args.oracle_cap)
    print(f"{len(stable)} stable matching{'s' if len(stable) != 1 else ''}", file=out)
    for k, e in enumerate(stable.entries):
        print(f"[{k}] {' '.join(map(str, e.matching.pairs))}  "
              f"utilitarian={_num(e.utilitarian)} maximin={_num(e.maximin)}", file=out)
    return EXIT_OK


def cmd_gaps(args, out) -> int:
    profile = read_instance(args.instance)
    g = preference_gaps(profile, oracle_cap=args.oracle_cap)
    for name, value in (("Delta_a", g.delta_a), ("Delta_b", g.delta_b), ("Gamma_a", g.gamma_a),
                        ("Gamma_b", g.gamma_b), ("Gamma", g.gamma), ("delta", g.delta_welfare), ("beta", g.beta)):
        print(f"{name}={_num(value)}", file=out)
    return EXIT_OK


def cmd_sample_complexity(args, out) -> int:
    from .bandit.analytics import sample_complexity

    objective = Objective(args.objective)
    if args.instance is not None:
        profile = read_instance(args.instance)
        g = preference_gaps(profile, with_delta=objective is Objective.UTILITARIAN, oracle_cap=args.oracle_cap)
        n = profile.n
        gap = g.beta if objective is Objective.UTILITARIAN else g.gamma
    else:
        if args.n is None or args.gap is None:
            raise _UsageError("sample-complexity needs --instance, or both --n and --gap")
        n, gap = args.n, args.gap
    print(sample_complexity(n, gap, args.alpha, objective), file=out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    from .bandit.batch import run_batch

    if (args.instance is None) == (args.n is None):
        raise _UsageError("simulate needs exactly one of --instance and --n")
    config = ExperimentConfig(
        algorithm=args.algo, horizon=args.horizon, replications=args.replications, seed=args.seed,
        instance=args.instance, n=args.n, out=args.out, stride=args.stride, workers=args.workers,
        traces=args.traces, noise_scale=args.noise,
    )
    truth = None
    if config.instance is not None:
        truth = read_instance(config.instance)
        config.check_horizon(truth.n)
    summary = run_batch(
        config.objective, config.horizon, config.replications, config.seed, n=config.n, truth=truth,
        stride=config.stride, noise_scale=config.noise_scale, workers=config.workers,
        keep_traces=config.traces,
    )
    if config.out is not None:
        outdir = Path(config.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for res in summary.results:
            if res.trace is not None:
                write_trace_csv(outdir / f"trace_{res.replication:04d}.csv", res)
        write_summary_csv(outdir / "summary.csv", summary)
        write_replications_csv(outdir / "replications.csv", summary)
    print(f"algorithm: {config.algorithm}", file=out)
    print(f"replications: {summary.replications}", file=out)
    print(f"final matching optimal: {_num(summary.correct_rate())}", file=out)
    print(f"tail per-step regret: {_num(summary.mean_tail_regret())}", file=out)
    print(f"first-step regret: {_num(summary.mean_first_increment())}", file=out)
    print(f"tail stability: {_num(summary.mean_tail_stability())}", file=out)
    return EXIT_OK


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="welfare-matching", description="Welfare-optimal stable matchings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random market")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="print one stable matching")
    p.add_argument("--instance", required=True)
    p.add_argument("--objective", choices=sorted(SOLVERS), required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="list every stable matching (small markets)")
    p.add_argument("--instance", required=True)
    p.add_argument("--oracle-cap", type=int, default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gaps", help="print preference and welfare gaps")
    p.add_argument("--instance", required=True)
    p.add_argument("--oracle-cap", type=int, default=None)
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("sample-complexity", help="samples needed for a correct one-shot commit")
    p.add_argument("--instance")
    p.add_argument("--n", type=int)
    p.add_argument("--gap", type=float)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--objective", choices=[o.value for o in Objective], required=True)
    p.add_argument("--oracle-cap", type=int, default=None)
    p.set_defaults(func=cmd_sample_complexity)

    p = sub.add_parser("simulate", help="run epoch explore-then-commit replications")
    p.add_argument("--instance")
    p.add_argument("--n", type=int, help="draw a fresh random market of this size per replication")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algo", choices=sorted(ALGORITHMS), required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", help="directory for trace, summary and replication CSVs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--traces", type=int, default=1, help="write per-step traces for this many replications")
    p.add_argument("--noise", type=float, default=1.0, help="reward noise standard deviation")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args, out)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ProfileError as exc:
        print(f"error: invalid market: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (MatchingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
