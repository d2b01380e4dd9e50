"""Command-line surface: evaluate, check, experiment, inspect subgroups.

Exit codes: 0 success, 1 checker failure, 2 refused precondition,
64 usage or parse error. Runs taking --seed are fully reproducible; the
QMLAB_SEED environment variable provides the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .cocycles import coboundary_cocycle
from .errors import ConfigError, InputError, PreconditionError, RefusalError
from .experiments import (
    ExperimentParams,
    identity_suite,
    random_subgroup_pipeline,
    twist_branch_census,
    twisted_probability,
)
from .quasimorphisms import parse_descriptor
from .subgroups import stallings_graph
from .walks import default_walk_config
from .words import Alphabet, parse_word

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_REFUSED = 2
EXIT_USAGE = 64

CHECK_SUITES = (
    "all",
    "cocycle-identity",
    "alternating",
    "invariance",
    "restriction-homogeneity",
    "power-sum",
    "tetrahedron-gap",
    "twist-propagation",
)

EXPERIMENT_KINDS = ("twist-prob", "branch-census", "subgroup-pipeline")


class _UsageExit(Exception):
    def __init__(self, message: str):
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        raise _UsageExit(message)


def _default_seed() -> int:
    env = os.environ.get("QMLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise _UsageExit(f"QMLAB_SEED must be an integer, got {env!r}") from None


def _parse_eps(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _UsageExit(f"--eps must be a rational like 1/2, got {text!r}") from None
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="qmlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a quasimorphism at a word")
    p_eval.add_argument("descriptor")
    p_eval.add_argument("word")

    p_coc = sub.add_parser("cocycle", help="evaluate the coboundary cocycle at a triple")
    p_coc.add_argument("descriptor")
    p_coc.add_argument("g0")
    p_coc.add_argument("g1")
    p_coc.add_argument("g2")

    p_check = sub.add_parser("check", help="run exact identity checkers")
    p_check.add_argument("suite", choices=CHECK_SUITES)
    p_check.add_argument("descriptor")
    p_check.add_argument("--samples", type=int, default=1000)
    p_check.add_argument("--seed", type=int, default=None)
    p_check.add_argument("--out", default="qmlab-check-report.json")

    p_exp = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p_exp.add_argument("kind", choices=EXPERIMENT_KINDS)
    p_exp.add_argument("--qm", required=True, help="quasimorphism descriptor, e.g. hom:brooks:ab")
    p_exp.add_argument("--n", type=int, default=60)
    p_exp.add_argument("--m", type=int, default=60)
    p_exp.add_argument("--eps", default="1/2")
    p_exp.add_argument("--trials", type=int, default=1000)
    p_exp.add_argument("--radius", type=int, default=3)
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--threads", type=int, default=1)
    p_exp.add_argument("--per-trial", action="store_true", help="persist the per-trial outcome array")
    p_exp.add_argument("--certificates", action="store_true", help="persist re-checkable joint certificates")
    p_exp.add_argument("--out", default=None)

    p_sub = sub.add_parser("subgroup", help="fold a subgroup graph and print its rank")
    p_sub.add_argument("words", nargs="*")
    p_sub.add_argument("--export", default=None, help="write the graph as 'src label dst' lines")

    return parser


def _cmd_eval(args) -> int:
    alphabet = Alphabet()
    qm = parse_descriptor(args.descriptor, alphabet)
    word = parse_word(args.word, alphabet)
    print(qm(word))
    return EXIT_OK


def _cmd_cocycle(args) -> int:
    alphabet = Alphabet()
    qm = parse_descriptor(args.descriptor, alphabet)
    c = coboundary_cocycle(qm)
    triple = tuple(parse_word(text, alphabet) for text in (args.g0, args.g1, args.g2))
    print(c(*triple))
    return EXIT_OK


def _cmd_check(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    only = None if args.suite == "all" else args.suite
    report = identity_suite(args.descriptor, args.samples, seed, only=only)
    report.save(args.out)
    failures = report.results["total_failures"]
    for record in report.results["checks"]:
        status = "ok" if record["failures"] == 0 else "FAIL"
        print(f"{record['check']}: {status} ({record['failures']}/{record['instances']} failures)")
    print(f"report: {args.out}")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def _cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.threads < 1:
        raise _UsageExit("--threads must be >= 1")
    params = ExperimentParams(
        descriptor=args.qm,
        walk=default_walk_config(seed),
        n=args.n,
        m=args.m,
        epsilon=_parse_eps(args.eps),
        trials=args.trials,
        radius=args.radius,
    )
    if args.kind == "twist-prob":
        report = twisted_probability(params, threads=args.threads, include_trials=args.per_trial)
        r = report.results
        summary = f"estimate {r['estimate']:.4f} ci95 [{r['ci95'][0]:.4f}, {r['ci95'][1]:.4f}] successes {r['successes']}/{params.trials}"
    elif args.kind == "branch-census":
        report = twist_branch_census(params, threads=args.threads, include_trials=args.per_trial)
        r = report.results
        summary = (
            f"branches {r['branch_estimates']} disjunction {r['disjunction_frequency']:.4f} "
            f"max {r['max_branch_frequency']:.4f}"
        )
    else:
        report = random_subgroup_pipeline(
            params,
            threads=args.threads,
            include_trials=args.per_trial,
            include_certificates=args.certificates,
        )
        r = report.results
        summary = (
            f"rank2 {r['rank2']['estimate']:.4f} witness {r['restriction_witness']['estimate']:.4f} "
            f"joint {r['joint']['estimate']:.4f}"
        )
    out = args.out if args.out is not None else f"qmlab-{args.kind}-report.json"
    csv_out = out[:-5] + ".csv" if out.endswith(".json") else out + ".csv"
    report.save(out)
    report.save_csv(csv_out)
    print(f"{args.kind}: {summary}")
    print(f"report: {out}")
    print(f"summary csv: {csv_out}")
    return EXIT_OK


def _cmd_subgroup(args) -> int:
    alphabet = Alphabet()
    words = [parse_word(text, alphabet) for text in args.words]
    graph = stallings_graph(words)
    print(f"rank {graph.rank}")
    if args.export is not None:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(graph.export_text())
        print(f"graph: {args.export}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "cocycle":
            return _cmd_cocycle(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "subgroup":
            return _cmd_subgroup(args)
        raise _UsageExit(f"unknown command {args.command!r}")
    except _UsageExit as exc:
        print(f"qmlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, ConfigError) as exc:
        print(f"qmlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, RefusalError) as exc:
        print(f"qmlab: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
