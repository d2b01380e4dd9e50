"""Monte Carlo estimators over random walk samples, with persisted reports.

Estimated quantities:

* ``twisted_probability`` - how often |c(x_n, y_m, e)| clears a threshold
  for independent lazy walks x, y;
* ``twist_branch_census`` - which of the three tetrahedron faces over a
  fixed twisted triangle carries the twist, per trial;
* ``random_subgroup_pipeline`` - how often a sampled pair generates a free
  rank-2 subgroup on which the cocycle is visibly nonzero;
* ``identity_suite`` - exact checker battery over randomized inputs.

Success counts are exact integers; probabilities and Wilson 95% intervals
are floats computed only at the reporting boundary. Trials derive their
randomness from (master seed, trial index), so reports are byte-identical
across thread counts; wall-clock data lives in a volatile ``meta`` block
that canonical output excludes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable, Sequence

from .cocycles import (
    BoundedCocycle,
    TwistWitness,
    check_restriction_homogeneous,
    coboundary_cocycle,
    cocycle_identity_residual,
    find_twist_witness,
    homogeneous_sum_residual,
    propagate_twist,
    restriction_nontrivial,
    tetrahedron_gap,
)
from .errors import ConfigError, InputError, PreconditionError, RefusalError
from .quasimorphisms import parse_descriptor
from .subgroups import stallings_graph
from .version import __version__
from .walks import WalkConfig, Walker, sample_pair
from .words import Alphabet, Word, random_reduced_word

__all__ = [
    "ExperimentParams",
    "ExperimentReport",
    "wilson_interval",
    "cocycle_from_descriptor",
    "twisted_probability",
    "twist_branch_census",
    "random_subgroup_pipeline",
    "identity_suite",
    "identity_checks",
]

SCHEMA_VERSION = 1

#: radius used to look for a twisted triangle before running an experiment
WITNESS_SEARCH_RADIUS = 3

#: two-sided 95% standard normal quantile
Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    """Wilson score 95% confidence interval for a binomial proportion."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise InputError("successes must lie in [0, trials]")
    p = successes / trials
    z2 = Z95 * Z95
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = Z95 * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class ExperimentParams:
    """Inputs of one Monte Carlo run; hashable and JSON-echoable."""

    descriptor: str
    walk: WalkConfig
    n: int
    m: int
    epsilon: Fraction
    trials: int
    radius: int = 3

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n < 0 or self.m < 0:
            raise ConfigError("step counts must be nonnegative")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.radius < 0:
            raise ConfigError("radius must be nonnegative")

    def echo(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "steps": [s.text() for s in self.walk.step_words],
            "seed": self.walk.seed,
            "check_lazy": self.walk.check_lazy,
            "n": self.n,
            "m": self.m,
            "epsilon": str(self.epsilon),
            "trials": self.trials,
            "radius": self.radius,
        }


@dataclass
class ExperimentReport:
    """Structured outcome of one run; canonical JSON excludes the meta block."""

    kind: str
    params: dict
    results: dict
    meta: dict

    def payload(self, include_meta: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "kind": self.kind,
            "params": self.params,
            "results": self.results,
        }
        if include_meta:
            out["meta"] = self.meta
        return out

    def json_text(self, include_meta: bool = True) -> str:
        return json.dumps(self.payload(include_meta), indent=2, sort_keys=True) + "\n"

    def canonical_json_text(self) -> str:
        """Reproducible serialization: identical across reruns and thread counts."""
        return self.json_text(include_meta=False)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.json_text())

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.kind == "identity-suite":
            writer.writerow(["kind", "check", "instances", "failures"])
            for record in self.results["checks"]:
                writer.writerow([self.kind, record["check"], record["instances"], record["failures"]])
            return buf.getvalue()
        row_keys = ["n", "m", "trials", "seed"]
        row = [self.kind] + [self.params.get(k, "") for k in row_keys]
        header = ["kind"] + row_keys
        for key in sorted(self.results):
            value = self.results[key]
            if isinstance(value, (int, float, str)):
                header.append(key)
                row.append(value)
            elif (
                isinstance(value, list)
                and len(value) == 2
                and all(isinstance(v, float) for v in value)
            ):
                header.extend([f"{key}_low", f"{key}_high"])
                row.extend(value)
        writer.writerow(header)
        writer.writerow(row)
        return buf.getvalue()

    def save_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.csv_text())


def _meta(started: float, threads: int) -> dict:
    return {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "runtime_seconds": round(time.perf_counter() - started, 6),
        "threads": threads,
    }


def _run_trials(trial: Callable[[int], object], trials: int, threads: int) -> list:
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    if threads == 1:
        return [trial(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(trial, range(trials)))


def cocycle_from_descriptor(text: str, alphabet: Alphabet) -> BoundedCocycle:
    """Build the coboundary cocycle named by a quasimorphism descriptor.

    A ``corrupted:`` prefix wraps the evaluator so it adds 1 whenever the
    first argument is the identity; this breaks every claimed identity and
    exists to exercise the checkers' failure paths.
    """
    corrupted = False
    if text.startswith("corrupted:"):
        corrupted = True
        text = text[len("corrupted:"):]
    c = coboundary_cocycle(parse_descriptor(text, alphabet))
    if not corrupted:
        return c
    inner = c

    def evaluate(g0: Word, g1: Word, g2: Word) -> Fraction:
        bump = Fraction(1) if g0.is_identity else Fraction(0)
        return inner(g0, g1, g2) + bump

    return BoundedCocycle(alphabet, evaluate, provenance="external", properties=inner.properties)


def _require_witness(c: BoundedCocycle) -> TwistWitness:
    if not c.is_restriction_homogeneous:
        raise PreconditionError("experiment needs a restriction-homogeneous cocycle")
    witness = find_twist_witness(c, WITNESS_SEARCH_RADIUS)
    if witness is None:
        raise RefusalError(
            f"no twisted triangle with entries of length <= {WITNESS_SEARCH_RADIUS}; "
            "the class may be zero, refusing to estimate"
        )
    return witness


def _witness_echo(witness: TwistWitness) -> dict:
    g0, h0, e = witness.triple
    return {
        "triple": [g0.text(), h0.text(), e.text()],
        "epsilon": str(witness.epsilon),
    }


def twisted_probability(
    params: ExperimentParams,
    *,
    threads: int = 1,
    include_trials: bool = False,
) -> ExperimentReport:
    """Estimate P(|c(x_n, y_m, e)| >= epsilon) over independent walk pairs.

    Refuses to run when no twisted triangle exists within the search
    radius. The report carries both the user threshold and the witness's
    own epsilon, which are related but distinct quantities.
    """
    started = time.perf_counter()
    alphabet = params.walk.alphabet
    c = cocycle_from_descriptor(params.descriptor, alphabet)
    witness = _require_witness(c)
    e = alphabet.identity()
    threshold = params.epsilon

    def trial(t: int) -> int:
        x, y = sample_pair(params.walk, t, params.n, params.m)
        return 1 if abs(c(x, y, e)) >= threshold else 0

    outcomes = _run_trials(trial, params.trials, threads)
    successes = sum(outcomes)
    low, high = wilson_interval(successes, params.trials)
    results = {
        "successes": successes,
        "estimate": successes / params.trials,
        "ci95": [low, high],
        "threshold_epsilon": str(threshold),
        "witness": _witness_echo(witness),
    }
    if include_trials:
        results["per_trial"] = list(outcomes)
    return ExperimentReport("twist-prob", params.echo(), results, _meta(started, threads))


def twist_branch_census(
    params: ExperimentParams,
    witness: TwistWitness | None = None,
    *,
    threads: int = 1,
    include_trials: bool = False,
) -> ExperimentReport:
    """Census of the three twisted-face branches over a fixed witness.

    Per trial evaluates |c(h0^-1, x_n, e)|, |c(g0, h0 x_n, e)| and
    |c(h0^-1 g0, x_n, e)| against the witness epsilon. For a valid witness
    at least one branch clears the bar in every trial, so the maximum
    branch frequency is at least 1/3 by pigeonhole.
    """
    started = time.perf_counter()
    alphabet = params.walk.alphabet
    c = cocycle_from_descriptor(params.descriptor, alphabet)
    if witness is None:
        witness = _require_witness(c)
    g0, h0, e = witness.triple
    if abs(c(g0, h0, e)) != 3 * witness.epsilon or witness.epsilon <= 0:
        raise PreconditionError("witness does not match the cocycle")
    eps = witness.epsilon
    h0_inv = h0.inverse()
    h0_inv_g0 = h0_inv * g0

    def trial(t: int) -> tuple[bool, bool, bool]:
        x = Walker(params.walk, 2 * t).position(params.n)
        return (
            abs(c(h0_inv, x, e)) >= eps,
            abs(c(g0, h0 * x, e)) >= eps,
            abs(c(h0_inv_g0, x, e)) >= eps,
        )

    outcomes = _run_trials(trial, params.trials, threads)
    branch_successes = [sum(flags[j] for flags in outcomes) for j in range(3)]
    disjunction = sum(1 for flags in outcomes if any(flags))
    frequencies = [s / params.trials for s in branch_successes]
    results = {
        "branch_successes": branch_successes,
        "branch_estimates": frequencies,
        "branch_ci95": [list(wilson_interval(s, params.trials)) for s in branch_successes],
        "disjunction_successes": disjunction,
        "disjunction_frequency": disjunction / params.trials,
        "max_branch_frequency": max(frequencies),
        "max_branch_at_least_third": max(frequencies) >= 1 / 3,
        "witness": _witness_echo(witness),
    }
    if include_trials:
        results["per_trial"] = [[int(b) for b in flags] for flags in outcomes]
    return ExperimentReport("branch-census", params.echo(), results, _meta(started, threads))


_AMBIENT_NOTE = (
    "ambient group is free: a certified pair generates a genuinely free "
    "rank-2 subgroup, with no finite normal part to quotient away"
)


def random_subgroup_pipeline(
    params: ExperimentParams,
    *,
    threads: int = 1,
    include_trials: bool = False,
    include_certificates: bool = False,
) -> ExperimentReport:
    """Sample pairs, certify rank-2 freeness, and search for cocycle witnesses.

    Per trial: fold the Stallings graph of (x_n, y_m), record whether its
    rank is 2, and whether the cocycle is nonzero on some subgroup triple
    within the search radius (the pair itself is checked first). Joint
    successes optionally emit re-checkable certificates.
    """
    started = time.perf_counter()
    alphabet = params.walk.alphabet
    c = cocycle_from_descriptor(params.descriptor, alphabet)
    if not c.is_restriction_homogeneous:
        raise PreconditionError("pipeline needs a restriction-homogeneous cocycle")

    def trial(t: int):
        x, y = sample_pair(params.walk, t, params.n, params.m)
        graph = stallings_graph([x, y])
        witness = restriction_nontrivial(c, graph, (x, y), params.radius)
        return x, y, graph, witness

    outcomes = _run_trials(trial, params.trials, threads)
    rank2_count = 0
    witness_count = 0
    joint_count = 0
    per_trial = []
    certificates = []
    for t, (x, y, graph, witness) in enumerate(outcomes):
        rank2 = graph.rank == 2
        found = witness is not None
        joint = rank2 and found
        rank2_count += rank2
        witness_count += found
        joint_count += joint
        if include_trials:
            per_trial.append({"rank": graph.rank, "witness_found": found})
        if joint and include_certificates:
            certificates.append(
                {
                    "trial": t,
                    "x": x.text(),
                    "y": y.text(),
                    "rank": graph.rank,
                    "graph_edges": graph.export_text().splitlines(),
                    "witness_triple": [w.text() for w in witness.triple],
                    "cocycle_value": str(witness.value),
                }
            )

    def stats(count: int) -> dict:
        low, high = wilson_interval(count, params.trials)
        return {"successes": count, "estimate": count / params.trials, "ci95": [low, high]}

    results = {
        "rank2": stats(rank2_count),
        "restriction_witness": stats(witness_count),
        "joint": stats(joint_count),
        "note": _AMBIENT_NOTE,
    }
    if include_trials:
        results["per_trial"] = per_trial
    if include_certificates:
        results["certificates"] = certificates
    return ExperimentReport("subgroup-pipeline", params.echo(), results, _meta(started, threads))


# -- exact identity suite ---------------------------------------------------


def _failure_example(**kwargs) -> dict:
    return {key: value for key, value in kwargs.items()}


def identity_checks(
    c: BoundedCocycle,
    alphabet: Alphabet,
    samples: int,
    seed: int,
    only: str | None = None,
) -> list[dict]:
    """Run the exact checker battery over seeded random inputs.

    ``samples`` scales every check: with samples = 1000 the battery runs
    1000 cocycle-identity quadruples, 500 alternating and 500 invariance
    instances, 100 power words (all |n|, |m| <= 10), 200 power-sum pairs
    (N <= 20), 1000 tetrahedron gaps and 1000 propagation instances.
    All checks are exact; a failure records the offending inputs.
    ``only`` restricts the battery to one named check.
    """
    if samples < 0:
        raise InputError("samples must be nonnegative")
    rng = random.Random(seed)
    checks: list[dict] = []

    def wanted(name: str) -> bool:
        return only is None or only == name

    def rand_word(max_len: int) -> Word:
        return random_reduced_word(rng, alphabet, rng.randrange(max_len + 1))

    if wanted("cocycle-identity"):
        failures = 0
        example = None
        for _ in range(samples):
            quadruple = tuple(rand_word(30) for _ in range(4))
            residual = cocycle_identity_residual(c, quadruple)
            if residual != 0:
                failures += 1
                if example is None:
                    example = _failure_example(
                        quadruple=[w.text() for w in quadruple], residual=str(residual)
                    )
        checks.append(
            {"check": "cocycle-identity", "instances": samples, "failures": failures, "example_failure": example}
        )

    if wanted("alternating"):
        perms = (
            ((0, 1, 2), 1),
            ((1, 2, 0), 1),
            ((2, 0, 1), 1),
            ((0, 2, 1), -1),
            ((1, 0, 2), -1),
            ((2, 1, 0), -1),
        )
        count = samples // 2
        failures = 0
        example = None
        for _ in range(count):
            triple = tuple(rand_word(20) for _ in range(3))
            base = c(*triple)
            for perm, sign in perms:
                if c(triple[perm[0]], triple[perm[1]], triple[perm[2]]) != sign * base:
                    failures += 1
                    if example is None:
                        example = _failure_example(triple=[w.text() for w in triple], permutation=list(perm))
                    break
        checks.append({"check": "alternating", "instances": count, "failures": failures, "example_failure": example})

    if wanted("invariance"):
        count = samples // 2
        failures = 0
        example = None
        for _ in range(count):
            triple = tuple(rand_word(20) for _ in range(3))
            h = rand_word(20)
            if c(h * triple[0], h * triple[1], h * triple[2]) != c(*triple):
                failures += 1
                if example is None:
                    example = _failure_example(triple=[w.text() for w in triple], h=h.text())
        checks.append({"check": "invariance", "instances": count, "failures": failures, "example_failure": example})

    if wanted("restriction-homogeneity"):
        num_words = samples // 10
        failures = 0
        example = None
        for _ in range(num_words):
            g = rand_word(8)
            for n in range(-10, 11):
                for m in range(-10, 11):
                    if not check_restriction_homogeneous(c, g, n, m):
                        failures += 1
                        if example is None:
                            example = _failure_example(g=g.text(), n=n, m=m)
        checks.append(
            {
                "check": "restriction-homogeneity",
                "instances": num_words * 21 * 21,
                "failures": failures,
                "example_failure": example,
            }
        )

    if wanted("power-sum"):
        count = samples // 5
        failures = 0
        example = None
        for _ in range(count):
            g, h = rand_word(12), rand_word(12)
            N = rng.randrange(21)
            residual = homogeneous_sum_residual(c, g, h, N)
            if residual != 0:
                failures += 1
                if example is None:
                    example = _failure_example(g=g.text(), h=h.text(), N=N, residual=str(residual))
        checks.append({"check": "power-sum", "instances": count, "failures": failures, "example_failure": example})

    if wanted("tetrahedron-gap"):
        failures = 0
        example = None
        for _ in range(samples):
            g, h, y = rand_word(20), rand_word(20), rand_word(20)
            gap = tetrahedron_gap(c, g, h, y)
            if gap < 0:
                failures += 1
                if example is None:
                    example = _failure_example(g=g.text(), h=h.text(), y=y.text(), gap=str(gap))
        checks.append(
            {"check": "tetrahedron-gap", "instances": samples, "failures": failures, "example_failure": example}
        )

    if wanted("twist-propagation"):
        failures = 0
        example = None
        produced = 0
        attempts_per_instance = 200
        for _ in range(samples):
            triple = None
            epsilon = Fraction(0)
            for _ in range(attempts_per_instance):
                candidate = tuple(rand_word(12) for _ in range(3))
                value = c(*candidate)
                if value != 0:
                    triple = candidate
                    epsilon = abs(value) / 3
                    break
            if triple is None:
                continue
            produced += 1
            h = rand_word(12)
            if propagate_twist(c, triple, h, epsilon) is None:
                failures += 1
                if example is None:
                    example = _failure_example(
                        triple=[w.text() for w in triple], h=h.text(), epsilon=str(epsilon)
                    )
        checks.append(
            {"check": "twist-propagation", "instances": produced, "failures": failures, "example_failure": example}
        )

    return checks


def identity_suite(
    descriptor: str,
    samples: int,
    seed: int,
    alphabet: Alphabet | None = None,
    only: str | None = None,
) -> ExperimentReport:
    """Exact checker battery for the cocycle named by a descriptor."""
    started = time.perf_counter()
    alphabet = alphabet if alphabet is not None else Alphabet()
    c = cocycle_from_descriptor(descriptor, alphabet)
    checks = identity_checks(c, alphabet, samples, seed, only=only)
    results = {
        "checks": checks,
        "total_failures": sum(record["failures"] for record in checks),
    }
    params = {"descriptor": descriptor, "samples": samples, "seed": seed, "only": only}
    return ExperimentReport("identity-suite", params, results, _meta(started, 1))
