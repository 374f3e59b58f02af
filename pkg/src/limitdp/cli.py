"""Command-line front end.

Subcommands: ``value``, ``vstar``, ``verify``, ``sweep``.  Data goes to stdout
(or --out); diagnostics to stderr.  Exit codes: 0 success, 1 verification
failure, 2 config/instance error, 3 resource cap exceeded.
Floats in reports are rounded to 12 significant digits so identical configs
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import corpus, evaluations as ev, gambling, oracle, values
from .errors import (ConfigError, EnumerationGuardError, HorizonError,
                     InvalidEvaluationError, InvalidInstanceError, LimitDPError,
                     UnknownStateError)
from .problems import Problem

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def fmt(x: float) -> float:
    """Round to 12 significant digits for deterministic reports."""
    return float(f"{x:.12g}")


def parse_instance(text: str, params_text: str | None) -> Problem:
    """Registry name, inline JSON object, or a path to a JSON file."""
    params = json.loads(params_text) if params_text else {}
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
    elif text.endswith(".json"):
        with open(text) as fh:
            obj = json.load(fh)
    else:
        return corpus.build_instance(text, params)
    if "generator" in obj:
        gen_params = {k: v for k, v in obj.items() if k != "generator"}
        gen_params.update(params)
        return corpus.build_instance(obj["generator"], gen_params)
    return Problem.from_json(obj)


def parse_range(text: str) -> list[int]:
    """\"2..40\" -> [2, ..., 40]; a single integer is a one-element range."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def parse_family(text: str) -> list[tuple[object, ev.Evaluation]]:
    """Family specs: "cesaro:2..40", "dirac:1..30",
    "discounted:geomgrid(0.5,1e-3,20)", "oddcomb:"/"evencomb:"/"altcomb:" with
    ranges, or a JSON list of evaluation objects."""
    text = text.strip()
    if text.startswith("["):
        members = [ev.from_json(obj) for obj in json.loads(text)]
        return [(i + 1, theta) for i, theta in enumerate(members)]
    if ":" not in text:
        raise ConfigError(f"malformed family spec {text!r}")
    head, arg = text.split(":", 1)
    if head == "cesaro":
        return [(n, ev.cesaro(n)) for n in parse_range(arg)]
    if head == "dirac":
        return [(t, ev.dirac(t)) for t in parse_range(arg)]
    if head == "delayed_cesaro":
        return [(n, ev.delay(ev.cesaro(n), n)) for n in parse_range(arg)]
    if head == "oddcomb":
        return [(k, corpus.odd_comb(k)) for k in parse_range(arg)]
    if head == "evencomb":
        return [(k, corpus.even_comb(k)) for k in parse_range(arg)]
    if head == "altcomb":
        return [(k, corpus.alternating_comb(k)) for k in parse_range(arg)]
    if head == "discounted":
        if not (arg.startswith("geomgrid(") and arg.endswith(")")):
            raise ConfigError(f"malformed discounted family {text!r}")
        hi, lo, count = arg[len("geomgrid("):-1].split(",")
        hi, lo, count = float(hi), float(lo), int(count)
        if not (0 < lo <= hi <= 1) or count < 1:
            raise ConfigError(f"invalid geometric grid {text!r}")
        lams = [hi * (lo / hi) ** (i / max(count - 1, 1)) for i in range(count)]
        return [(fmt(lam), ev.discounted(lam)) for lam in lams]
    raise ConfigError(f"unknown family kind {head!r}")


def pick_states(p: Problem, args) -> list:
    if getattr(args, "state", None):
        return [p.state_from_string(s) for s in args.state]
    if getattr(args, "states", None):
        return [p.state_from_string(s.strip()) for s in args.states.split(",")]
    return list(p.states)


def emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_value(args) -> int:
    p = parse_instance(args.instance, args.params)
    theta = ev.from_json(json.loads(args.eval))
    vf = values.value_function(p, theta, args.tail_tol)
    report = {str(z): {"value": fmt(vf[z]), "error": fmt(vf.error)}
              for z in pick_states(p, args)}
    emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_vstar(args) -> int:
    p = parse_instance(args.instance, args.params)
    family = [theta for _, theta in parse_family(args.family)]
    labels = [label for label, _ in parse_family(args.family)]
    report = values.v_star_report(p, family, tail_tol=args.tail_tol)
    out = {}
    for z in pick_states(p, args):
        k, witness_state = report.witnesses[z]
        out[str(z)] = {"vstar": fmt(report.values[z]),
                       "witness": {"k": labels[k], "state": str(witness_state)}}
    payload = {"saturated": report.saturated, "values": out}
    emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    p = parse_instance(args.instance, args.params)
    family = parse_family(args.family)
    states = pick_states(p, args)
    result = values.convergence_sweep(p, {args.family: family}, states,
                                      tail_tol=args.tail_tol)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(values.CSV_HEADER)
    for row in result.rows:
        writer.writerow([row["family"], row["k"], f"{row['tv']:.12g}", row["state"],
                         f"{row['value']:.12g}", f"{row['error']:.12g}",
                         f"{row['dist_to_vstar']:.12g}"])
    emit(buf.getvalue(), args.out)
    summary = result.summaries[args.family]
    print(f"final dist_to_vstar={summary['final_dist_to_vstar']:.12g} "
          f"tail_cauchy_gap={summary['tail_cauchy_gap']:.12g} "
          f"oscillating={summary['oscillating']} "
          f"tv_final={summary['tv_trajectory'][-1]:.12g}", file=sys.stderr)
    return EXIT_OK


# --- verify suites ----------------------------------------------------------

def _verify_instances(seeds):
    instances = [corpus.example1_cycle(),
                 corpus.uncontrolled_cycle(4, (0.0, 0.0, 1.0, 1.0))]
    for seed in seeds:
        instances.append(corpus.random_problem(3 + seed % 8, 3, seed))
    return instances


def _verify_evaluations(seed: int):
    import random as _random
    rng = _random.Random(seed)
    thetas = [ev.cesaro(rng.randint(1, 30)), ev.discounted(rng.choice([0.5, 0.1, 0.01])),
              ev.dirac(rng.randint(1, 10)), corpus.random_explicit_evaluation(10, rng),
              ev.delay(ev.cesaro(rng.randint(1, 10)), rng.randint(1, 5))]
    return thetas


def suite_lemma1(seeds, tail_tol):
    for p in _verify_instances(seeds):
        for theta in _verify_evaluations(len(p.states)):
            rep = values.lemma1_check(p, theta, tail_tol)
            yield {"check": "lemma1", "instance": p.name, "evaluation": repr(theta),
                   "max_violation": fmt(rep.max_violation), "budget": fmt(rep.budget),
                   "passed": rep.passed}


def suite_bellman(seeds, tail_tol):
    for p in _verify_instances(seeds):
        for theta in _verify_evaluations(len(p.states)):
            if ev.first_weight(theta) >= 1.0:
                continue
            rep = values.bellman_consistency_check(p, theta, tail_tol)
            yield {"check": "bellman", "instance": p.name, "evaluation": repr(theta),
                   "max_violation": fmt(rep.max_violation), "budget": fmt(rep.budget),
                   "passed": rep.passed}


def suite_fixpoint(seeds, tail_tol):
    for p in _verify_instances(seeds):
        for lam in (0.5, 0.1, 0.01):
            rep = values.fixpoint_residual_check(p, lam, tail_tol)
            yield {"check": "fixpoint", "instance": p.name, "lambda": lam,
                   "max_violation": fmt(rep.max_violation), "budget": fmt(rep.budget),
                   "passed": rep.passed}


def suite_oracle(seeds, tail_tol):
    for seed in seeds:
        p = corpus.random_problem(3 + seed % 4, 2, seed)
        for theta in (ev.cesaro(4), ev.dirac(3), ev.delay(ev.cesaro(2), 2)):
            horizon = ev.materialize(theta, tail_tol).support
            engine, _ = values.value(p, theta, p.states[0], tail_tol)
            brute = oracle.brute_value(p, theta, p.states[0], horizon)
            gap = abs(engine - brute.value)
            yield {"check": "oracle", "instance": p.name, "evaluation": repr(theta),
                   "max_violation": fmt(gap), "budget": 0.0, "passed": gap == 0.0}


def suite_affinity(seeds, tail_tol):
    for seed in seeds:
        g = corpus.random_house(4, 2, seed)
        u = gambling.FiniteDistribution.from_mapping(
            {x: 1.0 / len(g.states) for x in g.states})
        rep = gambling.affinity_check(g, ev.cesaro(3), u, tail_tol=tail_tol)
        yield {"check": "affinity", "instance": g.name,
               "max_violation": fmt(rep.gap), "budget": 1e-9, "passed": rep.passed}


def suite_sandwich(seeds, tail_tol, m0):
    family = [ev.cesaro(n) for n in (2, 4, 8, 16, 32, 64, 128)]
    for p in _verify_instances(seeds):
        rep = values.sandwich_check(p, p.states[0], family, m0, tail_tol)
        violation = max(rep.lower - rep.liminf_half, rep.limsup_half - rep.upper, 0.0)
        yield {"check": "sandwich", "instance": p.name,
               "max_violation": fmt(violation), "budget": fmt(rep.tolerance),
               "passed": rep.holds}


def suite_uncontrolled(seeds, tail_tol):
    import random as _random
    for seed in seeds:
        rng = _random.Random(seed)
        period = rng.randint(2, 6)
        pattern = [rng.randint(0, 4) / 4 for _ in range(period)]
        p = corpus.uncontrolled_cycle(period, pattern)
        for theta in (ev.cesaro(50), ev.discounted(0.02)):
            rep = values.uncontrolled_bound_check(p, theta, period, p.states[0],
                                                  tail_tol=tail_tol)
            yield {"check": "uncontrolled", "instance": p.name, "evaluation": repr(theta),
                   "max_violation": fmt(max(rep.gap - rep.bound, 0.0)),
                   "budget": fmt(rep.bound), "passed": rep.holds}


SUITES = {
    "lemma1": suite_lemma1,
    "bellman": suite_bellman,
    "fixpoint": suite_fixpoint,
    "oracle": suite_oracle,
    "affinity": suite_affinity,
    "sandwich": suite_sandwich,
    "uncontrolled": suite_uncontrolled,
}


def cmd_verify(args) -> int:
    if args.instance:
        # validate a user-supplied instance before running anything
        parse_instance(args.instance, args.params)
    seeds = parse_range(args.seeds)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; known: {sorted(SUITES)} or 'all'")
    records = []
    for name in names:
        if name == "sandwich":
            records.extend(SUITES[name](seeds, args.tail_tol, args.m0))
        else:
            records.extend(SUITES[name](seeds, args.tail_tol))
    failures = [rec for rec in records if not rec["passed"]]
    report = {"checks": len(records), "failures": len(failures), "records": records}
    emit(json.dumps(report, indent=2) + "\n", args.out)
    print(f"{len(records)} checks, {len(failures)} failures", file=sys.stderr)
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitdp",
        description="Values of dynamic programming problems under arbitrary "
                    "stage evaluations, with limit-value computation and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, family=False, evaluation=False):
        sp.add_argument("--instance", required=sp.prog.split()[-1] != "verify",
                        help="registry name, inline JSON, or path to a .json file")
        sp.add_argument("--params", help="JSON parameters for registry instances")
        sp.add_argument("--state", action="append", help="state (repeatable)")
        sp.add_argument("--states", help="comma-separated states")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--tail-tol", type=float, default=1e-9, dest="tail_tol")
        sp.add_argument("--fixpoint-tol", type=float, default=1e-9, dest="fixpoint_tol")
        if evaluation:
            sp.add_argument("--eval", required=True, help="evaluation as JSON")
        if family:
            sp.add_argument("--family", required=True, help="family spec")

    sp = sub.add_parser("value", help="per-state value under one evaluation")
    common(sp, evaluation=True)
    sp.set_defaults(func=cmd_value)

    sp = sub.add_parser("vstar", help="limit-value candidate over a family")
    common(sp, family=True)
    sp.set_defaults(func=cmd_vstar)

    sp = sub.add_parser("sweep", help="value table over a family, CSV output")
    common(sp, family=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run numerical check suites")
    common(sp)
    sp.add_argument("--suite", default="all")
    sp.add_argument("--seeds", default="0..19")
    sp.add_argument("--m0", type=int, default=2)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (EnumerationGuardError,) as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, InvalidInstanceError, InvalidEvaluationError,
            UnknownStateError, HorizonError, LimitDPError,
            json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
