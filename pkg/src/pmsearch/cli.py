"""Command line: ``pmsearch solve|bench|verify|gen``.

``solve`` exits 0 when the attack succeeds, 2 when it fails and 1 on any
error (unreadable or malformed input included).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench
from .attack import (
    ALGORITHMS,
    DEFAULT_CAP,
    MAX_TOKENS,
    MIN_TOKENS,
    GeneratorConfig,
    dumps_corpus,
    generate_instances,
    loads_corpus,
    run_attack,
)

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


def _alg_list(text: str) -> list:
    algs = [a.strip() for a in text.split(",") if a.strip()]
    for a in algs:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}")
    return algs


def _search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.0, help="minimum LS improvement per step")
    p.add_argument("--budget", type=int, default=None, help="query budget per attack")
    p.add_argument("--cap-modification", type=float, default=DEFAULT_CAP,
                   help="largest modification rate that still counts as a success")
    p.add_argument("--pop-size", type=int, default=60, help="GA/PSO population size")
    p.add_argument("--iters", type=int, default=20, help="GA/PSO iterations")


def _generator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--min-tokens", type=int, default=MIN_TOKENS)
    p.add_argument("--max-tokens", type=int, default=MAX_TOKENS)
    p.add_argument("--interaction-density", type=float, default=GeneratorConfig.interaction_density)
    p.add_argument("--targeted", action="store_true")


def _generator(args) -> GeneratorConfig:
    return GeneratorConfig(n_instances=args.instances, min_tokens=args.min_tokens,
                           max_tokens=args.max_tokens,
                           interaction_density=args.interaction_density,
                           targeted=args.targeted)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmsearch",
        description="Set maximisation under partition matroid constraints, "
                    "with word-substitution attack benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="attack one instance from a JSON file")
    p.add_argument("instance", help="instance or corpus JSON file")
    p.add_argument("--index", type=int, default=0, help="instance index inside a corpus file")
    p.add_argument("--alg", choices=ALGORITHMS, default="ls")
    _search_flags(p)

    p = sub.add_parser("bench", help="benchmark algorithms on a corpus")
    p.add_argument("--corpus", help="corpus JSON file; generated from the flags below if omitted")
    _generator_flags(p)
    p.add_argument("--alg", type=_alg_list, default=list(ALGORITHMS),
                   help="comma-separated algorithms (default: all)")
    p.add_argument("--repeats", type=int, default=10, help="runs per instance for GA and PSO")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="report CSV path (default: stdout)")
    p.add_argument("--records", help="optional per-run CSV path")
    _search_flags(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(bench.SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None, help="instances for bounds/submodularity")
    p.add_argument("--out", help="CSV output path for suites that emit data")

    p = sub.add_parser("gen", help="write a seeded synthetic corpus")
    _generator_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="corpus JSON path (default: stdout)")
    return parser


def _settings(args, repeats: int = 1) -> bench.RunSettings:
    return bench.RunSettings(seed=args.seed, epsilon=args.epsilon, budget=args.budget,
                             cap=args.cap_modification, population_size=args.pop_size,
                             max_iterations=args.iters, repeats=repeats)


def cmd_solve(args) -> int:
    pairs = loads_corpus(Path(args.instance).read_text())
    if not 0 <= args.index < len(pairs):
        raise ValueError(f"index {args.index} out of range for {len(pairs)} instance(s)")
    inst, victim = pairs[args.index]
    if victim is None:
        raise ValueError("instance has no 'victim' field")
    o = run_attack(args.alg, inst, victim, seed=args.seed, epsilon=args.epsilon,
                   budget=args.budget, cap=args.cap_modification,
                   population_size=args.pop_size, max_iterations=args.iters)
    print(f"algorithm: {o.algorithm}")
    print(f"tokens: {' '.join(o.adversarial_tokens)}")
    print(f"value: {o.value!r}")
    print(f"queries: {o.queries}")
    print(f"termination: {o.termination}")
    print(f"modification_rate: {o.modification_rate:.4f}")
    print(f"success: {str(o.success).lower()}")
    return EXIT_OK if o.success else EXIT_FAILED


def cmd_bench(args) -> int:
    settings = _settings(args, args.repeats)
    if args.corpus:
        pairs = loads_corpus(Path(args.corpus).read_text())
        if any(v is None for _, v in pairs):
            raise ValueError("every corpus instance needs a 'victim' field")
        report = bench.run_benchmark(pairs, args.alg, settings, args.jobs)
    else:
        report = bench.cmd_bench(_generator(args), args.seed, args.alg, settings, args.jobs)
    _write(args.out, report.to_csv())
    if args.records:
        _write(args.records, report.records_csv())
    if args.out not in (None, "-"):
        sys.stdout.write(report.table())
    errors = sum(1 for r in report.records if r[8] == "error")
    if errors:
        print(f"{errors} run(s) raised errors; see the per-run records", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    fn = bench.SUITES[args.suite]
    kwargs = {}
    if args.suite in ("bounds", "submodularity", "figure3"):
        kwargs["seed"] = args.seed
    if args.count is not None and args.suite in ("bounds", "submodularity"):
        kwargs["count"] = args.count
    rep = fn(**kwargs)
    if rep.csv:
        _write(args.out, rep.csv)
    print(f"{rep.suite}: {'ok' if rep.passed else 'FAILED'}: {rep.summary}",
          file=sys.stderr if args.out in (None, "-") and rep.csv else sys.stdout)
    for w in rep.failures:
        print(w, file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_ERROR


def cmd_gen(args) -> int:
    cfg = _generator(args)
    _write(args.out, dumps_corpus(generate_instances(cfg, args.seed), args.seed, cfg.to_dict()))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify, "gen": cmd_gen}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # exit code 1 covers every failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
