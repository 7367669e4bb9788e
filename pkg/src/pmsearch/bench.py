"""Corpus benchmarks and verification suites behind the command line.

A benchmark runs every requested algorithm on every corpus instance.
Randomised algorithms (GA, PSO) are repeated with independent seeds and
summarised as mean and standard deviation over repeats. Work is split per
instance and merged by instance index, so the report does not depend on how
many worker processes ran it.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analysis
from .attack import (
    ALGORITHMS,
    DEFAULT_CAP,
    GeneratorConfig,
    build_ground_set,
    generate_instances,
    instance_to_dict,
    run_attack,
    untargeted_objective,
)
from .baselines import PopulationConfig, pso_search
from .core import CountedOracle
from .instances import random_instance
from .local_search import is_local_optimum, local_search

RANDOMISED = ("ga", "pso")

REPORT_COLUMNS = (
    "algorithm",
    "runs",
    "instances_attempted",
    "instances_succeeded",
    "success_rate",
    "success_rate_std",
    "mean_queries",
    "mean_queries_std",
    "mean_modification_rate",
    "fingerprint",
)

RECORD_COLUMNS = (
    "instance", "algorithm", "run", "seed", "success", "queries",
    "modification_rate", "value", "termination", "error",
)


@dataclass(frozen=True)
class RunSettings:
    """Algorithm settings shared by every instance of a benchmark."""

    seed: int = 0
    epsilon: float = 0.0
    budget: Optional[int] = None
    cap: float = DEFAULT_CAP
    population_size: int = 60
    max_iterations: int = 20
    repeats: int = 10


def run_seed(seed: int, instance: int, run: int) -> int:
    """Seed for one randomised run, derived from (master seed, instance, run)."""
    return int(np.random.SeedSequence([seed, instance, run]).generate_state(1)[0])


def _attack_instance(task):
    index, inst, victim, algorithms, settings = task
    out = []
    for alg in algorithms:
        runs = settings.repeats if alg in RANDOMISED else 1
        for r in range(runs):
            seed = run_seed(settings.seed, index, r) if alg in RANDOMISED else 0
            try:
                o = run_attack(
                    alg, inst, victim, seed=seed, epsilon=settings.epsilon,
                    budget=settings.budget, cap=settings.cap,
                    population_size=settings.population_size,
                    max_iterations=settings.max_iterations,
                )
                out.append((index, alg, r, seed, o.success, o.queries,
                            o.modification_rate, o.value, o.termination, ""))
            except Exception as exc:  # recorded, the benchmark goes on
                out.append((index, alg, r, seed, False, 0, 0.0, 0.0, "error",
                            f"{type(exc).__name__}: {exc}"))
    return out


@dataclass
class AlgorithmRow:
    algorithm: str
    runs: int
    attempted: int
    succeeded: float
    success_rate: float
    success_rate_std: float
    mean_queries: float
    mean_queries_std: float
    mean_modification_rate: float


@dataclass
class BenchReport:
    fingerprint: str
    rows: list
    records: list = field(default_factory=list)

    def row(self, algorithm: str) -> AlgorithmRow:
        for r in self.rows:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.algorithm, r.runs, r.attempted, f"{r.succeeded:.6f}",
                f"{r.success_rate:.6f}", f"{r.success_rate_std:.6f}",
                f"{r.mean_queries:.6f}", f"{r.mean_queries_std:.6f}",
                f"{r.mean_modification_rate:.6f}", self.fingerprint,
            ])
        return buf.getvalue()

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for rec in self.records:
            i, alg, r, seed, ok, q, rate, value, term, err = rec
            w.writerow([i, alg, r, seed, int(ok), q, f"{rate:.6f}", repr(value), term, err])
        return buf.getvalue()

    def table(self) -> str:
        """Plain-text summary in the ``success rate | mean queries`` style."""
        lines = [f"fingerprint {self.fingerprint}",
                 f"{'alg':<8}{'runs':>5}{'attempted':>11}  success% | queries"]
        for r in self.rows:
            if r.runs > 1:
                cell = (f"{r.success_rate:.2f}±{r.success_rate_std:.2f} | "
                        f"{r.mean_queries:.0f}±{r.mean_queries_std:.0f}")
            else:
                cell = f"{r.success_rate:.2f} | {r.mean_queries:.0f}"
            lines.append(f"{r.algorithm:<8}{r.runs:>5}{r.attempted:>11}  {cell}")
        return "\n".join(lines) + "\n"


def fingerprint(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _summarise(algorithm: str, recs: list, n: int) -> AlgorithmRow:
    runs = max((r[2] for r in recs), default=-1) + 1
    rates, queries, succeeded, mods = [], [], [], []
    for run in range(runs):
        these = [r for r in recs if r[2] == run]
        ok = sum(bool(r[4]) for r in these)
        succeeded.append(ok)
        rates.append(100.0 * ok / n if n else 0.0)
        queries.append(sum(r[5] for r in these) / n if n else 0.0)
        mods.append(sum(r[6] for r in these) / n if n else 0.0)

    def mean(xs):
        return statistics.fmean(xs) if xs else 0.0

    def std(xs):
        return statistics.pstdev(xs) if len(xs) > 1 else 0.0

    return AlgorithmRow(algorithm, max(runs, 1), n, mean(succeeded), mean(rates), std(rates),
                        mean(queries), std(queries), mean(mods))


def run_benchmark(pairs: Sequence, algorithms: Sequence[str] = ALGORITHMS,
                  settings: RunSettings = RunSettings(), jobs: int = 1,
                  corpus_id: Optional[dict] = None) -> BenchReport:
    """Attack every instance with every algorithm and summarise per algorithm.

    Success rate and mean queries are taken over all attempted instances, so
    failed attacks contribute their queries too.
    """
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {alg!r}")
    if settings.repeats < 1:
        raise ValueError("repeats must be positive")
    tasks = [(i, inst, victim, tuple(algorithms), settings)
             for i, (inst, victim) in enumerate(pairs)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_attack_instance, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_attack_instance(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    if corpus_id is None:
        corpus_id = {"instances": [instance_to_dict(i, v) for i, v in pairs]}
    fp = fingerprint({"corpus": corpus_id, "algorithms": list(algorithms),
                      "settings": asdict(settings)})
    rows = [_summarise(alg, [r for r in records if r[1] == alg], len(pairs))
            for alg in algorithms]
    return BenchReport(fp, rows, records)


def cmd_bench(gen: GeneratorConfig, corpus_seed: int, algorithms: Sequence[str] = ALGORITHMS,
              settings: RunSettings = RunSettings(), jobs: int = 1) -> BenchReport:
    """Generate the seeded corpus, then benchmark it."""
    pairs = generate_instances(gen, corpus_seed)
    return run_benchmark(pairs, algorithms, settings, jobs,
                         corpus_id={"generator": gen.to_dict(), "seed": corpus_seed})


# ---------------------------------------------------------------- verification


@dataclass
class VerifyReport:
    suite: str
    passed: bool
    summary: str
    csv: str = ""
    failures: list = field(default_factory=list)


def _instance_json(inst) -> str:
    return json.dumps({
        "seed": inst.seed,
        "family": inst.family,
        "blocks": [list(b) for b in inst.constraint.blocks],
        "capacities": list(inst.constraint.capacities),
        "values": inst.objective.values.tolist(),
    })


def verify_bounds(seed: int = 0, count: int = 200, n_max: int = 10) -> VerifyReport:
    """Bound check on LS local optima of random enumerable instances."""
    failures = []
    for k in range(count):
        inst = random_instance(seed * 100_003 + k, n_max=n_max)
        c, f = inst.constraint, inst.objective
        r = local_search(CountedOracle(f, c), c)
        opt, _ = analysis.brute_force_opt(f, c)
        rep = analysis.theorem1_check(f, r.solution, opt, c)
        if not rep.holds or (r.termination == "local-optimum" and not is_local_optimum(f, r.local_optimum, c)):
            failures.append(_instance_json(inst))
    ok = not failures
    return VerifyReport("bounds", ok, f"{count - len(failures)}/{count} instances satisfy the bound",
                        failures=failures)


SMALL_CORPUS = dict(min_tokens=10, max_tokens=12, substitutable=0.3, max_substitutes=2,
                    salient_min=1, salient_max=2)


def _logit_is_modular(victim, inst, n: int) -> bool:
    """True when the victim's logit is modular in the id set (no active interaction)."""
    _, ground = build_ground_set(inst)
    z = analysis.as_table(victim.set_logit(inst, ground), n)
    neg = analysis.TabulatedFunction(-z.values, n)
    tol = 1e-9
    return (analysis.check_submodular(z, n, tol=tol) is None
            and analysis.check_submodular(neg, n, tol=tol) is None)


def verify_submodularity(seed: int = 0, count: int = 40, interaction_density: float = 0.3,
                         max_ground: int = 12) -> VerifyReport:
    """Share of small attack objectives that have a submodularity counterexample."""
    gen = GeneratorConfig(n_instances=count, interaction_density=interaction_density, **SMALL_CORPUS)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("instance", "ground_size", "interactions", "submodular", "monotone",
                "logit_modular"))
    checked = violating = 0
    for i, (inst, victim) in enumerate(generate_instances(gen, seed)):
        c, _ = build_ground_set(inst)
        if c.ground_size > max_ground:
            continue
        o = untargeted_objective(victim, inst)
        t = analysis.as_table(o, c.ground_size)
        bad = analysis.check_submodular(t, c.ground_size)
        mono = analysis.check_monotone(t, c.ground_size) is None
        checked += 1
        violating += bad is not None
        w.writerow((i, c.ground_size, len(victim.interactions), int(bad is None), int(mono),
                    int(_logit_is_modular(victim, inst, c.ground_size))))
    share = violating / checked if checked else 0.0
    return VerifyReport("submodularity", True,
                        f"{violating}/{checked} objectives are not submodular ({100 * share:.1f}%)",
                        csv=buf.getvalue())


def verify_figure2() -> VerifyReport:
    alphas = analysis.default_alpha_grid()
    rows = analysis.bound_comparison_grid(alphas, list(range(1, 21)))
    bad = [r for r in rows if (r[1] >= 3 and not r[2] < 0) or (r[1] >= 2 and not r[3] < 0)]
    return VerifyReport("figure2", not bad,
                        f"{len(rows)} grid points, {len(bad)} contradict the sign pattern",
                        csv=analysis.grid_csv(rows), failures=[repr(r) for r in bad])


FIGURE3_COLUMNS = ("optimum", "lower_bound", "ls_value", "pso_value")


def verify_figure3(seed: int = 0, max_ground: int = 12) -> VerifyReport:
    """Optimum, guaranteed LS value, LS value and PSO value on one small attack objective.

    Both searches run to termination (no early stop on success).
    """
    gen = GeneratorConfig(n_instances=1, **SMALL_CORPUS)
    for attempt in range(100):
        (inst, victim), = generate_instances(gen, seed + attempt)
        c, _ = build_ground_set(inst)
        if c.ground_size <= max_ground:
            break
    else:
        return VerifyReport("figure3", False, "no enumerable instance found")
    o = untargeted_objective(victim, inst)
    n = c.ground_size
    table = analysis.as_table(o, n, c)
    opt, opt_val = analysis.brute_force_opt(table, c)
    ls = local_search(CountedOracle(table, c), c)
    pso = pso_search(CountedOracle(table, c), c, PopulationConfig(seed=seed))
    rep = analysis.theorem1_check(table, ls.solution, opt, c)
    ok = rep.holds and opt_val >= ls.value >= rep.lower_bound - analysis.DEFAULT_TOL
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIGURE3_COLUMNS)
    w.writerow([repr(opt_val), repr(rep.lower_bound), repr(ls.value), repr(pso.value)])
    return VerifyReport(
        "figure3", ok,
        f"|V|={n}: optimum {opt_val:.6f}, lower bound {rep.lower_bound:.6f}, "
        f"LS {ls.value:.6f}, PSO {pso.value:.6f}",
        csv=buf.getvalue(),
        failures=[] if ok else [json.dumps(instance_to_dict(inst, victim))],
    )


SUITES = {
    "bounds": verify_bounds,
    "submodularity": verify_submodularity,
    "figure2": verify_figure2,
    "figure3": verify_figure3,
}


__all__ = [
    "AlgorithmRow", "BenchReport", "RunSettings",
    "VerifyReport", "cmd_bench", "fingerprint", "run_benchmark", "run_seed", "SUITES",
    "verify_bounds", "verify_figure2", "verify_figure3", "verify_submodularity",
]
