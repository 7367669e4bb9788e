"""Population-based baselines: discrete particle swarm and a genetic algorithm.

Both encode a candidate as one categorical gene per block: ``-1`` keeps the
block empty, ``j >= 0`` selects the j-th element of the block. This needs
unit capacities, which is the word-substitution setting (at most one
substitute per position).

Every individual draws from its own random stream derived from the master
seed, so a fixed seed reproduces the trajectory and query count exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BudgetExhausted, CountedOracle, PartitionConstraint
from .local_search import BUDGET, SUCCESS, SearchResult, Step

MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True)
class PopulationConfig:
    population_size: int = 60
    max_iterations: int = 20
    seed: int = 0
    stop_on_success: bool = False
    budget: Optional[int] = None
    # particle swarm
    v_max: float = 1.0
    omega_max: float = 0.8
    omega_min: float = 0.2
    p_max: float = 0.8
    p_min: float = 0.2
    mutation_k: float = 2.0
    # genetic algorithm
    crossover_tries: int = 8  # N: crossovers drawn per child until one is new
    parent_pool: int = 4  # K: second parent comes from the K fittest
    mutation_rate: float = 0.5  # delta: chance a child gets one perturb step
    temperature: float = 0.3
    # re-query individuals whose fitness is already known, as the reference
    # implementations do; False gives a leaner variant
    requery: bool = True

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0 < self.omega_min <= self.omega_max:
            raise ValueError("need 0 < omega_min <= omega_max")
        if not 0 < self.p_min <= self.p_max <= 1:
            raise ValueError("need 0 < p_min <= p_max <= 1")
        if self.v_max <= 0 or self.temperature <= 0:
            raise ValueError("v_max and temperature must be positive")
        if self.crossover_tries < 1 or self.parent_pool < 1:
            raise ValueError("crossover_tries and parent_pool must be positive")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation_rate must lie in [0, 1]")


class _Stop(Exception):
    pass


class _Population:
    """Shared bookkeeping: decoding, counted evaluation, best-so-far."""

    def __init__(self, o: CountedOracle, c: PartitionConstraint, cfg: PopulationConfig,
                 rate_denominator: Optional[int], executor=None):
        if not c.unit_capacity:
            raise ValueError("population baselines need unit capacities (d_i = 1)")
        if cfg.budget is not None:
            limit = o.query_count + cfg.budget
            o.budget = limit if o.budget is None else min(o.budget, limit)
        self.o, self.c, self.cfg = o, c, cfg
        self.executor = executor
        self.blocks = c.blocks
        self.sizes = np.array([len(b) for b in c.blocks])
        self.nb = len(c.blocks)
        self.denominator = rate_denominator or max(self.nb, 1)
        self.start = o.query_count
        self.best: Optional[frozenset] = None
        self.best_value = -np.inf
        self.steps: list = []
        self.hit: Optional[tuple] = None
        root = np.random.SeedSequence(cfg.seed)
        w = np.minimum(self.sizes, 10).astype(float)
        self.position_probs = w / w.sum() if self.nb else w
        self.streams = [np.random.default_rng(s) for s in root.spawn(cfg.population_size)]

    def decode(self, x) -> frozenset:
        return frozenset(self.blocks[i][g] for i, g in enumerate(x) if g >= 0)

    def evaluate_all(self, xs) -> list:
        """Evaluate a whole generation, then check it for a success.

        The success check runs after the batch, as in the generation-level
        loops these baselines come from, and picks the first successful
        individual in population order. Evaluations go through ``executor``
        when one is given; results are merged in population order, so the
        outcome does not depend on it.
        """
        subsets = [self.decode(x) for x in xs]
        if self.executor is not None and len(subsets) > 1:
            values = list(self.executor.map(self.o.evaluate, subsets))
        else:
            values = [self.o.evaluate(s) for s in subsets]
        for s, v in zip(subsets, values):
            if v > self.best_value:
                self.best, self.best_value = s, v
                self.steps.append(Step("improve", (), tuple(sorted(s)), v))
        if self.cfg.stop_on_success:
            for s, v in zip(subsets, values):
                if self.o.is_success(s, v):
                    self.hit = (s, v)
                    raise _Stop
        return values

    def perturb(self, x, fx, rng):
        """Best single substitution at one random position.

        The position is drawn with weight ``min(|B_i|, 10)``, redrawn while it
        is already modified and some position is still unmodified. Every
        other element of that block is queried and the best one replaces the
        current gene if it beats ``fx``. Returns ``(x, fx)``, updated or not.
        """
        if not self.nb:
            return x, fx
        b = int(rng.choice(self.nb, p=self.position_probs))
        while x[b] >= 0 and np.count_nonzero(x >= 0) < self.nb:
            b = int(rng.choice(self.nb, p=self.position_probs))
        options = [j for j in range(self.sizes[b]) if j != x[b]]
        if not options:
            return x, fx
        if self.cfg.requery:
            fx = self.evaluate_all([x])[0]
        cands = []
        for j in options:
            y = x.copy()
            y[b] = j
            cands.append(y)
        values = self.evaluate_all(cands)
        k = int(np.argmax(values))
        if values[k] > fx:
            return cands[k], values[k]
        return x, fx

    def initial(self) -> tuple:
        """The unmodified candidate plus perturbed copies of it."""
        x0 = np.full(self.nb, -1)
        f0 = self.evaluate_all([x0])[0]
        pop, fit = [x0], [f0]
        for i in range(1, self.cfg.population_size):
            x, fx = self.perturb(x0, f0, self.streams[i])
            pop.append(x.copy())
            fit.append(fx)
        return pop, fit

    def rate(self, x) -> float:
        return float(np.count_nonzero(x >= 0)) / self.denominator

    def result(self, termination: str) -> SearchResult:
        queries = self.o.query_count - self.start
        if self.hit is not None:
            return SearchResult(self.hit[0], self.hit[1], queries, SUCCESS, self.steps)
        best = self.best if self.best is not None else frozenset()
        value = self.best_value if self.best is not None else 0.0
        return SearchResult(best, value, queries, termination, self.steps)


def _sigmoid(v):
    return 1.0 / (1.0 + np.exp(-v))


def pso_search(o: CountedOracle, c: Optional[PartitionConstraint] = None,
               cfg: Optional[PopulationConfig] = None,
               rate_denominator: Optional[int] = None, executor=None) -> SearchResult:
    """Discrete particle swarm over per-block choices.

    Velocities grow where a particle disagrees with its personal or global
    best and are clipped to ``[-v_max, v_max]``; ``sigmoid(velocity)`` is the
    chance of copying the elite's gene. Inertia anneals from ``omega_max`` to
    ``omega_min``. The pull toward the personal best anneals from ``p_max``
    to ``p_min`` while the pull toward the global best rises from ``p_min``
    to ``p_max``. Afterwards a particle is mutated with probability
    ``1 - mutation_k * modification_rate``.

    Updates are synchronous: all particles move against the elites of the
    previous iteration, then the swarm is evaluated as one batch. With
    ``requery=False`` a particle whose genes did not change keeps its fitness
    instead of being queried again.
    """
    c = c or o.constraint
    cfg = cfg or PopulationConfig()
    p = _Population(o, c, cfg, rate_denominator, executor)
    termination = MAX_ITERATIONS
    try:
        pop, fit = p.initial()
        pbest = [x.copy() for x in pop]
        pfit = list(fit)
        g = int(np.argmax(fit))
        gbest, gfit = pop[g].copy(), fit[g]
        vel = [rng.uniform(-cfg.v_max, cfg.v_max, p.nb) for rng in p.streams]
        big_t = cfg.max_iterations
        for t in range(big_t):
            omega = (cfg.omega_max - cfg.omega_min) * (big_t - t) / big_t + cfg.omega_min
            p_local = cfg.p_max - (cfg.p_max - cfg.p_min) * t / big_t
            p_global = cfg.p_min + (cfg.p_max - cfg.p_min) * t / big_t
            moved = []
            for i, rng in enumerate(p.streams):
                x = pop[i]
                pull = np.where(x != pbest[i], 1.0, -1.0) + np.where(x != gbest, 1.0, -1.0)
                vel[i] = np.clip(omega * vel[i] + (1 - omega) * pull, -cfg.v_max, cfg.v_max)
                turn = _sigmoid(vel[i])
                y = x.copy()
                if rng.random() < p_local:
                    y = np.where(rng.random(p.nb) < turn, pbest[i], y)
                if rng.random() < p_global:
                    y = np.where(rng.random(p.nb) < turn, gbest, y)
                if not np.array_equal(x, y):
                    pop[i] = y
                    moved.append(i)
            if cfg.requery:
                moved = list(range(cfg.population_size))
            for i, v in zip(moved, p.evaluate_all([pop[i] for i in moved])):
                fit[i] = v
            for i, rng in enumerate(p.streams):
                if rng.random() < 1 - cfg.mutation_k * p.rate(pop[i]):
                    pop[i], fit[i] = p.perturb(pop[i], fit[i], rng)
            for i in range(cfg.population_size):
                if fit[i] > pfit[i]:
                    pbest[i], pfit[i] = pop[i].copy(), fit[i]
            g = int(np.argmax(fit))
            if fit[g] > gfit:
                gbest, gfit = pop[g].copy(), fit[g]
    except _Stop:
        termination = SUCCESS
    except BudgetExhausted:
        termination = BUDGET
    return p.result(termination)


def ga_search(o: CountedOracle, c: Optional[PartitionConstraint] = None,
              cfg: Optional[PopulationConfig] = None,
              rate_denominator: Optional[int] = None, executor=None) -> SearchResult:
    """Genetic algorithm with one elite, uniform crossover and one-gene mutation.

    The first parent is drawn with probability proportional to
    ``exp(fitness / temperature)``, the second uniformly from the
    ``parent_pool`` fittest. Up to ``crossover_tries`` crossovers are drawn
    until the child differs from every current individual. With probability
    ``mutation_rate`` a child then gets the best substitution at one random
    position.
    """
    c = c or o.constraint
    cfg = cfg or PopulationConfig()
    p = _Population(o, c, cfg, rate_denominator, executor)
    termination = MAX_ITERATIONS
    try:
        pop, fit = p.initial()
        size = cfg.population_size
        for _ in range(cfg.max_iterations):
            order = sorted(range(size), key=lambda i: (-fit[i], i))
            elite = order[0]
            pool = order[: min(cfg.parent_pool, size)]
            f = np.asarray(fit)
            w = np.exp((f - f.max()) / cfg.temperature)
            probs = w / w.sum()
            seen = {tuple(x) for x in pop}
            children = [pop[elite].copy()]
            for j in range(1, size):
                rng = p.streams[j]
                for _attempt in range(cfg.crossover_tries):
                    a = pop[int(rng.choice(size, p=probs))]
                    b = pop[pool[int(rng.integers(len(pool)))]]
                    child = np.where(rng.random(p.nb) < 0.5, a, b)
                    if tuple(child) not in seen:
                        break
                children.append(child)
            if cfg.requery:
                fit = p.evaluate_all(children)
            else:
                fit = [fit[elite]] + p.evaluate_all(children[1:])
            for j in range(1, size):
                rng = p.streams[j]
                if rng.random() < cfg.mutation_rate:
                    children[j], fit[j] = p.perturb(children[j], fit[j], rng)
            pop = children
    except _Stop:
        termination = SUCCESS
    except BudgetExhausted:
        termination = BUDGET
    return p.result(termination)
