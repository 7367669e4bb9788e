from concurrent.futures import ThreadPoolExecutor

import pytest

from pmsearch.baselines import MAX_ITERATIONS, PopulationConfig, ga_search, pso_search
from pmsearch.core import CountedOracle, PartitionConstraint
from pmsearch.local_search import BUDGET, SUCCESS

from conftest import modular
from oracles.frozen import MODULAR_OPT

SEARCHES = [pso_search, ga_search]


@pytest.fixture(params=SEARCHES, ids=["pso", "ga"])
def search(request):
    return request.param


def test_modular_instance(search, modular_oracle):
    r = search(modular_oracle, cfg=PopulationConfig(seed=1))
    assert r.value == pytest.approx(0.7)
    assert r.solution == MODULAR_OPT


def test_zero_function(search, modular_constraint):
    r = search(CountedOracle(lambda s: 0.0, modular_constraint), cfg=PopulationConfig(seed=1))
    assert r.value == 0.0
    assert r.termination == MAX_ITERATIONS


def test_single_block_finds_the_argmax(search):
    c = PartitionConstraint(((0,),), (1,))
    r = search(CountedOracle(lambda s: 1.0 if s else 0.2, c), cfg=PopulationConfig(seed=0))
    assert r.solution == frozenset({0}) and r.value == 1.0


def test_population_of_one_is_rejected():
    with pytest.raises(ValueError):
        PopulationConfig(population_size=1)


@pytest.mark.parametrize("kwargs", [
    dict(max_iterations=0), dict(omega_min=0.9), dict(p_max=1.5), dict(v_max=0),
    dict(crossover_tries=0), dict(mutation_rate=2.0),
])
def test_invalid_configs(kwargs):
    with pytest.raises(ValueError):
        PopulationConfig(**kwargs)


def test_needs_unit_capacities(search):
    c = PartitionConstraint(((0, 1),), (2,))
    with pytest.raises(ValueError):
        search(CountedOracle(lambda s: 0.0, c))


def test_only_feasible_subsets_are_evaluated(search):
    c = PartitionConstraint.from_sizes([3, 2, 4])
    seen = []

    def f(s):
        seen.append(frozenset(s))
        return float(sum(s)) / 20

    search(CountedOracle(f, c), cfg=PopulationConfig(seed=4, max_iterations=5))
    assert seen and all(c.is_feasible(s) for s in seen)


def test_queries_equal_the_oracle_delta(search):
    c = PartitionConstraint.from_sizes([3, 2, 4])
    o = CountedOracle(modular([0.1] * 9), c)
    o.evaluate(set())
    r = search(o, cfg=PopulationConfig(seed=2, max_iterations=4))
    assert r.queries == o.query_count - 1


def test_fixed_seed_is_reproducible(search):
    c = PartitionConstraint.from_sizes([3, 2, 4, 1])
    f = modular([0.3, 0.1, 0.5, 0.2, 0.9, 0.4, 0.05, 0.6, 0.7, 0.3])
    a = search(CountedOracle(f, c), cfg=PopulationConfig(seed=11, max_iterations=6))
    b = search(CountedOracle(f, c), cfg=PopulationConfig(seed=11, max_iterations=6))
    assert (a.solution, a.value, a.queries, a.steps) == (b.solution, b.value, b.queries, b.steps)


def test_executor_does_not_change_results(search):
    c = PartitionConstraint.from_sizes([3, 2, 4, 1])
    f = modular([0.3, 0.1, 0.5, 0.2, 0.9, 0.4, 0.05, 0.6, 0.7, 0.3])
    cfg = PopulationConfig(seed=5, max_iterations=5)
    plain = search(CountedOracle(f, c), cfg=cfg)
    with ThreadPoolExecutor(4) as ex:
        pooled = search(CountedOracle(f, c), cfg=cfg, executor=ex)
    assert (plain.solution, plain.queries) == (pooled.solution, pooled.queries)


def test_budget_is_respected(search):
    c = PartitionConstraint.from_sizes([3, 3, 3])
    o = CountedOracle(modular([0.1] * 9), c)
    r = search(o, cfg=PopulationConfig(seed=0, budget=25))
    assert r.termination == BUDGET
    assert r.queries == 25


def test_stops_on_success(search):
    c = PartitionConstraint.from_sizes([2, 2, 2])
    o = CountedOracle(modular([0.1, 0.2, 0.3, 0.1, 0.0, 0.4]), c,
                      success=lambda s, v: v >= 0.5)
    r = search(o, cfg=PopulationConfig(seed=3, stop_on_success=True))
    assert r.termination == SUCCESS
    assert r.value >= 0.5
    assert r.queries < 60 * 21


def test_lean_accounting_uses_fewer_queries(search):
    c = PartitionConstraint.from_sizes([3, 3, 3, 3])
    f = modular([0.05 * (i % 5) for i in range(12)])
    full = search(CountedOracle(f, c), cfg=PopulationConfig(seed=0, max_iterations=5))
    lean = search(CountedOracle(f, c), cfg=PopulationConfig(seed=0, max_iterations=5,
                                                            requery=False))
    assert lean.queries < full.queries
