"""Black-box set maximisation under partition matroid constraints.

Local search with insertion, deletion and exchange moves, population
baselines (GA, PSO), exact analysis tools and a word-substitution attack
adapter with a command-line benchmark.
"""

from .analysis import (
    ContractError,
    EnumerationTooLarge,
    TabulatedFunction,
    brute_force_opt,
    check_monotone,
    check_submodular,
    corollary_check,
    prior_bound,
    smi,
    theorem1_check,
)
from .attack import (
    AttackInstance,
    GeneratorConfig,
    SurrogateVictim,
    build_ground_set,
    generate_instances,
    run_attack,
)
from .baselines import PopulationConfig, ga_search, pso_search
from .core import BudgetExhausted, CountedOracle, PartitionConstraint, complement, is_feasible
from .local_search import SearchConfig, SearchResult, greedy, is_local_optimum, local_search

__version__ = "0.1.0"

__all__ = [
    "AttackInstance", "BudgetExhausted", "ContractError", "CountedOracle",
    "EnumerationTooLarge", "GeneratorConfig", "PartitionConstraint", "PopulationConfig",
    "SearchConfig", "SearchResult", "SurrogateVictim", "TabulatedFunction",
    "brute_force_opt", "build_ground_set", "check_monotone", "check_submodular",
    "complement", "corollary_check", "ga_search", "generate_instances", "greedy",
    "is_feasible", "is_local_optimum", "local_search", "prior_bound", "pso_search",
    "run_attack", "smi", "theorem1_check",
]
