import math

import mpmath
import numpy as np
import pytest

from pmsearch import analysis
from pmsearch.analysis import (
    ContractError,
    EnumerationTooLarge,
    TabulatedFunction,
    bound_comparison_grid,
    brute_force_opt,
    check_monotone,
    check_submodular,
    corollary_check,
    default_alpha_grid,
    grid_csv,
    prior_bound,
    smi,
    theorem1_check,
)
from pmsearch.core import CountedOracle, PartitionConstraint
from pmsearch.instances import random_instance
from pmsearch.local_search import local_search

from conftest import modular
from oracles import frozen
from oracles.reference import recursive_opt, smi_by_definition, submodular_by_definition


def counterexample():
    return TabulatedFunction(frozen.COUNTEREXAMPLE_VALUES, 2)


def coverage(n=6, universe=10, seed=0):
    rng = np.random.default_rng(seed)
    covers = rng.random((n, universe)) < 0.3
    return lambda s: float(np.any(covers[sorted(s)], axis=0).sum()) if s else 0.0


class TestBruteForce:
    def test_modular(self, modular_constraint):
        s, v = brute_force_opt(modular(frozen.MODULAR_WEIGHTS), modular_constraint)
        assert s == frozen.MODULAR_OPT and v == pytest.approx(frozen.MODULAR_OPT_VALUE)

    def test_zero_function_picks_the_empty_set(self, modular_constraint):
        assert brute_force_opt(lambda s: 0.0, modular_constraint) == (frozenset(), 0.0)

    def test_cardinality_tie_break(self):
        c = PartitionConstraint(((0, 1, 2),), (2,))
        assert brute_force_opt(lambda s: float(len(s)), c) == (frozenset({0, 1}), 2.0)

    def test_cap(self):
        c = PartitionConstraint.from_sizes([3] * 12)
        with pytest.raises(EnumerationTooLarge) as info:
            brute_force_opt(lambda s: 0.0, c)
        assert info.value.required == 4**12

    def test_does_not_spend_queries(self, modular_oracle):
        brute_force_opt(modular_oracle, modular_oracle.constraint)
        assert modular_oracle.query_count == 0

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_recursive_enumerator(self, seed):
        inst = random_instance(seed, n_max=8)
        c = inst.constraint
        assert brute_force_opt(inst.objective, c) == recursive_opt(
            inst.objective, c.blocks, c.capacities, c.ground_size)


class TestSubmodularity:
    def test_counterexample_witness(self, backend):
        w = check_submodular(counterexample(), 2)
        assert w.x == frozenset() and w.y == frozenset({1}) and w.element == 0
        assert w.gain_small == pytest.approx(frozen.COUNTEREXAMPLE_GAIN_SMALL, abs=1e-9)
        assert w.gain_large == pytest.approx(frozen.COUNTEREXAMPLE_GAIN_LARGE, abs=1e-9)

    def test_modular_has_none(self, backend):
        assert check_submodular(modular([0.4, -0.1, 0.3, 0.9]), 4) is None

    def test_coverage_has_none(self, backend):
        f = coverage()
        assert check_submodular(f, 6) is None
        assert submodular_by_definition(f, 6)

    def test_cap(self):
        with pytest.raises(EnumerationTooLarge):
            check_submodular(lambda s: 0.0, 20)

    @pytest.mark.parametrize("seed", range(15))
    def test_agrees_with_definition(self, seed, backend):
        inst = random_instance(seed, n_max=6)
        n = inst.constraint.ground_size
        assert (check_submodular(inst.objective, n) is None) == submodular_by_definition(
            inst.objective, n)


class TestMonotone:
    def test_nonnegative_modular(self, backend):
        assert check_monotone(modular([0.1, 0.2, 0.0]), 3) is None

    def test_negative_cardinality(self, backend):
        assert check_monotone(lambda s: -float(len(s)), 3) == (frozenset(), frozenset({0}))

    def test_coverage(self, backend):
        assert check_monotone(coverage(), 6) is None


class TestSmI:
    def test_modular_is_zero(self, backend):
        r = smi(modular([0.3, 0.5, 0.2, 0.7]), {0, 1}, 3, 4)
        assert r.value == pytest.approx(0.0, abs=1e-15)

    def test_k_one_is_zero(self, backend):
        assert smi(counterexample(), {0, 1}, 1, 2).value == 0.0

    def test_counterexample_value_and_witness(self, backend):
        r = smi(counterexample(), {0, 1}, 2, 2)
        assert r.value == pytest.approx(frozen.COUNTEREXAMPLE_SMI, abs=1e-12)
        assert r.witness_s == frozenset({0, 1}) and r.witness_a == frozenset()
        assert analysis.phi(counterexample(), r.witness_s, r.witness_a) == pytest.approx(r.value)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_definition(self, seed, backend):
        inst = random_instance(seed, n_max=6)
        n = inst.constraint.ground_size
        l = frozenset(range(0, n, 2))
        for k in (0, 2, 3):
            r = smi(inst.objective, l, k, n)
            assert r.value == pytest.approx(smi_by_definition(inst.objective, l, k, n), abs=1e-12)
            assert r.witness_a <= l and not r.witness_s & r.witness_a and len(r.witness_s) <= k

    def test_sampled_mode_is_not_certified(self):
        r = smi(lambda s: float(len(s)) ** 0.5, set(range(8)), 2, 16, cap=10,
                samples=50, rng=0)
        assert not r.certified and r.value >= 0

    def test_cap_without_samples(self):
        with pytest.raises(EnumerationTooLarge):
            smi(lambda s: 0.0, set(), 2, 16)


class TestLocalOptimumBound:
    def test_modular_optimum(self, modular_constraint):
        f = modular(frozen.MODULAR_WEIGHTS)
        r = theorem1_check(f, {1, 2}, {1, 2}, modular_constraint)
        assert r.lhs == pytest.approx(1.7)
        assert r.rhs == pytest.approx(0.7)
        assert r.xi == r.delta == 1 * 2
        assert r.holds

    def test_coefficients(self):
        # |S\C| = 2, |C\S| = 3, |S∩C| = 1, outside = 2, |S| = 3
        s, c = frozenset({0, 1, 2}), frozenset({2, 3, 4, 5})
        xi, delta = analysis.bound_coefficients(s, c, 8)
        assert xi == 1 + 3 + 2 * 3 + 3 * 1
        assert delta == xi - 3 + 3

    @pytest.mark.parametrize("seed", range(25))
    def test_holds_on_local_optima(self, seed, backend):
        inst = random_instance(seed, n_max=8)
        c, f = inst.constraint, inst.objective
        r = local_search(CountedOracle(f, c))
        opt, _ = brute_force_opt(f, c)
        rep = theorem1_check(f, r.solution, opt, c)
        assert rep.holds
        assert rep.lower_bound <= r.value + 1e-12


class TestSubmodularGuarantees:
    def test_modular_local_optimum(self):
        c = PartitionConstraint(((0, 1, 2, 3), (4,)), (1, 1))
        f = modular([0.1, 0.4, 0.2, 0.3, 0.5])
        s = local_search(CountedOracle(f, c)).solution
        r = corollary_check(f, s, c)
        assert r.cor1_holds and r.cor2_applicable and r.cor2_holds

    def test_not_applicable_with_small_blocks(self, modular_constraint):
        r = corollary_check(modular(frozen.MODULAR_WEIGHTS), {1, 2}, modular_constraint)
        assert not r.cor2_applicable and r.cor2_holds is None

    def test_zero_function(self, modular_constraint):
        r = corollary_check(lambda s: 0.0, set(), modular_constraint)
        assert r.cor1_holds and r.f_s == r.f_c == 0.0

    def test_rejects_non_submodular(self):
        c = PartitionConstraint.from_sizes([1, 1])
        with pytest.raises(ContractError):
            corollary_check(counterexample(), {0, 1}, c)


class TestPriorBound:
    @pytest.mark.parametrize("key", sorted(frozen.PRIOR_BOUND))
    def test_frozen_values(self, key):
        alpha, d = key
        assert prior_bound(alpha, d, 1) == pytest.approx(frozen.PRIOR_BOUND[key], rel=1e-14)

    def test_matches_high_precision(self):
        mpmath.mp.dps = 40
        exact = 1 - mpmath.e ** (-mpmath.mpf(1) / 3)
        assert abs(prior_bound(1.0, 3, 1) - float(exact)) < 1e-15
        assert prior_bound(1.0, 3, 1) < 1 / 3

    def test_zero_alpha_limit(self):
        assert prior_bound(0.0, 4, 1) == 0.25
        assert prior_bound(1e-12, 4, 1) == pytest.approx(0.25)

    def test_full_rank_is_classical_constant(self):
        assert prior_bound(1.0, 5, 5) == pytest.approx(1 - math.exp(-1))

    @pytest.mark.parametrize("args", [(-1, 3, 1), (1, 3, 4), (1, 3, 0)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            prior_bound(*args)


class TestGrid:
    def test_sign_pattern(self):
        rows = bound_comparison_grid(default_alpha_grid(), range(1, 21))
        assert len(rows) == 50 * 20
        for alpha, d, third, half in rows:
            if d >= 3:
                assert third < -1e-12
            if d >= 2:
                assert half < -1e-12

    def test_d1_small_alpha_is_positive(self):
        (_, _, third, half), = bound_comparison_grid([1e-9], [1])
        assert half > 0 and third > 0

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            bound_comparison_grid([], [1])

    def test_csv_columns(self):
        text = grid_csv(bound_comparison_grid([0.1], [3]))
        assert text.splitlines()[0] == "alpha,d,prior_minus_third,prior_minus_half"
