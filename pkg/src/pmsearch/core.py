"""Ground sets, partition matroid constraints and the query-counted oracle.

Subsets are plain ``frozenset`` objects of dense integer element ids. Every
search algorithm talks to the objective through a :class:`CountedOracle`,
which is the single place where model queries are counted.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

Subset = frozenset
Evaluator = Callable[[frozenset], float]
SuccessPredicate = Callable[[frozenset, float], bool]

EMPTY: frozenset = frozenset()


class ConstraintError(ValueError):
    """Malformed partition constraint or element id outside the ground set."""


class NumericError(ArithmeticError):
    """The evaluator produced NaN or an infinite value."""


class NegativeValueWarning(UserWarning):
    """The evaluator returned a negative value; the approximation bounds assume f >= 0."""


class BudgetExhausted(RuntimeError):
    """Raised when a query would exceed the oracle budget.

    Carries the best feasible subset evaluated so far so callers can still
    report a partial result.
    """

    def __init__(self, budget: int, best: Optional[frozenset], best_value: float):
        super().__init__(f"query budget of {budget} exhausted")
        self.budget = budget
        self.best = best
        self.best_value = best_value


@dataclass(frozen=True)
class PartitionConstraint:
    """Disjoint blocks B_i over ids ``0..ground_size-1`` with capacities d_i."""

    blocks: tuple
    capacities: tuple
    block_of: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        caps = tuple(int(d) for d in self.capacities)
        if len(blocks) != len(caps):
            raise ConstraintError("need exactly one capacity per block")
        n = sum(len(b) for b in blocks)
        block_of = [-1] * n
        for i, (b, d) in enumerate(zip(blocks, caps)):
            if not 1 <= d <= len(b):
                raise ConstraintError(f"block {i}: capacity {d} not in [1, {len(b)}]")
            for e in b:
                if not 0 <= e < n or block_of[e] != -1:
                    raise ConstraintError(
                        f"blocks must partition 0..{n - 1}; bad or repeated id {e}"
                    )
                block_of[e] = i
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "block_of", tuple(block_of))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int], capacities: Optional[Sequence[int]] = None):
        """Consecutive blocks of the given sizes; capacities default to 1."""
        blocks, start = [], 0
        for s in sizes:
            blocks.append(range(start, start + s))
            start += s
        if capacities is None:
            capacities = [1] * len(sizes)
        return cls(tuple(blocks), tuple(capacities))

    @property
    def ground_size(self) -> int:
        return len(self.block_of)

    @property
    def ground(self) -> frozenset:
        return frozenset(range(self.ground_size))

    @property
    def total_capacity(self) -> int:
        """d = sum of the block capacities."""
        return sum(self.capacities)

    @property
    def max_capacity(self) -> int:
        """d-bar = largest block capacity."""
        return max(self.capacities)

    @property
    def unit_capacity(self) -> bool:
        return all(d == 1 for d in self.capacities)

    def check_ids(self, s: Iterable[int]) -> None:
        n = self.ground_size
        for e in s:
            if not 0 <= e < n:
                raise ConstraintError(f"element id {e} outside ground set of size {n}")

    def block_counts(self, s: Iterable[int]) -> list:
        counts = [0] * len(self.blocks)
        block_of = self.block_of
        for e in s:
            counts[block_of[e]] += 1
        return counts

    def is_feasible(self, s: Iterable[int]) -> bool:
        s = tuple(s)
        self.check_ids(s)
        return all(c <= d for c, d in zip(self.block_counts(s), self.capacities))

    def complement(self, s: Iterable[int]) -> frozenset:
        return self.ground.difference(s)

    def feasible_count(self) -> int:
        """Number of feasible subsets, i.e. the exhaustive-search query count."""
        total = 1
        for b, d in zip(self.blocks, self.capacities):
            total *= sum(math.comb(len(b), j) for j in range(d + 1))
        return total


def is_feasible(s: Iterable[int], c: PartitionConstraint) -> bool:
    return c.is_feasible(s)


def complement(s: Iterable[int], c: PartitionConstraint) -> frozenset:
    return c.complement(s)


def format_subset(s: Iterable[int]) -> str:
    """Ascending comma-separated ids; the empty set is the empty string."""
    return ",".join(str(e) for e in sorted(s))


def parse_subset(text: str) -> frozenset:
    text = text.strip()
    if not text:
        return EMPTY
    return frozenset(int(tok) for tok in text.split(","))


def subset_key(s: Iterable[int]) -> tuple:
    """Sort key giving the lexicographic order on ascending id lists."""
    return tuple(sorted(s))


class CountedOracle:
    """Black-box objective with a thread-safe query counter.

    Infeasible subsets evaluate to 0 without touching the evaluator and
    without consuming a query. A feasible evaluation reserves its query slot
    under a lock before calling the evaluator, so concurrent workers can
    never push ``query_count`` past ``budget``.

    With ``cache=True`` repeated evaluations of the same subset are answered
    from memory and counted once.
    """

    def __init__(
        self,
        evaluator: Evaluator,
        constraint: PartitionConstraint,
        budget: Optional[int] = None,
        success: Optional[SuccessPredicate] = None,
        cache: bool = False,
    ):
        if budget is not None and budget < 1:
            raise ValueError("budget must be a positive integer")
        self.evaluator = evaluator
        self.constraint = constraint
        self.budget = budget
        self.success_predicate = success
        self.cache: Optional[dict] = {} if cache else None
        self.query_count = 0
        self.best: Optional[frozenset] = None
        self.best_value = -math.inf
        self._lock = threading.Lock()
        self._warned_negative = False

    def __call__(self, s: Iterable[int]) -> float:
        return self.evaluate(s)

    def evaluate(self, s: Iterable[int]) -> float:
        s = frozenset(s)
        if not self.constraint.is_feasible(s):
            return 0.0
        if self.cache is not None and s in self.cache:
            return self.cache[s]
        with self._lock:
            if self.budget is not None and self.query_count >= self.budget:
                raise BudgetExhausted(self.budget, self.best, self.best_value)
            self.query_count += 1
        value = self._check(self.evaluator(s))
        with self._lock:
            if self.cache is not None:
                self.cache[s] = value
            if value > self.best_value or (
                value == self.best_value and subset_key(s) < subset_key(self.best)
            ):
                self.best, self.best_value = s, value
        return value

    def peek(self, s: Iterable[int]) -> float:
        """Evaluate under the infeasible-is-zero convention without counting.

        Used by the offline analysis routines, which are not model queries.
        """
        s = frozenset(s)
        if not self.constraint.is_feasible(s):
            return 0.0
        return self._check(self.evaluator(s))

    def is_success(self, s: frozenset, value: float) -> bool:
        return self.success_predicate is not None and bool(self.success_predicate(s, value))

    def _check(self, value) -> float:
        value = float(value)
        if not math.isfinite(value):
            raise NumericError(f"evaluator returned non-finite value {value!r}")
        if value < 0 and not self._warned_negative:
            self._warned_negative = True
            warnings.warn(
                f"evaluator returned negative value {value}", NegativeValueWarning, stacklevel=3
            )
        return value


def uncounted(f) -> Evaluator:
    """Return an evaluator for offline analysis.

    A :class:`CountedOracle` is unwrapped to its non-counting ``peek``; any
    other callable is returned unchanged.
    """
    if isinstance(f, CountedOracle):
        return f.peek
    return f
