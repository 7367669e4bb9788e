"""Local search over insertion / deletion / exchange neighbourhoods.

The search starts from the empty set and repeatedly applies the single best
one-element move while it improves the objective by more than ``epsilon``.
When it stops, the complement of the current set is tried as well if it is
feasible. :func:`greedy` is the insertion-only special case.

Ties are resolved deterministically: an earlier neighbourhood (insertion,
then deletion, then exchange) beats a later one, and inside a neighbourhood
the candidate with the lowest element ids wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    EMPTY,
    BudgetExhausted,
    CountedOracle,
    PartitionConstraint,
)

INSERT, DELETE, EXCHANGE, COMPLEMENT = "insert", "delete", "exchange", "complement-swap"

LOCAL_OPTIMUM = "local-optimum"
SUCCESS = "success"
BUDGET = "budget"
NO_MOVES = "no-moves"


@dataclass(frozen=True)
class SearchConfig:
    """Knobs shared by the local search family.

    ``tie_tolerance`` treats gains within that absolute distance as equal, so
    the earlier candidate in the deterministic scan order is kept.
    """

    epsilon: float = 0.0
    budget: Optional[int] = None
    stop_on_success: bool = False
    tie_tolerance: float = 0.0
    same_block_first: bool = False

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.tie_tolerance < 0:
            raise ValueError("tie_tolerance must be non-negative")
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be a positive integer")


@dataclass(frozen=True)
class Step:
    kind: str
    removed: tuple
    added: tuple
    value: float


@dataclass
class SearchResult:
    solution: frozenset
    value: float
    queries: int
    termination: str
    steps: list = field(default_factory=list)
    # set reached before the complement comparison; None if the run stopped early
    local_optimum: Optional[frozenset] = None

    @property
    def swapped_to_complement(self) -> bool:
        return bool(self.steps) and self.steps[-1].kind == COMPLEMENT


class _Found(Exception):
    def __init__(self, subset: frozenset, value: float):
        super().__init__()
        self.subset = subset
        self.value = value


def _probe(o: CountedOracle, s: frozenset, stop_on_success: bool) -> float:
    v = o.evaluate(s)
    if stop_on_success and o.is_success(s, v):
        raise _Found(s, v)
    return v


def _base(o, s, base):
    return o.evaluate(s) if base is None else base


def best_insertion(
    o: CountedOracle,
    s: frozenset,
    c: Optional[PartitionConstraint] = None,
    *,
    base: Optional[float] = None,
    stop_on_success: bool = False,
    tie_tolerance: float = 0.0,
):
    """Best feasible single insertion as ``(element, gain)``, or None."""
    r = _scan_insertion(o, frozenset(s), c or o.constraint, base, stop_on_success, tie_tolerance)
    return None if r is None else (r[0], r[1])


def _scan_insertion(o, s, c, base, stop_on_success, tie_tolerance):
    fs = _base(o, s, base)
    counts = c.block_counts(s)
    best = None
    for e in range(c.ground_size):
        if e in s:
            continue
        b = c.block_of[e]
        if counts[b] >= c.capacities[b]:
            continue
        v = _probe(o, s | {e}, stop_on_success)
        if best is None or v - fs > best[1] + tie_tolerance:
            best = (e, v - fs, v)
    return best


def best_deletion(
    o: CountedOracle,
    s: frozenset,
    c: Optional[PartitionConstraint] = None,
    *,
    base: Optional[float] = None,
    stop_on_success: bool = False,
    tie_tolerance: float = 0.0,
):
    """Best single deletion as ``(element, gain)``, or None when ``s`` is empty."""
    r = _scan_deletion(o, frozenset(s), base, stop_on_success, tie_tolerance)
    return None if r is None else (r[0], r[1])


def _scan_deletion(o, s, base, stop_on_success, tie_tolerance):
    if not s:
        return None
    fs = _base(o, s, base)
    best = None
    for e in sorted(s):
        v = _probe(o, s - {e}, stop_on_success)
        if best is None or v - fs > best[1] + tie_tolerance:
            best = (e, v - fs, v)
    return best


def _exchange_pairs(s, c, same_block_first):
    counts = c.block_counts(s)
    block_of, caps = c.block_of, c.capacities
    outside = [v for v in range(c.ground_size) if v not in s]
    pairs = []
    for e in sorted(s):
        be = block_of[e]
        for v in outside:
            bv = block_of[v]
            if bv == be or counts[bv] < caps[bv]:
                pairs.append((e, v))
    if same_block_first:
        pairs.sort(key=lambda p: block_of[p[0]] != block_of[p[1]])
    return pairs


def best_exchange(
    o: CountedOracle,
    s: frozenset,
    c: Optional[PartitionConstraint] = None,
    *,
    base: Optional[float] = None,
    stop_on_success: bool = False,
    tie_tolerance: float = 0.0,
    same_block_first: bool = False,
):
    """Best feasible swap as ``(out_element, in_element, gain)``, or None.

    The incoming element may come from a different block than the outgoing
    one as long as the result stays feasible.
    """
    r = _scan_exchange(
        o, frozenset(s), c or o.constraint, base, stop_on_success, tie_tolerance, same_block_first
    )
    return None if r is None else (r[0], r[1], r[2])


def _scan_exchange(o, s, c, base, stop_on_success, tie_tolerance, same_block_first):
    if not s:
        return None
    pairs = _exchange_pairs(s, c, same_block_first)
    if not pairs:
        return None
    fs = _base(o, s, base)
    best = None
    for e, v in pairs:
        val = _probe(o, (s - {e}) | {v}, stop_on_success)
        if best is None or val - fs > best[2] + tie_tolerance:
            best = (e, v, val - fs, val)
    return best


def _apply_budget(o: CountedOracle, cfg: SearchConfig) -> None:
    if cfg.budget is not None:
        limit = o.query_count + cfg.budget
        o.budget = limit if o.budget is None else min(o.budget, limit)


def _run(o, c, cfg, moves, complement_fallback):
    c = c or o.constraint
    cfg = cfg or SearchConfig()
    _apply_budget(o, cfg)
    start = o.query_count
    steps: list = []
    stop = cfg.stop_on_success
    tol = cfg.tie_tolerance
    s = EMPTY
    try:
        fs = _probe(o, s, stop)
        while True:
            cands = []
            if INSERT in moves:
                r = _scan_insertion(o, s, c, fs, stop, tol)
                if r is not None:
                    cands.append((r[1], r[2], INSERT, (), (r[0],)))
            if DELETE in moves:
                r = _scan_deletion(o, s, fs, stop, tol)
                if r is not None:
                    cands.append((r[1], r[2], DELETE, (r[0],), ()))
            if EXCHANGE in moves:
                r = _scan_exchange(o, s, c, fs, stop, tol, cfg.same_block_first)
                if r is not None:
                    cands.append((r[2], r[3], EXCHANGE, (r[0],), (r[1],)))
            if not cands:
                termination = NO_MOVES
                break
            best = cands[0]
            for cand in cands[1:]:
                if cand[0] > best[0] + tol:
                    best = cand
            gain, new_value, kind, removed, added = best
            if not gain > cfg.epsilon:
                termination = LOCAL_OPTIMUM
                break
            s = s.difference(removed).union(added)
            fs = new_value
            steps.append(Step(kind, removed, added, fs))
        local_opt = s
        if complement_fallback:
            comp = c.complement(s)
            if c.is_feasible(comp):
                fc = _probe(o, comp, stop)
                if fc > fs:
                    steps.append(Step(COMPLEMENT, tuple(sorted(s)), tuple(sorted(comp)), fc))
                    s, fs = comp, fc
    except _Found as hit:
        return SearchResult(hit.subset, hit.value, o.query_count - start, SUCCESS, steps)
    except BudgetExhausted as exc:
        best = exc.best if exc.best is not None else s
        value = exc.best_value if exc.best is not None else 0.0
        return SearchResult(best, value, o.query_count - start, BUDGET, steps)
    return SearchResult(s, fs, o.query_count - start, termination, steps, local_opt)


def local_search(
    o: CountedOracle,
    c: Optional[PartitionConstraint] = None,
    cfg: Optional[SearchConfig] = None,
) -> SearchResult:
    """Maximise ``o`` under the partition constraint by one-element moves."""
    return _run(o, c, cfg, (INSERT, DELETE, EXCHANGE), complement_fallback=True)


def greedy(
    o: CountedOracle,
    c: Optional[PartitionConstraint] = None,
    cfg: Optional[SearchConfig] = None,
) -> SearchResult:
    """Classical greedy: keep inserting the best element while it helps."""
    return _run(o, c, cfg, (INSERT,), complement_fallback=False)


def is_local_optimum(f, s, c: Optional[PartitionConstraint] = None, tol: float = 0.0) -> bool:
    """True iff no single insertion, deletion or exchange beats ``f(s)``.

    All neighbours are considered, feasible or not; infeasible ones are worth
    0. ``f`` is a :class:`CountedOracle` (queries are counted) or a plain
    callable together with ``c``.
    """
    if isinstance(f, CountedOracle):
        c = c or f.constraint
        value = f.evaluate
    else:
        if c is None:
            raise ValueError("a plain callable needs the constraint")

        def value(x):
            return f(x) if c.is_feasible(x) else 0.0

    s = frozenset(s)
    fs = value(s)
    outside = [v for v in range(c.ground_size) if v not in s]
    for v in outside:
        if value(s | {v}) > fs + tol:
            return False
    for e in sorted(s):
        if value(s - {e}) > fs + tol:
            return False
    for e in sorted(s):
        rest = s - {e}
        for v in outside:
            if value(rest | {v}) > fs + tol:
                return False
    return True
