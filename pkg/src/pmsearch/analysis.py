"""Offline analysis: exact enumeration, submodularity diagnostics and bounds.

Everything here evaluates the objective directly and never consumes oracle
queries. Exponential routines work on a :class:`TabulatedFunction`, a dense
table of values indexed by subset bitmask, and refuse ground sets above a
configurable cap.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .core import EMPTY, PartitionConstraint, subset_key, uncounted

DEFAULT_ENUM_CAP = 2**20
DEFAULT_TABLE_CAP = 14
DEFAULT_TOL = 1e-12


class EnumerationTooLarge(ValueError):
    def __init__(self, required: int, cap: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {required} evaluations, cap is {cap}")
        self.required = required
        self.cap = cap


class ContractError(ValueError):
    """A documented precondition of an analysis routine does not hold."""


def to_mask(s: Iterable[int]) -> int:
    m = 0
    for e in s:
        m |= 1 << e
    return m


def from_mask(m: int) -> frozenset:
    return frozenset(i for i in range(m.bit_length()) if (m >> i) & 1)


class TabulatedFunction:
    """A set function over ``{0..n-1}`` stored as ``values[mask]``."""

    def __init__(self, values, n: int):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} values for n={n}, got {values.shape}")
        self.values = values
        self.n = n

    @classmethod
    def from_function(
        cls,
        f: Callable,
        n: int,
        constraint: Optional[PartitionConstraint] = None,
        cap: int = DEFAULT_TABLE_CAP,
    ) -> "TabulatedFunction":
        """Tabulate ``f``; with ``constraint`` infeasible subsets are set to 0."""
        if isinstance(f, TabulatedFunction):
            if constraint is None:
                return f
            f = f.__call__
        if n > cap:
            raise EnumerationTooLarge(1 << n, 1 << cap, "tabulation")
        f = uncounted(f)
        vals = np.empty(1 << n)
        for m in range(1 << n):
            s = from_mask(m)
            if constraint is not None and not constraint.is_feasible(s):
                vals[m] = 0.0
            else:
                vals[m] = float(f(s))
        return cls(vals, n)

    def __call__(self, s: Iterable[int]) -> float:
        return float(self.values[to_mask(s)])

    def extended(self, constraint: PartitionConstraint) -> "TabulatedFunction":
        """Copy with every infeasible subset set to 0."""
        vals = self.values.copy()
        for m in range(1 << self.n):
            if not constraint.is_feasible(from_mask(m)):
                vals[m] = 0.0
        return TabulatedFunction(vals, self.n)


def as_table(f, n: int, constraint=None, cap: int = DEFAULT_TABLE_CAP) -> TabulatedFunction:
    if isinstance(f, TabulatedFunction) and constraint is not None:
        return f.extended(constraint)
    return TabulatedFunction.from_function(f, n, constraint, cap)


def feasible_subsets(c: PartitionConstraint):
    """Every feasible subset, built block by block (at most d_i per block)."""
    per_block = [
        [combo for j in range(d + 1) for combo in itertools.combinations(block, j)]
        for block, d in zip(c.blocks, c.capacities)
    ]
    for choice in itertools.product(*per_block):
        yield frozenset(itertools.chain.from_iterable(choice))


def brute_force_opt(f, c: PartitionConstraint, cap: int = DEFAULT_ENUM_CAP):
    """Exact maximiser over all feasible subsets.

    Ties go to the lexicographically smallest ascending id list, so the empty
    set wins whenever it is optimal.
    """
    required = c.feasible_count()
    if required > cap:
        raise EnumerationTooLarge(required, cap)
    f = uncounted(f)
    best, best_val, best_key = None, -math.inf, None
    for s in feasible_subsets(c):
        v = float(f(s))
        key = subset_key(s)
        if v > best_val or (v == best_val and key < best_key):
            best, best_val, best_key = s, v, key
    return best, best_val


@dataclass(frozen=True)
class SubmodularityCounterexample:
    x: frozenset
    y: frozenset
    element: int
    gain_small: float  # f(X + e) - f(X)
    gain_large: float  # f(Y + e) - f(Y), exceeds gain_small


def check_submodular(f, n: int, constraint=None, tol: float = DEFAULT_TOL,
                     cap: int = DEFAULT_TABLE_CAP) -> Optional[SubmodularityCounterexample]:
    """Search for X ⊆ Y and e ∉ Y violating diminishing returns.

    Returns None when ``f`` is submodular up to ``tol``. Without
    ``constraint`` the raw function on all subsets is checked; with it, the
    infeasible-is-zero extension is.
    """
    if n > cap:
        raise EnumerationTooLarge(1 << n, 1 << cap, "submodularity check")
    t = as_table(f, n, constraint, cap)
    hit = kernels.submodular_violation(t.values, n, tol)
    if hit is None:
        return None
    x, y, e = hit
    vals = t.values
    bx, by, be = int(x), 1 << int(y), 1 << int(e)
    return SubmodularityCounterexample(
        from_mask(bx),
        from_mask(bx | by),
        int(e),
        float(vals[bx | be] - vals[bx]),
        float(vals[bx | by | be] - vals[bx | by]),
    )


def check_monotone(f, n: int, constraint=None, tol: float = DEFAULT_TOL,
                   cap: int = DEFAULT_TABLE_CAP):
    """Return ``(X, X + e)`` with f(X + e) < f(X), or None if monotone."""
    if n > cap:
        raise EnumerationTooLarge(1 << n, 1 << cap, "monotonicity check")
    t = as_table(f, n, constraint, cap)
    hit = kernels.monotone_violation(t.values, n, tol)
    if hit is None:
        return None
    x, e = int(hit[0]), int(hit[1])
    return from_mask(x), from_mask(x | (1 << e))


@dataclass(frozen=True)
class SmIReport:
    l: frozenset
    k: int
    value: float
    witness_s: frozenset
    witness_a: frozenset
    certified: bool = True


def phi(f, s: Iterable[int], a: Iterable[int]) -> float:
    """Sum of single-element gains of S at A minus the joint gain of S at A."""
    s, a = frozenset(s), frozenset(a)
    fa = f(a)
    return sum(f(a | {x}) - fa for x in sorted(s)) - (f(a | s) - fa)


def smi(f, l: Iterable[int], k: int, n: int, constraint=None,
        cap: int = DEFAULT_TABLE_CAP, samples: int = 0, rng=None) -> SmIReport:
    """Submodularity index: minimum of ``phi(S, A)`` over A ⊆ L, |S| <= k.

    k = 0 (and k = 1) gives 0, since only |S| <= 1 is allowed and phi
    vanishes there. Above ``cap`` a sampled estimate can be requested with
    ``samples``; it only sees part of the domain, so it can miss the true
    minimum and is marked ``certified=False``.
    """
    l = frozenset(l)
    if k < 0:
        raise ValueError("k must be non-negative")
    if n > cap:
        if samples <= 0:
            raise EnumerationTooLarge(1 << n, 1 << cap, "submodularity index")
        return _sampled_smi(uncounted(f), l, k, n, constraint, samples, rng)
    t = as_table(f, n, constraint, cap)
    value, s_mask, a_mask = kernels.smi(t.values, n, to_mask(l), k)
    return SmIReport(l, k, float(value), from_mask(int(s_mask)), from_mask(int(a_mask)))


def _sampled_smi(f, l, k, n, constraint, samples, rng):
    rng = np.random.default_rng(rng)
    if constraint is not None:
        raw = f

        def f(s):
            return raw(s) if constraint.is_feasible(s) else 0.0

    lsorted = sorted(l)
    best, best_s, best_a = 0.0, EMPTY, EMPTY
    for _ in range(samples):
        a = frozenset(e for e in lsorted if rng.random() < 0.5)
        outside = [e for e in range(n) if e not in a]
        size = int(rng.integers(2, k + 1)) if k >= 2 and len(outside) >= 2 else 0
        size = min(size, len(outside))
        if size < 2:
            continue
        s = frozenset(int(e) for e in rng.choice(outside, size, replace=False))
        v = phi(f, s, a)
        if v < best:
            best, best_s, best_a = v, s, a
    return SmIReport(l, k, best, best_s, best_a, certified=False)


def pair2(m: int) -> int:
    return m * (m - 1) // 2


@dataclass(frozen=True)
class BoundReport:
    """Terms of the local-optimum bound 2 f(S) + f(V \\ S) >= f(C) + max{...}."""

    s_minus_c: int
    c_minus_s: int
    s_and_c: int
    outside_both: int
    size_s: int
    xi: int
    delta: int
    smi_v2: float
    smi_s: float
    f_s: float
    f_complement: float
    f_c: float
    lhs: float
    rhs: float
    holds: bool

    @property
    def lower_bound(self) -> float:
        """Guaranteed value of f(S) implied by the bound."""
        return (self.rhs - self.f_complement) / 2


def bound_coefficients(s: frozenset, c_opt: frozenset, n: int):
    """(xi, delta) for local optimum S and optimum C over a ground set of size n."""
    s_minus_c = len(s - c_opt)
    c_minus_s = len(c_opt - s)
    s_and_c = len(s & c_opt)
    outside = n - len(s | c_opt)
    xi = pair2(s_minus_c) + pair2(c_minus_s) + outside * len(s) + c_minus_s * s_and_c
    delta = xi - pair2(c_minus_s) + c_minus_s
    return xi, delta


def theorem1_check(f, s: Iterable[int], c_opt: Iterable[int], constraint: PartitionConstraint,
                   tol: float = DEFAULT_TOL, cap: int = DEFAULT_TABLE_CAP) -> BoundReport:
    """Evaluate both sides of the local-optimum approximation bound.

    ``f`` is taken with the infeasible-is-zero convention throughout, which
    is also the function LS optima are local optima of. ``s`` should be a
    local optimum and ``c_opt`` an optimal feasible set.
    """
    n = constraint.ground_size
    s, c_opt = frozenset(s), frozenset(c_opt)
    t = as_table(f, n, constraint, cap)
    xi, delta = bound_coefficients(s, c_opt, n)
    lam_v = smi(t, range(n), 2, n).value
    # only the pair (S = {}, A) is allowed when C ⊆ S, so the index is 0
    lam_s = smi(t, s, len(c_opt - s), n).value
    f_s = t(s)
    f_comp = t(constraint.complement(s))
    f_c = t(c_opt)
    lhs = 2 * f_s + f_comp
    rhs = f_c + max(xi * lam_v, delta * lam_v + lam_s)
    return BoundReport(
        s_minus_c=len(s - c_opt),
        c_minus_s=len(c_opt - s),
        s_and_c=len(s & c_opt),
        outside_both=n - len(s | c_opt),
        size_s=len(s),
        xi=xi,
        delta=delta,
        smi_v2=lam_v,
        smi_s=lam_s,
        f_s=f_s,
        f_complement=f_comp,
        f_c=f_c,
        lhs=lhs,
        rhs=rhs,
        holds=lhs >= rhs - tol,
    )


@dataclass(frozen=True)
class CorollaryReport:
    f_s: float
    f_complement: float
    f_c: float
    cor1_holds: bool
    cor2_applicable: bool
    cor2_holds: Optional[bool]


def corollary_check(f, s: Iterable[int], constraint: PartitionConstraint, c_opt=None,
                    tol: float = DEFAULT_TOL, cap: int = DEFAULT_TABLE_CAP) -> CorollaryReport:
    """Check the 1/3 and 1/2 guarantees that hold when f is submodular.

    Submodularity is verified on the raw function over all subsets; a
    counterexample raises :class:`ContractError`. f(V \\ S) counts as 0
    when the complement is infeasible.
    """
    n = constraint.ground_size
    raw = as_table(f, n, None, cap)
    bad = check_submodular(raw, n, tol=tol, cap=cap)
    if bad is not None:
        raise ContractError(
            f"objective is not submodular: X={sorted(bad.x)}, Y={sorted(bad.y)}, e={bad.element}"
        )
    s = frozenset(s)
    if c_opt is None:
        c_opt, _ = brute_force_opt(raw, constraint)
    comp = constraint.complement(s)
    f_s = raw(s)
    f_comp = raw(comp) if constraint.is_feasible(comp) else 0.0
    f_c = raw(c_opt)
    cor1 = f_s >= f_c / 3 - tol or f_comp >= f_c / 3 - tol
    applicable = any(len(b) > 2 for b in constraint.blocks)
    cor2 = (f_s >= f_c / 2 - tol) if applicable else None
    return CorollaryReport(f_s, f_comp, f_c, cor1, applicable, cor2)


def prior_bound(alpha: float, d: int, dbar: int) -> float:
    """Earlier greedy guarantee (1/alpha)(1 - exp(-alpha * dbar / d)).

    ``alpha = 0`` returns the limit dbar / d.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if not 1 <= dbar <= d:
        raise ValueError("need 1 <= dbar <= d")
    if alpha == 0:
        return dbar / d
    return -math.expm1(-alpha * dbar / d) / alpha


GRID_COLUMNS = ("alpha", "d", "prior_minus_third", "prior_minus_half")


def default_alpha_grid() -> list:
    return [round(0.1 * i, 10) for i in range(1, 51)]


def bound_comparison_grid(alphas: Sequence[float], ds: Sequence[int]) -> list:
    """Rows (alpha, d, prior - 1/3, prior - 1/2) with unit capacities (dbar = 1)."""
    if not alphas or not ds:
        raise ValueError("grids must be non-empty")
    rows = []
    for d in ds:
        for a in alphas:
            p = prior_bound(a, d, 1)
            rows.append((a, d, p - 1 / 3, p - 1 / 2))
    return rows


def grid_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GRID_COLUMNS)
    for a, d, third, half in rows:
        w.writerow([f"{a:g}", d, repr(third), repr(half)])
    return buf.getvalue()
