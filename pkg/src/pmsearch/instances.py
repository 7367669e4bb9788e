"""Seeded random partition-matroid instances with enumerable objectives.

Used by the verification suites and the tests. Objectives are returned
already tabulated, with values in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import TabulatedFunction
from .core import PartitionConstraint

FAMILIES = ("modular", "interaction", "coverage", "cut", "table")
SUBMODULAR_FAMILIES = ("modular", "coverage", "cut")


@dataclass(frozen=True)
class RandomInstance:
    constraint: PartitionConstraint
    objective: TabulatedFunction
    family: str
    seed: int


def random_constraint(rng, n: int, max_block: int = 4, unit: bool = False) -> PartitionConstraint:
    sizes, left = [], n
    while left > 0:
        s = int(rng.integers(1, min(left, max_block) + 1))
        sizes.append(s)
        left -= s
    caps = [1 if unit or rng.random() < 0.6 else int(rng.integers(1, s + 1)) for s in sizes]
    perm = rng.permutation(n)
    blocks, start = [], 0
    for s in sizes:
        blocks.append(tuple(int(e) for e in perm[start:start + s]))
        start += s
    return PartitionConstraint(tuple(blocks), tuple(caps))


def _bits(n: int) -> np.ndarray:
    m = np.arange(1 << n)[:, None]
    return ((m >> np.arange(n)) & 1).astype(np.float64)


def _normalise(v: np.ndarray) -> np.ndarray:
    v = v - min(0.0, v.min())
    top = v.max()
    return v / top if top > 0 else v


def random_objective(rng, n: int, family: str) -> np.ndarray:
    x = _bits(n)
    if family == "modular":
        w = rng.random(n)
        return x @ (w / w.sum())
    if family == "interaction":
        w = rng.normal(0.0, 1.0, n)
        j = np.triu(rng.normal(0.0, 1.5, (n, n)) * (rng.random((n, n)) < 0.4), 1)
        logit = rng.normal(-1.0, 0.5) + x @ w + np.einsum("mi,ij,mj->m", x, j, x)
        return 1.0 / (1.0 + np.exp(-logit))
    if family == "coverage":
        universe = int(rng.integers(n, 3 * n + 1))
        covers = rng.random((n, universe)) < 2.5 / universe
        weights = rng.random(universe)
        return _normalise(((x @ covers) > 0) @ weights)
    if family == "cut":
        w = np.triu(rng.random((n, n)) * (rng.random((n, n)) < 0.5), 1)
        w = w + w.T
        return _normalise(np.einsum("mi,ij,mj->m", x, w, 1.0 - x))
    if family == "table":
        return rng.random(1 << n)
    raise ValueError(f"unknown objective family {family!r}")


def random_instance(seed: int, n_min: int = 2, n_max: int = 10, families=FAMILIES,
                    unit: bool = False) -> RandomInstance:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    family = families[int(rng.integers(len(families)))]
    c = random_constraint(rng, n, unit=unit)
    return RandomInstance(c, TabulatedFunction(random_objective(rng, n, family), n), family, seed)
