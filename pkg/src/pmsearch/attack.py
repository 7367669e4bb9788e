"""Word-substitution attacks expressed as partition-matroid problems.

Each position ``i`` with a non-empty substitute list becomes one block of
ground-set ids, one id per ``(i, word)`` pair, with capacity 1. Keying ids by
position keeps blocks disjoint even when two positions offer the same word.

Victims are binary logistic models over ``(position, word)`` features with
optional pairwise interactions. Interactions are what make the induced set
objective non-submodular.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .analysis import ContractError
from .baselines import PopulationConfig, ga_search, pso_search
from .core import CountedOracle, PartitionConstraint
from .local_search import SearchConfig, greedy, local_search

ALGORITHMS = ("ls", "greedy", "ga", "pso")
DEFAULT_CAP = 0.25
MIN_TOKENS, MAX_TOKENS = 10, 100


class DegenerateInstance(ValueError):
    """No position has a substitute, so the search space is just the input."""


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class AttackInstance:
    tokens: tuple
    substitutes: tuple
    true_label: int
    target_label: Optional[int] = None
    max_modification_rate: float = DEFAULT_CAP
    min_length: int = MIN_TOKENS
    max_length: int = MAX_TOKENS

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "substitutes", tuple(tuple(s) for s in self.substitutes))
        if len(self.substitutes) != len(self.tokens):
            raise ValueError(
                f"{len(self.tokens)} tokens but {len(self.substitutes)} substitute lists"
            )
        for i, (tok, subs) in enumerate(zip(self.tokens, self.substitutes)):
            if tok in subs:
                raise ValueError(f"position {i}: substitutes repeat the original word {tok!r}")
            if len(set(subs)) != len(subs):
                raise ValueError(f"position {i}: duplicate substitutes")
        if self.true_label not in (0, 1):
            raise ValueError("true_label must be 0 or 1")
        if self.target_label is not None and self.target_label not in (0, 1):
            raise ValueError("target_label must be 0 or 1")
        if not 0 < self.max_modification_rate <= 1:
            raise ValueError("max_modification_rate must lie in (0, 1]")

    @property
    def length(self) -> int:
        return len(self.tokens)

    def within_length_bounds(self) -> bool:
        return self.min_length <= self.length <= self.max_length


@dataclass(frozen=True)
class GroundSet:
    """Bijection between dense ids and ``(position, word)`` pairs."""

    constraint: PartitionConstraint
    items: tuple  # id -> (position, word)

    def id_of(self, position: int, word: str) -> int:
        return self.items.index((position, word))

    def encode(self, tokens: Sequence[str], original: Sequence[str]) -> frozenset:
        """Ids of every position where ``tokens`` differs from ``original``."""
        lookup = {item: i for i, item in enumerate(self.items)}
        out = set()
        for pos, (new, old) in enumerate(zip(tokens, original)):
            if new != old:
                if (pos, new) not in lookup:
                    raise ValueError(f"position {pos}: {new!r} is not a listed substitute")
                out.add(lookup[(pos, new)])
        return frozenset(out)


def build_ground_set(inst: AttackInstance):
    """Return ``(constraint, ground)``; ids run by position, then list order."""
    items, blocks = [], []
    for pos, subs in enumerate(inst.substitutes):
        if subs:
            blocks.append(tuple(range(len(items), len(items) + len(subs))))
            items.extend((pos, w) for w in subs)
    if not blocks:
        raise DegenerateInstance("no position has a substitute")
    c = PartitionConstraint(tuple(blocks), (1,) * len(blocks))
    return c, GroundSet(c, tuple(items))


def decode(s, inst: AttackInstance, ground: GroundSet) -> tuple:
    tokens = list(inst.tokens)
    for i in s:
        pos, word = ground.items[i]
        tokens[pos] = word
    return tuple(tokens)


def modification_rate(tokens: Sequence[str], original: Sequence[str]) -> float:
    if not original:
        return 0.0
    return sum(a != b for a, b in zip(tokens, original)) / len(original)


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class SurrogateVictim:
    """Binary logistic classifier over ``(position, word)`` features.

    ``P(label 1 | x) = sigmoid(logit(x) / temperature)`` where the logit sums
    the bias, the weight of every present ``(position, word)`` and the value
    of every interaction whose two features are both present.
    """

    weights: Mapping = field(default_factory=dict)
    interactions: Mapping = field(default_factory=dict)
    bias: float = 0.0
    temperature: float = 1.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        for (a, b) in self.interactions:
            if a[0] == b[0]:
                raise ValueError("an interaction must join two different positions")

    def logit(self, tokens: Sequence[str]) -> float:
        z = self.bias
        for pos, w in enumerate(tokens):
            z += self.weights.get((pos, w), 0.0)
        for (a, b), v in self.interactions.items():
            if a[0] < len(tokens) and b[0] < len(tokens) and tokens[a[0]] == a[1] and tokens[b[0]] == b[1]:
                z += v
        return z

    def prob(self, tokens: Sequence[str], label: int = 1) -> float:
        p1 = _sigmoid(self.logit(tokens) / self.temperature)
        return p1 if label == 1 else 1.0 - p1

    def predict(self, tokens: Sequence[str]) -> int:
        return int(self.logit(tokens) > 0)

    def set_logit(self, inst: AttackInstance, ground: GroundSet) -> Callable[[frozenset], float]:
        """Logit as a function of the id set, touching only changed positions.

        Equal to ``logit(decode(s))``; an interaction contributes only when
        its activation differs from the original input's, so a query costs
        ``O(|s| * interactions per position)`` instead of ``O(n)``.
        """
        tokens = inst.tokens
        base = self.logit(tokens)
        delta = [
            self.weights.get((p, w), 0.0) - self.weights.get((p, tokens[p]), 0.0)
            for p, w in ground.items
        ]
        touching: dict = {}
        for (a, b), v in self.interactions.items():
            touching.setdefault(a[0], []).append((a, b, v))
            touching.setdefault(b[0], []).append((a, b, v))
        items = ground.items

        def present(feat, changed):
            pos, word = feat
            return changed.get(pos, tokens[pos] if pos < len(tokens) else None) == word

        def logit(s: frozenset) -> float:
            z = base
            changed = {}
            for i in s:
                z += delta[i]
                changed[items[i][0]] = items[i][1]
            if touching:
                seen = set()
                for pos in changed:
                    for a, b, v in touching.get(pos, ()):
                        if (a, b) in seen:
                            continue
                        seen.add((a, b))
                        now = present(a, changed) and present(b, changed)
                        before = present(a, {}) and present(b, {})
                        z += v * (now - before)
            return z

        return logit


def _label_oracle(victim, inst, label, cap):
    c, ground = build_ground_set(inst)
    logit = victim.set_logit(inst, ground)
    n = inst.length
    sign = 1.0 if label == 1 else -1.0

    def f(s):
        return _sigmoid(sign * logit(s) / victim.temperature)

    def success(s, value):
        return value > 0.5 and len(s) / n <= cap

    return CountedOracle(f, c, success=success), ground


def untargeted_objective(victim: SurrogateVictim, inst: AttackInstance,
                         cap: Optional[float] = None) -> CountedOracle:
    """``f(S) = 1 - P(true label | x_S)``; success once the true label loses the majority."""
    cap = inst.max_modification_rate if cap is None else cap
    return _label_oracle(victim, inst, 1 - inst.true_label, cap)[0]


def targeted_objective(victim: SurrogateVictim, inst: AttackInstance,
                       cap: Optional[float] = None) -> CountedOracle:
    """``f(S) = P(target label | x_S)``; success once the target holds the majority."""
    if inst.target_label is None:
        raise ValueError("instance has no target_label")
    if inst.target_label == inst.true_label:
        raise ValueError("target_label must differ from true_label")
    cap = inst.max_modification_rate if cap is None else cap
    return _label_oracle(victim, inst, inst.target_label, cap)[0]


def score_objective(scorer: Callable[[tuple], float], inst: AttackInstance,
                    cap: Optional[float] = None) -> CountedOracle:
    """``f(S) = 1 - score(x_S)`` for a task score in [0, 1]; success when the score hits 0."""
    c, ground = build_ground_set(inst)
    cap = inst.max_modification_rate if cap is None else cap
    n = inst.length

    def f(s):
        v = float(scorer(decode(s, inst, ground)))
        if not 0.0 <= v <= 1.0:
            raise ContractError(f"scorer returned {v}, outside [0, 1]")
        return 1.0 - v

    def success(s, value):
        return value >= 1.0 and len(s) / n <= cap

    return CountedOracle(f, c, success=success)


@dataclass(frozen=True)
class AttackOutcome:
    algorithm: str
    success: bool
    adversarial_tokens: tuple
    modification_rate: float
    queries: int
    value: float
    termination: str


def _objective(victim, inst, cap, mode):
    if mode == "targeted":
        return targeted_objective(victim, inst, cap)
    if mode == "untargeted":
        return untargeted_objective(victim, inst, cap)
    raise ValueError(f"unknown objective mode {mode!r}")


def run_attack(alg: str, inst: AttackInstance, victim: SurrogateVictim, *,
               seed: int = 0, epsilon: float = 0.0, budget: Optional[int] = None,
               cap: Optional[float] = None, population_size: int = 60,
               max_iterations: int = 20, mode: Optional[str] = None) -> AttackOutcome:
    """Attack ``inst`` with one algorithm, stopping at the first success.

    Success needs the label condition and a modification rate within the
    cap, both checked on the returned solution.
    """
    if alg not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)}")
    cap = inst.max_modification_rate if cap is None else cap
    mode = mode or ("targeted" if inst.target_label is not None else "untargeted")
    o = _objective(victim, inst, cap, mode)
    c = o.constraint
    _, ground = build_ground_set(inst)
    if alg in ("ls", "greedy"):
        cfg = SearchConfig(epsilon=epsilon, budget=budget, stop_on_success=True)
        r = (local_search if alg == "ls" else greedy)(o, c, cfg)
    else:
        pcfg = PopulationConfig(population_size=population_size, max_iterations=max_iterations,
                                seed=seed, stop_on_success=True, budget=budget)
        r = (pso_search if alg == "pso" else ga_search)(o, c, pcfg, rate_denominator=inst.length)
    adv = decode(r.solution, inst, ground)
    rate = modification_rate(adv, inst.tokens)
    ok = r.value > 0.5 and rate <= cap
    if mode == "untargeted":
        ok = ok and victim.predict(adv) != inst.true_label
    return AttackOutcome(alg, bool(ok), adv, rate, r.queries, r.value, r.termination)


# ---------------------------------------------------------------- generation


@dataclass(frozen=True)
class GeneratorConfig:
    """Shape of a synthetic corpus.

    A few salient positions (``salient_min..salient_max`` of them) carry a
    strong weight toward the true label, about ``salient_weight``; every
    other word is near neutral with scale ``neutral_scale``. Salient
    positions always get substitutes, other positions with probability
    ``substitutable``; a list has ``1..max_substitutes`` words. A substitute
    keeps a random fraction in ``[-0.25, 1]`` of the original word's weight
    plus neutral noise, like a synonym that softens the sentiment. Each
    substitute joins a pairwise interaction with probability
    ``interaction_density``.
    """

    n_instances: int = 100
    min_tokens: int = MIN_TOKENS
    max_tokens: int = MAX_TOKENS
    substitutable: float = 0.4
    max_substitutes: int = 5
    salient_min: int = 1
    salient_max: int = 4
    salient_weight: float = 2.0
    neutral_scale: float = 0.3
    interaction_density: float = 0.3
    interaction_scale: float = 0.5
    temperature: float = 1.0
    min_confidence: float = 0.6
    targeted: bool = False
    max_retries: int = 50

    def __post_init__(self):
        if self.n_instances < 0:
            raise ValueError("n_instances must be non-negative")
        if not 1 <= self.min_tokens <= self.max_tokens:
            raise ValueError("need 1 <= min_tokens <= max_tokens")
        if not 0 <= self.substitutable <= 1 or not 0 <= self.interaction_density <= 1:
            raise ValueError("probabilities must lie in [0, 1]")
        if not 0 <= self.salient_min <= self.salient_max:
            raise ValueError("need 0 <= salient_min <= salient_max")
        if self.max_substitutes < 1 or self.max_retries < 1:
            raise ValueError("max_substitutes and max_retries must be positive")
        if not 0.5 <= self.min_confidence < 1:
            raise ValueError("min_confidence must lie in [0.5, 1)")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _sample(rng: np.random.Generator, cfg: GeneratorConfig, index: int):
    n = int(rng.integers(cfg.min_tokens, cfg.max_tokens + 1))
    label = int(rng.integers(2))
    sign = 1.0 if label == 1 else -1.0
    tokens = tuple(f"w{index}_{p}" for p in range(n))
    n_salient = min(n, int(rng.integers(cfg.salient_min, cfg.salient_max + 1)))
    salient = set(rng.choice(n, size=n_salient, replace=False).tolist())
    subs, weights = [], {}
    for p, tok in enumerate(tokens):
        noise = cfg.neutral_scale
        w0 = float(rng.normal(sign * cfg.salient_weight, noise)) if p in salient else float(rng.normal(0.0, noise))
        weights[(p, tok)] = w0
        if p in salient or rng.random() < cfg.substitutable:
            k = int(rng.integers(1, cfg.max_substitutes + 1))
            words = tuple(f"{tok}s{j}" for j in range(k))
            for w in words:
                weights[(p, w)] = float(rng.uniform(-0.25, 1.0) * w0 + rng.normal(0.0, noise))
        else:
            words = ()
        subs.append(words)
    feats = [(p, w) for p, words in enumerate(subs) for w in words]
    interactions = {}
    if len({p for p, _ in feats}) > 1:
        for a in feats:
            if rng.random() < cfg.interaction_density:
                b = feats[int(rng.integers(len(feats)))]
                if b[0] != a[0]:
                    key = (a, b) if a < b else (b, a)
                    interactions[key] = float(rng.normal(0.0, cfg.interaction_scale))
    bias = float(rng.normal(0.0, noise))
    target = 1 - label if cfg.targeted else None
    inst = AttackInstance(tokens, subs, label, target, min_length=cfg.min_tokens,
                          max_length=cfg.max_tokens)
    victim = SurrogateVictim(weights, interactions, bias, cfg.temperature)
    return inst, victim


def generate_instances(cfg: GeneratorConfig, seed: int) -> list:
    """Seeded corpus of ``(AttackInstance, SurrogateVictim)`` pairs.

    A draw is kept only if the victim classifies the original input
    correctly with probability at least ``min_confidence`` and some position
    has a substitute; otherwise it is redrawn, at most ``max_retries`` times.
    """
    out = []
    for index, child in enumerate(np.random.SeedSequence(seed).spawn(cfg.n_instances)):
        rng = np.random.default_rng(child)
        for _ in range(cfg.max_retries):
            inst, victim = _sample(rng, cfg, index)
            if any(inst.substitutes) and victim.prob(inst.tokens, inst.true_label) >= cfg.min_confidence:
                out.append((inst, victim))
                break
        else:
            raise GenerationError(
                f"instance {index}: calibration failed after {cfg.max_retries} draws"
            )
    return out


# ---------------------------------------------------------------- JSON


def _feat(f) -> list:
    return [int(f[0]), str(f[1])]


def instance_to_dict(inst: AttackInstance, victim: Optional[SurrogateVictim] = None,
                     seed: Optional[int] = None) -> dict:
    d = {
        "tokens": list(inst.tokens),
        "substitutes": [list(s) for s in inst.substitutes],
        "true_label": inst.true_label,
        "target_label": inst.target_label,
        "max_modification_rate": inst.max_modification_rate,
    }
    if victim is not None:
        d["victim"] = {
            "weights": [[p, w, v] for (p, w), v in sorted(victim.weights.items())],
            "interactions": [
                [_feat(a), _feat(b), v] for (a, b), v in sorted(victim.interactions.items())
            ],
            "bias": victim.bias,
            "temperature": victim.temperature,
        }
    if seed is not None:
        d["seed"] = seed
    return d


def _require(d, key, where, kind=None):
    if key not in d:
        raise ValueError(f"{where}: missing field {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise ValueError(f"{where}: field {key!r} must be {getattr(kind, '__name__', kind)}")
    return v


def instance_from_dict(d: dict, where: str = "instance"):
    """Parse one instance record; returns ``(AttackInstance, SurrogateVictim | None)``."""
    if not isinstance(d, dict):
        raise ValueError(f"{where}: expected an object")
    tokens = _require(d, "tokens", where, list)
    subs = _require(d, "substitutes", where, list)
    label = _require(d, "true_label", where, int)
    try:
        inst = AttackInstance(
            tokens, subs, label, d.get("target_label"),
            float(d.get("max_modification_rate", DEFAULT_CAP)),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{where}: {exc}") from None
    victim = None
    if "victim" in d:
        v = d["victim"]
        vw = f"{where}.victim"
        if not isinstance(v, dict):
            raise ValueError(f"{vw}: expected an object")
        try:
            weights = {(int(p), str(w)): float(x) for p, w, x in v.get("weights", [])}
            inter = {
                ((int(a[0]), str(a[1])), (int(b[0]), str(b[1]))): float(x)
                for a, b, x in v.get("interactions", [])
            }
            victim = SurrogateVictim(weights, inter, float(v.get("bias", 0.0)),
                                     float(v.get("temperature", 1.0)))
        except (TypeError, ValueError, IndexError) as exc:
            raise ValueError(f"{vw}: {exc}") from None
    return inst, victim


def dumps_corpus(pairs, seed: Optional[int] = None, config: Optional[dict] = None) -> str:
    doc = {
        "seed": seed,
        "config": config,
        "instances": [instance_to_dict(i, v) for i, v in pairs],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def loads_corpus(text: str) -> list:
    """Parse a corpus document or a single instance object."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(doc, dict) and "instances" in doc:
        items = doc["instances"]
        if not isinstance(items, list):
            raise ValueError("field 'instances' must be a list")
        return [instance_from_dict(x, f"instances[{k}]") for k, x in enumerate(items)]
    return [instance_from_dict(doc)]
