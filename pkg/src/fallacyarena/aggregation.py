"""Gold-label estimation from noisy judgments.

Generative model (per item i, rater j):

    T_i  ~ Uniform over the 6 labels
    A_ij = T_i                with probability theta_j   ("copy")
         ~ Categorical(xi_j)  otherwise                   ("spam")

independently across judgments. EM fits {theta_j, xi_j}: the E-step computes
the posterior over each T_i,

    p(T_i = t | A) ∝ prod_{j in J_i} [ theta_j * 1{A_ij = t}
                                       + (1 - theta_j) * xi_j(A_ij) ]

plus per-judgment expected copy/spam indicators; the M-step re-estimates
theta_j and xi_j from the expected counts with additive smoothing delta.

Additive smoothing is exactly the MAP M-step under the prior

    theta_j ~ Beta(1 + delta, 1 + delta),  xi_j ~ Dirichlet(1 + delta)

so the quantity EM provably increases each iteration is the *penalized*
objective  log p(A | params) + log prior(params),  not the raw data
likelihood (which can dip when the prior pulls parameters back toward the
mode). The run therefore tracks the penalized objective for its iteration
history, convergence test, and restart selection; the raw log marginal
likelihood at the final parameters is reported alongside it.

Restarts are initialized with theta_j ~ Uniform[0.5, 1) and xi_j from a flat
Dirichlet, each restart seeded deterministically from (rng_seed, restart
index), so results are bit-reproducible for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .domain import (
    LABELS,
    N_LABELS,
    FallacyLabel,
    argmax_label,
    posterior_entropy,
)
from .errors import err

__all__ = [
    "AggregationConfig",
    "EmConfig",
    "JudgmentMatrix",
    "RaterEstimate",
    "ItemEstimate",
    "MaceResult",
    "GoldBatch",
    "CrowdSpec",
    "run_em",
    "estimate_gold",
    "majority_vote",
    "simulate_crowd",
    "posterior_entropy",
    "brute_force_posteriors",
    "e_step_posteriors",
]


@dataclass(frozen=True)
class EmConfig:
    restarts: int = 10
    max_iterations: int = 50
    smoothing_delta: float = 0.1
    convergence_epsilon: float = 1e-6
    rng_seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise err("invalid_spec", "restarts and max_iterations must be positive")
        if self.smoothing_delta <= 0 or self.convergence_epsilon <= 0:
            raise err("invalid_spec", "smoothing_delta and convergence_epsilon must be positive")

    def to_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "max_iterations": self.max_iterations,
            "smoothing_delta": self.smoothing_delta,
            "convergence_epsilon": self.convergence_epsilon,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EmConfig":
        return cls(**d)


@dataclass(frozen=True)
class AggregationConfig:
    min_votes: int = 5
    entropy_threshold_nats: float = 0.7
    em: EmConfig = field(default_factory=EmConfig)

    def __post_init__(self):
        if self.min_votes < 1:
            raise err("invalid_spec", "min_votes must be >= 1")
        if self.entropy_threshold_nats < 0:
            raise err("invalid_spec", "entropy_threshold_nats must be >= 0")

    def to_dict(self) -> dict:
        return {
            "min_votes": self.min_votes,
            "entropy_threshold_nats": self.entropy_threshold_nats,
            "em": self.em.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AggregationConfig":
        return cls(
            min_votes=d["min_votes"],
            entropy_threshold_nats=d["entropy_threshold_nats"],
            em=EmConfig.from_dict(d["em"]),
        )


@dataclass(frozen=True)
class JudgmentMatrix:
    """Sparse (item, rater) -> label-index matrix for one language pool."""

    items: tuple[str, ...]
    raters: tuple[str, ...]
    entries: tuple[tuple[int, int, int], ...]  # (item_index, rater_index, label_index)
    language: str = "en"

    def __post_init__(self):
        seen = set()
        voted = set()
        for i, j, l in self.entries:
            if (i, j) in seen:
                raise err("invalid_spec", f"duplicate entry for item {i}, rater {j}")
            seen.add((i, j))
            voted.add(i)
            if not (0 <= l < N_LABELS):
                raise err("invalid_spec", f"label index {l} out of range")
        if len(self.items) and voted != set(range(len(self.items))):
            raise err("invalid_spec", "every item needs at least one entry")

    @classmethod
    def from_votes(
        cls,
        votes: dict[str, dict[str, FallacyLabel]],
        language: str = "en",
        item_order: Optional[Sequence[str]] = None,
    ) -> "JudgmentMatrix":
        """Build from {item_id: {rater_id: label}}; orders are deterministic."""
        items = tuple(item_order) if item_order is not None else tuple(sorted(votes))
        raters = tuple(sorted({r for per_item in votes.values() for r in per_item}))
        rater_index = {r: k for k, r in enumerate(raters)}
        entries = []
        for i, item in enumerate(items):
            for rater, label in sorted(votes[item].items()):
                entries.append((i, rater_index[rater], label.index))
        return cls(items=items, raters=raters, entries=tuple(entries), language=language)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_raters(self) -> int:
        return len(self.raters)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        item_idx = np.fromiter((e[0] for e in self.entries), dtype=np.int64)
        rater_idx = np.fromiter((e[1] for e in self.entries), dtype=np.int64)
        labels = np.fromiter((e[2] for e in self.entries), dtype=np.int64)
        return item_idx, rater_idx, labels


@dataclass(frozen=True)
class RaterEstimate:
    rater_id: str
    competence: float  # theta_j
    spam_distribution: tuple[float, ...]  # xi_j

    def to_dict(self) -> dict:
        return {
            "rater_id": self.rater_id,
            "competence": self.competence,
            "spam_distribution": list(self.spam_distribution),
        }


@dataclass(frozen=True)
class ItemEstimate:
    item_id: str
    posterior: tuple[float, ...]
    entropy_nats: float

    @property
    def label(self) -> FallacyLabel:
        return argmax_label(self.posterior)

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "posterior": list(self.posterior),
            "entropy_nats": self.entropy_nats,
            "label": self.label.value,
        }


@dataclass(frozen=True)
class MaceResult:
    items: tuple[ItemEstimate, ...]
    raters: tuple[RaterEstimate, ...]
    log_marginal_likelihood: float
    objective_history: tuple[float, ...]  # penalized objective of the kept restart
    best_restart: int
    config: EmConfig
    language: str = "en"

    def posterior_of(self, item_id: str) -> ItemEstimate:
        for item in self.items:
            if item.item_id == item_id:
                return item
        raise KeyError(item_id)

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "items": [i.to_dict() for i in self.items],
            "raters": [r.to_dict() for r in self.raters],
            "log_marginal_likelihood": self.log_marginal_likelihood,
            "objective_history": list(self.objective_history),
            "best_restart": self.best_restart,
            "config": self.config.to_dict(),
        }


def _log_parts(theta, xi, rater_idx, labels):
    """Per-judgment log spam mass and log total mass at the voted label."""
    spam = (1.0 - theta[rater_idx]) * xi[rater_idx, labels]
    copy = theta[rater_idx]
    with np.errstate(divide="ignore"):
        return np.log(spam), np.log(spam + copy), spam, copy


def _posteriors(theta, xi, item_idx, rater_idx, labels, n_items):
    """E-step: item posteriors, per-judgment copy responsibilities, raw loglik.

    log p(T_i=t | A) decomposes as a per-item base (all judgments spamming)
    plus, for each judgment, a bump at its voted label; this keeps the whole
    step O(entries + items * labels) and numerically safe in log space.
    """
    log_spam, log_total, spam, copy = _log_parts(theta, xi, rater_idx, labels)
    base = np.zeros(n_items)
    np.add.at(base, item_idx, log_spam)
    scores = np.full((n_items, N_LABELS), -np.log(N_LABELS))
    scores += base[:, None]
    np.add.at(scores, (item_idx, labels), log_total - log_spam)
    peak = scores.max(axis=1, keepdims=True)
    weights = np.exp(scores - peak)
    norm = weights.sum(axis=1, keepdims=True)
    posteriors = weights / norm
    loglik = float(np.sum(peak.ravel() + np.log(norm.ravel())))
    copy_resp = posteriors[item_idx, labels] * (copy / (copy + spam))
    return posteriors, copy_resp, loglik


def _m_step(rater_idx, labels, copy_resp, n_raters, delta):
    copies = np.zeros(n_raters)
    np.add.at(copies, rater_idx, copy_resp)
    counts = np.bincount(rater_idx, minlength=n_raters).astype(float)
    theta = (copies + delta) / (counts + 2.0 * delta)
    spam_mass = np.zeros((n_raters, N_LABELS))
    np.add.at(spam_mass, (rater_idx, labels), 1.0 - copy_resp)
    xi = (spam_mass + delta) / (spam_mass.sum(axis=1, keepdims=True) + N_LABELS * delta)
    return theta, xi


def _log_prior(theta, xi, delta):
    return float(
        delta * (np.sum(np.log(theta)) + np.sum(np.log1p(-theta)) + np.sum(np.log(xi)))
    )


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(restart,)))


def e_step_posteriors(
    matrix: JudgmentMatrix, theta: Sequence[float], xi: Sequence[Sequence[float]]
) -> np.ndarray:
    """Item posteriors for frozen parameters (no fitting). Used by oracles."""
    item_idx, rater_idx, labels = matrix.arrays()
    posteriors, _, _ = _posteriors(
        np.asarray(theta, dtype=float),
        np.asarray(xi, dtype=float),
        item_idx,
        rater_idx,
        labels,
        matrix.n_items,
    )
    return posteriors


def brute_force_posteriors(
    matrix: JudgmentMatrix, theta: Sequence[float], xi: Sequence[Sequence[float]]
) -> np.ndarray:
    """Independent oracle: enumerate all 6^items truth assignments.

    Computes the exact joint weight of every assignment under the generative
    model and marginalizes per item. Exponential in the item count; only for
    tiny instances.
    """
    theta = np.asarray(theta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    n = matrix.n_items
    per_item = np.zeros((n, N_LABELS))
    assignment = [0] * n

    def weight(assign) -> float:
        w = (1.0 / N_LABELS) ** n
        for i, j, l in matrix.entries:
            t = assign[i]
            w *= theta[j] * (1.0 if l == t else 0.0) + (1.0 - theta[j]) * xi[j, l]
        return w

    def recurse(pos: int):
        if pos == n:
            w = weight(assignment)
            for i in range(n):
                per_item[i, assignment[i]] += w
            return
        for t in range(N_LABELS):
            assignment[pos] = t
            recurse(pos + 1)

    recurse(0)
    return per_item / per_item.sum(axis=1, keepdims=True)


def run_em(matrix: JudgmentMatrix, config: EmConfig) -> MaceResult:
    """Fit the model by EM with restarts; deterministic given config.rng_seed."""
    if matrix.n_items == 0 or not matrix.entries:
        raise err("empty_matrix", "judgment matrix has no entries")
    item_idx, rater_idx, labels = matrix.arrays()
    n_items, n_raters = matrix.n_items, matrix.n_raters
    delta = config.smoothing_delta

    best = None  # (objective, restart, posteriors, theta, xi, history, raw loglik)
    for restart in range(config.restarts):
        rng = _restart_rng(config.rng_seed, restart)
        theta = rng.uniform(0.5, 1.0, size=n_raters)
        xi = rng.dirichlet(np.ones(N_LABELS), size=n_raters)
        history: list[float] = []
        posteriors = None
        loglik = -np.inf
        for _ in range(config.max_iterations):
            posteriors, copy_resp, loglik = _posteriors(
                theta, xi, item_idx, rater_idx, labels, n_items
            )
            objective = loglik + _log_prior(theta, xi, delta)
            history.append(objective)
            if len(history) > 1 and history[-1] - history[-2] < config.convergence_epsilon:
                break
            theta, xi = _m_step(rater_idx, labels, copy_resp, n_raters, delta)
        else:
            # budget exhausted right after an M-step: realign the reported
            # posteriors with the final parameters
            posteriors, _, loglik = _posteriors(theta, xi, item_idx, rater_idx, labels, n_items)
            history.append(loglik + _log_prior(theta, xi, delta))
        if best is None or history[-1] > best[0]:
            best = (history[-1], restart, posteriors, theta, xi, history, loglik)

    _, restart, posteriors, theta, xi, history, loglik = best
    items = tuple(
        ItemEstimate(
            item_id=matrix.items[i],
            posterior=tuple(float(x) for x in posteriors[i]),
            entropy_nats=posterior_entropy(posteriors[i]),
        )
        for i in range(n_items)
    )
    raters = tuple(
        RaterEstimate(
            rater_id=matrix.raters[j],
            competence=float(theta[j]),
            spam_distribution=tuple(float(x) for x in xi[j]),
        )
        for j in range(n_raters)
    )
    return MaceResult(
        items=items,
        raters=raters,
        log_marginal_likelihood=loglik,
        objective_history=tuple(history),
        best_restart=restart,
        config=config,
        language=matrix.language,
    )


def majority_vote(matrix: JudgmentMatrix) -> list[FallacyLabel]:
    """Baseline: per-item most frequent label, ties by enum order."""
    if matrix.n_items == 0 or not matrix.entries:
        raise err("empty_matrix", "judgment matrix has no entries")
    counts = np.zeros((matrix.n_items, N_LABELS), dtype=np.int64)
    for i, _, l in matrix.entries:
        counts[i, l] += 1
    return [LABELS[int(k)] for k in counts.argmax(axis=1)]


@dataclass(frozen=True)
class GoldBatch:
    """Immutable result of one aggregation run over a pool snapshot."""

    batch_id: str
    considered: tuple[str, ...]  # argument ids fed into the model
    gold: dict  # argument id -> GoldAssignment
    results: tuple[MaceResult, ...]  # one per language pool
    config: AggregationConfig

    def to_dict(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "considered": list(self.considered),
            "gold": {k: v.to_dict() for k, v in self.gold.items()},
            "results": [r.to_dict() for r in self.results],
            "config": self.config.to_dict(),
        }


def estimate_gold(
    arguments: Sequence,
    judgments: Sequence,
    config: AggregationConfig,
    batch_id: str,
    bot_rater_ids: frozenset[str] = frozenset(),
) -> GoldBatch:
    """Aggregate a pool snapshot into gold assignments.

    Only active arguments are considered; bot judgments never enter the
    matrices. An argument qualifies once it has at least min_votes eligible
    judgments (the authored vote counts like any other). One matrix per
    language; gold goes to exactly the items whose posterior entropy is at or
    below the threshold. An empty batch is a valid outcome.
    """
    from .domain import GoldAssignment  # local to avoid a hard cycle in type use

    active = {a.id: a for a in arguments if a.status == "active"}
    votes: dict[str, dict[str, FallacyLabel]] = {}
    for judgment in judgments:
        if judgment.rater_id in bot_rater_ids:
            continue
        if judgment.item_id not in active:
            continue
        votes.setdefault(judgment.item_id, {})[judgment.rater_id] = judgment.label

    by_language: dict[str, dict[str, dict[str, FallacyLabel]]] = {}
    for item_id, per_item in votes.items():
        if len(per_item) < config.min_votes:
            continue
        language = active[item_id].language
        by_language.setdefault(language, {})[item_id] = per_item

    considered: list[str] = []
    gold: dict[str, GoldAssignment] = {}
    results: list[MaceResult] = []
    for language in sorted(by_language):
        matrix = JudgmentMatrix.from_votes(by_language[language], language=language)
        result = run_em(matrix, config.em)
        results.append(result)
        for item in result.items:
            considered.append(item.item_id)
            if item.entropy_nats <= config.entropy_threshold_nats:
                gold[item.item_id] = GoldAssignment(
                    label=item.label,
                    posterior=item.posterior,
                    entropy_nats=item.entropy_nats,
                    batch_id=batch_id,
                )
    return GoldBatch(
        batch_id=batch_id,
        considered=tuple(considered),
        gold=gold,
        results=tuple(results),
        config=config,
    )


@dataclass(frozen=True)
class CrowdSpec:
    """Synthetic-crowd description for the simulation harness."""

    n_items: int
    raters: tuple[tuple[float, tuple[float, ...]], ...]  # (theta_j, xi_j)
    votes_per_item: int
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_items < 1:
            raise err("invalid_spec", "n_items must be positive")
        if not self.raters:
            raise err("invalid_spec", "need at least one rater")
        if not (1 <= self.votes_per_item <= len(self.raters)):
            raise err("invalid_spec", "votes_per_item must be in [1, number of raters]")
        for theta, xi in self.raters:
            if not (0.0 <= theta <= 1.0):
                raise err("invalid_spec", f"competence {theta} outside [0, 1]")
            if len(xi) != N_LABELS or abs(sum(xi) - 1.0) > 1e-9 or any(x < 0 for x in xi):
                raise err("invalid_spec", "spam distribution must be a 6-way distribution")


def simulate_crowd(spec: CrowdSpec, language: str = "en") -> tuple[JudgmentMatrix, list[FallacyLabel]]:
    """Sample (matrix, true labels) from the generative model; seeded."""
    rng = np.random.default_rng(spec.rng_seed)
    n_raters = len(spec.raters)
    truth = rng.integers(0, N_LABELS, size=spec.n_items)
    entries = []
    for i in range(spec.n_items):
        chosen = rng.choice(n_raters, size=spec.votes_per_item, replace=False)
        for j in sorted(int(c) for c in chosen):
            theta, xi = spec.raters[j]
            if rng.random() < theta:
                label = int(truth[i])
            else:
                label = int(rng.choice(N_LABELS, p=np.asarray(xi)))
            entries.append((i, j, label))
    matrix = JudgmentMatrix(
        items=tuple(f"item-{i}" for i in range(spec.n_items)),
        raters=tuple(f"rater-{j}" for j in range(n_raters)),
        entries=tuple(entries),
        language=language,
    )
    return matrix, [LABELS[int(t)] for t in truth]
