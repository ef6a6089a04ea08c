"""Next-element prediction, cross-entropy evaluation, generative sampling
and the top-path ROC experiment.

All predictors (the multi-order model and the baselines) expose the same
protocol: ``candidate_rows(prefix)`` yields ``(provenance, is_fallback,
row)`` tuples in back-off order, where each row maps next-node ids (or
``END`` for path termination) to probabilities summing to one.  A shared
:class:`FallbackPolicy` supplies the final smoothing tier so that loss
comparisons across methods are not confounded by different zero-probability
handling.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import partial
from typing import Iterator, Mapping, Protocol, Sequence

from .errors import MissingStateError, UnknownNodeError
from .model import END, START, MultiOrderModel
from .parallel import map_chunks
from .paths import Path, PathMultiset, Vocabulary

Target = int | str  # node id, or END for termination
PredictionRow = Mapping[Target, float]


@dataclass(frozen=True)
class FallbackPolicy:
    """Shared smoothing tier built from training node frequencies.

    The smoothed row assigns each node mass proportional to its training
    frequency and gives the terminal target mass m / (m + N), where m is the
    number of training paths and N the number of node visits; this is the
    empirical marginal of next-symbol emissions.
    """

    node_counts: dict[int, int]
    total_node_visits: int
    total_paths: int
    _smoothed: dict[Target, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        denom = self.total_node_visits + self.total_paths
        row: dict[Target, float] = {
            node: c / denom for node, c in sorted(self.node_counts.items())
        }
        row[END] = self.total_paths / denom
        object.__setattr__(self, "_smoothed", row)

    @classmethod
    def from_training(cls, s: PathMultiset) -> "FallbackPolicy":
        counts: dict[int, int] = {}
        visits = 0
        for p in s.paths:
            for node in p.nodes:
                counts[node] = counts.get(node, 0) + p.frequency
            visits += len(p.nodes) * p.frequency
        return cls(counts, visits, s.total_observations)

    @classmethod
    def from_model(cls, model: MultiOrderModel) -> "FallbackPolicy":
        """Recover the training policy from a fitted model's counts: every
        non-terminal transition target marks one visit of its last node."""
        counts: dict[int, int] = {}
        visits = 0
        for row in model.counts.rows.values():
            for dst, c in row.items():
                if dst == END:
                    continue
                node = dst[-1]
                counts[node] = counts.get(node, 0) + c
                visits += c
        return cls(counts, visits, model.total_observations)

    def smoothed_row(self) -> dict[Target, float]:
        return self._smoothed


class Predictor(Protocol):
    method: str
    vocabulary: Vocabulary

    def candidate_rows(
        self, prefix: tuple[int, ...]
    ) -> Iterator[tuple[str, bool, PredictionRow]]: ...


@dataclass(frozen=True)
class PredictionDistribution:
    """Probability over next targets (nodes and termination) for one query."""

    probabilities: dict[Target, float]
    provenance: str
    fallback: bool

    def probability(self, target: Target) -> float:
        return self.probabilities.get(target, 0.0)


class ModelPredictor:
    """Predictor view of a fitted multi-order model.

    A prefix of j nodes is looked up as the state formed by its last
    min(j, K) nodes; absent states back off one node at a time, then to the
    start row, before the shared policy tier applies.
    """

    method = "mogen"

    def __init__(self, model: MultiOrderModel):
        self.model = model
        self._row_cache: dict[object, dict[Target, float] | None] = {}

    @property
    def vocabulary(self) -> Vocabulary:
        return self.model.vocabulary

    def _node_row(self, state) -> dict[Target, float] | None:
        cached = self._row_cache.get(state, _MISSING)
        if cached is not _MISSING:
            return cached
        raw = self.model.rows.get(state)
        if raw is None:
            row = None
        else:
            row = {
                (END if dst == END else dst[-1]): p for dst, p in raw.items()
            }
        self._row_cache[state] = row
        return row

    def candidate_rows(self, prefix: tuple[int, ...]):
        if not prefix:
            row = self._node_row(START)
            if row is not None:
                yield "start", False, row
            return
        depth = min(len(prefix), self.model.max_order)
        for length in range(depth, 0, -1):
            row = self._node_row(tuple(prefix[-length:]))
            if row is not None:
                yield f"order-{length}", length != depth, row
        row = self._node_row(START)
        if row is not None:
            yield "start", True, row


_MISSING = object()


def _checked_prefix(prefix: Sequence[int], vocabulary: Vocabulary) -> tuple[int, ...]:
    prefix = tuple(prefix)
    n = len(vocabulary)
    for node in prefix:
        if not 0 <= node < n:
            raise UnknownNodeError(f"unknown node id {node}")
    return prefix


def query_distribution(
    predictor: Predictor,
    prefix: Sequence[int],
    fallback: FallbackPolicy | None,
) -> PredictionDistribution:
    """First row of the predictor's back-off chain, policy tier last."""
    prefix = _checked_prefix(prefix, predictor.vocabulary)
    for provenance, is_fallback, row in predictor.candidate_rows(prefix):
        return PredictionDistribution(dict(row), provenance, is_fallback)
    if fallback is not None:
        return PredictionDistribution(dict(fallback.smoothed_row()), "smoothed", True)
    raise MissingStateError(
        f"no model row for prefix {prefix!r} and no fallback policy supplied"
    )


def next_element_distribution(
    model: MultiOrderModel,
    prefix: Sequence[int],
    fallback: FallbackPolicy | None = None,
) -> PredictionDistribution:
    """Distribution over the next node (or termination) given a prefix."""
    return query_distribution(ModelPredictor(model), prefix, fallback)


def _score_target(
    predictor: Predictor,
    prefix: tuple[int, ...],
    target: Target,
    fallback: FallbackPolicy | None,
) -> tuple[float, str, bool] | None:
    """Probability of the true target from the first tier that assigns it
    positive mass; None when no tier does (an infinite-loss sample)."""
    for provenance, is_fallback, row in predictor.candidate_rows(prefix):
        q = row.get(target, 0.0)
        if q > 0.0:
            return q, provenance, is_fallback
        if fallback is None:
            return None
    if fallback is not None:
        q = fallback.smoothed_row().get(target, 0.0)
        if q > 0.0:
            return q, "smoothed", True
    return None


@dataclass(frozen=True)
class EvaluationReport:
    """Aggregate multi-prefix cross-entropy in bits.

    Every target position contributes total weight one (times its
    observation count); ``loss_bits`` is infinite when any query found no
    positive probability for its true target, with the affected query count
    in ``n_infinite``.
    """

    loss_bits: float
    n_targets: int
    n_queries: int
    n_fallbacks: int
    n_infinite: int


def _target_queries(
    nodes: tuple[int, ...], max_prefix: int
) -> Iterator[tuple[Target, list[tuple[int, ...]]]]:
    l = len(nodes)
    yield nodes[0], [()]
    for pos in range(2, l + 2):
        target: Target = nodes[pos - 1] if pos <= l else END
        history_len = pos - 1
        n_queries = min(max_prefix, history_len)
        prefixes = [
            nodes[history_len - j : history_len] for j in range(1, n_queries + 1)
        ]
        yield target, prefixes


def _evaluate_chunk(
    chunk: Sequence[tuple[tuple[int, ...], int]],
    predictor: Predictor,
    max_prefix: int,
    fallback: FallbackPolicy | None,
) -> list[tuple[float, int, int, int, int]]:
    out = []
    for nodes, freq in chunk:
        target_means: list[float] = []
        n_targets = n_queries = n_fallbacks = n_infinite = 0
        for target, prefixes in _target_queries(nodes, max_prefix):
            n_targets += 1
            losses: list[float] = []
            for prefix in prefixes:
                n_queries += 1
                scored = _score_target(predictor, prefix, target, fallback)
                if scored is None:
                    n_infinite += 1
                    losses.append(math.inf)
                else:
                    q, _, is_fallback = scored
                    if is_fallback:
                        n_fallbacks += 1
                    losses.append(-math.log2(q))
            target_means.append(math.fsum(losses) / len(losses))
        out.append(
            (
                freq * math.fsum(target_means),
                freq * n_targets,
                freq * n_queries,
                freq * n_fallbacks,
                freq * n_infinite,
            )
        )
    return out


def cross_entropy_eval(
    predictor: Predictor,
    validation: PathMultiset,
    max_prefix: int = 6,
    fallback: FallbackPolicy | None = None,
    workers: int = 1,
) -> EvaluationReport:
    """Weighted mean -log2 q(true target) over all targets of all
    observations, including termination targets.

    Each target is scored once per prefix length 1..min(max_prefix,
    available history) -- the first position uses the empty prefix -- and
    its per-length weights sum to one.  Per-observation terms are reduced in
    corpus order, so results do not depend on the worker count.
    """
    if max_prefix < 1:
        raise ValueError(f"max_prefix must be >= 1, got {max_prefix}")
    items = [(p.nodes, p.frequency) for p in validation.paths]
    parts = map_chunks(
        partial(
            _evaluate_chunk,
            predictor=predictor,
            max_prefix=max_prefix,
            fallback=fallback,
        ),
        items,
        workers,
    )
    loss_terms: list[float] = []
    n_targets = n_queries = n_fallbacks = n_infinite = 0
    for part in parts:
        for loss, targets, queries, fallbacks, infinite in part:
            loss_terms.append(loss)
            n_targets += targets
            n_queries += queries
            n_fallbacks += fallbacks
            n_infinite += infinite
    loss_bits = math.fsum(loss_terms) / n_targets if n_targets else math.nan
    return EvaluationReport(loss_bits, n_targets, n_queries, n_fallbacks, n_infinite)


@dataclass(frozen=True)
class SampledPath:
    """A generated first-order node sequence; ``truncated`` marks walks cut
    off by the length guard before reaching the terminal state."""

    nodes: tuple[int, ...]
    truncated: bool

    def as_path(self) -> Path:
        return Path(self.nodes, 1)


class PathSampler:
    """Reusable sampler over a fitted model with per-row cumulative tables."""

    def __init__(self, model: MultiOrderModel, max_length: int = 10_000):
        if START not in model.rows:
            raise MissingStateError("model has no start row; nothing to sample")
        if max_length < 1:
            raise ValueError("max_length must be >= 1")
        self.model = model
        self.max_length = max_length
        self._tables: dict[object, tuple[list, list[float]]] = {}

    def _table(self, state) -> tuple[list, list[float]]:
        table = self._tables.get(state)
        if table is None:
            row = self.model.rows[state]
            targets = list(row)
            cumulative = []
            acc = 0.0
            for t in targets:
                acc += row[t]
                cumulative.append(acc)
            table = (targets, cumulative)
            self._tables[state] = table
        return table

    def sample(self, rng: random.Random) -> SampledPath:
        state = START
        nodes: list[int] = []
        while True:
            targets, cumulative = self._table(state)
            draw = rng.random() * cumulative[-1]
            target = targets[bisect_right(cumulative, draw)]
            if target == END:
                return SampledPath(tuple(nodes), truncated=False)
            nodes.append(target[-1])
            if len(nodes) >= self.max_length:
                return SampledPath(tuple(nodes), truncated=True)
            state = target


def sample_path(
    model: MultiOrderModel, rng: random.Random, max_length: int = 10_000
) -> SampledPath:
    """Walk from the start state until termination or the length guard."""
    return PathSampler(model, max_length).sample(rng)


def sample_corpus(
    model: MultiOrderModel,
    n_samples: int,
    rng: random.Random,
    max_length: int = 10_000,
) -> tuple[PathMultiset, int]:
    """Generate ``n_samples`` paths; returns the compacted multiset (in
    first-sampled order) and the number of truncated samples."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    sampler = PathSampler(model, max_length)
    merged: dict[tuple[int, ...], int] = {}
    truncated = 0
    for _ in range(n_samples):
        sampled = sampler.sample(rng)
        truncated += sampled.truncated
        merged[sampled.nodes] = merged.get(sampled.nodes, 0) + 1
    paths = tuple(Path(nodes, freq) for nodes, freq in merged.items())
    return PathMultiset(paths, model.vocabulary), truncated


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]
    auc: float
    n_positives: int
    n_negatives: int


def _ranked_distinct(s: PathMultiset) -> list[tuple[int, ...]]:
    counts: dict[tuple[int, ...], int] = {}
    for p in s.paths:
        counts[p.nodes] = counts.get(p.nodes, 0) + p.frequency
    return sorted(counts, key=lambda nodes: (-counts[nodes], nodes))


def roc_from_ranking(
    ranked: Sequence[tuple[int, ...]],
    validation: PathMultiset,
    top_fraction: float = 0.10,
) -> RocCurve:
    """ROC of a ranked path list against the most frequent validation paths.

    Positives are the top ``top_fraction`` distinct validation paths by
    frequency (ties broken lexicographically, at least one positive); each
    rank threshold predicts its prefix of the ranking as positive.  The
    curve is completed to (1, 1), treating never-ranked paths as ranked
    last.
    """
    if not 0.0 < top_fraction < 1.0:
        raise ValueError(f"top_fraction must be in (0, 1), got {top_fraction}")
    universe = _ranked_distinct(validation)
    n_positive = max(1, int(len(universe) * top_fraction))
    positives = set(universe[:n_positive])
    n_negative = len(universe) - n_positive

    validation_paths = set(universe)
    points: list[tuple[float, float]] = [(0.0, 0.0)]
    tp = fp = 0
    seen: set[tuple[int, ...]] = set()
    for nodes in ranked:
        if nodes in seen or nodes not in validation_paths:
            continue
        seen.add(nodes)
        if nodes in positives:
            tp += 1
        else:
            fp += 1
        points.append(
            (
                fp / n_negative if n_negative else 0.0,
                tp / n_positive,
            )
        )
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))

    auc = math.fsum(
        (x1 - x0) * (y0 + y1) / 2.0
        for (x0, y0), (x1, y1) in zip(points, points[1:])
    )
    return RocCurve(tuple(points), auc, n_positive, n_negative)


def top_path_roc(
    model: MultiOrderModel,
    validation: PathMultiset,
    rng: random.Random,
    n_samples: int | None = None,
    top_fraction: float = 0.10,
    max_length: int = 10_000,
) -> RocCurve:
    """Generate paths from the model, rank them by sampled frequency and
    score the ranking against the top validation paths.

    ``n_samples`` defaults to 10x the validation observation count.
    """
    if n_samples is None:
        n_samples = 10 * validation.total_observations
    generated, _ = sample_corpus(model, n_samples, rng, max_length)
    ranking = _ranked_distinct(generated)
    return roc_from_ranking(ranking, validation, top_fraction)
