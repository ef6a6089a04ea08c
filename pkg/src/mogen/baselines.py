"""Probabilistic baseline predictors: RND, NET(k) and AKOM(k).

All three expose the predictor protocol from :mod:`mogen.prediction`, so
they are evaluated by the same multi-prefix machinery as the multi-order
model.  None of them models path termination; termination targets only
receive mass through the shared fallback policy's smoothing tier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .paths import PathMultiset, Vocabulary
from .prediction import (
    FallbackPolicy,
    PredictionDistribution,
    Target,
    query_distribution,
)


def _normalized(counts: dict[int, int]) -> dict[Target, float]:
    total = sum(counts.values())
    return {node: c / total for node, c in sorted(counts.items())}


@dataclass
class FrequencyBaseline:
    """RND: relative frequency of nodes in the training observations."""

    method = "rnd"

    vocabulary: Vocabulary
    node_counts: dict[int, int]
    _row: dict[Target, float] = field(init=False, repr=False)

    def __post_init__(self):
        self._row = _normalized(self.node_counts)

    def distribution(self) -> dict[Target, float]:
        return self._row

    def candidate_rows(self, prefix: tuple[int, ...]):
        yield "frequency", False, self._row


def fit_rnd(train: PathMultiset) -> FrequencyBaseline:
    if len(train.paths) == 0:
        raise ValueError("cannot fit on an empty multiset")
    counts: dict[int, int] = {}
    for p in train.paths:
        for node in p.nodes:
            counts[node] = counts.get(node, 0) + p.frequency
    return FrequencyBaseline(train.vocabulary, counts)


@dataclass
class HigherOrderNetwork:
    """NET(k): memoryless random walk between k-th order nodes.

    States are sliding windows of k nodes; a prefix shorter than k, or an
    unseen window, has no row here and defers to the fallback policy.
    """

    method = "net"

    order: int
    vocabulary: Vocabulary
    window_counts: dict[tuple[int, ...], dict[int, int]]
    _rows: dict[tuple[int, ...], dict[Target, float]] = field(
        init=False, repr=False, default_factory=dict
    )

    def row(self, window: tuple[int, ...]) -> dict[Target, float] | None:
        cached = self._rows.get(window)
        if cached is None:
            counts = self.window_counts.get(window)
            if counts is None:
                return None
            cached = _normalized(counts)
            self._rows[window] = cached
        return cached

    def candidate_rows(self, prefix: tuple[int, ...]):
        if len(prefix) >= self.order:
            row = self.row(tuple(prefix[-self.order :]))
            if row is not None:
                yield f"order-{self.order}", False, row


def fit_net(train: PathMultiset, k: int) -> HigherOrderNetwork:
    """Count transitions between consecutive k-node windows; paths shorter
    than k+1 contribute nothing."""
    if k < 1:
        raise ValueError(f"order must be >= 1, got {k}")
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    for p in train.paths:
        nodes = p.nodes
        for i in range(len(nodes) - k):
            window = nodes[i : i + k]
            row = counts.get(window)
            if row is None:
                counts[window] = row = {}
            nxt = nodes[i + k]
            row[nxt] = row.get(nxt, 0) + p.frequency
    return HigherOrderNetwork(k, train.vocabulary, counts)


@dataclass
class AkomModel:
    """All-k-order Markov chains with strict longest-suffix back-off.

    Holds one suffix table per order k..1 plus the training node-frequency
    distribution, which answers empty prefixes and complete misses.
    """

    method = "akom"

    order: int
    vocabulary: Vocabulary
    tables: dict[int, dict[tuple[int, ...], dict[int, int]]]
    node_counts: dict[int, int]
    _rows: dict[tuple[int, ...], dict[Target, float]] = field(
        init=False, repr=False, default_factory=dict
    )
    _frequency_row: dict[Target, float] = field(init=False, repr=False)

    def __post_init__(self):
        self._frequency_row = _normalized(self.node_counts)

    def suffix_row(self, suffix: tuple[int, ...]) -> dict[Target, float] | None:
        cached = self._rows.get(suffix)
        if cached is None:
            counts = self.tables.get(len(suffix), {}).get(suffix)
            if counts is None:
                return None
            cached = _normalized(counts)
            self._rows[suffix] = cached
        return cached

    def candidate_rows(self, prefix: tuple[int, ...]):
        deepest = min(len(prefix), self.order)
        for length in range(deepest, 0, -1):
            row = self.suffix_row(tuple(prefix[-length:]))
            if row is not None:
                yield f"order-{length}", length != deepest, row
        # the paper's modification: empty prefix (and full misses) answer
        # with training node frequencies
        yield "frequency", len(prefix) > 0, self._frequency_row


def predict_net(
    net: HigherOrderNetwork,
    prefix: tuple[int, ...] | list[int],
    fallback: FallbackPolicy | None = None,
) -> PredictionDistribution:
    """Next-element distribution from the k-th order window row."""
    return query_distribution(net, prefix, fallback)


def predict_akom(
    akom: AkomModel,
    prefix: tuple[int, ...] | list[int],
    fallback: FallbackPolicy | None = None,
) -> PredictionDistribution:
    """Longest-suffix prediction, backing off to node frequencies."""
    return query_distribution(akom, prefix, fallback)


def fit_akom(train: PathMultiset, k: int) -> AkomModel:
    if k < 1:
        raise ValueError(f"order must be >= 1, got {k}")
    tables: dict[int, dict[tuple[int, ...], dict[int, int]]] = {
        j: {} for j in range(1, k + 1)
    }
    node_counts: dict[int, int] = {}
    for p in train.paths:
        nodes = p.nodes
        for node in nodes:
            node_counts[node] = node_counts.get(node, 0) + p.frequency
        for j in range(1, k + 1):
            table = tables[j]
            for i in range(j, len(nodes)):
                suffix = nodes[i - j : i]
                row = table.get(suffix)
                if row is None:
                    table[suffix] = row = {}
                nxt = nodes[i]
                row[nxt] = row.get(nxt, 0) + p.frequency
    return AkomModel(k, train.vocabulary, tables, node_counts)
