"""Path corpora: ingestion, validation, splitting and summary statistics.

A corpus is a frequency-weighted multiset of node sequences observed in a
network.  Nodes are interned into a vocabulary of dense integer ids in
first-appearance order, which keeps every downstream matrix and count table
deterministic for a given input file.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import NgramParseError, UnknownNodeError


class Vocabulary:
    """Bijective mapping between node labels and dense ids 0..n-1."""

    __slots__ = ("_labels", "_index")

    def __init__(self, labels: Iterable[str] = ()):
        self._labels: list[str] = []
        self._index: dict[str, int] = {}
        for label in labels:
            self.add(label)

    def add(self, label: str) -> int:
        """Return the id of ``label``, interning it if new."""
        node_id = self._index.get(label)
        if node_id is None:
            node_id = len(self._labels)
            self._index[label] = node_id
            self._labels.append(label)
        return node_id

    def id(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownNodeError(f"unknown node label {label!r}") from None

    def label(self, node_id: int) -> str:
        if not 0 <= node_id < len(self._labels):
            raise UnknownNodeError(f"unknown node id {node_id}")
        return self._labels[node_id]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._labels == other._labels

    def __repr__(self) -> str:
        return f"Vocabulary({len(self)} nodes)"


@dataclass(frozen=True)
class Path:
    """One distinct node sequence together with its observation count."""

    nodes: tuple[int, ...]
    frequency: int = 1

    def __post_init__(self):
        if len(self.nodes) < 1:
            raise ValueError("a path must contain at least one node")
        if self.frequency < 1:
            raise ValueError("path frequency must be a positive integer")

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class PathMultiset:
    """A multiset of paths sharing one vocabulary.

    ``total_observations`` counts paths with multiplicity (a path with
    frequency f contributes f observations); ``max_length`` is the longest
    path present.
    """

    paths: tuple[Path, ...]
    vocabulary: Vocabulary
    total_observations: int = field(init=False)
    max_length: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(
            self, "total_observations", sum(p.frequency for p in self.paths)
        )
        object.__setattr__(
            self, "max_length", max((len(p) for p in self.paths), default=0)
        )

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[Path]:
        return iter(self.paths)

    @classmethod
    def from_sequences(
        cls,
        sequences: Iterable[tuple[Iterable[str], int]],
        vocabulary: Vocabulary | None = None,
    ) -> "PathMultiset":
        """Build a multiset from ``(labels, frequency)`` pairs.

        When no vocabulary is given, one is created in first-appearance
        order.
        """
        vocab = vocabulary if vocabulary is not None else Vocabulary()
        paths = []
        for labels, frequency in sequences:
            if vocabulary is None:
                nodes = tuple(vocab.add(lbl) for lbl in labels)
            else:
                nodes = tuple(vocab.id(lbl) for lbl in labels)
            paths.append(Path(nodes, frequency))
        return cls(tuple(paths), vocab)

    def labels_of(self, path: Path) -> tuple[str, ...]:
        return tuple(self.vocabulary.label(n) for n in path.nodes)

    def compacted(self) -> "PathMultiset":
        """Merge identical node sequences, summing frequencies.

        Entry order follows first appearance, so the result is deterministic.
        """
        merged: dict[tuple[int, ...], int] = {}
        for p in self.paths:
            merged[p.nodes] = merged.get(p.nodes, 0) + p.frequency
        paths = tuple(Path(nodes, freq) for nodes, freq in merged.items())
        return PathMultiset(paths, self.vocabulary)

    def to_ngram(self, separator: str = ",", weighted: bool = True) -> str:
        """Serialize back to ngram text; inverse of :func:`parse_ngram_file`.

        Unweighted output repeats each path ``frequency`` times.
        """
        lines = []
        for p in self.paths:
            tokens = [self.vocabulary.label(n) for n in p.nodes]
            if weighted:
                lines.append(separator.join(tokens + [str(p.frequency)]))
            else:
                lines.extend([separator.join(tokens)] * p.frequency)
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class NetworkTopology:
    """Binary directed adjacency structure over first-order nodes."""

    node_count: int
    edges: frozenset[tuple[int, int]]

    @property
    def link_count(self) -> int:
        return len(self.edges)

    def has_edge(self, source: int, target: int) -> bool:
        return (source, target) in self.edges

    def allows_path(self, nodes: Iterable[int]) -> bool:
        """True when every consecutive node pair is an edge."""
        nodes = tuple(nodes)
        return all((a, b) in self.edges for a, b in zip(nodes, nodes[1:]))

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 matrix, int64."""
        a = np.zeros((self.node_count, self.node_count), dtype=np.int64)
        for i, j in self.edges:
            a[i, j] = 1
        return a

    def out_neighbors(self) -> dict[int, list[int]]:
        succ: dict[int, list[int]] = {i: [] for i in range(self.node_count)}
        for i, j in sorted(self.edges):
            succ[i].append(j)
        return succ


@dataclass(frozen=True)
class CorpusStats:
    """Summary statistics of a corpus and its derived topology."""

    total_paths: int
    unique_paths: int
    mean_length: float
    median_length: float
    min_length: int
    max_length: int
    node_count: int
    link_count: int
    density: float


def parse_ngram_file(
    source: str | IO[str],
    separator: str = ",",
    weighted: bool = False,
) -> PathMultiset:
    """Parse ngram text into a :class:`PathMultiset`.

    Each non-empty line holds separator-joined node labels; with
    ``weighted=True`` the final field is a positive integer observation
    count.  Blank lines are skipped.  Raises :class:`NgramParseError` with
    the offending line number on malformed input and on empty files.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source.read().splitlines()

    vocab = Vocabulary()
    paths: list[Path] = []
    for line_number, raw in enumerate(lines, start=1):
        line = raw.strip("\r\n")
        if not line.strip():
            continue
        fields = line.split(separator)
        if weighted:
            if len(fields) < 2:
                raise NgramParseError(
                    "weighted line needs at least one node and a count", line_number
                )
            tokens, count_field = fields[:-1], fields[-1]
            try:
                frequency = int(count_field)
            except ValueError:
                raise NgramParseError(
                    f"count field {count_field!r} is not an integer", line_number
                ) from None
            if frequency < 1:
                raise NgramParseError(
                    f"count must be positive, got {frequency}", line_number
                )
        else:
            tokens, frequency = fields, 1
        if any(tok == "" for tok in tokens):
            raise NgramParseError("empty node token", line_number)
        nodes = tuple(vocab.add(tok) for tok in tokens)
        paths.append(Path(nodes, frequency))

    if not paths:
        raise NgramParseError("no paths found in input", line_number=0)
    return PathMultiset(tuple(paths), vocab)


def derive_topology(s: PathMultiset) -> NetworkTopology:
    """Edge set = exactly the consecutive node pairs observed in ``s``."""
    if len(s.paths) == 0:
        raise ValueError("cannot derive a topology from an empty multiset")
    edges = set()
    for p in s.paths:
        nodes = p.nodes
        for a, b in zip(nodes, nodes[1:]):
            edges.add((a, b))
    return NetworkTopology(len(s.vocabulary), frozenset(edges))


def split_train_validation(
    s: PathMultiset, train_fraction: float, seed: int
) -> tuple[PathMultiset, PathMultiset]:
    """Split at the level of individual observations.

    A path with frequency f contributes f independent observations; the
    split is deterministic for a fixed seed and both parts share the parent
    vocabulary.  Both parts are guaranteed non-empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    m = s.total_observations
    if m < 2:
        raise ValueError("need at least 2 observations to split")

    slots: list[int] = []
    for idx, p in enumerate(s.paths):
        slots.extend([idx] * p.frequency)
    rng = random.Random(seed)
    rng.shuffle(slots)
    n_train = min(max(int(m * train_fraction), 1), m - 1)

    train_counts = [0] * len(s.paths)
    val_counts = [0] * len(s.paths)
    for slot in slots[:n_train]:
        train_counts[slot] += 1
    for slot in slots[n_train:]:
        val_counts[slot] += 1

    def build(counts: list[int]) -> PathMultiset:
        kept = tuple(
            Path(s.paths[i].nodes, c) for i, c in enumerate(counts) if c > 0
        )
        return PathMultiset(kept, s.vocabulary)

    return build(train_counts), build(val_counts)


def summary_stats(s: PathMultiset) -> CorpusStats:
    """Frequency-weighted corpus statistics plus topology size and density."""
    if len(s.paths) == 0:
        raise ValueError("cannot summarize an empty multiset")
    m = s.total_observations
    lengths = sorted((len(p), p.frequency) for p in s.paths)
    mean_length = sum(l * f for l, f in lengths) / m

    # median over the expanded observation multiset
    def observation_at(k: int) -> int:
        acc = 0
        for l, f in lengths:
            acc += f
            if acc > k:
                return l
        raise AssertionError("median index out of range")

    if m % 2 == 1:
        median = float(observation_at(m // 2))
    else:
        median = (observation_at(m // 2 - 1) + observation_at(m // 2)) / 2

    topo = derive_topology(s)
    n = topo.node_count
    density = topo.link_count / (n * (n - 1)) if n > 1 else 0.0
    return CorpusStats(
        total_paths=m,
        unique_paths=len({p.nodes for p in s.paths}),
        mean_length=mean_length,
        median_length=median,
        min_length=min(l for l, _ in lengths),
        max_length=max(l for l, _ in lengths),
        node_count=n,
        link_count=topo.link_count,
        density=density,
    )
