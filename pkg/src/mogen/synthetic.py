"""Synthetic corpora from planted-order generative processes.

Used by the test suite (order recovery, held-out loss ordering, scaling
checks) and handy for demos: build a random topology, plant a generative
model of a known maximum order on it, and sample a corpus from that model.
"""

from __future__ import annotations

import random

from .model import END, START, MultiOrderCounts, MultiOrderModel, State, normalize
from .paths import NetworkTopology, PathMultiset, Vocabulary
from .prediction import sample_corpus


def random_topology(
    n_nodes: int, out_degree: int, rng: random.Random
) -> tuple[NetworkTopology, Vocabulary]:
    """Random digraph where every node has ``out_degree`` distinct
    successors (no self-loops)."""
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes")
    if not 1 <= out_degree <= n_nodes - 1:
        raise ValueError("out_degree must be in [1, n_nodes - 1]")
    edges = set()
    for i in range(n_nodes):
        others = [j for j in range(n_nodes) if j != i]
        for j in rng.sample(others, out_degree):
            edges.add((i, j))
    vocab = Vocabulary(f"v{i}" for i in range(n_nodes))
    return NetworkTopology(n_nodes, frozenset(edges)), vocab


def _peaked_weights(n: int, rng: random.Random, concentration: float) -> list[int]:
    """Integer weights with Dirichlet-like variability; low concentration
    gives strongly peaked rows, which makes planted orders detectable."""
    raw = [rng.gammavariate(concentration, 1.0) for _ in range(n)]
    total = sum(raw)
    return [1 + int(1000 * w / total) for w in raw]


def planted_model(
    topo: NetworkTopology,
    vocabulary: Vocabulary,
    k: int,
    rng: random.Random,
    stop_weight: float = 0.12,
    concentration: float = 0.3,
    absorbing_fraction: float = 0.0,
) -> MultiOrderModel:
    """A random generative model of maximum order ``k`` on the topology.

    Every walk of length <= k over the topology receives a transition row
    with randomly peaked continuation weights plus a termination weight, so
    conditional distributions genuinely depend on the full k-node memory.
    With ``absorbing_fraction`` > 0, that share of states terminates almost
    surely instead, giving paths strongly state-dependent endpoints.
    """
    if k < 1:
        raise ValueError(f"order must be >= 1, got {k}")
    succ = topo.out_neighbors()
    rows: dict[State, dict[State, int]] = {}

    start_weights = _peaked_weights(topo.node_count, rng, concentration)
    rows[START] = {(i,): w for i, w in enumerate(start_weights)}

    stack: list[tuple[int, ...]] = [(i,) for i in range(topo.node_count)]
    while stack:
        state = stack.pop()
        neighbors = succ[state[-1]]
        if len(state) < k:
            extensions = [state + (j,) for j in neighbors]
        else:
            extensions = [state[1:] + (j,) for j in neighbors]
        weights = _peaked_weights(len(extensions), rng, concentration)
        row: dict[State, int] = dict(zip(extensions, weights))
        if rng.random() < absorbing_fraction:
            row[END] = 20 * sum(weights)
        else:
            row[END] = 1 + int(stop_weight * sum(weights))
        rows[state] = row
        if len(state) < k:
            stack.extend(state + (j,) for j in neighbors)

    counts = MultiOrderCounts(
        max_order=k,
        rows=rows,
        vocabulary=vocabulary,
        total_observations=0,
        edges=topo.edges,
    )
    return normalize(counts)


def planted_corpus(
    n_nodes: int,
    out_degree: int,
    order: int,
    n_paths: int,
    seed: int,
    stop_weight: float = 0.12,
    concentration: float = 0.3,
    absorbing_fraction: float = 0.0,
    max_length: int = 60,
) -> PathMultiset:
    """Sample ``n_paths`` observations from a freshly planted order-k model."""
    rng = random.Random(seed)
    topo, vocab = random_topology(n_nodes, out_degree, rng)
    model = planted_model(
        topo, vocab, order, rng, stop_weight, concentration, absorbing_fraction
    )
    corpus, _ = sample_corpus(model, n_paths, rng, max_length)
    return corpus
