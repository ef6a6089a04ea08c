"""Multi-order generative model: sparse count blocks, row-normalized
transition structure, and path/corpus likelihoods.

States are either the initial marker ``START``, a tuple of 1..K node ids
(a memory prefix or sliding window), or the terminal marker ``END``.  A
path v1..vl of length l expands to the state sequence

    START -> (v1) -> (v1,v2) -> ... -> (v_{l-K+1},..,v_l) -> END

with exactly l+1 transitions, independent of the maximum order K.  Counts
are plain integers and merge exactly under chunked parallel fitting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import partial
from typing import IO, Iterator, Sequence, Union

from .errors import UnknownNodeError, UnseenTransitionError
from .parallel import ChunkPool
from .paths import Path, PathMultiset, Vocabulary

START = "*"
END = "†"

State = Union[str, tuple[int, ...]]

MODEL_FORMAT = "multi-order-model"
MODEL_VERSION = 1


def state_sort_key(state: State):
    """Canonical ordering: START, then prefixes lexicographically, then END."""
    if state == START:
        return (0, ())
    if state == END:
        return (2, ())
    return (1, state)


def expand_path(nodes: Sequence[int], k: int) -> list[State]:
    """State sequence of a path under maximum order ``k``.

    Growing prefixes up to length min(k, l), then for l > k the sliding
    windows of length k; l + 2 states in total.
    """
    if k < 1:
        raise ValueError(f"maximum order must be >= 1, got {k}")
    l = len(nodes)
    if l == 0:
        raise ValueError("cannot expand an empty path")
    states: list[State] = [START]
    for i in range(1, min(k, l) + 1):
        states.append(tuple(nodes[:i]))
    for i in range(k + 1, l + 1):
        states.append(tuple(nodes[i - k : i]))
    states.append(END)
    return states


@dataclass
class MultiOrderCounts:
    """Sparse block count structure including initial/terminal transitions."""

    max_order: int
    rows: dict[State, dict[State, int]]
    vocabulary: Vocabulary
    total_observations: int
    edges: frozenset[tuple[int, int]]

    def count(self, source: State, target: State) -> int:
        return self.rows.get(source, {}).get(target, 0)

    @property
    def n_transitions(self) -> int:
        return sum(len(row) for row in self.rows.values())

    def start_outflow(self) -> int:
        return sum(self.rows.get(START, {}).values())

    def terminal_inflow(self) -> int:
        return sum(row.get(END, 0) for row in self.rows.values())


@dataclass
class MultiOrderModel:
    """Row-stochastic transition structure obtained from a count table."""

    max_order: int
    rows: dict[State, dict[State, float]]
    counts: MultiOrderCounts

    @property
    def vocabulary(self) -> Vocabulary:
        return self.counts.vocabulary

    @property
    def total_observations(self) -> int:
        return self.counts.total_observations

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self.counts.edges

    @property
    def n_states(self) -> int:
        return len(self.rows)


def _count_chunk(chunk: Sequence[tuple[tuple[int, ...], int]], k: int):
    rows: dict[State, dict[State, int]] = {}
    edges: set[tuple[int, int]] = set()
    for nodes, freq in chunk:
        states = expand_path(nodes, k)
        prev = states[0]
        for cur in states[1:]:
            row = rows.get(prev)
            if row is None:
                rows[prev] = row = {}
            row[cur] = row.get(cur, 0) + freq
            prev = cur
        for pair in zip(nodes, nodes[1:]):
            edges.add(pair)
    return rows, edges


def corpus_items(s: PathMultiset) -> list[tuple[tuple[int, ...], int]]:
    """The plain (nodes, frequency) pairs that chunk workers consume."""
    return [(p.nodes, p.frequency) for p in s.paths]


def _fit_counts_pooled(
    pool: ChunkPool, k: int, vocabulary: Vocabulary, total_observations: int
) -> MultiOrderCounts:
    # integer addition commutes, so chunk results can merge in completion order
    rows: dict[State, dict[State, int]] = {}
    edges: set[tuple[int, int]] = set()
    for other_rows, other_edges in pool.run(partial(_count_chunk, k=k), ordered=False):
        if not rows:
            rows, edges = other_rows, other_edges
            continue
        for src, row in other_rows.items():
            acc = rows.get(src)
            if acc is None:
                rows[src] = acc = {}
            for dst, c in row.items():
                acc[dst] = acc.get(dst, 0) + c
        edges |= other_edges
    return MultiOrderCounts(
        max_order=k,
        rows=rows,
        vocabulary=vocabulary,
        total_observations=total_observations,
        edges=frozenset(edges),
    )


def fit_counts(s: PathMultiset, k: int, workers: int = 1) -> MultiOrderCounts:
    """Count every transition of every expanded path, frequency-weighted.

    With ``workers > 1`` the paths are partitioned into chunks counted in
    separate processes and merged by integer addition; the result is
    identical to a single-worker fit regardless of chunking.
    """
    if k < 1:
        raise ValueError(f"maximum order must be >= 1, got {k}")
    with ChunkPool(corpus_items(s), workers) as pool:
        return _fit_counts_pooled(pool, k, s.vocabulary, s.total_observations)


def normalize(counts: MultiOrderCounts) -> MultiOrderModel:
    """Row-normalize counts into transition probabilities.

    Rows with zero total are absent, never zero-filled; targets are stored
    in canonical state order so downstream iteration (and sampling) does not
    depend on how the counts were assembled.
    """
    if not counts.rows:
        raise ValueError("cannot normalize an empty count table")
    prob_rows: dict[State, dict[State, float]] = {}
    for src, row in counts.rows.items():
        total = sum(row.values())
        prob_rows[src] = {
            dst: row[dst] / total for dst in sorted(row, key=state_sort_key)
        }
    return MultiOrderModel(max_order=counts.max_order, rows=prob_rows, counts=counts)


def fit_model(s: PathMultiset, k: int, workers: int = 1) -> MultiOrderModel:
    """Convenience: :func:`fit_counts` followed by :func:`normalize`."""
    return normalize(fit_counts(s, k, workers=workers))


def _check_nodes(nodes: Sequence[int], vocabulary: Vocabulary) -> None:
    n = len(vocabulary)
    for node in nodes:
        if not 0 <= node < n:
            raise UnknownNodeError(f"unknown node id {node}")


def path_factor_probabilities(
    model: MultiOrderModel, path: Path | Sequence[int]
) -> list[float]:
    """The l+1 transition probabilities entering a path's likelihood.

    Raises :class:`UnseenTransitionError` when a required transition is
    absent, flagging whether it is structurally impossible under the
    training topology or merely unobserved.
    """
    nodes = path.nodes if isinstance(path, Path) else tuple(path)
    _check_nodes(nodes, model.vocabulary)
    states = expand_path(nodes, model.max_order)
    factors = []
    rows = model.rows
    prev = states[0]
    for cur in states[1:]:
        prob = rows.get(prev, {}).get(cur)
        if prob is None:
            # the new edge implied by a node transition is (src[-1], dst[-1]);
            # start/terminal transitions are never structural zeros
            structural = False
            if isinstance(prev, tuple) and isinstance(cur, tuple):
                structural = (prev[-1], cur[-1]) not in model.edges
            raise UnseenTransitionError(prev, cur, structural)
        factors.append(prob)
        prev = cur
    return factors


def path_log_likelihood(
    model: MultiOrderModel,
    path: Path | Sequence[int],
    on_unseen: str = "raise",
) -> float:
    """Natural-log probability of one path; exactly l+1 factors.

    ``on_unseen="neginf"`` returns ``-inf`` instead of raising when the
    path needs a transition the model does not contain.
    """
    try:
        return math.fsum(math.log(p) for p in path_factor_probabilities(model, path))
    except UnseenTransitionError:
        if on_unseen == "neginf":
            return -math.inf
        raise


def _likelihood_chunk(
    chunk: Sequence[tuple[tuple[int, ...], int]],
    model: MultiOrderModel,
    on_unseen: str,
) -> list[float]:
    return [
        freq * path_log_likelihood(model, nodes, on_unseen=on_unseen)
        for nodes, freq in chunk
    ]


def counts_log_likelihood(counts: MultiOrderCounts) -> float:
    """In-sample log-likelihood of the fitting corpus under its own
    row-normalized model.

    Every observed transition event contributes ln(count/row_total), so the
    sum collapses to a closed form over the count table; equal to
    :func:`dataset_log_likelihood` of the fitting corpus up to float
    rounding, without a second pass over the paths.
    """
    terms = []
    for row in counts.rows.values():
        total = sum(row.values())
        terms.extend(n * math.log(n / total) for n in row.values())
    return math.fsum(terms)


def _likelihood_pooled(pool: ChunkPool, model: MultiOrderModel, on_unseen: str) -> float:
    parts = pool.run(partial(_likelihood_chunk, model=model, on_unseen=on_unseen))
    terms: list[float] = []
    for part in parts:
        terms.extend(part)
    return math.fsum(terms)


def dataset_log_likelihood(
    model: MultiOrderModel,
    s: PathMultiset,
    workers: int = 1,
    on_unseen: str = "raise",
) -> float:
    """Frequency-weighted sum of path log-likelihoods over the multiset.

    Per-path terms are computed (possibly in parallel) and summed in corpus
    order with exact float summation, so the result does not depend on the
    worker count.
    """
    with ChunkPool(corpus_items(s), workers) as pool:
        return _likelihood_pooled(pool, model, on_unseen)


def _state_to_doc(state: State):
    if isinstance(state, tuple):
        return list(state)
    return state


def _state_from_doc(doc) -> State:
    if isinstance(doc, list):
        return tuple(doc)
    if doc in (START, END):
        return doc
    raise ValueError(f"malformed state in model document: {doc!r}")


def model_to_document(model: MultiOrderModel) -> dict:
    """Self-describing dict with exact integer counts; probabilities are
    recomputed on load to avoid float drift."""
    counts = model.counts
    transitions = []
    for src in sorted(counts.rows, key=state_sort_key):
        row = counts.rows[src]
        for dst in sorted(row, key=state_sort_key):
            transitions.append([_state_to_doc(src), _state_to_doc(dst), row[dst]])
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "max_order": model.max_order,
        "total_observations": counts.total_observations,
        "nodes": list(counts.vocabulary.labels),
        "edges": sorted(list(e) for e in counts.edges),
        "transitions": transitions,
    }


def model_from_document(doc: dict) -> MultiOrderModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a multi-order model document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model document version {doc.get('version')!r}")
    vocabulary = Vocabulary(doc["nodes"])
    rows: dict[State, dict[State, int]] = {}
    for src_doc, dst_doc, count in doc["transitions"]:
        src = _state_from_doc(src_doc)
        dst = _state_from_doc(dst_doc)
        rows.setdefault(src, {})[dst] = int(count)
    counts = MultiOrderCounts(
        max_order=int(doc["max_order"]),
        rows=rows,
        vocabulary=vocabulary,
        total_observations=int(doc["total_observations"]),
        edges=frozenset((int(i), int(j)) for i, j in doc["edges"]),
    )
    return normalize(counts)


def save_model(model: MultiOrderModel, destination: str | IO[str]) -> None:
    """Write the versioned JSON document; byte-stable for identical counts."""
    doc = model_to_document(model)
    if isinstance(destination, str):
        with open(destination, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"))
            fh.write("\n")
    else:
        json.dump(doc, destination, separators=(",", ":"))
        destination.write("\n")


def load_model(source: str | IO[str]) -> MultiOrderModel:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    return model_from_document(doc)


def iter_complete_paths(
    model: MultiOrderModel, probability_floor: float = 0.0
) -> Iterator[tuple[tuple[int, ...], float]]:
    """Enumerate complete paths (START to END) with their probabilities.

    Depth-first; branches whose running probability drops below
    ``probability_floor`` are pruned.  Terminates on models whose reachable
    state graph is acyclic; use a positive floor otherwise.
    """
    rows = model.rows
    if START not in rows:
        return

    stack: list[tuple[State, tuple[int, ...], float]] = [(START, (), 1.0)]
    while stack:
        state, nodes, prob = stack.pop()
        row = rows.get(state)
        if row is None:
            continue
        for target in reversed(list(row)):
            p = prob * row[target]
            if p < probability_floor:
                continue
            if target == END:
                yield nodes, p
            else:
                stack.append((target, nodes + (target[-1],), p))
